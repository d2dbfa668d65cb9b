#include "rqe/resources.hpp"

#include "rqe/checksum.hpp"

namespace rqe {

Resources Resources::load(const std::string& dir)
{
    const std::string stop_path = dir + "/stopwords.txt";
    const std::string pos_path = dir + "/pos_lexicon.tsv";
    const std::string trig_path = dir + "/triggers.tsv";
    Resources r;
    r.stoplist = text::Stoplist::load(stop_path);
    r.lexicon = text::PosLexicon::load(pos_path);
    r.triggers = TriggerLexicon::load(trig_path);
    r.checksum = sha256_hex(sha256_file(stop_path) + sha256_file(pos_path) + sha256_file(trig_path));
    return r;
}

}  // namespace rqe

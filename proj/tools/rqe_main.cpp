#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "rqe/error.hpp"
#include "rqe/evaluation.hpp"
#include "rqe/ir_engine.hpp"
#include "rqe/numeric_format.hpp"
#include "rqe/qa_collection.hpp"
#include "rqe/qa_pipeline.hpp"
#include "rqe/resources.hpp"
#include "rqe/rqe_classifier.hpp"

#ifndef RQE_DEFAULT_RESOURCES
#define RQE_DEFAULT_RESOURCES "data/resources"
#endif

namespace {

using nlohmann::json;

struct CliConfig {
    std::string collection;
    std::string index;
    std::string model;
    std::string resources = RQE_DEFAULT_RESOURCES;
    rqe::PipelineConfig pipeline;
    bool json_output = false;
    bool verbose = false;
    bool force = false;
    std::uint64_t seed = 42;
};

const std::set<std::string> kConfigKeys{"collection", "index",     "model", "resources",
                                        "alpha",      "beta",      "n_max", "top_k",
                                        "threshold",  "c",         "fallback_to_ir",
                                        "filter_before_normalization", "output", "seed"};

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw rqe::Error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw rqe::Error("cannot write file: " + path);
    out << text;
    if (!out) throw rqe::Error("failed writing file: " + path);
}

void apply_config_file(const std::string& path, CliConfig& cfg)
{
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw rqe::ParseError(path + ": " + e.what());
    }
    if (!j.is_object()) throw rqe::ParseError(path + ": config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!kConfigKeys.contains(key)) throw rqe::ParseError(path + ": unknown config key '" + key + "'");
    }
    try {
        if (j.contains("collection")) cfg.collection = j["collection"].get<std::string>();
        if (j.contains("index")) cfg.index = j["index"].get<std::string>();
        if (j.contains("model")) cfg.model = j["model"].get<std::string>();
        if (j.contains("resources")) cfg.resources = j["resources"].get<std::string>();
        if (j.contains("alpha")) cfg.pipeline.alpha = j["alpha"].get<double>();
        if (j.contains("beta")) cfg.pipeline.beta = j["beta"].get<double>();
        if (j.contains("n_max")) cfg.pipeline.n_max = j["n_max"].get<std::size_t>();
        if (j.contains("top_k")) cfg.pipeline.top_k = j["top_k"].get<std::size_t>();
        if (j.contains("threshold")) cfg.pipeline.entailment_threshold = j["threshold"].get<double>();
        if (j.contains("c")) cfg.pipeline.c = j["c"].get<double>();
        if (j.contains("fallback_to_ir")) cfg.pipeline.fallback_to_ir = j["fallback_to_ir"].get<bool>();
        if (j.contains("filter_before_normalization")) {
            cfg.pipeline.filter_before_normalization = j["filter_before_normalization"].get<bool>();
        }
        if (j.contains("output")) {
            const auto out = j["output"].get<std::string>();
            if (out != "json" && out != "text") throw rqe::ParseError(path + ": output must be \"json\" or \"text\"");
            cfg.json_output = out == "json";
        }
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    } catch (const json::type_error& e) {
        throw rqe::ParseError(path + ": " + e.what());
    }
}

json effective_config(const CliConfig& cfg)
{
    return {
        {"collection", cfg.collection},
        {"index", cfg.index},
        {"model", cfg.model},
        {"resources", cfg.resources},
        {"alpha", cfg.pipeline.alpha},
        {"beta", cfg.pipeline.beta},
        {"n_max", cfg.pipeline.n_max},
        {"top_k", cfg.pipeline.top_k},
        {"threshold", cfg.pipeline.entailment_threshold},
        {"c", cfg.pipeline.c},
        {"fallback_to_ir", cfg.pipeline.fallback_to_ir},
        {"filter_before_normalization", cfg.pipeline.filter_before_normalization},
        {"output", cfg.json_output ? "json" : "text"},
        {"seed", cfg.seed},
    };
}

std::string require(const std::string& value, const char* what)
{
    if (value.empty()) throw rqe::InvalidInput(std::string("missing required path: ") + what);
    return value;
}

struct Loaded {
    rqe::Resources resources;
    rqe::Collection collection;
    rqe::InvertedIndex index;
    rqe::EntailmentModel model;
};

Loaded load_for_answering(const CliConfig& cfg)
{
    Loaded l{rqe::Resources::load(cfg.resources), rqe::load_collection(require(cfg.collection, "--collection")),
             rqe::InvertedIndex::load(require(cfg.index, "--index")), rqe::load_model(require(cfg.model, "--model"))};
    rqe::check_index_fresh(l.index, l.collection, l.resources, cfg.force);
    return l;
}

int cmd_build_index(const CliConfig& cfg, const std::string& output, bool strict)
{
    const auto resources = rqe::Resources::load(cfg.resources);
    const auto collection = rqe::load_collection(require(cfg.collection, "--collection"), rqe::LoadOptions{strict});
    const auto violations = rqe::validate_collection(collection, rqe::ValidationOptions{strict});
    if (!violations.empty()) {
        std::cerr << "error: invalid collection: " << violations.front().pair_id << ": " << violations.front().message
                  << " (" << violations.size() << " violation(s))\n";
        return 1;
    }
    const auto index = rqe::InvertedIndex::build(collection, resources);
    index.save(require(output, "--output"));
    if (cfg.json_output) {
        std::cout << json{{"documents", index.doc_count()},
                          {"vocabulary", index.vocabulary_size()},
                          {"avg_doc_length", index.avg_doc_length()},
                          {"checksum", index.checksum()}}
                         .dump()
                  << '\n';
    } else {
        std::cout << "N = " << index.doc_count() << '\n'
                  << "vocabulary = " << index.vocabulary_size() << '\n'
                  << "avg_dl = " << rqe::format_double(index.avg_doc_length()) << '\n'
                  << "wrote " << output << '\n';
    }
    return 0;
}

int cmd_train(const CliConfig& cfg, const std::string& pairs_path, const std::string& output, rqe::TrainConfig train)
{
    const auto resources = rqe::Resources::load(cfg.resources);
    const auto pairs = rqe::load_pair_dataset(require(pairs_path, "--pairs"));
    train.seed = cfg.seed;
    rqe::TrainReport report;
    const auto model = rqe::train(pairs, train, resources, &report);
    rqe::save_model(model, require(output, "--output"));
    if (cfg.json_output) {
        std::cout << json{{"pairs", pairs.size()},
                          {"epochs", report.epochs_run},
                          {"final_loss", report.final_loss},
                          {"training_accuracy", report.training_accuracy}}
                         .dump()
                  << '\n';
    } else {
        std::cout << "pairs = " << pairs.size() << '\n'
                  << "epochs = " << report.epochs_run << '\n'
                  << "final_loss = " << rqe::format_double(report.final_loss) << '\n'
                  << "training_accuracy = " << rqe::format_double(report.training_accuracy) << '\n'
                  << "wrote " << output << '\n';
    }
    return 0;
}

json metrics_json(const rqe::ClassificationMetrics& m)
{
    return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
            {"tp", m.true_positives}, {"fp", m.false_positives},  {"tn", m.true_negatives}, {"fn", m.false_negatives}};
}

int cmd_eval_rqe(const CliConfig& cfg, const std::string& pairs_path, int folds, rqe::TrainConfig train)
{
    const auto resources = rqe::Resources::load(cfg.resources);
    const auto pairs = rqe::load_pair_dataset(require(pairs_path, "--pairs"));
    if (folds > 0) {
        train.seed = cfg.seed;
        const auto cv = rqe::cross_validate(pairs, folds, train, resources);
        if (cfg.json_output) {
            std::cout << json{{"folds", folds}, {"fold_accuracy", cv.fold_accuracy}, {"mean_accuracy", cv.mean_accuracy},
                              {"pooled_accuracy", cv.pooled_accuracy}}
                             .dump()
                      << '\n';
        } else {
            for (std::size_t i = 0; i < cv.fold_accuracy.size(); ++i) {
                std::cout << "fold " << i + 1 << " accuracy = " << rqe::format_double(cv.fold_accuracy[i]) << '\n';
            }
            std::cout << "mean accuracy = " << rqe::format_double(cv.mean_accuracy) << '\n'
                      << "pooled accuracy = " << rqe::format_double(cv.pooled_accuracy) << '\n';
        }
        return 0;
    }
    const auto model = rqe::load_model(require(cfg.model, "--model"));
    const auto m = rqe::evaluate_classifier(model, pairs, resources);
    if (cfg.json_output) {
        std::cout << metrics_json(m).dump() << '\n';
    } else {
        std::cout << "accuracy = " << rqe::format_double(m.accuracy) << '\n'
                  << "precision = " << rqe::format_double(m.precision) << '\n'
                  << "recall = " << rqe::format_double(m.recall) << '\n'
                  << "f1 = " << rqe::format_double(m.f1) << '\n';
    }
    return 0;
}

int cmd_ask(const CliConfig& cfg, const std::string& question, bool with_explain)
{
    const auto l = load_for_answering(cfg);
    const auto result = rqe::answer(question, rqe::QAContext{l.collection, l.index, l.model, l.resources}, cfg.pipeline);
    if (result.answers.empty()) {
        if (cfg.json_output) {
            std::cout << json{{"answers", 0}, {"diagnostic", result.diagnostic}}.dump() << '\n';
        } else {
            std::cout << "no answer: " << result.diagnostic << '\n';
        }
        return 0;
    }
    int rank = 0;
    for (const auto& a : result.answers) {
        ++rank;
        if (cfg.json_output) {
            auto j = rqe::to_json(a, rank);
            if (with_explain) j["explanation"] = rqe::to_json(rqe::explain(a));
            std::cout << j.dump() << '\n';
            continue;
        }
        std::cout << rank << ". " << a.pair_id << "  hscore " << rqe::format_double(a.hybrid_score.value_or(0.0))
                  << "  ir " << rqe::format_double(a.ir_score) << "  rqe " << rqe::format_double(a.rqe_score) << '\n'
                  << "   Q: " << a.hq_text << '\n'
                  << "   A: " << a.answer_text << '\n';
        if (a.url) std::cout << "   " << a.source << " " << *a.url << '\n';
        if (with_explain) std::cout << rqe::format_explanation(rqe::explain(a));
    }
    if (result.used_fallback && !cfg.json_output) std::cout << "note: " << result.diagnostic << '\n';
    return 0;
}

int cmd_batch_eval(const CliConfig& cfg, const std::string& questions_path, const std::string& judgments_path,
                   const std::string& run_path, const std::string& report_path, const std::string& tag)
{
    const auto questions = rqe::load_questions(require(questions_path, "--questions"));
    const auto judgments = rqe::load_judgments(require(judgments_path, "--judgments"));
    const auto l = load_for_answering(cfg);
    const rqe::QAContext ctx{l.collection, l.index, l.model, l.resources};

    std::string run_text;
    std::vector<std::string> qids;
    for (const auto& [qid, text] : questions) {
        qids.push_back(qid);
        run_text += rqe::to_trec_run(qid, rqe::answer(text, ctx, cfg.pipeline).answers, tag);
    }
    if (!run_path.empty()) write_text(run_path, run_text);

    std::size_t unjudged = 0;
    const auto entries = rqe::parse_trec_run(run_text);
    const auto judged = rqe::judge_run(qids, entries, judgments, &unjudged);
    auto report = rqe::evaluate_run(judged);
    report.unjudged = unjudged;
    const std::string report_json = rqe::to_json(report).dump(2) + "\n";
    if (!report_path.empty()) write_text(report_path, report_json);
    std::cout << (cfg.json_output ? rqe::to_json(report).dump() + "\n" : rqe::format_report(report));
    return 0;
}

int cmd_gen_collection(const CliConfig& cfg, const std::vector<std::string>& article_paths,
                       const std::string& patterns_path, const std::string& output)
{
    const auto patterns = rqe::load_pattern_config(require(patterns_path, "--patterns"));
    rqe::Collection collection;
    std::vector<rqe::SkippedSection> skipped;
    for (const auto& path : article_paths) {
        for (const auto& article : rqe::load_articles(path)) {
            auto result = rqe::generate_qa_pairs(article, patterns);
            for (auto& p : result.pairs) collection.pairs.push_back(std::move(p));
            for (auto& s : result.skipped) skipped.push_back(std::move(s));
        }
    }
    if (!output.empty()) rqe::save_collection(collection, output);
    if (cfg.json_output) {
        json skipped_json = json::array();
        for (const auto& s : skipped) skipped_json.push_back({{"topic", s.topic}, {"section", s.title}});
        std::cout << json{{"pairs", collection.pairs.size()}, {"skipped", skipped_json}}.dump() << '\n';
    } else {
        for (const auto& p : collection.pairs) {
            std::cout << p.id << '\t' << rqe::to_string(p.question_type) << '\t' << p.question << '\n';
        }
        for (const auto& s : skipped) std::cout << "skipped: " << s.topic << " / " << s.title << '\n';
        std::cout << collection.pairs.size() << " pair(s) generated, " << skipped.size() << " section(s) skipped\n";
    }
    return 0;
}

int cmd_validate(const CliConfig& cfg, bool strict)
{
    const auto collection = rqe::load_collection(require(cfg.collection, "--collection"), rqe::LoadOptions{strict});
    const auto violations = rqe::validate_collection(collection, rqe::ValidationOptions{strict});
    for (const auto& v : violations) {
        if (cfg.json_output) {
            std::cout << json{{"pair_id", v.pair_id}, {"message", v.message}}.dump() << '\n';
        } else {
            std::cout << v.pair_id << ": " << v.message << '\n';
        }
    }
    if (cfg.json_output) {
        std::cout << json{{"pairs", collection.pairs.size()}, {"violations", violations.size()}}.dump() << '\n';
    } else {
        std::cout << collection.pairs.size() << " pair(s), " << violations.size() << " violation(s)\n";
    }
    return violations.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Question answering by recognizing question entailment"};
    app.require_subcommand(1);
    app.fallthrough();

    CliConfig cfg;
    std::string config_path;
    app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    auto* json_flag = app.add_flag("--json", "Emit JSON lines");
    app.add_flag("--verbose", cfg.verbose, "Print the effective configuration to stderr");
    auto* seed_opt = app.add_option("--seed", "Random seed (default 42)");
    app.add_flag("--force", cfg.force, "Use an index even if its checksum does not match");

    CliConfig flags;
    auto* collection_opt = app.add_option("--collection", flags.collection, "Collection file (.json or .xml)");
    auto* index_opt = app.add_option("--index", flags.index, "Index file");
    auto* model_opt = app.add_option("--model", flags.model, "Model file");
    auto* resources_opt = app.add_option("--resources", flags.resources, "Resource directory");
    auto* alpha_opt = app.add_option("--alpha", flags.pipeline.alpha, "IR weight");
    auto* beta_opt = app.add_option("--beta", flags.pipeline.beta, "RQE weight");
    auto* nmax_opt = app.add_option("--n-max", flags.pipeline.n_max, "Candidates retrieved");
    auto* topk_opt = app.add_option("--top-k", flags.pipeline.top_k, "Answers returned");
    auto* threshold_opt = app.add_option("--threshold", flags.pipeline.entailment_threshold, "Entailment threshold");
    auto* c_opt = app.add_option("--c", flags.pipeline.c, "In_expB2 length normalization");
    auto* fallback_flag = app.add_flag("--fallback-to-ir", flags.pipeline.fallback_to_ir,
                                       "Return IR results when nothing is entailed");

    std::string output;
    bool strict = false;

    auto* build = app.add_subcommand("build-index", "Index a collection");
    build->add_option("--output,-o", output, "Index file to write")->required();
    build->add_flag("--strict", strict, "Reject type labels that need aliasing");

    rqe::TrainConfig train_cfg;
    std::string pairs_path;
    auto* train = app.add_subcommand("train-rqe", "Train the entailment classifier");
    train->add_option("--pairs", pairs_path, "Labeled pairs TSV")->required();
    train->add_option("--output,-o", output, "Model file to write")->required();
    train->add_option("--learning-rate", train_cfg.learning_rate);
    train->add_option("--epochs", train_cfg.epochs);
    train->add_option("--l2", train_cfg.l2_lambda);

    int folds = 0;
    auto* eval_rqe = app.add_subcommand("eval-rqe", "Evaluate the classifier on labeled pairs");
    eval_rqe->add_option("--pairs", pairs_path, "Labeled pairs TSV")->required();
    eval_rqe->add_option("--cv", folds, "Cross-validate with this many folds instead of loading --model")
        ->check(CLI::Range(2, 1000));
    eval_rqe->add_option("--learning-rate", train_cfg.learning_rate);
    eval_rqe->add_option("--epochs", train_cfg.epochs);
    eval_rqe->add_option("--l2", train_cfg.l2_lambda);

    std::string question;
    bool with_explain = false;
    auto* ask = app.add_subcommand("ask", "Answer one question");
    ask->add_option("question", question, "Question text")->required();
    ask->add_flag("--explain", with_explain, "Show the score breakdown");

    std::string questions_path;
    std::string judgments_path;
    std::string run_path;
    std::string report_path;
    std::string tag = "rqe";
    auto* batch = app.add_subcommand("batch-eval", "Answer a question file and score it against judgments");
    batch->add_option("--questions", questions_path, "qid<TAB>question file")->required();
    batch->add_option("--judgments", judgments_path, "qid<TAB>pair_id<TAB>grade file")->required();
    batch->add_option("--run", run_path, "TREC run file to write");
    batch->add_option("--report", report_path, "JSON report to write");
    batch->add_option("--tag", tag, "Run tag");

    std::vector<std::string> article_paths;
    std::string patterns_path;
    auto* gen = app.add_subcommand("gen-collection", "Generate QA pairs from articles with section patterns");
    gen->add_option("--articles", article_paths, "Article JSON file(s)")->required();
    gen->add_option("--patterns", patterns_path, "Pattern configuration")->required();
    gen->add_option("--output,-o", output, "Collection file to write");

    auto* validate = app.add_subcommand("validate", "Check collection invariants");
    validate->add_flag("--strict", strict, "Reject type labels that need aliasing");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) apply_config_file(config_path, cfg);
        if (*json_flag) cfg.json_output = true;
        if (*seed_opt) cfg.seed = seed_opt->as<std::uint64_t>();
        if (*collection_opt) cfg.collection = flags.collection;
        if (*index_opt) cfg.index = flags.index;
        if (*model_opt) cfg.model = flags.model;
        if (*resources_opt) cfg.resources = flags.resources;
        if (*alpha_opt) cfg.pipeline.alpha = flags.pipeline.alpha;
        if (*beta_opt) cfg.pipeline.beta = flags.pipeline.beta;
        if (*nmax_opt) cfg.pipeline.n_max = flags.pipeline.n_max;
        if (*topk_opt) cfg.pipeline.top_k = flags.pipeline.top_k;
        if (*threshold_opt) cfg.pipeline.entailment_threshold = flags.pipeline.entailment_threshold;
        if (*c_opt) cfg.pipeline.c = flags.pipeline.c;
        if (*fallback_flag) cfg.pipeline.fallback_to_ir = true;
        cfg.pipeline.validate();
        if (cfg.verbose) std::cerr << "config: " << effective_config(cfg).dump() << '\n';

        if (*build) return cmd_build_index(cfg, output, strict);
        if (*train) return cmd_train(cfg, pairs_path, output, train_cfg);
        if (*eval_rqe) return cmd_eval_rqe(cfg, pairs_path, folds, train_cfg);
        if (*ask) return cmd_ask(cfg, question, with_explain);
        if (*batch) return cmd_batch_eval(cfg, questions_path, judgments_path, run_path, report_path, tag);
        if (*gen) return cmd_gen_collection(cfg, article_paths, patterns_path, output);
        if (*validate) return cmd_validate(cfg, strict);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

#include "rqe/rqe_classifier.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "rqe/checksum.hpp"
#include "rqe/error.hpp"
#include "rqe/numeric_format.hpp"

namespace rqe {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, kFeatureCount, Eigen::RowMajor>;

constexpr std::string_view kModelFormat = "rqe-model";
constexpr int kModelVersion = 1;

RowMatrix standardize(const Eigen::Ref<const RowMatrix>& x, const FeatureArray<double>& means,
                      const FeatureArray<double>& stds)
{
    RowMatrix out = x.rowwise() - means.transpose();
    out.array().rowwise() /= stds.transpose().array();
    return out;
}

std::string join_array(const FeatureArray<double>& a)
{
    std::string out;
    for (int i = 0; i < kFeatureCount; ++i) {
        if (i > 0) out.push_back(' ');
        out += format_double(a[i]);
    }
    return out;
}

std::vector<std::string> split_ws(const std::string& s)
{
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

}  // namespace

void TrainConfig::validate() const
{
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw InvalidInput("learning_rate must be positive");
    if (epochs <= 0) throw InvalidInput("epochs must be positive");
    if (!(l2_lambda >= 0.0) || !std::isfinite(l2_lambda)) throw InvalidInput("l2_lambda must be non-negative");
    if (!(convergence_tol > 0.0)) throw InvalidInput("convergence_tol must be positive");
}

LossGradient<double> loss_and_gradient(const EntailmentModel& model, const StandardizedBatch& batch, double l2_lambda)
{
    if (batch.x.rows() == 0) {
        throw InvalidInput("loss_and_gradient: empty batch");
    }
    if (!batch.x.allFinite() || !batch.y.allFinite()) {
        throw InvalidInput("loss_and_gradient: non-finite input");
    }
    return logistic_loss_and_gradient(batch.x, batch.y, model.weights, model.bias, l2_lambda);
}

RowMatrix feature_matrix(std::span<const LabeledPair> pairs, const Resources& resources)
{
    RowMatrix x(static_cast<Eigen::Index>(pairs.size()), kFeatureCount);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        FeatureArray<double> row;
        try {
            row = extract_features(pairs[i].premise, pairs[i].hypothesis, resources).as_array();
        } catch (const InvalidInput& e) {
            throw InvalidInput("pair " + std::to_string(i) + ": " + e.what());
        }
        if (!row.allFinite()) {
            throw InvalidInput("pair " + std::to_string(i) + ": non-finite feature");
        }
        x.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return x;
}

void fit_standardization(const Eigen::Ref<const RowMatrix>& x, FeatureArray<double>& means, FeatureArray<double>& stds)
{
    const auto n = static_cast<double>(x.rows());
    means = x.colwise().sum().transpose() / n;
    for (int j = 0; j < kFeatureCount; ++j) {
        const double var = (x.col(j).array() - means[j]).square().sum() / n;
        const double sd = std::sqrt(var);
        stds[j] = sd > 1e-12 ? sd : 1.0;
    }
}

EntailmentModel train_on_features(const Eigen::Ref<const RowMatrix>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                                  const TrainConfig& config, TrainReport* report)
{
    config.validate();
    if (x.rows() < 2) {
        throw InvalidInput("degenerate training set: at least two pairs are required");
    }
    if (!x.allFinite()) {
        throw InvalidInput("non-finite feature in training matrix");
    }
    const double positives = y.sum();
    if (positives <= 0.0 || positives >= static_cast<double>(y.size())) {
        throw InvalidInput("degenerate training set: only one class present");
    }

    EntailmentModel model;
    fit_standardization(x, model.feature_means, model.feature_stds);
    const RowMatrix xs = standardize(x, model.feature_means, model.feature_stds);

    FeatureArray<double> w = FeatureArray<double>::Zero();
    double b = 0.0;
    double step = config.learning_rate;
    auto current = logistic_loss_and_gradient(xs, y, w, b, config.l2_lambda);

    TrainReport local;
    local.loss_history.push_back(current.loss);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        FeatureArray<double> w_next;
        double b_next = 0.0;
        LossGradient<double> next;
        bool accepted = false;
        while (step > 1e-12) {
            w_next = w - step * current.gradient.head<kFeatureCount>();
            b_next = b - step * current.gradient[kFeatureCount];
            next = logistic_loss_and_gradient(xs, y, w_next, b_next, config.l2_lambda);
            if (next.loss <= current.loss) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        const double delta = current.loss - next.loss;
        w = w_next;
        b = b_next;
        current = std::move(next);
        local.loss_history.push_back(current.loss);
        local.epochs_run = epoch + 1;
        if (delta < config.convergence_tol) break;
    }

    model.weights = w;
    model.bias = b;

    if (report != nullptr) {
        local.final_loss = current.loss;
        std::size_t correct = 0;
        for (Eigen::Index i = 0; i < xs.rows(); ++i) {
            const double p = sigmoid(xs.row(i).dot(w.transpose()) + b);
            if ((p >= model.threshold) == (y[i] > 0.5)) ++correct;
        }
        local.training_accuracy = static_cast<double>(correct) / static_cast<double>(xs.rows());
        *report = std::move(local);
    }
    return model;
}

EntailmentModel train(std::span<const LabeledPair> pairs, const TrainConfig& config, const Resources& resources,
                      TrainReport* report)
{
    config.validate();
    if (pairs.size() < 2) {
        throw InvalidInput("degenerate training set: at least two pairs are required");
    }
    const RowMatrix x = feature_matrix(pairs, resources);
    Eigen::VectorXd y(static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t i = 0; i < pairs.size(); ++i) y[static_cast<Eigen::Index>(i)] = pairs[i].label ? 1.0 : 0.0;
    EntailmentModel model = train_on_features(x, y, config, report);
    model.training_checksum = pairs_checksum(pairs);
    return model;
}

double predict_proba(const EntailmentModel& model, const FeatureArray<double>& features)
{
    if (!features.allFinite()) {
        throw InvalidInput("predict_proba: non-finite feature");
    }
    const FeatureArray<double> z = (features - model.feature_means).cwiseQuotient(model.feature_stds);
    return sigmoid(model.weights.dot(z) + model.bias);
}

double predict_proba(const EntailmentModel& model, const FeatureVector& fv) { return predict_proba(model, fv.as_array()); }

bool classify(const EntailmentModel& model, const FeatureVector& fv) { return predict_proba(model, fv) >= model.threshold; }

ClassificationMetrics classification_metrics(const std::vector<bool>& predicted, const std::vector<bool>& actual)
{
    if (predicted.size() != actual.size()) {
        throw InvalidInput("classification_metrics: length mismatch");
    }
    ClassificationMetrics m;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] && actual[i]) ++m.true_positives;
        if (predicted[i] && !actual[i]) ++m.false_positives;
        if (!predicted[i] && !actual[i]) ++m.true_negatives;
        if (!predicted[i] && actual[i]) ++m.false_negatives;
    }
    const auto total = static_cast<double>(predicted.size());
    const auto tp = static_cast<double>(m.true_positives);
    if (total > 0) m.accuracy = static_cast<double>(m.true_positives + m.true_negatives) / total;
    if (m.true_positives + m.false_positives > 0) m.precision = tp / static_cast<double>(m.true_positives + m.false_positives);
    if (m.true_positives + m.false_negatives > 0) m.recall = tp / static_cast<double>(m.true_positives + m.false_negatives);
    if (m.precision + m.recall > 0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

ClassificationMetrics evaluate_classifier(const EntailmentModel& model, std::span<const LabeledPair> pairs,
                                          const Resources& resources)
{
    if (pairs.empty()) {
        throw InvalidInput("evaluate_classifier: no pairs");
    }
    std::vector<bool> predicted;
    std::vector<bool> actual;
    for (const auto& p : pairs) {
        predicted.push_back(classify(model, extract_features(p.premise, p.hypothesis, resources)));
        actual.push_back(p.label);
    }
    return classification_metrics(predicted, actual);
}

CrossValidationResult cross_validate(std::span<const LabeledPair> pairs, int folds, const TrainConfig& config,
                                     const Resources& resources)
{
    if (folds < 2 || static_cast<std::size_t>(folds) > pairs.size()) {
        throw InvalidInput("cross_validate: need 2 <= folds <= number of pairs");
    }
    const RowMatrix x = feature_matrix(pairs, resources);
    const auto n = static_cast<Eigen::Index>(pairs.size());
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = pairs[static_cast<std::size_t>(i)].label ? 1.0 : 0.0;

    // Fisher-Yates with raw engine output: identical on every standard library.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::mt19937_64 rng(config.seed);
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[static_cast<std::size_t>(rng() % i)]);
    }

    CrossValidationResult result;
    std::size_t pooled_correct = 0;
    for (int f = 0; f < folds; ++f) {
        std::vector<Eigen::Index> train_idx;
        std::vector<Eigen::Index> test_idx;
        for (std::size_t i = 0; i < order.size(); ++i) {
            (static_cast<int>(i % static_cast<std::size_t>(folds)) == f ? test_idx : train_idx).push_back(order[i]);
        }
        RowMatrix xtr(static_cast<Eigen::Index>(train_idx.size()), kFeatureCount);
        Eigen::VectorXd ytr(static_cast<Eigen::Index>(train_idx.size()));
        for (std::size_t i = 0; i < train_idx.size(); ++i) {
            xtr.row(static_cast<Eigen::Index>(i)) = x.row(train_idx[i]);
            ytr[static_cast<Eigen::Index>(i)] = y[train_idx[i]];
        }
        const EntailmentModel model = train_on_features(xtr, ytr, config);
        std::size_t correct = 0;
        for (Eigen::Index idx : test_idx) {
            const bool predicted = predict_proba(model, FeatureArray<double>(x.row(idx).transpose())) >= model.threshold;
            if (predicted == (y[idx] > 0.5)) ++correct;
        }
        pooled_correct += correct;
        result.fold_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(test_idx.size()));
    }
    double sum = 0.0;
    for (double a : result.fold_accuracy) sum += a;
    result.mean_accuracy = sum / static_cast<double>(folds);
    result.pooled_accuracy = static_cast<double>(pooled_correct) / static_cast<double>(pairs.size());
    return result;
}

std::string serialize_model(const EntailmentModel& model)
{
    std::ostringstream out;
    out << "format " << kModelFormat << '\n';
    out << "version " << kModelVersion << '\n';
    out << "features";
    for (auto name : kFeatureNames) out << ' ' << name;
    out << '\n';
    out << "weights " << join_array(model.weights) << '\n';
    out << "bias " << format_double(model.bias) << '\n';
    out << "means " << join_array(model.feature_means) << '\n';
    out << "stds " << join_array(model.feature_stds) << '\n';
    out << "threshold " << format_double(model.threshold) << '\n';
    out << "training_checksum " << (model.training_checksum.empty() ? "-" : model.training_checksum) << '\n';
    return out.str();
}

EntailmentModel parse_model(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    EntailmentModel model;
    bool seen_format = false;
    bool seen_features = false;
    int seen_arrays = 0;

    auto read_array = [&](const std::vector<std::string>& parts, FeatureArray<double>& dst) {
        if (parts.size() != kFeatureCount + 1) {
            throw ParseError("model line " + std::to_string(lineno) + ": expected " + std::to_string(kFeatureCount) +
                             " values for " + parts[0]);
        }
        for (int i = 0; i < kFeatureCount; ++i) {
            const auto v = parse_double(parts[static_cast<std::size_t>(i) + 1]);
            if (!v || !std::isfinite(*v)) {
                throw ParseError("model line " + std::to_string(lineno) + ": bad number '" + parts[static_cast<std::size_t>(i) + 1] + "'");
            }
            dst[i] = *v;
        }
        ++seen_arrays;
    };
    auto read_scalar = [&](const std::vector<std::string>& parts) {
        if (parts.size() != 2) throw ParseError("model line " + std::to_string(lineno) + ": expected one value");
        const auto v = parse_double(parts[1]);
        if (!v || !std::isfinite(*v)) throw ParseError("model line " + std::to_string(lineno) + ": bad number");
        return *v;
    };

    while (std::getline(in, line)) {
        ++lineno;
        const auto parts = split_ws(line);
        if (parts.empty() || parts[0].front() == '#') continue;
        const std::string& key = parts[0];
        if (key == "format") {
            if (parts.size() != 2 || parts[1] != kModelFormat) throw ParseError("not an rqe model file");
            seen_format = true;
        } else if (key == "version") {
            if (parts.size() != 2 || parts[1] != std::to_string(kModelVersion)) {
                throw ParseError("unsupported model version");
            }
        } else if (key == "features") {
            if (parts.size() != kFeatureCount + 1) throw ParseError("model feature list has wrong length");
            for (int i = 0; i < kFeatureCount; ++i) {
                if (parts[static_cast<std::size_t>(i) + 1] != kFeatureNames[static_cast<std::size_t>(i)]) {
                    throw ParseError("model feature order mismatch at '" + parts[static_cast<std::size_t>(i) + 1] + "'");
                }
            }
            seen_features = true;
        } else if (key == "weights") {
            read_array(parts, model.weights);
        } else if (key == "means") {
            read_array(parts, model.feature_means);
        } else if (key == "stds") {
            read_array(parts, model.feature_stds);
        } else if (key == "bias") {
            model.bias = read_scalar(parts);
        } else if (key == "threshold") {
            model.threshold = read_scalar(parts);
        } else if (key == "training_checksum") {
            model.training_checksum = parts.size() == 2 && parts[1] != "-" ? parts[1] : "";
        } else {
            throw ParseError("model line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (!seen_format || !seen_features || seen_arrays != 3) {
        throw ParseError("incomplete model file");
    }
    if ((model.feature_stds.array() <= 0.0).any()) {
        throw ParseError("model stds must be positive");
    }
    if (!(model.threshold > 0.0 && model.threshold < 1.0)) {
        throw ParseError("model threshold must lie in (0,1)");
    }
    return model;
}

void save_model(const EntailmentModel& model, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write model file: " + path);
    out << serialize_model(model);
    if (!out) throw Error("failed writing model file: " + path);
}

EntailmentModel load_model(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

std::string pairs_checksum(std::span<const LabeledPair> pairs)
{
    std::string data;
    for (const auto& p : pairs) {
        data += p.premise;
        data.push_back('\t');
        data += p.hypothesis;
        data.push_back('\t');
        data.push_back(p.label ? '1' : '0');
        data.push_back('\n');
    }
    return sha256_hex(data);
}

}  // namespace rqe

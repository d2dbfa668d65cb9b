#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rqe/resources.hpp"
#include "rqe/similarity_features.hpp"

namespace rqe {

/// A question pair; label true means the premise entails the hypothesis.
struct LabeledPair {
    std::string premise;
    std::string hypothesis;
    bool label = false;

    bool operator==(const LabeledPair&) const = default;
};

struct TrainConfig {
    double learning_rate = 0.1;
    int epochs = 500;
    double l2_lambda = 1e-4;
    std::uint64_t seed = 42;
    double convergence_tol = 1e-7;

    /// Throws InvalidInput on non-positive rate/epochs/tolerance or negative lambda.
    void validate() const;
};

/// Logistic-regression weights over standardized features.
struct EntailmentModel {
    FeatureArray<double> weights = FeatureArray<double>::Zero();
    double bias = 0.0;
    FeatureArray<double> feature_means = FeatureArray<double>::Zero();
    FeatureArray<double> feature_stds = FeatureArray<double>::Ones();
    double threshold = 0.5;
    std::string training_checksum;

    bool operator==(const EntailmentModel&) const = default;
};

// --- loss ------------------------------------------------------------------

/// log(1 + exp(z)) without overflow.
template <class Scalar>
Scalar softplus(Scalar z)
{
    using std::exp;
    using std::log1p;
    return z > Scalar(0) ? z + log1p(exp(-z)) : log1p(exp(z));
}

template <class Scalar>
Scalar sigmoid(Scalar z)
{
    using std::exp;
    if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-z));
    const Scalar e = exp(z);
    return e / (Scalar(1) + e);
}

template <class Scalar>
struct LossGradient {
    Scalar loss;
    /// Weight gradient followed by the bias gradient (size d + 1).
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gradient;
};

/**
 * Mean negative log-likelihood of logistic regression plus (lambda/2)||w||^2,
 * and its gradient with respect to (w, b). The bias is not regularized.
 *
 * `x` is n-by-d (one standardized example per row), `y` holds 0/1 labels.
 */
template <class DerivedX, class DerivedY, class DerivedW>
LossGradient<typename DerivedX::Scalar> logistic_loss_and_gradient(const Eigen::MatrixBase<DerivedX>& x,
                                                                   const Eigen::MatrixBase<DerivedY>& y,
                                                                   const Eigen::MatrixBase<DerivedW>& w,
                                                                   typename DerivedX::Scalar bias,
                                                                   typename DerivedX::Scalar l2_lambda)
{
    using Scalar = typename DerivedX::Scalar;
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> z = (x * w).array() + bias;

    Scalar nll(0);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> residual(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        // -[y log s(z) + (1-y) log(1-s(z))] = softplus(z) - y z
        nll += softplus(z[i]) - y[i] * z[i];
        residual[i] = sigmoid(z[i]) - y[i];
    }
    const Scalar inv_n = Scalar(1) / static_cast<Scalar>(n);

    LossGradient<Scalar> out;
    out.loss = nll * inv_n + Scalar(0.5) * l2_lambda * w.squaredNorm();
    out.gradient.resize(d + 1);
    out.gradient.head(d) = (x.transpose() * residual) * inv_n + l2_lambda * w;
    out.gradient[d] = residual.sum() * inv_n;
    return out;
}

/// Standardized design matrix and labels for one batch.
struct StandardizedBatch {
    Eigen::Matrix<double, Eigen::Dynamic, kFeatureCount, Eigen::RowMajor> x;
    Eigen::VectorXd y;
};

/// Loss of `model` over a standardized batch. Throws InvalidInput on an empty batch.
LossGradient<double> loss_and_gradient(const EntailmentModel& model, const StandardizedBatch& batch,
                                       double l2_lambda);

// --- training and scoring -----------------------------------------------------

/// Feature rows for a list of pairs. Throws InvalidInput naming the pair index on a non-finite feature.
Eigen::Matrix<double, Eigen::Dynamic, kFeatureCount, Eigen::RowMajor> feature_matrix(
    std::span<const LabeledPair> pairs, const Resources& resources);

/// Per-column means and standard deviations; zero-variance columns get std 1.
void fit_standardization(const Eigen::Ref<const Eigen::Matrix<double, Eigen::Dynamic, kFeatureCount, Eigen::RowMajor>>& x,
                         FeatureArray<double>& means, FeatureArray<double>& stds);

struct TrainReport {
    int epochs_run = 0;
    double final_loss = 0.0;
    double training_accuracy = 0.0;
    std::vector<double> loss_history;
};

/// Fits the model on precomputed feature rows and 0/1 labels.
EntailmentModel train_on_features(
    const Eigen::Ref<const Eigen::Matrix<double, Eigen::Dynamic, kFeatureCount, Eigen::RowMajor>>& x,
    const Eigen::Ref<const Eigen::VectorXd>& y, const TrainConfig& config, TrainReport* report = nullptr);

/**
 * Extracts features, standardizes them with training statistics and fits the
 * L2-regularized logistic regression by full-batch gradient descent. The
 * step is halved whenever an update would increase the loss.
 *
 * Throws InvalidInput when fewer than two pairs are given, when only one
 * label is present, or when a feature is non-finite.
 */
EntailmentModel train(std::span<const LabeledPair> pairs, const TrainConfig& config, const Resources& resources,
                      TrainReport* report = nullptr);

/// sigmoid(w . standardize(fv) + b). Throws InvalidInput on a non-finite feature.
double predict_proba(const EntailmentModel& model, const FeatureVector& fv);
double predict_proba(const EntailmentModel& model, const FeatureArray<double>& features);

/// predict_proba >= threshold.
bool classify(const EntailmentModel& model, const FeatureVector& fv);

struct ClassificationMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t true_negatives = 0;
    std::size_t false_negatives = 0;
};

/// Binary metrics with entailment as the positive class. Empty precision/recall denominators give 0.
ClassificationMetrics classification_metrics(const std::vector<bool>& predicted, const std::vector<bool>& actual);

/// Throws InvalidInput on an empty pair list.
ClassificationMetrics evaluate_classifier(const EntailmentModel& model, std::span<const LabeledPair> pairs,
                                          const Resources& resources);

struct CrossValidationResult {
    std::vector<double> fold_accuracy;
    double mean_accuracy = 0.0;
    /// Accuracy over the pooled out-of-fold predictions.
    double pooled_accuracy = 0.0;
};

/// k-fold cross-validation; folds come from a seeded shuffle of the pair indices.
CrossValidationResult cross_validate(std::span<const LabeledPair> pairs, int folds, const TrainConfig& config,
                                     const Resources& resources);

// --- persistence ------------------------------------------------------------

/// Versioned key-value text. Doubles are written in shortest round-trip form.
std::string serialize_model(const EntailmentModel& model);
EntailmentModel parse_model(const std::string& text);
void save_model(const EntailmentModel& model, const std::string& path);
EntailmentModel load_model(const std::string& path);

/// Digest of a pair list, stored in the model as `training_checksum`.
std::string pairs_checksum(std::span<const LabeledPair> pairs);

}  // namespace rqe

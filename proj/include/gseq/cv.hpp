#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gseq/stats.hpp"
#include "gseq/types.hpp"

namespace gseq {

struct CvConfig {
    std::size_t k = 5;
    std::uint64_t seed = 0;
    bool standardize = true;
    double l2 = 1.0;
    std::size_t max_iters = 10000;
    double tolerance = 1e-6;
    // Percentile bootstrap over fold accuracies instead of the normal
    // approximation.
    bool bootstrap_ci = false;
    std::size_t bootstrap_samples = 1000;
};

// Deterministic stratified split: per-class shuffle (seeded) then round-robin
// dealing, so per-fold class counts differ from proportional allocation by at
// most one. Requires each class to have at least k cases.
std::vector<std::vector<std::string>> stratified_folds(const OutcomeTable& outcomes, std::size_t k,
                                                       std::uint64_t seed);

// L2-regularized logistic regression fit by deterministic full-batch gradient
// descent with backtracking line search. Standardization parameters come from
// the training data only; constant training columns are deactivated and keep
// zero weight.
struct BaselineModel {
    std::vector<double> weights;
    double intercept = 0.0;
    std::vector<double> offset;  // standardization mean (0 when disabled)
    std::vector<double> scale;   // standardization sd    (1 when disabled)
    std::vector<std::uint8_t> active;
    std::size_t iterations = 0;
    double grad_norm = 0.0;

    double score(std::span<const double> row) const;
    int predict(std::span<const double> row) const { return score(row) > 0.0 ? 1 : 0; }
};

BaselineModel fit_baseline(const FeatureMatrix& train, const CvConfig& config);

// Mean logistic loss with L2 penalty (intercept unpenalized), plus gradient;
// exposed so the gradient can be checked against finite differences.
double logistic_loss(const FeatureMatrix& data, std::span<const double> weights, double intercept,
                     double l2, std::vector<double>* grad_weights, double* grad_intercept);

struct CvReport {
    std::vector<double> fold_accuracies;
    double mean_accuracy = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

CvReport cross_validate(const FeatureMatrix& matrix, const CvConfig& config);

}  // namespace gseq

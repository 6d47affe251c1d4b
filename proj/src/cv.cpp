#include "gseq/cv.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gseq/rng.hpp"
#include "gseq/util.hpp"

namespace gseq {

namespace {

// log(1 + exp(-z)) without overflow.
double softplus_neg(double z) {
    if (z > 0.0) return std::log1p(std::exp(-z));
    return -z + std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double norm2(std::span<const double> v, double extra) {
    double ss = extra * extra;
    for (const double x : v) ss += x * x;
    return std::sqrt(ss);
}

}  // namespace

std::vector<std::vector<std::string>> stratified_folds(const OutcomeTable& outcomes, std::size_t k,
                                                       std::uint64_t seed) {
    if (k < 2) throw ValidationError("stratified_folds: k must be >= 2");
    std::vector<std::string> by_class[2];
    for (const auto& [case_id, y] : outcomes.entries) {
        if (y != 0 && y != 1) throw ValidationError("stratified_folds: outcomes must be 0 or 1");
        by_class[y].push_back(case_id);  // map iteration = sorted = canonical
    }
    for (int y : {0, 1}) {
        if (by_class[y].size() < k) {
            throw ValidationError("stratified_folds: class " + std::to_string(y) + " has " +
                                  std::to_string(by_class[y].size()) + " cases, fewer than k=" +
                                  std::to_string(k));
        }
    }

    Rng rng(derive_seed(seed, 0xf01d5));
    std::vector<std::vector<std::string>> folds(k);
    for (int y : {0, 1}) {
        rng.shuffle(by_class[y]);
        for (std::size_t i = 0; i < by_class[y].size(); ++i) {
            folds[i % k].push_back(std::move(by_class[y][i]));
        }
    }
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    return folds;
}

double BaselineModel::score(std::span<const double> row) const {
    double s = intercept;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (!active[j]) continue;
        s += weights[j] * (row[j] - offset[j]) / scale[j];
    }
    return s;
}

double logistic_loss(const FeatureMatrix& data, std::span<const double> weights, double intercept,
                     double l2, std::vector<double>* grad_weights, double* grad_intercept) {
    const std::size_t n = data.rows();
    const std::size_t m = data.cols();
    const double inv_n = 1.0 / static_cast<double>(n);

    if (grad_weights) grad_weights->assign(m, 0.0);
    if (grad_intercept) *grad_intercept = 0.0;

    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = data.row(i);
        double s = intercept;
        for (std::size_t j = 0; j < m; ++j) s += weights[j] * row[j];
        const double y = data.outcomes()[i] == 1 ? 1.0 : -1.0;
        loss += softplus_neg(y * s);
        if (grad_weights) {
            const double g = -y * sigmoid(-y * s) * inv_n;
            for (std::size_t j = 0; j < m; ++j) (*grad_weights)[j] += g * row[j];
            *grad_intercept += g;
        }
    }
    loss *= inv_n;
    const double reg = 0.5 * l2 * inv_n;
    for (std::size_t j = 0; j < m; ++j) {
        loss += reg * weights[j] * weights[j];
        if (grad_weights) (*grad_weights)[j] += l2 * inv_n * weights[j];
    }
    return loss;
}

BaselineModel fit_baseline(const FeatureMatrix& train, const CvConfig& config) {
    const std::size_t n = train.rows();
    const std::size_t m = train.cols();
    if (config.l2 < 0.0) throw ValidationError("fit_baseline: l2 must be >= 0");

    BaselineModel model;
    model.offset.assign(m, 0.0);
    model.scale.assign(m, 1.0);
    model.active.assign(m, 1);
    model.weights.assign(m, 0.0);

    // Standardization / constant-column detection from the training fold only.
    for (std::size_t j = 0; j < m; ++j) {
        double sum = 0.0, lo = train.at(0, j), hi = train.at(0, j);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = train.at(i, j);
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (lo == hi) {
            model.active[j] = 0;
            continue;
        }
        if (config.standardize) {
            const double mean = sum / static_cast<double>(n);
            double ss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = train.at(i, j) - mean;
                ss += d * d;
            }
            model.offset[j] = mean;
            model.scale[j] = std::sqrt(ss / static_cast<double>(n - 1));
        }
    }

    // Materialize the transformed design matrix once.
    std::vector<double> design(n * m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            design[i * m + j] = model.active[j] ? (train.at(i, j) - model.offset[j]) / model.scale[j] : 0.0;
        }
    }
    const FeatureMatrix std_train(train.case_ids(), train.names(), std::move(design),
                                  train.outcomes());

    std::vector<double> grad(m, 0.0);
    double grad_b = 0.0;
    double loss = logistic_loss(std_train, model.weights, model.intercept, config.l2, &grad, &grad_b);

    std::vector<double> trial_w(m, 0.0);
    for (std::size_t iter = 0; iter < config.max_iters; ++iter) {
        model.grad_norm = norm2(grad, grad_b);
        model.iterations = iter;
        if (model.grad_norm <= config.tolerance) break;

        // Backtracking line search with the Armijo condition.
        const double g2 = model.grad_norm * model.grad_norm;
        double step = 1.0;
        bool accepted = false;
        for (int halvings = 0; halvings < 60; ++halvings) {
            for (std::size_t j = 0; j < m; ++j) trial_w[j] = model.weights[j] - step * grad[j];
            const double trial_b = model.intercept - step * grad_b;
            const double trial_loss = logistic_loss(std_train, trial_w, trial_b, config.l2, nullptr, nullptr);
            if (trial_loss <= loss - 1e-4 * step * g2) {
                model.weights = trial_w;
                model.intercept = trial_b;
                loss = trial_loss;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // step underflow; gradient is numerically flat
        loss = logistic_loss(std_train, model.weights, model.intercept, config.l2, &grad, &grad_b);
    }
    return model;
}

CvReport cross_validate(const FeatureMatrix& matrix, const CvConfig& config) {
    OutcomeTable outcomes;
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        outcomes.entries[matrix.case_ids()[i]] = matrix.outcomes()[i];
    }
    if (outcomes.entries.size() != matrix.rows()) {
        throw ValidationError("cross_validate: duplicate case ids");
    }
    const auto folds = stratified_folds(outcomes, config.k, config.seed);

    std::map<std::string, std::size_t> row_of;
    for (std::size_t i = 0; i < matrix.rows(); ++i) row_of[matrix.case_ids()[i]] = i;

    auto subset = [&](const std::set<std::string>& ids, bool inside) {
        std::vector<std::string> case_ids;
        std::vector<double> values;
        std::vector<int> y;
        for (std::size_t i = 0; i < matrix.rows(); ++i) {
            if ((ids.count(matrix.case_ids()[i]) > 0) != inside) continue;
            case_ids.push_back(matrix.case_ids()[i]);
            const auto row = matrix.row(i);
            values.insert(values.end(), row.begin(), row.end());
            y.push_back(matrix.outcomes()[i]);
        }
        return FeatureMatrix(std::move(case_ids), matrix.names(), std::move(values), std::move(y));
    };

    CvReport report;
    for (const auto& fold : folds) {
        const std::set<std::string> held_out(fold.begin(), fold.end());
        const FeatureMatrix train = subset(held_out, false);
        const BaselineModel model = fit_baseline(train, config);

        std::size_t correct = 0;
        for (const auto& case_id : fold) {
            const std::size_t r = row_of.at(case_id);
            if (model.predict(matrix.row(r)) == matrix.outcomes()[r]) ++correct;
        }
        report.fold_accuracies.push_back(static_cast<double>(correct) / static_cast<double>(fold.size()));
    }

    const double kf = static_cast<double>(report.fold_accuracies.size());
    double sum = 0.0;
    for (const double a : report.fold_accuracies) sum += a;
    report.mean_accuracy = sum / kf;
    double ss = 0.0;
    for (const double a : report.fold_accuracies) {
        const double d = a - report.mean_accuracy;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / (kf - 1.0));

    if (config.bootstrap_ci) {
        Rng rng(derive_seed(config.seed, 0xb007));
        std::vector<double> means(config.bootstrap_samples, 0.0);
        for (auto& mvalue : means) {
            double total = 0.0;
            for (std::size_t i = 0; i < report.fold_accuracies.size(); ++i) {
                total += report.fold_accuracies[rng.uniform_index(report.fold_accuracies.size())];
            }
            mvalue = total / kf;
        }
        std::sort(means.begin(), means.end());
        auto quantile = [&](double q) {
            const double pos = q * static_cast<double>(means.size() - 1);
            const std::size_t lo = static_cast<std::size_t>(pos);
            const std::size_t hi = std::min(lo + 1, means.size() - 1);
            const double frac = pos - static_cast<double>(lo);
            return means[lo] * (1.0 - frac) + means[hi] * frac;
        };
        report.ci_lo = quantile(0.025);
        report.ci_hi = quantile(0.975);
    } else {
        const double half = 1.96 * sd / std::sqrt(kf);
        report.ci_lo = report.mean_accuracy - half;
        report.ci_hi = report.mean_accuracy + half;
    }
    return report;
}

}  // namespace gseq

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gseq/io.hpp"
#include "gseq/types.hpp"

namespace gseq {

// Regularized incomplete beta I_x(a, b) via the continued-fraction expansion
// (modified Lentz), accurate to ~1e-15 relative.
double regularized_incomplete_beta(double x, double a, double b);

// Two-tailed p for a Student t statistic: I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_tailed_p(double t, double df);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
};

// Pooled-variance two-sample Student's t-test (two-tailed). Zero pooled
// variance with equal means yields t = 0, p = 1; with different means it is
// a degenerate-variance error.
TTestResult t_test_two_sample(std::span<const double> a, std::span<const double> b);

// Welch's variant (unequal variances, Welch-Satterthwaite df).
TTestResult t_test_welch(std::span<const double> a, std::span<const double> b);

// d = (mean_good - mean_poor) / pooled_sd: positive means the feature is
// higher in the good-outcome group.
double cohens_d(std::span<const double> poor, std::span<const double> good);

struct PearsonResult {
    double r = 0.0;
    double p = 1.0;
};

// Sample correlation; p from t = r * sqrt((n-2)/(1-r^2)), two-tailed.
PearsonResult pearson_r(std::span<const double> x, std::span<const double> y);

// Cohort feature matrix with aligned binary outcomes. Group 0 = poor,
// group 1 = good; each group needs at least two cases.
class FeatureMatrix {
public:
    FeatureMatrix(std::vector<std::string> case_ids, std::vector<std::string> names,
                  std::vector<double> values, std::vector<int> outcomes);

    static FeatureMatrix from_named(const NamedMatrix& matrix, const OutcomeTable& outcomes);

    std::size_t rows() const { return case_ids_.size(); }
    std::size_t cols() const { return names_.size(); }
    const std::vector<std::string>& case_ids() const { return case_ids_; }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<int>& outcomes() const { return outcomes_; }
    double at(std::size_t r, std::size_t c) const { return values_[r * names_.size() + c]; }
    std::span<const double> row(std::size_t r) const { return {values_.data() + r * names_.size(), names_.size()}; }

    // Column values split into (poor, good) in row order.
    std::pair<std::vector<double>, std::vector<double>> split_column(std::size_t c) const;

private:
    std::vector<std::string> case_ids_;
    std::vector<std::string> names_;
    std::vector<double> values_;
    std::vector<int> outcomes_;
};

struct RankedFeature {
    std::string name;
    double p = 1.0;
    double d = 0.0;
    bool degenerate = false;  // zero pooled variance with unequal means
};

// Ascending by p; ties broken by |d| descending then name; degenerate
// features go last with p = 1.
std::vector<RankedFeature> rank_features(const FeatureMatrix& matrix);

struct GroupStats {
    double mean_poor = 0, sd_poor = 0, mean_good = 0, sd_good = 0;
};

struct ConcordanceReport {
    std::size_t top_k = 0;
    std::vector<RankedFeature> ranked_a, ranked_b;
    std::vector<std::string> overlap;  // top-k intersection, in ranked_a order
    std::map<std::string, std::pair<double, double>> paired_d;  // name -> (d_a, d_b)
    std::optional<double> delta_d_avg;      // mean |d_a - d_b| over the overlap
    std::optional<double> pearson_r_of_d;   // unset when the overlap is too small or constant
    std::map<std::string, GroupStats> group_stats_a, group_stats_b;
};

// Top-k agreement between two feature sources sharing cases and outcomes.
ConcordanceReport concordance(const FeatureMatrix& a, const FeatureMatrix& b, std::size_t k);

}  // namespace gseq

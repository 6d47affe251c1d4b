#include "gseq/stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gseq/util.hpp"

namespace gseq {

namespace {

// Continued fraction for the incomplete beta function, modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
    constexpr double eps = 1e-16;
    constexpr double fpmin = 1e-300;
    constexpr int max_iters = 1000;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iters; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    throw std::runtime_error("incomplete beta continued fraction failed to converge");
}

double mean_of(std::span<const double> v) {
    double sum = 0.0;
    for (const double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

double sample_var(std::span<const double> v, double mean) {
    double ss = 0.0;
    for (const double x : v) {
        const double d = x - mean;
        ss += d * d;
    }
    return ss / static_cast<double>(v.size() - 1);
}

double pooled_var(std::span<const double> a, std::span<const double> b) {
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double va = sample_var(a, mean_of(a));
    const double vb = sample_var(b, mean_of(b));
    return ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("incomplete beta: a and b must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("incomplete beta: x must lie in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_tailed_p(double t, double df) {
    if (!(df > 0.0)) throw ValidationError("student t: df must be positive");
    if (t == 0.0) return 1.0;
    const double x = df / (df + t * t);
    const double p = regularized_incomplete_beta(x, 0.5 * df, 0.5);
    return std::min(1.0, std::max(0.0, p));
}

TTestResult t_test_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw ValidationError("t-test: each sample needs >= 2 values");
    const double ma = mean_of(a);
    const double mb = mean_of(b);
    const double sp2 = pooled_var(a, b);
    if (sp2 <= 0.0) {
        if (ma == mb) return {0.0, 1.0};
        throw ValidationError("t-test: degenerate variance with unequal means");
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double t = (ma - mb) / std::sqrt(sp2 * (1.0 / na + 1.0 / nb));
    return {t, student_t_two_tailed_p(t, na + nb - 2.0)};
}

TTestResult t_test_welch(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw ValidationError("t-test: each sample needs >= 2 values");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double va = sample_var(a, mean_of(a));
    const double vb = sample_var(b, mean_of(b));
    const double se2 = va / na + vb / nb;
    if (se2 <= 0.0) {
        if (mean_of(a) == mean_of(b)) return {0.0, 1.0};
        throw ValidationError("t-test: degenerate variance with unequal means");
    }
    const double t = (mean_of(a) - mean_of(b)) / std::sqrt(se2);
    const double df = se2 * se2 / (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
    return {t, student_t_two_tailed_p(t, df)};
}

double cohens_d(std::span<const double> poor, std::span<const double> good) {
    if (poor.size() < 2 || good.size() < 2) throw ValidationError("cohens_d: each group needs >= 2 values");
    const double sp2 = pooled_var(poor, good);
    if (sp2 <= 0.0) throw ValidationError("cohens_d: zero pooled standard deviation");
    return (mean_of(good) - mean_of(poor)) / std::sqrt(sp2);
}

PearsonResult pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("pearson_r: length mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw ValidationError("pearson_r: need at least 3 pairs");
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) throw ValidationError("pearson_r: zero variance");
    double r = sxy / std::sqrt(sxx * syy);
    r = std::min(1.0, std::max(-1.0, r));
    const double denom = 1.0 - r * r;
    if (denom <= 0.0) return {r, 0.0};
    const double t = r * std::sqrt(static_cast<double>(n - 2) / denom);
    return {r, student_t_two_tailed_p(t, static_cast<double>(n - 2))};
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> case_ids, std::vector<std::string> names,
                             std::vector<double> values, std::vector<int> outcomes)
    : case_ids_(std::move(case_ids)),
      names_(std::move(names)),
      values_(std::move(values)),
      outcomes_(std::move(outcomes)) {
    if (case_ids_.size() != outcomes_.size()) throw ValidationError("feature matrix: outcome misalignment");
    if (values_.size() != case_ids_.size() * names_.size()) {
        throw ValidationError("feature matrix: not rectangular");
    }
    if (std::set<std::string>(names_.begin(), names_.end()).size() != names_.size()) {
        throw ValidationError("feature matrix: duplicate feature names");
    }
    std::size_t good = 0, poor = 0;
    for (const int y : outcomes_) {
        if (y != 0 && y != 1) throw ValidationError("feature matrix: outcomes must be 0 or 1");
        (y == 1 ? good : poor) += 1;
    }
    if (good < 2 || poor < 2) throw ValidationError("feature matrix: each outcome group needs >= 2 cases");
    for (const double v : values_) {
        if (!std::isfinite(v)) throw ValidationError("feature matrix: non-finite value");
    }
}

FeatureMatrix FeatureMatrix::from_named(const NamedMatrix& matrix, const OutcomeTable& outcomes) {
    std::vector<int> y;
    y.reserve(matrix.rows());
    for (const auto& case_id : matrix.case_ids) {
        const auto it = outcomes.entries.find(case_id);
        if (it == outcomes.entries.end()) {
            throw ValidationError("no outcome for case '" + case_id + "'");
        }
        y.push_back(it->second);
    }
    return FeatureMatrix(matrix.case_ids, matrix.names, matrix.values, std::move(y));
}

std::pair<std::vector<double>, std::vector<double>> FeatureMatrix::split_column(std::size_t c) const {
    std::vector<double> poor, good;
    for (std::size_t r = 0; r < rows(); ++r) {
        (outcomes_[r] == 1 ? good : poor).push_back(at(r, c));
    }
    return {std::move(poor), std::move(good)};
}

std::vector<RankedFeature> rank_features(const FeatureMatrix& matrix) {
    std::vector<RankedFeature> ranked;
    ranked.reserve(matrix.cols());
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
        const auto [poor, good] = matrix.split_column(c);
        RankedFeature f;
        f.name = matrix.names()[c];
        try {
            f.p = t_test_two_sample(poor, good).p;
        } catch (const ValidationError&) {
            // zero pooled variance with unequal means; ranks last by convention
            f.p = 1.0;
            f.degenerate = true;
        }
        try {
            f.d = cohens_d(poor, good);
        } catch (const ValidationError&) {
            f.d = 0.0;  // constant columns carry no effect size
        }
        ranked.push_back(std::move(f));
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedFeature& a, const RankedFeature& b) {
        if (a.degenerate != b.degenerate) return b.degenerate;
        if (a.p != b.p) return a.p < b.p;
        if (std::abs(a.d) != std::abs(b.d)) return std::abs(a.d) > std::abs(b.d);
        return a.name < b.name;
    });
    return ranked;
}

ConcordanceReport concordance(const FeatureMatrix& a, const FeatureMatrix& b, std::size_t k) {
    if (a.names() != b.names()) throw ValidationError("concordance: feature names differ");
    if (a.case_ids() != b.case_ids()) throw ValidationError("concordance: case ids differ");
    if (a.outcomes() != b.outcomes()) throw ValidationError("concordance: outcomes differ");
    if (k < 1 || k > a.cols()) throw ValidationError("concordance: top-k out of range");

    ConcordanceReport report;
    report.top_k = k;
    report.ranked_a = rank_features(a);
    report.ranked_b = rank_features(b);

    std::map<std::string, double> d_a, d_b;
    for (const auto& f : report.ranked_a) d_a[f.name] = f.d;
    for (const auto& f : report.ranked_b) d_b[f.name] = f.d;

    std::set<std::string> top_b;
    for (std::size_t i = 0; i < k; ++i) top_b.insert(report.ranked_b[i].name);
    for (std::size_t i = 0; i < k; ++i) {
        const std::string& name = report.ranked_a[i].name;
        if (top_b.count(name)) report.overlap.push_back(name);
    }

    std::vector<double> ds_a, ds_b;
    for (const auto& name : report.overlap) {
        report.paired_d[name] = {d_a[name], d_b[name]};
        ds_a.push_back(d_a[name]);
        ds_b.push_back(d_b[name]);
    }

    if (!report.overlap.empty()) {
        double total = 0.0;
        for (std::size_t i = 0; i < ds_a.size(); ++i) total += std::abs(ds_a[i] - ds_b[i]);
        report.delta_d_avg = total / static_cast<double>(ds_a.size());
        if (ds_a.size() >= 3) {
            try {
                report.pearson_r_of_d = pearson_r(ds_a, ds_b).r;
            } catch (const ValidationError&) {
                report.pearson_r_of_d = std::nullopt;  // constant effect sizes
            }
        }
    }

    auto group_stats = [](const FeatureMatrix& m, const std::vector<std::string>& names) {
        std::map<std::string, GroupStats> stats;
        std::map<std::string, std::size_t> col_of;
        for (std::size_t c = 0; c < m.cols(); ++c) col_of[m.names()[c]] = c;
        for (const auto& name : names) {
            const auto [poor, good] = m.split_column(col_of[name]);
            GroupStats g;
            g.mean_poor = mean_of(poor);
            g.mean_good = mean_of(good);
            g.sd_poor = std::sqrt(sample_var(poor, g.mean_poor));
            g.sd_good = std::sqrt(sample_var(good, g.mean_good));
            stats[name] = g;
        }
        return stats;
    };
    report.group_stats_a = group_stats(a, report.overlap);
    report.group_stats_b = group_stats(b, report.overlap);
    return report;
}

}  // namespace gseq

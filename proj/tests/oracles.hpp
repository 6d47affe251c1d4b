#pragma once

// Brute-force reference implementations used by the tests. These stay
// deliberately naive and independent of the library's computation paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "gseq/rng.hpp"
#include "gseq/types.hpp"

namespace oracle {

// --- kernel segmentation -----------------------------------------------

inline double rbf_cost(const std::vector<std::vector<double>>& rows, std::size_t a, std::size_t b,
                       double gamma) {
    long double diag = 0.0L, full = 0.0L;
    for (std::size_t s = a; s < b; ++s) {
        diag += 1.0L;  // k(y_s, y_s)
        for (std::size_t t = a; t < b; ++t) {
            long double d2 = 0.0L;
            for (std::size_t j = 0; j < rows[s].size(); ++j) {
                const long double d = static_cast<long double>(rows[s][j]) - rows[t][j];
                d2 += d * d;
            }
            full += std::exp(-static_cast<long double>(gamma) * d2);
        }
    }
    return static_cast<double>(diag - full / static_cast<long double>(b - a));
}

struct ExhaustiveResult {
    double min_cost = 0.0;
    std::vector<std::size_t> breakpoints;
    bool unique = true;
};

// Minimum of sum(segment costs) + penalty * (#segments) over every partition
// honoring min_len, by explicit enumeration of interior breakpoint sets.
inline ExhaustiveResult exhaustive_partition(const std::vector<std::vector<double>>& rows, double gamma,
                                             double penalty, std::size_t min_len) {
    const std::size_t n = rows.size();
    std::vector<std::vector<double>> seg_cost(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b <= n; ++b) seg_cost[a][b] = rbf_cost(rows, a, b, gamma);
    }

    ExhaustiveResult best;
    best.min_cost = seg_cost[0][n] + penalty;
    best.breakpoints = {n};
    for (std::uint64_t mask = 1; mask < (1ULL << (n - 1)); ++mask) {
        std::vector<std::size_t> bkps;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (mask & (1ULL << i)) bkps.push_back(i + 1);
        }
        bkps.push_back(n);
        double total = penalty * static_cast<double>(bkps.size());
        std::size_t start = 0;
        bool feasible = true;
        for (const std::size_t end : bkps) {
            if (end - start < min_len) {
                feasible = false;
                break;
            }
            total += seg_cost[start][end];
            start = end;
        }
        if (!feasible) continue;
        if (total < best.min_cost - 1e-12) {
            best.min_cost = total;
            best.breakpoints = bkps;
            best.unique = true;
        } else if (std::abs(total - best.min_cost) <= 1e-12 && bkps != best.breakpoints) {
            best.unique = false;
        }
    }
    return best;
}

// --- metrics -------------------------------------------------------------

inline double auc_pairwise(const std::vector<double>& scores, const std::vector<int>& labels) {
    double wins = 0.0;
    std::size_t n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        ++n_pos;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] == 1) continue;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    for (const int y : labels) n_neg += (y == 0);
    return wins / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

// --- feature families ------------------------------------------------------

// The oracles work on label/time triples directly, keyed by code strings.
struct Ev {
    std::string g;
    double start, end;
};

inline std::vector<Ev> plain_events(const gseq::GestureSequence& seq) {
    std::vector<Ev> out;
    for (const auto& e : seq.events) {
        if (!e.excluded) out.push_back({e.label, e.start, e.end});
    }
    return out;
}

inline double omedian(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

inline std::map<std::string, double> ostats7(const std::vector<double>& v) {
    std::map<std::string, double> s{{"mean", 0}, {"std", 0}, {"min", 0}, {"max", 0},
                                    {"median", 0}, {"skew", 0}, {"kurt", 0}};
    const std::size_t n = v.size();
    if (n == 0) return s;
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    s["mean"] = mean;
    s["min"] = *std::min_element(v.begin(), v.end());
    s["max"] = *std::max_element(v.begin(), v.end());
    s["median"] = omedian(v);
    if (n == 1) return s;
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    s["std"] = std::sqrt(ss / static_cast<double>(n - 1));
    if (n == 2) return s;
    double m2 = 0, m3 = 0, m4 = 0;
    for (double x : v) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n; m3 /= n; m4 /= n;
    if (m2 > 0) {
        s["skew"] = m3 / std::pow(m2, 1.5);
        s["kurt"] = m4 / (m2 * m2) - 3.0;
    }
    return s;
}

inline std::map<std::string, double> ofrequency(const std::vector<Ev>& ev,
                                                const std::vector<std::string>& codes) {
    std::map<std::string, double> out;
    for (const auto& c : codes) out["freq_" + c] = 0.0;
    for (const auto& e : ev) out["freq_" + e.g] += 1.0 / static_cast<double>(ev.size());
    return out;
}

inline std::map<std::string, double> odecay(const std::vector<Ev>& ev,
                                            const std::vector<std::string>& codes, double lambda) {
    std::map<std::string, double> raw;
    for (const auto& c : codes) raw[c] = 0.0;
    const double t_last = ev.back().start;
    double total = 0.0;
    for (const auto& e : ev) {
        const double w = std::exp(-lambda * (t_last - e.start));
        raw[e.g] += w;
        total += w;
    }
    std::map<std::string, double> out;
    for (const auto& c : codes) out["decay_" + c] = raw[c] / total;
    return out;
}

inline std::map<std::string, double> otemporal(const std::vector<Ev>& ev,
                                               const std::vector<std::string>& codes) {
    std::map<std::string, double> out;
    const double span = ev.back().end - ev.front().start;
    out["total_span"] = span;
    out["gesture_rate"] = span > 0 ? static_cast<double>(ev.size()) / span : 0.0;
    for (const auto& c : codes) {
        double last = -1.0;
        bool seen = false;
        for (const auto& e : ev) {
            if (e.g == c) {
                last = e.start;
                seen = true;
            }
        }
        out["time_since_last_" + c] = seen ? ev.back().start - last : -1.0;
    }
    return out;
}

inline std::map<std::string, double> ostructure(const std::vector<Ev>& ev) {
    std::map<std::string, int> counts;
    double changes = 0;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        counts[ev[i].g]++;
        if (i && ev[i].g != ev[i - 1].g) changes += 1;
    }
    double entropy = 0;
    for (const auto& [g, c] : counts) {
        const double f = static_cast<double>(c) / static_cast<double>(ev.size());
        entropy -= f * std::log2(f);
    }
    return {{"unique_count", static_cast<double>(counts.size())},
            {"change_count", changes},
            {"entropy", entropy}};
}

inline std::map<std::string, double> ongram(const std::vector<Ev>& ev,
                                            const std::vector<std::string>& codes, std::size_t n) {
    std::map<std::string, double> out;
    const std::string prefix = std::to_string(n) + "gram";
    for (const auto& a : codes)
        for (const auto& b : codes) {
            if (n == 2) out[prefix + "_" + a + "_" + b] = 0.0;
            else
                for (const auto& c : codes) out[prefix + "_" + a + "_" + b + "_" + c] = 0.0;
        }
    const double denom = static_cast<double>(ev.size() >= n ? ev.size() - n + 1 : 1);
    if (ev.size() >= n) {
        for (std::size_t i = 0; i + n <= ev.size(); ++i) {
            std::string name = prefix;
            for (std::size_t j = 0; j < n; ++j) name += "_" + ev[i + j].g;
            out[name] += 1.0 / denom;
        }
    }
    return out;
}

inline std::map<std::string, double> otransition(const std::vector<Ev>& ev,
                                                 const std::vector<std::string>& codes) {
    std::map<std::string, double> counts;
    std::map<std::string, double> outgoing;
    for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
        counts[ev[i].g + "\t" + ev[i + 1].g] += 1;
        outgoing[ev[i].g] += 1;
    }
    std::map<std::string, double> out;
    for (const auto& a : codes)
        for (const auto& b : codes) {
            const auto it = counts.find(a + "\t" + b);
            const double c = it == counts.end() ? 0.0 : it->second;
            out["trans_" + a + "_" + b] = outgoing.count(a) ? c / outgoing[a] : 0.0;
        }
    return out;
}

inline std::map<std::string, double> odwell(const std::vector<Ev>& ev,
                                            const std::vector<std::string>& codes) {
    std::vector<double> global;
    std::map<std::string, std::vector<double>> per;
    for (std::size_t i = 1; i < ev.size(); ++i) {
        const double d = ev[i].start - ev[i - 1].start;
        global.push_back(d);
        per[ev[i].g].push_back(d);
    }
    std::map<std::string, double> out;
    for (const auto& [stat, v] : ostats7(global)) out["dwell_" + stat] = v;
    for (const auto& c : codes) {
        for (const auto& [stat, v] : ostats7(per[c])) out["dwell_before_" + stat + "_" + c] = v;
    }
    return out;
}

inline std::map<std::string, double> oduration(const std::vector<Ev>& ev,
                                               const std::vector<std::string>& codes) {
    std::vector<double> global;
    std::map<std::string, std::vector<double>> per;
    for (const auto& e : ev) {
        global.push_back(e.end - e.start);
        per[e.g].push_back(e.end - e.start);
    }
    auto pick = [](const std::vector<double>& v) {
        auto s = ostats7(v);
        double sum = 0;
        for (double x : v) sum += x;
        return std::map<std::string, double>{{"mean", s["mean"]}, {"std", s["std"]},
                                             {"skew", s["skew"]}, {"kurt", s["kurt"]}, {"sum", sum}};
    };
    std::map<std::string, double> out;
    for (const auto& [stat, v] : pick(global)) {
        out[stat == "sum" ? "duration_sum" : "dur_" + stat] = v;
    }
    for (const auto& c : codes) {
        for (const auto& [stat, v] : pick(per[c])) out["dur_" + stat + "_" + c] = v;
    }
    return out;
}

inline std::map<std::string, double> orunlength(const std::vector<Ev>& ev,
                                                const std::vector<std::string>& codes) {
    std::map<std::string, std::vector<double>> runs;
    std::size_t i = 0;
    while (i < ev.size()) {
        std::size_t j = i;
        while (j < ev.size() && ev[j].g == ev[i].g) ++j;
        runs[ev[i].g].push_back(static_cast<double>(j - i));
        i = j;
    }
    std::map<std::string, double> out;
    for (const auto& c : codes) {
        const auto& r = runs[c];
        out["max_run_" + c] = r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
        double sum = 0;
        for (double x : r) sum += x;
        out["avg_run_" + c] = r.empty() ? 0.0 : sum / static_cast<double>(r.size());
    }
    return out;
}

// --- sequence alignment ------------------------------------------------

inline std::size_t levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t prev = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t cur = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1,
                               prev + (a[i - 1] == b[j - 1] ? 0 : 1)});
            prev = cur;
        }
    }
    return row[b.size()];
}

}  // namespace oracle

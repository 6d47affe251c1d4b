#pragma once

#include <map>
#include <string>
#include <vector>

#include "gseq/types.hpp"

namespace gseq {

struct FeatureConfig {
    double decay_lambda = 0.01;  // per-second rate for decay-weighted counts
};

// Deterministic feature name list for an alphabet of size k. Families, in
// order: frequency (k), decay (k), temporal (2 + k), structure (3),
// 2-grams (k^2), 3-grams (k^3), transitions (k^2), dwell (7 + 7k),
// duration (5 + 5k), run length (2k). Total k^3 + 2k^2 + 17k + 17.
class FeatureSchema {
public:
    explicit FeatureSchema(GestureAlphabet alphabet, FeatureConfig config = {});

    const GestureAlphabet& alphabet() const { return alphabet_; }
    const FeatureConfig& config() const { return config_; }
    const std::vector<std::string>& names() const { return names_; }
    std::size_t size() const { return names_.size(); }

private:
    GestureAlphabet alphabet_;
    FeatureConfig config_;
    std::vector<std::string> names_;
};

// Values aligned with FeatureSchema::names().
struct FeatureVector {
    std::string case_id;
    std::vector<double> values;
};

// Every family drops excluded events first; m below is the count that
// remains. Families marked (m >= 1) throw ValidationError on an effectively
// empty sequence. Degenerate statistics use the documented sentinels, never
// NaN: summary stats fall back to 0, an absent class's time_since_last is -1.

// freq_<g> = count(g) / m. (m >= 1)
std::map<std::string, double> frequency_features(const GestureSequence& seq, const GestureAlphabet& alphabet);

// decay_<g>: exponential decay-weighted counts over start times, normalized
// to sum 1; lambda = 0 reduces to plain frequencies. (m >= 1)
std::map<std::string, double> decay_features(const GestureSequence& seq, const GestureAlphabet& alphabet,
                                             double lambda);

// total_span, gesture_rate, time_since_last_<g> relative to the final start
// time; -1 when g is absent. (m >= 1)
std::map<std::string, double> temporal_features(const GestureSequence& seq, const GestureAlphabet& alphabet);

// unique_count, change_count, entropy (bits). (m >= 1)
std::map<std::string, double> structure_features(const GestureSequence& seq);

// n in {2,3}: normalized contiguous subsequence counts, denominator
// max(m - n + 1, 1); all zeros when m < n.
std::map<std::string, double> ngram_features(const GestureSequence& seq, const GestureAlphabet& alphabet,
                                             std::size_t n);

// trans_<i>_<j> = count(i -> j) / count(i as a non-final event); rows with no
// outgoing transitions are all-zero.
std::map<std::string, double> transition_features(const GestureSequence& seq, const GestureAlphabet& alphabet);

// Inter-onset intervals: global mean/std/min/max/median/skew/kurt plus the
// same seven over the dwell preceding each class.
std::map<std::string, double> dwell_features(const GestureSequence& seq, const GestureAlphabet& alphabet);

// Event durations: mean/std/skew/kurt/sum globally (duration_sum) and per
// class (dur_*_<g>); absent class -> all zeros. (m >= 1)
std::map<std::string, double> duration_features(const GestureSequence& seq, const GestureAlphabet& alphabet);

// max_run_<g> / avg_run_<g> over maximal blocks of consecutive equal labels.
std::map<std::string, double> runlength_features(const GestureSequence& seq, const GestureAlphabet& alphabet);

// All families concatenated in schema order. (m >= 1)
FeatureVector assemble_feature_vector(const GestureSequence& seq, const FeatureSchema& schema);

// Sample summary statistics with the sentinel conventions above.
struct SummaryStats {
    double mean = 0, stddev = 0, min = 0, max = 0, median = 0, skew = 0, kurt = 0, sum = 0;
};
SummaryStats summarize(std::vector<double> values);

}  // namespace gseq

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gseq/types.hpp"

namespace gseq {

struct SegmentationConfig {
    double penalty = 0.5;
    // Kernel bandwidth; unset means the median heuristic (resolve_gamma).
    std::optional<double> gamma;
    std::size_t min_segment_frames = 2;
    // Multiplies class mean probabilities at labeling; missing codes get 1.
    std::map<std::string, double> class_weights;
    // PELT candidate pruning; the unpruned O(n^2) DP is kept reachable for
    // equivalence checks.
    bool prune = true;
};

struct Segment {
    std::size_t start_frame = 0;
    std::size_t end_frame = 0;  // exclusive
    std::string label;
    std::vector<double> mean_prob;
};

// Within-segment scatter of rows [a, b) in the Gaussian-kernel feature space:
//   (b - a) - (1 / (b - a)) * sum_{s,t} exp(-gamma * |y_s - y_t|^2)
// Nonnegative; zero iff all rows in the range are identical.
double rbf_cost(const FrameProbabilityStream& stream, std::size_t a, std::size_t b, double gamma);

// Median heuristic: 1 / median of pairwise squared distances over a
// deterministic subsample (all pairs when n <= 512, otherwise a strided
// subset of 512 frames); falls back to 1 when the median is 0.
double resolve_gamma(const FrameProbabilityStream& stream);

struct PeltResult {
    // Ascending, excludes 0, includes n.
    std::vector<std::size_t> breakpoints;
    // Sum of segment costs plus penalty * number of segments.
    double total_cost = 0.0;
};

PeltResult pelt_changepoints(const FrameProbabilityStream& stream, const SegmentationConfig& config);

// Labels each block with argmax_c weight_c * mean prob_c (ties to alphabet
// order) and merges adjacent equal labels.
std::vector<Segment> label_segments(const FrameProbabilityStream& stream,
                                    const std::vector<std::size_t>& breakpoints,
                                    const std::map<std::string, double>& class_weights);

// resolve_gamma -> pelt_changepoints -> label_segments -> frame-to-time
// conversion.
GestureSequence aggregate(const FrameProbabilityStream& stream, const SegmentationConfig& config);

}  // namespace gseq

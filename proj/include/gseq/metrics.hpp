#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>

#include "gseq/types.hpp"

namespace gseq {

// Mann-Whitney AUC with half credit for ties, computed by rank sums in
// O(n log n). Labels are {0,1}; both classes must be present.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

struct AucReport {
    // nullopt = class absent from the ground truth (or has fewer than two
    // labeled frames of either polarity, which would make AUC unstable).
    std::map<std::string, std::optional<double>> per_class;
    double macro = 0.0;  // mean over evaluated classes
    std::size_t n_frames_evaluated = 0;

    std::size_t present_count() const;
};

// One-vs-rest AUC per class over frames labeled by the ground-truth
// sequence; unlabeled frames are excluded from the comparison.
AucReport frame_level_auc(const FrameProbabilityStream& stream, const GestureSequence& truth);

// Mean of present-class AUCs.
double video_level_auc(const AucReport& report);

}  // namespace gseq

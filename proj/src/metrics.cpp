#include "gseq/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "gseq/util.hpp"

namespace gseq {

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw ValidationError("roc_auc: scores/labels length mismatch");
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (const int y : labels) {
        if (y != 0 && y != 1) throw ValidationError("roc_auc: labels must be 0 or 1");
        n_pos += static_cast<std::size_t>(y);
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw ValidationError("roc_auc: undefined AUC, only one class present");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Rank sum of positives with average ranks over tie groups. Ranks are
    // half-integers, so the arithmetic below is exact and matches the
    // pairwise count with 0.5 tie credit.
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
        for (std::size_t t = i; t < j; ++t) {
            if (labels[order[t]] == 1) pos_rank_sum += avg_rank;
        }
        i = j;
    }
    const double np = static_cast<double>(n_pos);
    const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
    return u / (np * static_cast<double>(n_neg));
}

std::size_t AucReport::present_count() const {
    std::size_t count = 0;
    for (const auto& [code, auc] : per_class) count += auc.has_value() ? 1 : 0;
    return count;
}

AucReport frame_level_auc(const FrameProbabilityStream& stream, const GestureSequence& truth) {
    const std::size_t n = stream.frames();
    const std::size_t k = stream.alphabet.size();
    const auto labels = frame_labels(truth, stream.alphabet, stream.dt, stream.t0, n);

    std::vector<std::size_t> keep;
    keep.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != kUnlabeledFrame) keep.push_back(i);
    }
    if (keep.empty()) throw ValidationError("frame_level_auc: no labeled frames");

    AucReport report;
    report.n_frames_evaluated = keep.size();

    std::vector<double> scores(keep.size());
    std::vector<int> binary(keep.size());
    double auc_sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t n_pos = 0;
        for (std::size_t i = 0; i < keep.size(); ++i) {
            scores[i] = stream.row(keep[i])[c];
            binary[i] = labels[keep[i]] == static_cast<int>(c) ? 1 : 0;
            n_pos += static_cast<std::size_t>(binary[i]);
        }
        const std::size_t n_neg = keep.size() - n_pos;
        if (n_pos < 2 || n_neg < 2) {
            report.per_class[stream.alphabet.code(c)] = std::nullopt;
            continue;
        }
        const double auc = roc_auc(scores, binary);
        report.per_class[stream.alphabet.code(c)] = auc;
        auc_sum += auc;
    }

    const std::size_t present = report.present_count();
    if (present == 0) throw ValidationError("frame_level_auc: no class has enough labeled frames to evaluate");
    report.macro = auc_sum / static_cast<double>(present);
    return report;
}

double video_level_auc(const AucReport& report) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& [code, auc] : report.per_class) {
        if (auc) {
            sum += *auc;
            ++count;
        }
    }
    if (count == 0) throw ValidationError("video_level_auc: no present classes");
    return sum / static_cast<double>(count);
}

}  // namespace gseq

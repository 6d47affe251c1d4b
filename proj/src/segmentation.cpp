#include "gseq/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gseq/util.hpp"

namespace gseq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sq_distance(std::span<const double> a, std::span<const double> b) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return d2;
}

// Incremental segment scatter for a sweep of the exclusive end t = 1..n.
// After advance() to end t, cost(s) is the rbf cost of [s, t) for any s < t,
// in O(1); each advance costs O(n). Keeps the DP at O(n^2) total without
// materializing the Gram matrix.
class RbfCostSweep {
public:
    RbfCostSweep(const FrameProbabilityStream& stream, double gamma)
        : stream_(stream), gamma_(gamma), end_(0) {
        seg_sum_.assign(stream.frames() + 1, 0.0);
        col_.assign(stream.frames() + 1, 0.0);
    }

    std::size_t end() const { return end_; }

    void advance() {
        const std::size_t t = end_;  // index of the row being appended
        const auto row_t = stream_.row(t);
        // col_[s] = sum_{i in [s, t)} k(y_i, y_t)
        col_[t] = 0.0;
        for (std::size_t i = t; i-- > 0;) {
            col_[i] = col_[i + 1] + std::exp(-gamma_ * sq_distance(stream_.row(i), row_t));
        }
        for (std::size_t s = 0; s <= t; ++s) {
            seg_sum_[s] += 2.0 * col_[s] + 1.0;  // k(y_t, y_t) = 1
        }
        ++end_;
    }

    double cost(std::size_t s) const {
        const double len = static_cast<double>(end_ - s);
        return len - seg_sum_[s] / len;
    }

private:
    const FrameProbabilityStream& stream_;
    double gamma_;
    std::size_t end_;
    std::vector<double> seg_sum_;
    std::vector<double> col_;
};

}  // namespace

double rbf_cost(const FrameProbabilityStream& stream, std::size_t a, std::size_t b, double gamma) {
    if (!(a < b) || b > stream.frames()) throw ValidationError("rbf_cost: empty or out-of-range segment");
    if (!(gamma > 0.0)) throw ValidationError("rbf_cost: gamma must be positive");
    const double len = static_cast<double>(b - a);
    double sum = len;  // diagonal terms k(y_t, y_t) = 1
    for (std::size_t i = a; i < b; ++i) {
        for (std::size_t j = i + 1; j < b; ++j) {
            sum += 2.0 * std::exp(-gamma * sq_distance(stream.row(i), stream.row(j)));
        }
    }
    return len - sum / len;
}

double resolve_gamma(const FrameProbabilityStream& stream) {
    const std::size_t n = stream.frames();
    if (n < 2) throw ValidationError("resolve_gamma: need at least 2 frames");

    std::vector<std::size_t> sample;
    if (n <= 512) {
        sample.resize(n);
        for (std::size_t i = 0; i < n; ++i) sample[i] = i;
    } else {
        const std::size_t stride = (n + 511) / 512;
        for (std::size_t i = 0; i < n; i += stride) sample.push_back(i);
    }

    std::vector<double> dists;
    dists.reserve(sample.size() * (sample.size() - 1) / 2);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        for (std::size_t j = i + 1; j < sample.size(); ++j) {
            dists.push_back(sq_distance(stream.row(sample[i]), stream.row(sample[j])));
        }
    }
    std::sort(dists.begin(), dists.end());
    const std::size_t m = dists.size();
    const double median = (m % 2 == 1) ? dists[m / 2] : 0.5 * (dists[m / 2 - 1] + dists[m / 2]);
    if (!(median > 0.0)) return 1.0;
    return 1.0 / median;
}

PeltResult pelt_changepoints(const FrameProbabilityStream& stream, const SegmentationConfig& config) {
    const std::size_t n = stream.frames();
    if (n < 1) throw ValidationError("pelt_changepoints: stream has no frames");
    if (config.penalty < 0.0) throw ValidationError("pelt_changepoints: penalty must be >= 0");
    if (config.min_segment_frames < 1) throw ValidationError("pelt_changepoints: min_segment_frames must be >= 1");

    const double gamma = config.gamma ? *config.gamma : (n >= 2 ? resolve_gamma(stream) : 1.0);
    if (!(gamma > 0.0)) throw ValidationError("pelt_changepoints: gamma must be positive");
    const double beta = config.penalty;
    const std::size_t min_len = config.min_segment_frames;

    std::vector<double> best(n + 1, kInf);
    std::vector<std::size_t> prev(n + 1, 0);
    best[0] = 0.0;

    struct Candidate {
        std::size_t s;
        std::size_t prunable_since = 0;
        bool prunable = false;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(n);

    RbfCostSweep sweep(stream, gamma);
    for (std::size_t t = 1; t <= n; ++t) {
        sweep.advance();
        if (t >= min_len && best[t - min_len] < kInf) {
            candidates.push_back({t - min_len});
        }

        // A candidate marked prunable at t0 is dominated by splitting at t0
        // for every end >= t0 + min_len; before that the split would violate
        // the minimum segment length, so removal is delayed. This keeps
        // pruned and unpruned runs identical even with min_len > 1.
        if (config.prune) {
            std::erase_if(candidates, [&](const Candidate& c) {
                return c.prunable && t >= c.prunable_since + min_len;
            });
        }

        double best_value = kInf;
        std::size_t best_s = 0;
        for (const Candidate& c : candidates) {
            const double value = best[c.s] + sweep.cost(c.s) + beta;
            if (value < best_value) {
                best_value = value;
                best_s = c.s;
            }
        }
        best[t] = best_value;
        prev[t] = best_s;

        if (config.prune && best_value < kInf) {
            for (Candidate& c : candidates) {
                if (!c.prunable && best[c.s] + sweep.cost(c.s) > best_value) {
                    c.prunable = true;
                    c.prunable_since = t;
                }
            }
        }
    }

    PeltResult result;
    if (best[n] == kInf) {
        // No partition satisfies min_len (n < min_len): fall back to a single
        // segment over the whole stream.
        result.breakpoints = {n};
        result.total_cost = rbf_cost(stream, 0, n, gamma) + beta;
        return result;
    }
    result.total_cost = best[n];
    for (std::size_t t = n; t > 0; t = prev[t]) {
        result.breakpoints.push_back(t);
    }
    std::reverse(result.breakpoints.begin(), result.breakpoints.end());
    return result;
}

std::vector<Segment> label_segments(const FrameProbabilityStream& stream,
                                    const std::vector<std::size_t>& breakpoints,
                                    const std::map<std::string, double>& class_weights) {
    const std::size_t n = stream.frames();
    const std::size_t k = stream.alphabet.size();
    if (breakpoints.empty() || breakpoints.back() != n) {
        throw ValidationError("label_segments: breakpoints must end at the frame count");
    }
    std::vector<double> weights(k, 1.0);
    for (const auto& [code, w] : class_weights) {
        if (!(w > 0.0)) throw ValidationError("label_segments: class weight must be positive");
        const auto idx = stream.alphabet.index_of(code);
        if (!idx) throw ValidationError("label_segments: weight for unknown class '" + code + "'");
        weights[*idx] = w;
    }

    std::vector<Segment> segments;
    std::size_t start = 0;
    std::vector<double> sums(k, 0.0);
    for (const std::size_t end : breakpoints) {
        if (end <= start || end > n) throw ValidationError("label_segments: breakpoints must be increasing");
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t i = start; i < end; ++i) {
            const auto row = stream.row(i);
            for (std::size_t c = 0; c < k; ++c) sums[c] += row[c];
        }
        const double len = static_cast<double>(end - start);
        std::size_t label = 0;
        double best = -kInf;
        for (std::size_t c = 0; c < k; ++c) {
            const double v = weights[c] * sums[c] / len;
            if (v > best) {  // ties keep the earliest alphabet index
                best = v;
                label = c;
            }
        }
        if (!segments.empty() && segments.back().label == stream.alphabet.code(label)) {
            // merge with the previous block
            Segment& back = segments.back();
            const double prev_len = static_cast<double>(back.end_frame - back.start_frame);
            for (std::size_t c = 0; c < k; ++c) {
                back.mean_prob[c] = (back.mean_prob[c] * prev_len + sums[c]) / (prev_len + len);
            }
            back.end_frame = end;
        } else {
            Segment seg;
            seg.start_frame = start;
            seg.end_frame = end;
            seg.label = stream.alphabet.code(label);
            seg.mean_prob.resize(k);
            for (std::size_t c = 0; c < k; ++c) seg.mean_prob[c] = sums[c] / len;
            segments.push_back(std::move(seg));
        }
        start = end;
    }
    return segments;
}

GestureSequence aggregate(const FrameProbabilityStream& stream, const SegmentationConfig& config) {
    validate_stream(stream);
    const auto pelt = pelt_changepoints(stream, config);
    const auto segments = label_segments(stream, pelt.breakpoints, config.class_weights);

    std::vector<GestureEvent> events;
    events.reserve(segments.size());
    for (const auto& seg : segments) {
        GestureEvent e;
        e.label = seg.label;
        e.start = stream.t0 + static_cast<double>(seg.start_frame) * stream.dt;
        e.end = stream.t0 + static_cast<double>(seg.end_frame) * stream.dt;
        events.push_back(std::move(e));
    }
    return make_sequence(stream.case_id, std::move(events), stream.alphabet);
}

}  // namespace gseq

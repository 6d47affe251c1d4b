#include "gseq/types.hpp"

#include <algorithm>
#include <cmath>

#include "gseq/util.hpp"

namespace gseq {

double GestureSequence::span() const {
    if (events.empty()) return 0.0;
    return events.back().end - events.front().start;
}

GestureSequence GestureSequence::without_excluded() const {
    GestureSequence out;
    out.case_id = case_id;
    out.events.reserve(events.size());
    for (const auto& e : events) {
        if (!e.excluded) out.events.push_back(e);
    }
    return out;
}

GestureSequence make_sequence(std::string case_id, std::vector<GestureEvent> events,
                              const GestureAlphabet& alphabet) {
    std::stable_sort(events.begin(), events.end(),
                     [](const GestureEvent& a, const GestureEvent& b) { return a.start < b.start; });
    for (const auto& e : events) {
        if (!std::isfinite(e.start) || !std::isfinite(e.end)) {
            throw ValidationError("event times must be finite (case " + case_id + ")");
        }
        if (e.end < e.start) {
            throw ValidationError("event end " + format_double(e.end) + " precedes start " +
                                  format_double(e.start) + " (case " + case_id + ")");
        }
        if (!e.excluded && !alphabet.contains(e.label)) {
            throw ValidationError("unknown gesture class '" + e.label + "' (case " + case_id + ")");
        }
    }
    return GestureSequence{std::move(case_id), std::move(events)};
}

void validate_stream(const FrameProbabilityStream& stream) {
    const std::size_t k = stream.alphabet.size();
    if (stream.probs.empty()) throw ValidationError("probability stream has no rows");
    if (stream.probs.size() % k != 0) throw ValidationError("probability row width does not match alphabet");
    if (!(stream.dt > 0.0)) throw ValidationError("probability stream dt must be positive");
    for (std::size_t i = 0; i < stream.frames(); ++i) {
        double sum = 0.0;
        for (const double p : stream.row(i)) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw ValidationError("probability out of [0,1] at frame " + std::to_string(i));
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-6) {
            throw ValidationError("probability row " + std::to_string(i) + " sums to " + format_double(sum));
        }
    }
}

std::vector<int> frame_labels(const GestureSequence& seq, const GestureAlphabet& alphabet,
                              double dt, double t0, std::size_t n) {
    if (n < 1) throw ValidationError("frame count must be >= 1");
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");

    std::vector<int> labels(n, kUnlabeledFrame);
    const auto& events = seq.events;
    std::size_t open = 0;  // events with start <= t are [0, open)
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t0 + static_cast<double>(i) * dt;
        while (open < events.size() && events[open].start <= t) ++open;
        // Later-starting event wins; scan back for the newest one still covering t.
        for (std::size_t j = open; j-- > 0;) {
            if (events[j].end > t) {
                if (!events[j].excluded) {
                    const auto idx = alphabet.index_of(events[j].label);
                    if (!idx) throw ValidationError("label '" + events[j].label + "' not in alphabet");
                    labels[i] = static_cast<int>(*idx);
                }
                break;
            }
        }
    }
    return labels;
}

}  // namespace gseq

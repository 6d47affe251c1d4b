#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "gseq/alphabet.hpp"

namespace gseq {

struct GestureEvent {
    std::string label;
    double start = 0.0;
    double end = 0.0;
    bool excluded = false;

    double duration() const { return end - start; }
};

// Events ordered ascending by start time. Excluded (X-labeled) events stay on
// the sequence for serialization and frame accounting but are dropped from
// all feature computations.
struct GestureSequence {
    std::string case_id;
    std::vector<GestureEvent> events;

    bool empty() const { return events.empty(); }
    std::size_t size() const { return events.size(); }

    // Last event's end minus first event's start; 0 for empty sequences.
    double span() const;

    GestureSequence without_excluded() const;
};

// Sorts events by start (stable) and checks invariants: end >= start, every
// non-excluded label in the alphabet.
GestureSequence make_sequence(std::string case_id, std::vector<GestureEvent> events,
                              const GestureAlphabet& alphabet);

// Per-frame class probabilities sampled at a fixed interval, row-major.
struct FrameProbabilityStream {
    std::string case_id;
    GestureAlphabet alphabet = GestureAlphabet::dominant10();
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> probs;  // frames() x alphabet.size()

    std::size_t frames() const { return alphabet.size() == 0 ? 0 : probs.size() / alphabet.size(); }
    std::span<const double> row(std::size_t i) const {
        return {probs.data() + i * alphabet.size(), alphabet.size()};
    }
    double time_at(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
};

// Throws ValidationError unless rows are non-empty, entries lie in [0,1] and
// every row sums to 1 within 1e-6.
void validate_stream(const FrameProbabilityStream& stream);

struct OutcomeTable {
    std::map<std::string, int> entries;  // case_id -> 1 (good recovery) / 0 (poor)
};

inline constexpr int kUnlabeledFrame = -1;

// Label of frame i (time t0 + i*dt): the alphabet index of the event
// containing that time, or kUnlabeledFrame when no event covers it or the
// covering event is excluded. When events overlap, the later-starting event
// wins, so a boundary frame at one event's end / the next one's start belongs
// to the next event.
std::vector<int> frame_labels(const GestureSequence& seq, const GestureAlphabet& alphabet,
                              double dt, double t0, std::size_t n);

}  // namespace gseq

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gseq/types.hpp"

namespace gseq {

// Markov surrogate for real gesture flow; the synthetic cohort replaces the
// private clinical data as the end-to-end oracle.
struct SynthConfig {
    GestureAlphabet alphabet = GestureAlphabet::dominant10();
    std::size_t n_events = 270;
    double mean_duration = 2.0;       // seconds
    double duration_spread = 0.5;     // log-space sd of the log-normal draw
    // Row-stochastic k x k matrix, row-major. Unset means uniform over the
    // *other* classes: contiguous events make a self-transition
    // indistinguishable from one longer event, so the default avoids them.
    std::optional<std::vector<double>> transition;
    // Per-class multiplier on drawn durations (cohort outcome effects).
    std::map<std::string, double> duration_scale;
    double dt = 0.1667;               // seconds per rendered frame
    double noise_sigma = 0.0;         // logit-space Gaussian noise
    double softmax_temperature = 0.25;
    std::uint64_t seed = 0;
};

// Uniform-over-other-classes transition matrix.
std::vector<double> uniform_transition(std::size_t k);

GestureSequence generate_sequence(const SynthConfig& config, std::string case_id = "synthetic");

// Per frame: logits = one-hot(true class) / temperature + sigma * noise,
// softmax-normalized. Frames cover [0, span) at dt spacing.
FrameProbabilityStream render_stream(const GestureSequence& seq, const SynthConfig& config);

// Effects planted into the good-outcome group, mirroring the reported
// directions: more self-persistent and longer peel-type activity, less
// coagulation-type activity.
struct OutcomeModel {
    double effect = 0.0;  // in [0, 1); 0 plants nothing
    std::string boost_class = "p";
    std::string suppress_class = "g";
};

struct CohortCase {
    SynthConfig config;  // per-case seed (base seed + index) and effects
    GestureSequence sequence;
    int outcome = 0;
};

// Deterministic cohort: case i uses seed base+i and outcome i % 2, so
// parallel and serial generation agree.
std::vector<CohortCase> generate_cohort(const SynthConfig& base, std::size_t n_cases,
                                        const OutcomeModel& model);

OutcomeTable cohort_outcomes(const std::vector<CohortCase>& cohort);

}  // namespace gseq

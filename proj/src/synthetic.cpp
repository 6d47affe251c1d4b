#include "gseq/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gseq/rng.hpp"
#include "gseq/util.hpp"

namespace gseq {

namespace {

void validate_config(const SynthConfig& config) {
    if (config.n_events < 1) throw ValidationError("synth: n_events must be >= 1");
    if (!(config.mean_duration > 0.0)) throw ValidationError("synth: mean_duration must be positive");
    if (config.duration_spread < 0.0) throw ValidationError("synth: duration_spread must be >= 0");
    if (!(config.dt > 0.0)) throw ValidationError("synth: dt must be positive");
    if (config.noise_sigma < 0.0) throw ValidationError("synth: noise_sigma must be >= 0");
    if (!(config.softmax_temperature > 0.0)) throw ValidationError("synth: temperature must be positive");
    const std::size_t k = config.alphabet.size();
    if (config.transition) {
        if (config.transition->size() != k * k) throw ValidationError("synth: transition matrix must be k x k");
        for (std::size_t r = 0; r < k; ++r) {
            double sum = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                const double p = (*config.transition)[r * k + c];
                if (p < 0.0) throw ValidationError("synth: negative transition probability");
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-9) {
                throw ValidationError("synth: transition row " + std::to_string(r) + " sums to " +
                                      format_double(sum));
            }
        }
    }
    for (const auto& [code, scale] : config.duration_scale) {
        if (!config.alphabet.contains(code)) throw ValidationError("synth: duration scale for unknown class");
        if (!(scale > 0.0)) throw ValidationError("synth: duration scale must be positive");
    }
}

std::size_t draw_categorical(Rng& rng, const double* row, std::size_t k) {
    const double u = rng.uniform();
    double cum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        cum += row[c];
        if (u < cum) return c;
    }
    return k - 1;
}

}  // namespace

std::vector<double> uniform_transition(std::size_t k) {
    std::vector<double> m(k * k, 1.0 / static_cast<double>(k - 1));
    for (std::size_t c = 0; c < k; ++c) m[c * k + c] = 0.0;
    return m;
}

GestureSequence generate_sequence(const SynthConfig& config, std::string case_id) {
    validate_config(config);
    const std::size_t k = config.alphabet.size();
    const std::vector<double> transition = config.transition ? *config.transition : uniform_transition(k);

    Rng rng(derive_seed(config.seed, 0));
    const double sigma = config.duration_spread;
    const double mu = std::log(config.mean_duration) - 0.5 * sigma * sigma;

    std::vector<GestureEvent> events;
    events.reserve(config.n_events);
    double cursor = 0.0;
    std::size_t cls = rng.uniform_index(k);
    for (std::size_t i = 0; i < config.n_events; ++i) {
        if (i > 0) cls = draw_categorical(rng, transition.data() + cls * k, k);
        double duration = sigma == 0.0 ? config.mean_duration : std::exp(mu + sigma * rng.normal());
        const auto scale = config.duration_scale.find(config.alphabet.code(cls));
        if (scale != config.duration_scale.end()) duration *= scale->second;

        GestureEvent e;
        e.label = config.alphabet.code(cls);
        e.start = cursor;
        e.end = cursor + duration;
        cursor = e.end;
        events.push_back(std::move(e));
    }
    return make_sequence(std::move(case_id), std::move(events), config.alphabet);
}

FrameProbabilityStream render_stream(const GestureSequence& seq, const SynthConfig& config) {
    validate_config(config);
    if (seq.empty()) throw ValidationError("render_stream: empty sequence");
    const std::size_t k = config.alphabet.size();
    const double t0 = seq.events.front().start;
    const double span = seq.span();
    const std::size_t n = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(span / config.dt - 1e-9)));

    Rng rng(derive_seed(config.seed, 1));
    FrameProbabilityStream stream;
    stream.case_id = seq.case_id;
    stream.alphabet = config.alphabet;
    stream.t0 = t0;
    stream.dt = config.dt;
    stream.probs.assign(n * k, 0.0);

    std::vector<double> logits(k, 0.0);
    std::size_t event_idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = stream.time_at(i);
        while (event_idx + 1 < seq.events.size() && seq.events[event_idx].end <= t) ++event_idx;
        const auto cls = config.alphabet.index_of(seq.events[event_idx].label);
        if (!cls) throw ValidationError("render_stream: sequence label outside alphabet");

        for (std::size_t c = 0; c < k; ++c) {
            logits[c] = (c == *cls ? 1.0 / config.softmax_temperature : 0.0);
            if (config.noise_sigma > 0.0) logits[c] += config.noise_sigma * rng.normal();
        }
        const double top = *std::max_element(logits.begin(), logits.end());
        double sum = 0.0;
        double* row = stream.probs.data() + i * k;
        for (std::size_t c = 0; c < k; ++c) {
            row[c] = std::exp(logits[c] - top);
            sum += row[c];
        }
        for (std::size_t c = 0; c < k; ++c) row[c] /= sum;
    }
    validate_stream(stream);
    return stream;
}

std::vector<CohortCase> generate_cohort(const SynthConfig& base, std::size_t n_cases,
                                        const OutcomeModel& model) {
    validate_config(base);
    if (n_cases < 1) throw ValidationError("generate_cohort: n_cases must be >= 1");
    if (!(model.effect >= 0.0 && model.effect < 1.0)) {
        throw ValidationError("generate_cohort: effect must lie in [0, 1)");
    }
    const std::size_t k = base.alphabet.size();
    std::optional<std::size_t> boost, suppress;
    if (model.effect > 0.0) {
        boost = base.alphabet.index_of(model.boost_class);
        suppress = base.alphabet.index_of(model.suppress_class);
        if (!boost || !suppress) throw ValidationError("generate_cohort: effect classes not in alphabet");
    }

    // Good-outcome cases get a boosted self-transition and longer durations
    // for the boost class and a down-weighted column for the suppressed one.
    std::vector<double> good_transition = base.transition ? *base.transition : uniform_transition(k);
    if (model.effect > 0.0) {
        for (std::size_t r = 0; r < k; ++r) {
            double* row = good_transition.data() + r * k;
            row[*suppress] *= 1.0 - model.effect;
            if (r == *boost) row[*boost] += model.effect;
            double sum = 0.0;
            for (std::size_t c = 0; c < k; ++c) sum += row[c];
            for (std::size_t c = 0; c < k; ++c) row[c] /= sum;
        }
    }

    std::vector<CohortCase> cohort;
    cohort.reserve(n_cases);
    char case_id[32];
    for (std::size_t i = 0; i < n_cases; ++i) {
        CohortCase entry;
        entry.outcome = static_cast<int>(i % 2);
        entry.config = base;
        entry.config.seed = base.seed + i;
        if (entry.outcome == 1 && model.effect > 0.0) {
            entry.config.transition = good_transition;
            entry.config.duration_scale[model.boost_class] =
                entry.config.duration_scale.count(model.boost_class)
                    ? entry.config.duration_scale[model.boost_class] * (1.0 + model.effect)
                    : 1.0 + model.effect;
        }
        std::snprintf(case_id, sizeof(case_id), "case_%04zu", i);
        entry.sequence = generate_sequence(entry.config, case_id);
        cohort.push_back(std::move(entry));
    }
    return cohort;
}

OutcomeTable cohort_outcomes(const std::vector<CohortCase>& cohort) {
    OutcomeTable table;
    for (const auto& entry : cohort) {
        table.entries[entry.sequence.case_id] = entry.outcome;
    }
    return table;
}

}  // namespace gseq

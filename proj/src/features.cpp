#include "gseq/features.hpp"

#include <algorithm>
#include <cmath>

#include "gseq/util.hpp"

namespace gseq {

namespace {

std::vector<std::size_t> class_indices(const GestureSequence& seq, const GestureAlphabet& alphabet) {
    std::vector<std::size_t> idx;
    idx.reserve(seq.events.size());
    for (const auto& e : seq.events) {
        const auto i = alphabet.index_of(e.label);
        if (!i) throw ValidationError("label '" + e.label + "' not in alphabet");
        idx.push_back(*i);
    }
    return idx;
}

void require_events(const GestureSequence& seq, const char* family) {
    if (seq.events.empty()) {
        throw ValidationError(std::string(family) + ": sequence has no non-excluded events (case " +
                              seq.case_id + ")");
    }
}

void emit_stats(std::map<std::string, double>& out, const std::string& prefix, const std::string& suffix,
                const SummaryStats& s, bool with_order_stats) {
    const std::string tail = suffix.empty() ? "" : "_" + suffix;
    out[prefix + "mean" + tail] = s.mean;
    out[prefix + "std" + tail] = s.stddev;
    if (with_order_stats) {
        out[prefix + "min" + tail] = s.min;
        out[prefix + "max" + tail] = s.max;
        out[prefix + "median" + tail] = s.median;
    }
    out[prefix + "skew" + tail] = s.skew;
    out[prefix + "kurt" + tail] = s.kurt;
}

}  // namespace

SummaryStats summarize(std::vector<double> values) {
    SummaryStats s;
    const std::size_t n = values.size();
    if (n == 0) return s;

    std::sort(values.begin(), values.end());
    s.min = values.front();
    s.max = values.back();
    s.median = (n % 2 == 1) ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);

    double sum = 0.0;
    for (const double v : values) sum += v;
    s.sum = sum;
    s.mean = sum / static_cast<double>(n);
    if (n == 1) return s;

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (const double v : values) {
        const double d = v - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    s.stddev = std::sqrt(m2 / static_cast<double>(n - 1));
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    // Fisher-Pearson g1 and excess g2; forced to 0 below 3 samples or at
    // zero spread.
    if (n >= 3 && m2 > 0.0) {
        s.skew = m3 / std::pow(m2, 1.5);
        s.kurt = m4 / (m2 * m2) - 3.0;
    }
    return s;
}

FeatureSchema::FeatureSchema(GestureAlphabet alphabet, FeatureConfig config)
    : alphabet_(std::move(alphabet)), config_(config) {
    if (config_.decay_lambda < 0.0) throw ValidationError("decay_lambda must be >= 0");
    const auto& codes = alphabet_.codes();

    for (const auto& c : codes) names_.push_back("freq_" + c);
    for (const auto& c : codes) names_.push_back("decay_" + c);
    names_.push_back("total_span");
    names_.push_back("gesture_rate");
    for (const auto& c : codes) names_.push_back("time_since_last_" + c);
    names_.push_back("unique_count");
    names_.push_back("change_count");
    names_.push_back("entropy");
    for (const auto& a : codes)
        for (const auto& b : codes) names_.push_back("2gram_" + a + "_" + b);
    for (const auto& a : codes)
        for (const auto& b : codes)
            for (const auto& c : codes) names_.push_back("3gram_" + a + "_" + b + "_" + c);
    for (const auto& a : codes)
        for (const auto& b : codes) names_.push_back("trans_" + a + "_" + b);
    for (const char* stat : {"mean", "std", "min", "max", "median", "skew", "kurt"})
        names_.push_back(std::string("dwell_") + stat);
    for (const auto& c : codes)
        for (const char* stat : {"mean", "std", "min", "max", "median", "skew", "kurt"})
            names_.push_back("dwell_before_" + std::string(stat) + "_" + c);
    names_.push_back("dur_mean");
    names_.push_back("dur_std");
    names_.push_back("dur_skew");
    names_.push_back("dur_kurt");
    names_.push_back("duration_sum");
    for (const auto& c : codes)
        for (const char* stat : {"mean", "std", "skew", "kurt", "sum"})
            names_.push_back("dur_" + std::string(stat) + "_" + c);
    for (const auto& c : codes) names_.push_back("max_run_" + c);
    for (const auto& c : codes) names_.push_back("avg_run_" + c);
}

std::map<std::string, double> frequency_features(const GestureSequence& raw, const GestureAlphabet& alphabet) {
    const GestureSequence seq = raw.without_excluded();
    require_events(seq, "frequency_features");
    const auto idx = class_indices(seq, alphabet);
    std::vector<double> counts(alphabet.size(), 0.0);
    for (const auto i : idx) counts[i] += 1.0;
    std::map<std::string, double> out;
    for (std::size_t c = 0; c < alphabet.size(); ++c) {
        out["freq_" + alphabet.code(c)] = counts[c] / static_cast<double>(idx.size());
    }
    return out;
}

std::map<std::string, double> decay_features(const GestureSequence& raw, const GestureAlphabet& alphabet,
                                             double lambda) {
    if (lambda < 0.0) throw ValidationError("decay lambda must be >= 0");
    const GestureSequence seq = raw.without_excluded();
    require_events(seq, "decay_features");
    const auto idx = class_indices(seq, alphabet);
    const double t_last = seq.events.back().start;
    std::vector<double> raw_weight(alphabet.size(), 0.0);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        raw_weight[idx[i]] += std::exp(-lambda * (t_last - seq.events[i].start));
    }
    double total = 0.0;
    for (const double w : raw_weight) total += w;
    std::map<std::string, double> out;
    for (std::size_t c = 0; c < alphabet.size(); ++c) {
        out["decay_" + alphabet.code(c)] = raw_weight[c] / total;
    }
    return out;
}

std::map<std::string, double> temporal_features(const GestureSequence& raw, const GestureAlphabet& alphabet) {
    const GestureSequence seq = raw.without_excluded();
    require_events(seq, "temporal_features");
    const auto idx = class_indices(seq, alphabet);
    const double span = seq.span();
    const double t_last = seq.events.back().start;

    std::map<std::string, double> out;
    out["total_span"] = span;
    out["gesture_rate"] = span > 0.0 ? static_cast<double>(seq.size()) / span : 0.0;

    std::vector<double> last_start(alphabet.size(), -1.0);
    std::vector<bool> present(alphabet.size(), false);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        last_start[idx[i]] = seq.events[i].start;
        present[idx[i]] = true;
    }
    for (std::size_t c = 0; c < alphabet.size(); ++c) {
        out["time_since_last_" + alphabet.code(c)] = present[c] ? t_last - last_start[c] : -1.0;
    }
    return out;
}

std::map<std::string, double> structure_features(const GestureSequence& raw) {
    const GestureSequence seq = raw.without_excluded();
    require_events(seq, "structure_features");

    std::map<std::string, double> counts;
    double changes = 0.0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        counts[seq.events[i].label] += 1.0;
        if (i + 1 < seq.size() && seq.events[i].label != seq.events[i + 1].label) changes += 1.0;
    }
    double entropy = 0.0;
    const double m = static_cast<double>(seq.size());
    for (const auto& [label, count] : counts) {
        const double f = count / m;
        entropy -= f * std::log2(f);
    }
    return {{"unique_count", static_cast<double>(counts.size())},
            {"change_count", changes},
            {"entropy", entropy}};
}

std::map<std::string, double> ngram_features(const GestureSequence& raw, const GestureAlphabet& alphabet,
                                             std::size_t n) {
    if (n != 2 && n != 3) throw ValidationError("ngram order must be 2 or 3");
    const GestureSequence seq = raw.without_excluded();
    const auto idx = class_indices(seq, alphabet);
    const std::size_t k = alphabet.size();
    const std::string prefix = std::to_string(n) + "gram";

    std::vector<double> counts(n == 2 ? k * k : k * k * k, 0.0);
    if (idx.size() >= n) {
        for (std::size_t i = 0; i + n <= idx.size(); ++i) {
            std::size_t flat = idx[i];
            for (std::size_t j = 1; j < n; ++j) flat = flat * k + idx[i + j];
            counts[flat] += 1.0;
        }
    }
    const double denom = static_cast<double>(std::max<std::size_t>(
        idx.size() >= n ? idx.size() - n + 1 : 0, 1));

    std::map<std::string, double> out;
    if (n == 2) {
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b)
                out[prefix + "_" + alphabet.code(a) + "_" + alphabet.code(b)] = counts[a * k + b] / denom;
    } else {
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b)
                for (std::size_t c = 0; c < k; ++c)
                    out[prefix + "_" + alphabet.code(a) + "_" + alphabet.code(b) + "_" + alphabet.code(c)] =
                        counts[(a * k + b) * k + c] / denom;
    }
    return out;
}

std::map<std::string, double> transition_features(const GestureSequence& raw, const GestureAlphabet& alphabet) {
    const GestureSequence seq = raw.without_excluded();
    const auto idx = class_indices(seq, alphabet);
    const std::size_t k = alphabet.size();
    std::vector<double> counts(k * k, 0.0);
    std::vector<double> outgoing(k, 0.0);
    for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
        counts[idx[i] * k + idx[i + 1]] += 1.0;
        outgoing[idx[i]] += 1.0;
    }
    std::map<std::string, double> out;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
            out["trans_" + alphabet.code(a) + "_" + alphabet.code(b)] =
                outgoing[a] > 0.0 ? counts[a * k + b] / outgoing[a] : 0.0;
        }
    }
    return out;
}

std::map<std::string, double> dwell_features(const GestureSequence& raw, const GestureAlphabet& alphabet) {
    const GestureSequence seq = raw.without_excluded();
    const auto idx = class_indices(seq, alphabet);

    std::vector<double> dwells;
    std::vector<std::vector<double>> before(alphabet.size());
    for (std::size_t i = 1; i < idx.size(); ++i) {
        const double d = seq.events[i].start - seq.events[i - 1].start;
        dwells.push_back(d);
        before[idx[i]].push_back(d);
    }

    std::map<std::string, double> out;
    emit_stats(out, "dwell_", "", summarize(std::move(dwells)), true);
    for (std::size_t c = 0; c < alphabet.size(); ++c) {
        emit_stats(out, "dwell_before_", alphabet.code(c), summarize(std::move(before[c])), true);
    }
    return out;
}

std::map<std::string, double> duration_features(const GestureSequence& raw, const GestureAlphabet& alphabet) {
    const GestureSequence seq = raw.without_excluded();
    require_events(seq, "duration_features");
    const auto idx = class_indices(seq, alphabet);

    std::vector<double> all;
    std::vector<std::vector<double>> per_class(alphabet.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        all.push_back(seq.events[i].duration());
        per_class[idx[i]].push_back(seq.events[i].duration());
    }

    std::map<std::string, double> out;
    const SummaryStats global = summarize(std::move(all));
    emit_stats(out, "dur_", "", global, false);
    out["duration_sum"] = global.sum;
    for (std::size_t c = 0; c < alphabet.size(); ++c) {
        const SummaryStats s = summarize(std::move(per_class[c]));
        emit_stats(out, "dur_", alphabet.code(c), s, false);
        out["dur_sum_" + alphabet.code(c)] = s.sum;
    }
    return out;
}

std::map<std::string, double> runlength_features(const GestureSequence& raw, const GestureAlphabet& alphabet) {
    const GestureSequence seq = raw.without_excluded();
    const auto idx = class_indices(seq, alphabet);

    std::vector<double> max_run(alphabet.size(), 0.0);
    std::vector<double> run_sum(alphabet.size(), 0.0);
    std::vector<double> run_count(alphabet.size(), 0.0);
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j < idx.size() && idx[j] == idx[i]) ++j;
        const double len = static_cast<double>(j - i);
        max_run[idx[i]] = std::max(max_run[idx[i]], len);
        run_sum[idx[i]] += len;
        run_count[idx[i]] += 1.0;
        i = j;
    }

    std::map<std::string, double> out;
    for (std::size_t c = 0; c < alphabet.size(); ++c) {
        out["max_run_" + alphabet.code(c)] = max_run[c];
        out["avg_run_" + alphabet.code(c)] = run_count[c] > 0.0 ? run_sum[c] / run_count[c] : 0.0;
    }
    return out;
}

FeatureVector assemble_feature_vector(const GestureSequence& seq, const FeatureSchema& schema) {
    const GestureAlphabet& alphabet = schema.alphabet();
    std::map<std::string, double> all;
    auto merge = [&all](std::map<std::string, double>&& family) {
        all.merge(family);
    };
    merge(frequency_features(seq, alphabet));
    merge(decay_features(seq, alphabet, schema.config().decay_lambda));
    merge(temporal_features(seq, alphabet));
    merge(structure_features(seq));
    merge(ngram_features(seq, alphabet, 2));
    merge(ngram_features(seq, alphabet, 3));
    merge(transition_features(seq, alphabet));
    merge(dwell_features(seq, alphabet));
    merge(duration_features(seq, alphabet));
    merge(runlength_features(seq, alphabet));

    FeatureVector vec;
    vec.case_id = seq.case_id;
    vec.values.reserve(schema.size());
    for (const auto& name : schema.names()) {
        const auto it = all.find(name);
        if (it == all.end()) throw std::logic_error("feature family missed schema name: " + name);
        if (!std::isfinite(it->second)) throw std::logic_error("non-finite feature value: " + name);
        vec.values.push_back(it->second);
    }
    if (all.size() != schema.size()) {
        throw std::logic_error("feature families produced names outside the schema");
    }
    return vec;
}

}  // namespace gseq

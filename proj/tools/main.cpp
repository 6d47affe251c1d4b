// gseq: gesture sequence analytics over frame-level probability streams.
//
// Subcommands: segment, features, evaluate, stats, predict, synth, pipeline.
// Config precedence: flags > --config file > defaults. Exit codes: 0 ok,
// 1 validation/runtime failure, 2 usage. Relative output paths resolve under
// $GSEQ_OUT_DIR when set.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <algorithm>
#include <set>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "gseq/cv.hpp"
#include "gseq/features.hpp"
#include "gseq/io.hpp"
#include "gseq/metrics.hpp"
#include "gseq/segmentation.hpp"
#include "gseq/stats.hpp"
#include "gseq/synthetic.hpp"
#include "gseq/util.hpp"
#include "sha256.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gseq;

namespace {

constexpr const char* kVersion = "0.1.0";

// Command-line problems detected before CLI11 sees the args.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Set when a --config file was expanded, for the manifest's input digests.
std::optional<fs::path> g_config_file;

// Long option names that are flags rather than valued options.
const std::set<std::string> kFlagKeys = {"no-prune", "bootstrap", "no-standardize",
                                         "unknown-to-excluded"};

std::string unquote(std::string_view v) {
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') ||
                          (v.front() == '\'' && v.back() == '\''))) {
        return std::string(v.substr(1, v.size() - 2));
    }
    return std::string(v);
}

// Flat TOML-style config: `key = value` lines with '#' comments, keys equal
// to the long option names. Values are appended as flags only when the
// command line does not already carry them: flags > config file > defaults.
std::vector<std::string> expand_config_args(std::vector<std::string> args) {
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a file path");
            config_path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].starts_with("--config=")) {
            config_path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (config_path.empty()) return args;
    g_config_file = config_path;

    for (const auto& raw_line : split(read_text_file(config_path), '\n')) {
        std::string_view line = trim(raw_line);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = trim(line.substr(0, hash));
        }
        if (line.empty() || line.front() == '[') continue;  // sections are not used
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw UsageError(config_path + ": expected 'key = value', got '" + std::string(line) + "'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value = unquote(trim(line.substr(eq + 1)));
        if (key.empty()) throw UsageError(config_path + ": empty key");

        const std::string flag = "--" + key;
        bool already_set = false;
        for (const auto& arg : args) {
            if (arg == flag || arg.starts_with(flag + "=")) {
                already_set = true;
                break;
            }
        }
        if (already_set) continue;
        if (kFlagKeys.count(key)) {
            if (value == "true" || value == "1" || value == "yes" || value == "on") {
                args.push_back(flag);
            } else if (value != "false" && value != "0" && value != "no" && value != "off") {
                throw UsageError(config_path + ": flag '" + key + "' needs a boolean, got '" +
                                 value + "'");
            }
        } else {
            args.push_back(flag);
            args.push_back(value);
        }
    }
    return args;
}

fs::path resolve_out(const fs::path& path) {
    if (path.is_absolute()) return path;
    if (const char* base = std::getenv("GSEQ_OUT_DIR")) {
        return fs::path(base) / path;
    }
    return path;
}

struct Manifest {
    std::string subcommand;
    json config;
    std::vector<fs::path> inputs;
    std::vector<fs::path> outputs;

    void write(const fs::path& path, double wall_seconds) const {
        json doc;
        doc["tool"] = "gseq";
        doc["version"] = kVersion;
        doc["subcommand"] = subcommand;
        doc["config"] = config;
        doc["inputs"] = json::array();
        std::vector<fs::path> digested = inputs;
        if (g_config_file) digested.push_back(*g_config_file);
        for (const auto& input : digested) {
            doc["inputs"].push_back({{"path", input.string()},
                                     {"sha256", cli::sha256_hex(read_text_file(input))}});
        }
        doc["outputs"] = json::array();
        for (const auto& output : outputs) doc["outputs"].push_back(output.string());
        doc["wall_time_s"] = wall_seconds;
        atomic_write_file(path, doc.dump(2) + "\n");
    }
};

GestureAlphabet alphabet_from_codes(const std::string& codes_csv) {
    std::vector<std::string> codes;
    for (const auto& token : split(codes_csv, ',')) {
        codes.emplace_back(trim(token));
    }
    return GestureAlphabet(codes);
}

// Streams are read against the requested alphabet when one was given;
// otherwise the canonical ten if the header matches it, else header order.
FrameProbabilityStream read_probs(const fs::path& path, const std::optional<GestureAlphabet>& requested) {
    if (requested) return read_probability_file(path, requested);
    FrameProbabilityStream stream = read_probability_file(path);
    const auto& dom = GestureAlphabet::dominant10();
    if (stream.alphabet.size() == dom.size()) {
        bool same_set = true;
        for (const auto& code : stream.alphabet.codes()) {
            if (!dom.contains(code)) {
                same_set = false;
                break;
            }
        }
        if (same_set && !(stream.alphabet == dom)) return read_probability_file(path, dom);
    }
    return stream;
}

std::map<std::string, double> read_weights_file(const fs::path& path) {
    std::map<std::string, double> weights;
    const auto lines = split(read_text_file(path), '\n');
    if (lines.empty() || trim(lines[0]) != "gesture,weight") {
        throw ParseError(path.string() + ": expected header 'gesture,weight'");
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto line = trim(lines[i]);
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 2) throw ParseError(path.string() + ": expected 2 fields on line " +
                                                 std::to_string(i + 1));
        weights[std::string(trim(fields[0]))] =
            parse_double(fields[1], path.string() + ":" + std::to_string(i + 1));
    }
    return weights;
}

std::vector<fs::path> collect_inputs(const fs::path& root, const std::string& preferred_suffix) {
    if (!fs::exists(root)) throw ValidationError("input path does not exist: " + root.string());
    if (fs::is_regular_file(root)) return {root};
    std::vector<fs::path> all, preferred;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (!name.ends_with(".csv")) continue;
        all.push_back(entry.path());
        if (name.ends_with(preferred_suffix)) preferred.push_back(entry.path());
    }
    auto& chosen = preferred.empty() ? all : preferred;
    std::sort(chosen.begin(), chosen.end());
    if (chosen.empty()) throw ValidationError("no .csv inputs under " + root.string());
    return chosen;
}

void run_parallel(std::size_t jobs, std::size_t count, const std::function<void(std::size_t)>& fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (std::size_t j = 0; j < jobs; ++j) {
        workers.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& worker : workers) worker.join();
    if (first_error) std::rethrow_exception(first_error);
}

json auc_report_json(const std::string& case_id, const AucReport& report) {
    json per_class;
    for (const auto& [code, auc] : report.per_class) {
        if (auc) per_class[code] = *auc;
        else per_class[code] = nullptr;
    }
    return json{{"case_id", case_id},
                {"per_class", per_class},
                {"macro", report.macro},
                {"video_level", video_level_auc(report)},
                {"n_frames_evaluated", report.n_frames_evaluated}};
}

// --config is consumed by expand_config_args before CLI11 parses; this
// registers it for help output only.
void add_config_option(CLI::App* cmd) {
    static std::string ignored;
    cmd->add_option("--config", ignored,
                    "Flat TOML config file; explicit flags take precedence");
}

// ---------------------------------------------------------------------------

struct SegmentationFlags {
    double penalty = 0.5;
    std::string gamma = "median";
    std::size_t min_frames = 2;
    std::string weights_path;
    bool no_prune = false;

    void attach(CLI::App* cmd, bool with_penalty = true) {
        if (with_penalty) {
            cmd->add_option("--penalty", penalty, "Change-point penalty")->capture_default_str();
        }
        cmd->add_option("--gamma", gamma, "Kernel bandwidth: 'median' or a number")
            ->capture_default_str();
        cmd->add_option("--min-frames", min_frames, "Minimum frames per segment")
            ->capture_default_str();
        cmd->add_option("--weights", weights_path, "Class weight file (gesture,weight)");
        cmd->add_flag("--no-prune", no_prune, "Disable PELT candidate pruning");
    }

    SegmentationConfig to_config() const {
        SegmentationConfig config;
        config.penalty = penalty;
        if (gamma != "median") config.gamma = parse_double(gamma, "--gamma");
        config.min_segment_frames = min_frames;
        if (!weights_path.empty()) config.class_weights = read_weights_file(weights_path);
        config.prune = !no_prune;
        return config;
    }

    json to_json() const {
        return json{{"penalty", penalty}, {"gamma", gamma}, {"min_frames", min_frames},
                    {"weights", weights_path}, {"no_prune", no_prune}};
    }
};

int run_segment(const std::string& probs, const SegmentationFlags& seg, const std::string& classes,
                const std::string& out) {
    const auto started = std::chrono::steady_clock::now();
    std::optional<GestureAlphabet> requested;
    if (!classes.empty()) requested = alphabet_from_codes(classes);
    const auto stream = read_probs(probs, requested);
    const auto sequence = aggregate(stream, seg.to_config());

    const fs::path out_path = resolve_out(out);
    write_gesture_file(out_path, sequence);

    Manifest manifest;
    manifest.subcommand = "segment";
    manifest.config = seg.to_json();
    manifest.config["probs"] = probs;
    manifest.config["classes"] = classes;
    manifest.config["out"] = out;
    manifest.inputs = {probs};
    manifest.outputs = {out_path};
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    manifest.write(out_path.string() + ".manifest.json", wall);
    std::cout << "wrote " << out_path.string() << " (" << sequence.events.size() << " events)\n";
    return 0;
}

int run_features(const std::string& gestures, double lambda, const std::string& classes,
                 bool unknown_to_excluded, std::size_t jobs, const std::string& out) {
    const auto started = std::chrono::steady_clock::now();
    const GestureAlphabet alphabet =
        classes.empty() ? GestureAlphabet::dominant10() : alphabet_from_codes(classes);
    const FeatureSchema schema(alphabet, FeatureConfig{lambda});
    const auto inputs = collect_inputs(gestures, ".gestures.csv");

    ParseOptions options;
    options.map_unknown_to_excluded = unknown_to_excluded;

    std::vector<FeatureVector> vectors(inputs.size());
    run_parallel(jobs, inputs.size(), [&](std::size_t i) {
        const auto seq = read_gesture_file(inputs[i], alphabet, options);
        vectors[i] = assemble_feature_vector(seq, schema);
    });

    std::sort(vectors.begin(), vectors.end(),
              [](const FeatureVector& a, const FeatureVector& b) { return a.case_id < b.case_id; });
    NamedMatrix matrix;
    matrix.names = schema.names();
    for (auto& vec : vectors) {
        if (!matrix.case_ids.empty() && matrix.case_ids.back() == vec.case_id) {
            throw ValidationError("duplicate case id '" + vec.case_id + "'");
        }
        matrix.case_ids.push_back(vec.case_id);
        matrix.values.insert(matrix.values.end(), vec.values.begin(), vec.values.end());
    }

    const fs::path out_path = resolve_out(out);
    write_matrix_file(out_path, matrix);

    Manifest manifest;
    manifest.subcommand = "features";
    manifest.config = {{"gestures", gestures}, {"lambda", lambda}, {"classes", classes},
                       {"unknown_to_excluded", unknown_to_excluded}, {"jobs", jobs}, {"out", out}};
    manifest.inputs = inputs;
    manifest.outputs = {out_path};
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    manifest.write(out_path.string() + ".manifest.json", wall);
    std::cout << "wrote " << out_path.string() << " (" << matrix.rows() << " cases x "
              << matrix.cols() << " features)\n";
    return 0;
}

int run_evaluate(const std::string& probs, const std::string& gestures, const std::string& classes,
                 const std::string& out) {
    const auto started = std::chrono::steady_clock::now();
    std::optional<GestureAlphabet> requested;
    if (!classes.empty()) requested = alphabet_from_codes(classes);
    const auto stream = read_probs(probs, requested);
    const auto truth = read_gesture_file(gestures, stream.alphabet);
    const auto report = frame_level_auc(stream, truth);

    const fs::path out_path = resolve_out(out);
    atomic_write_file(out_path, auc_report_json(stream.case_id, report).dump(2) + "\n");

    Manifest manifest;
    manifest.subcommand = "evaluate";
    manifest.config = {{"probs", probs}, {"gestures", gestures}, {"classes", classes}, {"out", out}};
    manifest.inputs = {probs, gestures};
    manifest.outputs = {out_path};
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    manifest.write(out_path.string() + ".manifest.json", wall);
    std::cout << "video-level AUC " << format_double(video_level_auc(report)) << " over "
              << report.present_count() << " classes\n";
    return 0;
}

int run_stats(const std::string& matrix_a, const std::string& matrix_b, const std::string& outcomes,
              std::size_t top_k, const std::string& out, const std::string& out_json) {
    const auto started = std::chrono::steady_clock::now();
    const auto outcome_table = read_outcome_file(outcomes);
    const auto a = FeatureMatrix::from_named(read_matrix_file(matrix_a), outcome_table);
    const auto b = FeatureMatrix::from_named(read_matrix_file(matrix_b), outcome_table);
    const auto report = concordance(a, b, top_k);

    std::map<std::string, const RankedFeature*> by_name_b;
    for (const auto& f : report.ranked_b) by_name_b[f.name] = &f;
    const std::set<std::string> overlap(report.overlap.begin(), report.overlap.end());

    std::string tsv = "feature\tp_a\tp_b\td_a\td_b\tin_overlap\n";
    for (const auto& fa : report.ranked_a) {
        const auto* fb = by_name_b.at(fa.name);
        tsv += fa.name + "\t" + format_double(fa.p) + "\t" + format_double(fb->p) + "\t" +
               format_double(fa.d) + "\t" + format_double(fb->d) + "\t" +
               (overlap.count(fa.name) ? "1" : "0") + "\n";
    }
    const fs::path out_path = resolve_out(out);
    atomic_write_file(out_path, tsv);

    Manifest manifest;
    manifest.subcommand = "stats";
    manifest.config = {{"matrix_a", matrix_a}, {"matrix_b", matrix_b}, {"outcomes", outcomes},
                       {"top_k", top_k}, {"out", out}, {"out_json", out_json}};
    manifest.inputs = {matrix_a, matrix_b, outcomes};
    manifest.outputs = {out_path};

    if (!out_json.empty()) {
        json doc;
        doc["top_k"] = report.top_k;
        doc["overlap"] = report.overlap;
        doc["overlap_count"] = report.overlap.size();
        doc["delta_d_avg"] = report.delta_d_avg ? json(*report.delta_d_avg) : json(nullptr);
        doc["pearson_r_of_d"] = report.pearson_r_of_d ? json(*report.pearson_r_of_d) : json(nullptr);
        json features = json::array();
        for (const auto& name : report.overlap) {
            const auto& [d_a, d_b] = report.paired_d.at(name);
            const auto& ga = report.group_stats_a.at(name);
            const auto& gb = report.group_stats_b.at(name);
            features.push_back({{"feature", name}, {"d_a", d_a}, {"d_b", d_b},
                                {"a_poor_mean", ga.mean_poor}, {"a_poor_sd", ga.sd_poor},
                                {"a_good_mean", ga.mean_good}, {"a_good_sd", ga.sd_good},
                                {"b_poor_mean", gb.mean_poor}, {"b_poor_sd", gb.sd_poor},
                                {"b_good_mean", gb.mean_good}, {"b_good_sd", gb.sd_good}});
        }
        doc["overlap_features"] = features;
        const fs::path json_path = resolve_out(out_json);
        atomic_write_file(json_path, doc.dump(2) + "\n");
        manifest.outputs.push_back(json_path);
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    manifest.write(out_path.string() + ".manifest.json", wall);

    std::cout << "top-" << top_k << " overlap " << report.overlap.size() << "/" << top_k << "\n";
    if (report.delta_d_avg) std::cout << "delta_d_avg " << format_double(*report.delta_d_avg) << "\n";
    if (report.pearson_r_of_d) {
        std::cout << "pearson_r_of_d " << format_double(*report.pearson_r_of_d) << "\n";
    } else {
        std::cout << "pearson_r_of_d undefined (overlap too small or constant)\n";
    }
    return 0;
}

int run_predict(const std::string& matrix_path, const std::string& outcomes, const CvConfig& config,
                const std::string& out) {
    const auto started = std::chrono::steady_clock::now();
    const auto matrix = FeatureMatrix::from_named(read_matrix_file(matrix_path),
                                                  read_outcome_file(outcomes));
    const auto report = cross_validate(matrix, config);

    json doc;
    doc["k"] = config.k;
    doc["seed"] = config.seed;
    doc["standardize"] = config.standardize;
    doc["l2"] = config.l2;
    doc["bootstrap_ci"] = config.bootstrap_ci;
    doc["fold_accuracies"] = report.fold_accuracies;
    doc["mean_accuracy"] = report.mean_accuracy;
    doc["ci95"] = {report.ci_lo, report.ci_hi};
    const fs::path out_path = resolve_out(out);
    atomic_write_file(out_path, doc.dump(2) + "\n");

    Manifest manifest;
    manifest.subcommand = "predict";
    manifest.config = {{"matrix", matrix_path}, {"outcomes", outcomes}, {"k", config.k},
                       {"seed", config.seed}, {"standardize", config.standardize},
                       {"l2", config.l2}, {"max_iters", config.max_iters},
                       {"tolerance", config.tolerance}, {"bootstrap", config.bootstrap_ci},
                       {"out", out}};
    manifest.inputs = {matrix_path, outcomes};
    manifest.outputs = {out_path};
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    manifest.write(out_path.string() + ".manifest.json", wall);
    std::cout << "mean accuracy " << format_double(report.mean_accuracy) << " (95% CI ["
              << format_double(report.ci_lo) << ", " << format_double(report.ci_hi) << "])\n";
    return 0;
}

int run_synth(const SynthConfig& base, std::size_t cases, double effect, std::size_t jobs,
              const std::string& out_dir) {
    const auto started = std::chrono::steady_clock::now();
    OutcomeModel model;
    model.effect = effect;
    const auto cohort = generate_cohort(base, cases, model);

    const fs::path dir = resolve_out(out_dir);
    fs::create_directories(dir);
    std::vector<fs::path> outputs(cohort.size() * 2);
    run_parallel(jobs, cohort.size(), [&](std::size_t i) {
        const auto& entry = cohort[i];
        const fs::path gpath = dir / (entry.sequence.case_id + ".gestures.csv");
        const fs::path ppath = dir / (entry.sequence.case_id + ".probs.csv");
        write_gesture_file(gpath, entry.sequence);
        write_probability_file(ppath, render_stream(entry.sequence, entry.config));
        outputs[2 * i] = gpath;
        outputs[2 * i + 1] = ppath;
    });
    const fs::path outcome_path = dir / "outcomes.csv";
    write_outcome_file(outcome_path, cohort_outcomes(cohort));
    outputs.push_back(outcome_path);

    Manifest manifest;
    manifest.subcommand = "synth";
    manifest.config = {{"cases", cases}, {"seed", base.seed}, {"events", base.n_events},
                       {"mean_duration", base.mean_duration}, {"spread", base.duration_spread},
                       {"dt", base.dt}, {"noise_sigma", base.noise_sigma},
                       {"temperature", base.softmax_temperature}, {"effect", effect},
                       {"classes", ""}, {"out_dir", out_dir}, {"jobs", jobs}};
    std::string classes;
    for (const auto& code : base.alphabet.codes()) {
        if (!classes.empty()) classes += ',';
        classes += code;
    }
    manifest.config["classes"] = classes;
    manifest.outputs = std::move(outputs);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    manifest.write((dir / "manifest.json").string(), wall);
    std::cout << "wrote " << cases << " cases under " << dir.string() << "\n";
    return 0;
}

// Penalty sweep over [from, to] in fixed steps, reporting how sequence length
// tracks the penalty (and the annotated length when truth is given).
int run_sweep(const std::string& probs, const std::string& gestures, double from, double to,
              double step, const SegmentationFlags& seg, const std::string& classes,
              const std::string& out) {
    const auto started = std::chrono::steady_clock::now();
    if (!(step > 0.0) || to < from) throw ValidationError("sweep: need step > 0 and to >= from");
    std::optional<GestureAlphabet> requested;
    if (!classes.empty()) requested = alphabet_from_codes(classes);
    const auto stream = read_probs(probs, requested);

    std::optional<std::size_t> truth_events;
    if (!gestures.empty()) {
        truth_events = read_gesture_file(gestures, stream.alphabet).without_excluded().events.size();
    }

    std::string tsv = "penalty\tn_segments\tn_events\tmean_event_seconds";
    if (truth_events) tsv += "\ttruth_n_events";
    tsv += "\n";
    SegmentationConfig config = seg.to_config();
    // resolve gamma once so every penalty sees the same cost function
    if (!config.gamma && stream.frames() >= 2) config.gamma = resolve_gamma(stream);
    for (std::size_t i = 0;; ++i) {
        const double penalty = from + static_cast<double>(i) * step;
        if (penalty > to + 1e-12) break;
        config.penalty = penalty;
        const auto pelt = pelt_changepoints(stream, config);
        const auto segments = label_segments(stream, pelt.breakpoints, config.class_weights);
        double span_seconds = 0.0;
        for (const auto& s : segments) {
            span_seconds += static_cast<double>(s.end_frame - s.start_frame) * stream.dt;
        }
        tsv += format_double(penalty) + "\t" + std::to_string(pelt.breakpoints.size()) + "\t" +
               std::to_string(segments.size()) + "\t" +
               format_double(span_seconds / static_cast<double>(segments.size()));
        if (truth_events) tsv += "\t" + std::to_string(*truth_events);
        tsv += "\n";
    }
    const fs::path out_path = resolve_out(out);
    atomic_write_file(out_path, tsv);

    Manifest manifest;
    manifest.subcommand = "sweep";
    manifest.config = seg.to_json();
    manifest.config.erase("penalty");  // swept, not fixed
    manifest.config["probs"] = probs;
    manifest.config["gestures"] = gestures;
    manifest.config["from"] = from;
    manifest.config["to"] = to;
    manifest.config["step"] = step;
    manifest.config["classes"] = classes;
    manifest.config["out"] = out;
    manifest.inputs = {probs};
    if (!gestures.empty()) manifest.inputs.push_back(gestures);
    manifest.outputs = {out_path};
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    manifest.write(out_path.string() + ".manifest.json", wall);
    std::cout << "wrote " << out_path.string() << "\n";
    return 0;
}

int run_pipeline(const std::string& probs, const SegmentationFlags& seg, double lambda,
                 const std::string& classes, std::size_t jobs, const std::string& out_gestures,
                 const std::string& out_features) {
    const auto started = std::chrono::steady_clock::now();
    const auto inputs = collect_inputs(probs, ".probs.csv");

    std::optional<GestureAlphabet> requested;
    if (!classes.empty()) requested = alphabet_from_codes(classes);
    // First stream pins the alphabet for the whole cohort.
    const GestureAlphabet alphabet = read_probs(inputs.front(), requested).alphabet;
    const FeatureSchema schema(alphabet, FeatureConfig{lambda});
    const SegmentationConfig seg_config = seg.to_config();

    std::optional<fs::path> gestures_dir;
    if (!out_gestures.empty()) {
        gestures_dir = resolve_out(out_gestures);
        fs::create_directories(*gestures_dir);
    }

    std::vector<FeatureVector> vectors(inputs.size());
    std::vector<fs::path> gesture_files(inputs.size());
    run_parallel(jobs, inputs.size(), [&](std::size_t i) {
        const auto stream = read_probability_file(inputs[i], alphabet);
        const auto sequence = aggregate(stream, seg_config);
        vectors[i] = assemble_feature_vector(sequence, schema);
        if (gestures_dir) {
            gesture_files[i] = *gestures_dir / (sequence.case_id + ".gestures.csv");
            write_gesture_file(gesture_files[i], sequence);
        }
    });

    std::sort(vectors.begin(), vectors.end(),
              [](const FeatureVector& a, const FeatureVector& b) { return a.case_id < b.case_id; });
    NamedMatrix matrix;
    matrix.names = schema.names();
    for (auto& vec : vectors) {
        if (!matrix.case_ids.empty() && matrix.case_ids.back() == vec.case_id) {
            throw ValidationError("duplicate case id '" + vec.case_id + "'");
        }
        matrix.case_ids.push_back(vec.case_id);
        matrix.values.insert(matrix.values.end(), vec.values.begin(), vec.values.end());
    }
    const fs::path out_path = resolve_out(out_features);
    write_matrix_file(out_path, matrix);

    Manifest manifest;
    manifest.subcommand = "pipeline";
    manifest.config = seg.to_json();
    manifest.config["probs"] = probs;
    manifest.config["lambda"] = lambda;
    manifest.config["classes"] = classes;
    manifest.config["jobs"] = jobs;
    manifest.config["out_gestures"] = out_gestures;
    manifest.config["out_features"] = out_features;
    manifest.inputs = inputs;
    manifest.outputs = {out_path};
    for (const auto& g : gesture_files) {
        if (!g.empty()) manifest.outputs.push_back(g);
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    manifest.write(out_path.string() + ".manifest.json", wall);
    std::cout << "wrote " << out_path.string() << " (" << matrix.rows() << " cases x "
              << matrix.cols() << " features)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gesture sequence analytics: change-point segmentation, feature"
                 " engineering, evaluation and outcome statistics"};
    app.set_version_flag("--version", std::string("gseq ") + kVersion);
    app.require_subcommand(1);

    std::function<int()> action;

    // segment
    {
        auto* cmd = app.add_subcommand("segment", "Aggregate a probability stream into gestures");
        auto probs = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto classes = std::make_shared<std::string>();
        auto seg = std::make_shared<SegmentationFlags>();
        cmd->add_option("--probs", *probs, "Probability stream file")->required();
        cmd->add_option("--out", *out, "Output gesture file")->required();
        cmd->add_option("--classes", *classes, "Comma-separated class codes");
        seg->attach(cmd);
        add_config_option(cmd);
        cmd->callback([&action, probs, out, classes, seg] {
            action = [=] { return run_segment(*probs, *seg, *classes, *out); };
        });
    }

    // features
    {
        auto* cmd = app.add_subcommand("features", "Extract the engineered feature matrix");
        auto gestures = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto classes = std::make_shared<std::string>();
        auto lambda = std::make_shared<double>(0.01);
        auto unknown = std::make_shared<bool>(false);
        auto jobs = std::make_shared<std::size_t>(1);
        auto schema = std::make_shared<std::string>("default");
        cmd->add_option("--gestures", *gestures, "Gesture file or directory")->required();
        cmd->add_option("--out", *out, "Output matrix csv")->required();
        cmd->add_option("--schema", *schema, "Feature schema name")
            ->check(CLI::IsMember({"default"}))
            ->capture_default_str();
        cmd->add_option("--classes", *classes, "Comma-separated class codes");
        cmd->add_option("--lambda", *lambda, "Decay rate per second")->capture_default_str();
        cmd->add_flag("--unknown-to-excluded", *unknown, "Map unknown labels to the excluded marker");
        cmd->add_option("--jobs", *jobs, "Worker threads")->capture_default_str();
        add_config_option(cmd);
        cmd->callback([&action, gestures, out, classes, lambda, unknown, jobs, schema] {
            action = [=] {
                (void)*schema;  // single schema today; validated by CLI11
                return run_features(*gestures, *lambda, *classes, *unknown, *jobs, *out);
            };
        });
    }

    // evaluate
    {
        auto* cmd = app.add_subcommand("evaluate", "Frame- and video-level AUC against ground truth");
        auto probs = std::make_shared<std::string>();
        auto gestures = std::make_shared<std::string>();
        auto classes = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        cmd->add_option("--probs", *probs, "Probability stream file")->required();
        cmd->add_option("--gestures", *gestures, "Ground-truth gesture file")->required();
        cmd->add_option("--classes", *classes, "Comma-separated class codes");
        cmd->add_option("--out", *out, "Output report json")->required();
        add_config_option(cmd);
        cmd->callback([&action, probs, gestures, classes, out] {
            action = [=] { return run_evaluate(*probs, *gestures, *classes, *out); };
        });
    }

    // stats
    {
        auto* cmd = app.add_subcommand("stats", "Concordance of two feature sources");
        auto matrix_a = std::make_shared<std::string>();
        auto matrix_b = std::make_shared<std::string>();
        auto outcomes = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto out_json = std::make_shared<std::string>();
        auto top_k = std::make_shared<std::size_t>(50);
        cmd->add_option("--matrix-a", *matrix_a, "Feature matrix A")->required();
        cmd->add_option("--matrix-b", *matrix_b, "Feature matrix B")->required();
        cmd->add_option("--outcomes", *outcomes, "Outcome file")->required();
        cmd->add_option("--top-k", *top_k, "Top-k for the overlap")->capture_default_str();
        cmd->add_option("--out", *out, "Output tsv")->required();
        cmd->add_option("--out-json", *out_json, "Optional full report json");
        add_config_option(cmd);
        cmd->callback([&action, matrix_a, matrix_b, outcomes, top_k, out, out_json] {
            action = [=] {
                return run_stats(*matrix_a, *matrix_b, *outcomes, *top_k, *out, *out_json);
            };
        });
    }

    // predict
    {
        auto* cmd = app.add_subcommand("predict", "Cross-validated outcome prediction");
        auto matrix = std::make_shared<std::string>();
        auto outcomes = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto config = std::make_shared<CvConfig>();
        auto no_standardize = std::make_shared<bool>(false);
        cmd->add_option("--matrix", *matrix, "Feature matrix csv")->required();
        cmd->add_option("--outcomes", *outcomes, "Outcome file")->required();
        cmd->add_option("--k", config->k, "Folds")->capture_default_str();
        cmd->add_option("--seed", config->seed, "Fold shuffle seed")->capture_default_str();
        cmd->add_option("--l2", config->l2, "L2 strength")->capture_default_str();
        cmd->add_option("--max-iters", config->max_iters, "Optimizer iteration cap")
            ->capture_default_str();
        cmd->add_option("--tol", config->tolerance, "Gradient-norm tolerance")->capture_default_str();
        cmd->add_flag("--no-standardize", *no_standardize, "Skip train-fold standardization");
        cmd->add_flag("--bootstrap", config->bootstrap_ci, "Percentile-bootstrap CI");
        cmd->add_option("--out", *out, "Output cv json")->required();
        add_config_option(cmd);
        cmd->callback([&action, matrix, outcomes, out, config, no_standardize] {
            action = [=] {
                CvConfig resolved = *config;
                resolved.standardize = !*no_standardize;
                return run_predict(*matrix, *outcomes, resolved, *out);
            };
        });
    }

    // synth
    {
        auto* cmd = app.add_subcommand("synth", "Generate a synthetic cohort");
        auto out_dir = std::make_shared<std::string>();
        auto classes = std::make_shared<std::string>();
        auto cases = std::make_shared<std::size_t>(20);
        auto effect = std::make_shared<double>(0.0);
        auto jobs = std::make_shared<std::size_t>(1);
        auto config = std::make_shared<SynthConfig>();
        cmd->add_option("--out-dir", *out_dir, "Output directory")->required();
        cmd->add_option("--cases", *cases, "Number of cases")->capture_default_str();
        cmd->add_option("--seed", config->seed, "Base seed")->capture_default_str();
        cmd->add_option("--events", config->n_events, "Events per case")->capture_default_str();
        cmd->add_option("--mean-duration", config->mean_duration, "Mean gesture seconds")
            ->capture_default_str();
        cmd->add_option("--spread", config->duration_spread, "Log-space duration sd")
            ->capture_default_str();
        cmd->add_option("--dt", config->dt, "Seconds per frame")->capture_default_str();
        cmd->add_option("--noise-sigma", config->noise_sigma, "Logit noise sd")->capture_default_str();
        cmd->add_option("--temperature", config->softmax_temperature, "Softmax temperature")
            ->capture_default_str();
        cmd->add_option("--effect", *effect, "Planted outcome effect in [0,1)")->capture_default_str();
        cmd->add_option("--classes", *classes, "Comma-separated class codes");
        cmd->add_option("--jobs", *jobs, "Worker threads")->capture_default_str();
        add_config_option(cmd);
        cmd->callback([&action, out_dir, classes, cases, effect, jobs, config] {
            action = [=] {
                SynthConfig resolved = *config;
                if (!classes->empty()) resolved.alphabet = alphabet_from_codes(*classes);
                return run_synth(resolved, *cases, *effect, *jobs, *out_dir);
            };
        });
    }

    // sweep
    {
        auto* cmd = app.add_subcommand("sweep", "Penalty sweep for segmentation tuning");
        auto probs = std::make_shared<std::string>();
        auto gestures = std::make_shared<std::string>();
        auto classes = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto from = std::make_shared<double>(0.0);
        auto to = std::make_shared<double>(1.0);
        auto step = std::make_shared<double>(0.05);
        auto seg = std::make_shared<SegmentationFlags>();
        cmd->add_option("--probs", *probs, "Probability stream file")->required();
        cmd->add_option("--gestures", *gestures, "Optional annotated gesture file for comparison");
        cmd->add_option("--from", *from, "Sweep start")->capture_default_str();
        cmd->add_option("--to", *to, "Sweep end")->capture_default_str();
        cmd->add_option("--step", *step, "Sweep step")->capture_default_str();
        cmd->add_option("--classes", *classes, "Comma-separated class codes");
        cmd->add_option("--out", *out, "Output tsv")->required();
        seg->attach(cmd, /*with_penalty=*/false);
        add_config_option(cmd);
        cmd->callback([&action, probs, gestures, from, to, step, seg, classes, out] {
            action = [=] {
                return run_sweep(*probs, *gestures, *from, *to, *step, *seg, *classes, *out);
            };
        });
    }

    // pipeline
    {
        auto* cmd = app.add_subcommand("pipeline",
                                       "Stream -> gesture sequence -> feature matrix in one pass");
        auto probs = std::make_shared<std::string>();
        auto out_features = std::make_shared<std::string>();
        auto out_gestures = std::make_shared<std::string>();
        auto classes = std::make_shared<std::string>();
        auto lambda = std::make_shared<double>(0.01);
        auto jobs = std::make_shared<std::size_t>(1);
        auto seg = std::make_shared<SegmentationFlags>();
        cmd->add_option("--probs", *probs, "Probability file or directory")->required();
        cmd->add_option("--out-features", *out_features, "Output matrix csv")->required();
        cmd->add_option("--out-gestures", *out_gestures, "Optional directory for gesture files");
        cmd->add_option("--classes", *classes, "Comma-separated class codes");
        cmd->add_option("--lambda", *lambda, "Decay rate per second")->capture_default_str();
        cmd->add_option("--jobs", *jobs, "Worker threads")->capture_default_str();
        seg->attach(cmd);
        add_config_option(cmd);
        cmd->callback([&action, probs, out_features, out_gestures, classes, lambda, jobs, seg] {
            action = [=] {
                return run_pipeline(*probs, *seg, *lambda, *classes, *jobs, *out_gestures,
                                    *out_features);
            };
        });
    }

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config_args(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        return action ? action() : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

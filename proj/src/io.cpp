#include "gseq/io.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "gseq/util.hpp"

namespace gseq {

namespace {

// Lines of a text file with 1-based numbering, trailing blank lines dropped.
std::vector<std::string> read_lines(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t pos = text.find('\n', start);
        if (pos == std::string::npos) {
            if (start < text.size()) lines.emplace_back(text.substr(start));
            break;
        }
        lines.emplace_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    return lines;
}

std::string loc(const std::filesystem::path& path, std::size_t line_no) {
    return path.string() + ":" + std::to_string(line_no);
}

}  // namespace

std::string case_id_from_path(const std::filesystem::path& path) {
    std::string stem = path.stem().string();
    for (const char* suffix : {".gestures", ".probs"}) {
        if (stem.size() > std::string_view(suffix).size() && stem.ends_with(suffix)) {
            stem.resize(stem.size() - std::string_view(suffix).size());
        }
    }
    return stem;
}

GestureSequence read_gesture_file(const std::filesystem::path& path, const GestureAlphabet& alphabet,
                                  const ParseOptions& options) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw ParseError(path.string() + ": no events (empty file)");
    if (trim(lines[0]) != "gesture,start,end") {
        throw ParseError(loc(path, 1) + ": expected header 'gesture,start,end'");
    }

    std::vector<GestureEvent> events;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string_view line = trim(lines[i]);
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 3) {
            throw ParseError(loc(path, i + 1) + ": expected 3 fields, got " + std::to_string(fields.size()));
        }
        GestureEvent e;
        e.label = std::string(trim(fields[0]));
        e.start = parse_double(fields[1], loc(path, i + 1));
        e.end = parse_double(fields[2], loc(path, i + 1));
        if (e.label.empty()) throw ParseError(loc(path, i + 1) + ": empty gesture label");
        if (e.label == kExcludedLabel) {
            e.excluded = true;
        } else if (!alphabet.contains(e.label)) {
            if (!options.map_unknown_to_excluded) {
                throw ParseError(loc(path, i + 1) + ": unknown gesture class '" + e.label + "'");
            }
            e.excluded = true;
        }
        if (e.end < e.start) {
            throw ValidationError(loc(path, i + 1) + ": event end precedes start");
        }
        events.push_back(std::move(e));
    }
    if (events.empty()) throw ParseError(path.string() + ": no events");
    return make_sequence(case_id_from_path(path), std::move(events), alphabet);
}

std::string serialize_gesture_file(const GestureSequence& seq) {
    std::string out = "gesture,start,end\n";
    for (const auto& e : seq.events) {
        out += e.label;
        out += ',';
        out += format_double(e.start);
        out += ',';
        out += format_double(e.end);
        out += '\n';
    }
    return out;
}

void write_gesture_file(const std::filesystem::path& path, const GestureSequence& seq) {
    atomic_write_file(path, serialize_gesture_file(seq));
}

FrameProbabilityStream read_probability_file(const std::filesystem::path& path,
                                             const std::optional<GestureAlphabet>& expected,
                                             std::optional<double> fallback_dt) {
    const auto lines = read_lines(path);
    if (lines.size() < 2) throw ParseError(path.string() + ": probability file has no data rows");

    auto header = split(trim(lines[0]), ',');
    for (auto& h : header) h = std::string(trim(h));
    if (header.size() < 3 || header[0] != "t") {
        throw ParseError(loc(path, 1) + ": expected header 't,<code1>,...,<codek>'");
    }
    std::vector<std::string> codes(header.begin() + 1, header.end());

    // Column j of the file feeds alphabet slot column_slot[j].
    std::vector<std::size_t> column_slot(codes.size());
    GestureAlphabet alphabet = expected ? *expected : GestureAlphabet(codes);
    if (expected) {
        if (codes.size() != expected->size()) {
            throw ParseError(loc(path, 1) + ": expected " + std::to_string(expected->size()) +
                             " probability columns, got " + std::to_string(codes.size()));
        }
        std::set<std::string> seen;
        for (std::size_t j = 0; j < codes.size(); ++j) {
            const auto idx = expected->index_of(codes[j]);
            if (!idx) throw ParseError(loc(path, 1) + ": unexpected class column '" + codes[j] + "'");
            if (!seen.insert(codes[j]).second) {
                throw ParseError(loc(path, 1) + ": duplicate class column '" + codes[j] + "'");
            }
            column_slot[j] = *idx;
        }
    } else {
        for (std::size_t j = 0; j < codes.size(); ++j) column_slot[j] = j;
    }

    const std::size_t k = alphabet.size();
    const std::size_t n = lines.size() - 1;
    FrameProbabilityStream stream;
    stream.case_id = case_id_from_path(path);
    stream.alphabet = std::move(alphabet);
    stream.probs.assign(n * k, 0.0);

    std::vector<double> times(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t line_no = i + 2;
        const auto fields = split(trim(lines[i + 1]), ',');
        if (fields.size() != k + 1) {
            throw ParseError(loc(path, line_no) + ": expected " + std::to_string(k + 1) + " fields, got " +
                             std::to_string(fields.size()));
        }
        times[i] = parse_double(fields[0], loc(path, line_no));
        double sum = 0.0;
        double* row = stream.probs.data() + i * k;
        for (std::size_t j = 0; j < k; ++j) {
            const double p = parse_double(fields[j + 1], loc(path, line_no));
            if (p < 0.0) throw ValidationError(loc(path, line_no) + ": negative probability");
            row[column_slot[j]] = p;
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-3) {
            throw ValidationError(loc(path, line_no) + ": row sums to " + format_double(sum) +
                                  ", outside the renormalization window");
        }
        // Rows already valid to 1e-6 are kept verbatim so canonical files
        // round-trip byte-identically.
        if (std::abs(sum - 1.0) > 1e-6) {
            for (std::size_t j = 0; j < k; ++j) row[j] /= sum;
        }
    }

    stream.t0 = times[0];
    if (n >= 2) {
        stream.dt = times[1] - times[0];
        if (!(stream.dt > 0.0)) throw ValidationError(loc(path, 3) + ": timestamps must be strictly increasing");
        for (std::size_t i = 2; i < n; ++i) {
            const double expected_t = stream.t0 + static_cast<double>(i) * stream.dt;
            if (std::abs(times[i] - expected_t) > 1e-6 + 1e-9 * std::abs(expected_t)) {
                throw ValidationError(loc(path, i + 2) + ": non-uniform sampling interval");
            }
        }
    } else {
        if (!fallback_dt) {
            throw ParseError(path.string() + ": cannot infer dt from a single row (pass a fallback)");
        }
        stream.dt = *fallback_dt;
    }

    validate_stream(stream);
    return stream;
}

std::string serialize_probability_file(const FrameProbabilityStream& stream) {
    std::string out = "t";
    for (const auto& code : stream.alphabet.codes()) {
        out += ',';
        out += code;
    }
    out += '\n';
    for (std::size_t i = 0; i < stream.frames(); ++i) {
        out += format_double(stream.time_at(i));
        for (const double p : stream.row(i)) {
            out += ',';
            out += format_double(p);
        }
        out += '\n';
    }
    return out;
}

void write_probability_file(const std::filesystem::path& path, const FrameProbabilityStream& stream) {
    atomic_write_file(path, serialize_probability_file(stream));
}

OutcomeTable read_outcome_file(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw ParseError(path.string() + ": empty outcome file");
    if (trim(lines[0]) != "case_id,outcome") {
        throw ParseError(loc(path, 1) + ": expected header 'case_id,outcome'");
    }
    OutcomeTable table;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string_view line = trim(lines[i]);
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 2) throw ParseError(loc(path, i + 1) + ": expected 2 fields");
        const std::string case_id(trim(fields[0]));
        const long outcome = parse_long(fields[1], loc(path, i + 1));
        if (outcome != 0 && outcome != 1) {
            throw ValidationError(loc(path, i + 1) + ": outcome must be 0 or 1");
        }
        if (!table.entries.emplace(case_id, static_cast<int>(outcome)).second) {
            throw ValidationError(loc(path, i + 1) + ": duplicate case_id '" + case_id + "'");
        }
    }
    if (table.entries.empty()) throw ParseError(path.string() + ": no outcome rows");
    return table;
}

std::string serialize_outcome_file(const OutcomeTable& table) {
    std::string out = "case_id,outcome\n";
    for (const auto& [case_id, outcome] : table.entries) {
        out += case_id;
        out += ',';
        out += std::to_string(outcome);
        out += '\n';
    }
    return out;
}

void write_outcome_file(const std::filesystem::path& path, const OutcomeTable& table) {
    atomic_write_file(path, serialize_outcome_file(table));
}

NamedMatrix read_matrix_file(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.size() < 2) throw ParseError(path.string() + ": matrix file has no data rows");
    auto header = split(trim(lines[0]), ',');
    if (header.size() < 2 || trim(header[0]) != "case_id") {
        throw ParseError(loc(path, 1) + ": expected header 'case_id,<name1>,...'");
    }
    NamedMatrix m;
    m.names.assign(header.begin() + 1, header.end());
    const std::size_t cols = m.names.size();
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string_view line = trim(lines[i]);
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != cols + 1) {
            throw ParseError(loc(path, i + 1) + ": expected " + std::to_string(cols + 1) + " fields");
        }
        m.case_ids.emplace_back(trim(fields[0]));
        for (std::size_t j = 0; j < cols; ++j) {
            m.values.push_back(parse_double(fields[j + 1], loc(path, i + 1)));
        }
    }
    return m;
}

std::string serialize_matrix_file(const NamedMatrix& matrix) {
    std::string out = "case_id";
    for (const auto& name : matrix.names) {
        out += ',';
        out += name;
    }
    out += '\n';
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        out += matrix.case_ids[r];
        for (std::size_t c = 0; c < matrix.cols(); ++c) {
            out += ',';
            out += format_double(matrix.at(r, c));
        }
        out += '\n';
    }
    return out;
}

void write_matrix_file(const std::filesystem::path& path, const NamedMatrix& matrix) {
    atomic_write_file(path, serialize_matrix_file(matrix));
}

}  // namespace gseq

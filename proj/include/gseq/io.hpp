#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gseq/types.hpp"

namespace gseq {

// File formats (UTF-8 tabular text, one case per file):
//   gestures:      header "gesture,start,end", times in seconds
//   probabilities: header "t,<code1>,...,<codek>", one row per frame
//   outcomes:      header "case_id,outcome", outcome in {0,1}
//   matrix:        header "case_id,<name1>,...", one row per case

struct ParseOptions {
    // Unknown labels other than "X" are rejected unless this maps them to
    // the excluded marker.
    bool map_unknown_to_excluded = false;
};

// case_id is the file stem with a trailing ".gestures" dropped.
GestureSequence read_gesture_file(const std::filesystem::path& path, const GestureAlphabet& alphabet,
                                  const ParseOptions& options = {});
std::string serialize_gesture_file(const GestureSequence& seq);
void write_gesture_file(const std::filesystem::path& path, const GestureSequence& seq);

// When `expected` is given the header must hold exactly those codes (any
// order) and columns are reordered to the canonical order; otherwise the
// header order becomes the stream's alphabet. Rows summing to 1 within 1e-3
// are renormalized; anything further off is an error. Single-row files need
// `fallback_dt` since the sampling interval cannot be inferred.
FrameProbabilityStream read_probability_file(const std::filesystem::path& path,
                                             const std::optional<GestureAlphabet>& expected = std::nullopt,
                                             std::optional<double> fallback_dt = std::nullopt);
std::string serialize_probability_file(const FrameProbabilityStream& stream);
void write_probability_file(const std::filesystem::path& path, const FrameProbabilityStream& stream);

OutcomeTable read_outcome_file(const std::filesystem::path& path);
std::string serialize_outcome_file(const OutcomeTable& table);
void write_outcome_file(const std::filesystem::path& path, const OutcomeTable& table);

// Rectangular named-column matrix keyed by case_id.
struct NamedMatrix {
    std::vector<std::string> case_ids;
    std::vector<std::string> names;
    std::vector<double> values;  // case_ids.size() x names.size(), row-major

    std::size_t rows() const { return case_ids.size(); }
    std::size_t cols() const { return names.size(); }
    double at(std::size_t r, std::size_t c) const { return values[r * names.size() + c]; }
};

NamedMatrix read_matrix_file(const std::filesystem::path& path);
std::string serialize_matrix_file(const NamedMatrix& matrix);
void write_matrix_file(const std::filesystem::path& path, const NamedMatrix& matrix);

std::string case_id_from_path(const std::filesystem::path& path);

}  // namespace gseq

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gseq {

// Input files that cannot be read or do not match their declared format.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Well-formed input whose values violate a domain invariant.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest round-trip decimal form (std::to_chars). All files we emit use
// this so that serialize(parse(x)) is byte-identical for canonical files.
std::string format_double(double value);

// Strict full-token parse; throws ParseError on anything else.
double parse_double(std::string_view token, std::string_view context);
long parse_long(std::string_view token, std::string_view context);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view line, char delim);

std::string read_text_file(const std::filesystem::path& path);

// Write via temp file + rename so readers never observe partial output.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace gseq

#pragma once

#include <string>
#include <string_view>

namespace gseq::cli {

// Hex digest of a byte string (FIPS 180-4 SHA-256).
std::string sha256_hex(std::string_view data);

}  // namespace gseq::cli

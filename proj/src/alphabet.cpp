#include "gseq/alphabet.hpp"

#include "gseq/util.hpp"

namespace gseq {

GestureAlphabet::GestureAlphabet(std::vector<std::string> codes) : codes_(std::move(codes)) {
    if (codes_.size() < 2) throw ValidationError("alphabet needs at least 2 classes");
    for (std::size_t i = 0; i < codes_.size(); ++i) {
        const std::string& code = codes_[i];
        if (code.empty()) throw ValidationError("alphabet code must be non-empty");
        if (code == kExcludedLabel) throw ValidationError("alphabet may not contain the excluded label 'X'");
        if (code.find(',') != std::string::npos || code.find('_') != std::string::npos) {
            throw ValidationError("alphabet code may not contain ',' or '_': '" + code + "'");
        }
        if (!index_.emplace(code, i).second) throw ValidationError("duplicate alphabet code: '" + code + "'");
    }
}

const GestureAlphabet& GestureAlphabet::dominant10() {
    static const GestureAlphabet alphabet({"c", "h", "k", "m", "p", "r", "s", "a", "g", "e"});
    return alphabet;
}

std::optional<std::size_t> GestureAlphabet::index_of(std::string_view code) const {
    const auto it = index_.find(code);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

}  // namespace gseq

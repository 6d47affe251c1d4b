#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gseq {

// Annotation label for events outside the dominant classes. Parsed and kept
// on the sequence, but flagged excluded and dropped from all analytics.
inline constexpr std::string_view kExcludedLabel = "X";

// Ordered set of gesture class codes. The order is canonical for a run:
// probability columns, feature names and report rows all follow it.
class GestureAlphabet {
public:
    explicit GestureAlphabet(std::vector<std::string> codes);

    // The ten dominant dissection gesture classes.
    static const GestureAlphabet& dominant10();

    std::size_t size() const { return codes_.size(); }
    const std::vector<std::string>& codes() const { return codes_; }
    const std::string& code(std::size_t i) const { return codes_.at(i); }
    std::optional<std::size_t> index_of(std::string_view code) const;
    bool contains(std::string_view code) const { return index_of(code).has_value(); }

    friend bool operator==(const GestureAlphabet& a, const GestureAlphabet& b) {
        return a.codes_ == b.codes_;
    }

private:
    std::vector<std::string> codes_;
    std::map<std::string, std::size_t, std::less<>> index_;
};

}  // namespace gseq

#include "olpsynth/arith.hpp"

namespace olpsynth {

std::string_view to_string(ArithmeticMode m) noexcept {
    switch (m) {
        case ArithmeticMode::Precise: return "precise";
        case ArithmeticMode::Relaxed: return "relaxed";
        case ArithmeticMode::Imprecise: return "imprecise";
    }
    return "?";
}

std::optional<ArithmeticMode> parse_mode(std::string_view text) noexcept {
    if (text == "precise") return ArithmeticMode::Precise;
    if (text == "relaxed") return ArithmeticMode::Relaxed;
    if (text == "imprecise") return ArithmeticMode::Imprecise;
    return std::nullopt;
}

}  // namespace olpsynth

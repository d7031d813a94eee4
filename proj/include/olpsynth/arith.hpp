#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace olpsynth {

/// Arithmetic tiers, strictest first.
///   Precise   - IEEE-754 binary32, denormals kept, canonical scalar order.
///   Relaxed   - denormals flushed on every load and partial-sum store;
///               canonical order kept.
///   Imprecise - flushing as Relaxed, u-lane vector accumulation with one
///               pairwise reduction, -0.0 stored as +0.0.
enum class ArithmeticMode : std::uint8_t { Precise, Relaxed, Imprecise };

std::string_view to_string(ArithmeticMode m) noexcept;
std::optional<ArithmeticMode> parse_mode(std::string_view text) noexcept;

/// Denormal -> zero of the same sign. Branch-free so it vectorizes.
inline float flush_denormal(float v) noexcept {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    const bool denormal = (bits & 0x7f800000u) == 0;
    return std::bit_cast<float>(denormal ? (bits & 0x80000000u) : bits);
}

/// -0.0 -> +0.0, everything else unchanged.
inline float positive_zero(float v) noexcept {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    return std::bit_cast<float>(bits == 0x80000000u ? 0u : bits);
}

inline bool is_denormal(float v) noexcept {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    return (bits & 0x7f800000u) == 0 && (bits & 0x007fffffu) != 0;
}

}  // namespace olpsynth

#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace polyurn {

/// Shortest decimal representation that round-trips the double; keeps CSV
/// goldens byte-stable across platforms.
inline std::string format_double(double value) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    (void)ec;
    return std::string(buffer, ptr);
}

inline std::string format_int(std::int64_t value) {
    char buffer[24];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    (void)ec;
    return std::string(buffer, ptr);
}

} // namespace polyurn

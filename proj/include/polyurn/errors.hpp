#pragma once

#include <stdexcept>
#include <string>

namespace polyurn {

/// Raised when a step would drive some colour count negative. Recoverable:
/// the Monte Carlo layer catches it and reports the offending replication.
class TenabilityViolation : public std::runtime_error {
public:
    TenabilityViolation(int colour, std::int64_t count, const std::string& what)
        : std::runtime_error(what), colour_(colour), count_(count) {}

    int colour() const noexcept { return colour_; }
    std::int64_t resulting_count() const noexcept { return count_; }

private:
    int colour_;
    std::int64_t count_;
};

/// Raised by the configuration loader; carries the offending field so the
/// CLI can print a precise diagnostic (exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace polyurn

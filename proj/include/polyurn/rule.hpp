#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "polyurn/compositions.hpp"

namespace polyurn {

/// A multi-drawing replacement rule: for every composition v of the m drawn
/// balls, the integer vector of balls added per colour. Entries are stored
/// in canonical composition order (lexicographic descending); construction
/// checks totality over the composition set.
class ReplacementRule {
public:
    /// Rows must be aligned with enumerate_compositions(colours, draws).
    /// For d = 2 this is exactly the top-to-bottom matrix layout of the
    /// two-colour literature: row j is the addition after drawing j balls
    /// of the second colour.
    ReplacementRule(int colours, int draws, std::vector<std::vector<std::int64_t>> rows);

    static ReplacementRule from_entries(int colours, int draws,
                                        const std::map<DrawVector, std::vector<std::int64_t>>& entries);

    int colours() const noexcept { return colours_; }
    int draws() const noexcept { return draws_; }

    std::size_t size() const noexcept { return compositions_.size(); }
    const std::vector<DrawVector>& compositions() const noexcept { return compositions_; }
    const DrawVector& composition(std::size_t idx) const { return compositions_[idx]; }
    const std::vector<std::int64_t>& addition(std::size_t idx) const { return rows_[idx]; }
    std::int64_t addition(std::size_t idx, int colour) const { return rows_[idx][static_cast<std::size_t>(colour)]; }

    /// r(v) = sum of the addition vector for composition idx.
    std::int64_t row_sum(std::size_t idx) const { return row_sums_[idx]; }

    /// Multinomial coefficient binom(m; v) for composition idx, as a double.
    double weight(std::size_t idx) const { return weights_[idx]; }

    std::size_t index_of(const DrawVector& v) const;

    // Two-colour accessors in the usual a_k/b_k indexing: row k is the
    // addition after drawing m-k white (first colour) balls.
    std::int64_t a(int k) const;
    std::int64_t b(int k) const;
    std::int64_t c(int k) const { return a(k) + b(k); }

    std::int64_t max_abs_addition() const noexcept { return max_abs_addition_; }
    std::int64_t max_abs_row_sum() const noexcept { return max_abs_row_sum_; }

private:
    int colours_;
    int draws_;
    std::vector<DrawVector> compositions_;
    std::vector<std::vector<std::int64_t>> rows_;
    std::vector<std::int64_t> row_sums_;
    std::vector<double> weights_;
    std::int64_t max_abs_addition_ = 0;
    std::int64_t max_abs_row_sum_ = 0;
};

/// S if every addition vector sums to the same value, otherwise empty.
std::optional<std::int64_t> check_balance(const ReplacementRule& rule);

/// sigma if R(v) = sigma * v for every composition (so h vanishes on the
/// whole simplex), otherwise empty.
std::optional<std::int64_t> check_diagonal(const ReplacementRule& rule);

} // namespace polyurn

#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "polyurn/catalog.hpp"
#include "polyurn/rng.hpp"
#include "polyurn/rule.hpp"
#include "polyurn/urn.hpp"

namespace test {

inline polyurn::ReplacementRule example_rule(const std::string& name) {
    return polyurn::catalogue_config(name).rule();
}

inline polyurn::UrnState example_initial(const std::string& name) {
    return polyurn::catalogue_config(name).initial_state();
}

/// Diagonal rule R(v) = sigma * v.
inline polyurn::ReplacementRule diagonal_rule(int d, int m, std::int64_t sigma) {
    std::vector<std::vector<std::int64_t>> rows;
    for (const auto& v : polyurn::enumerate_compositions(d, m)) {
        std::vector<std::int64_t> row;
        for (int c : v) row.push_back(sigma * c);
        rows.push_back(std::move(row));
    }
    return polyurn::ReplacementRule(d, m, std::move(rows));
}

/// Random rule with entries in [lo, hi], deterministic in the stream.
inline polyurn::ReplacementRule random_rule(int d, int m, std::int64_t lo, std::int64_t hi,
                                            polyurn::RngStream& rng) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    std::vector<std::vector<std::int64_t>> rows;
    for (std::int64_t i = 0; i < polyurn::composition_count(d, m); ++i) {
        std::vector<std::int64_t> row;
        for (int c = 0; c < d; ++c) row.push_back(lo + static_cast<std::int64_t>(rng.next_u64() % span));
        rows.push_back(std::move(row));
    }
    return polyurn::ReplacementRule(d, m, std::move(rows));
}

/// Random balanced rule with non-negative entries and row sum S.
inline polyurn::ReplacementRule random_balanced_rule(int d, int m, std::int64_t s, polyurn::RngStream& rng) {
    std::vector<std::vector<std::int64_t>> rows;
    for (std::int64_t i = 0; i < polyurn::composition_count(d, m); ++i) {
        // Drop s balls into d colours uniformly.
        std::vector<std::int64_t> row(static_cast<std::size_t>(d), 0);
        for (std::int64_t ball = 0; ball < s; ++ball) ++row[rng.next_u64() % static_cast<std::uint64_t>(d)];
        rows.push_back(std::move(row));
    }
    return polyurn::ReplacementRule(d, m, std::move(rows));
}

/// Exhaustive reachability oracle for tenability: explores every positive-
/// probability draw sequence to the given depth and reports whether any
/// reachable state has a negative count. Stuck states (urn too small to
/// draw) are leaves, not violations.
inline bool oracle_negativity_reachable(const polyurn::ReplacementRule& rule,
                                        const polyurn::UrnState& state, polyurn::SamplingMode mode,
                                        int depth) {
    using polyurn::SamplingMode;
    if (depth == 0) return false;
    const int m = rule.draws();
    if (state.total < (mode == SamplingMode::WithoutReplacement ? static_cast<std::int64_t>(m) : 1)) return false;
    for (std::size_t idx = 0; idx < rule.size(); ++idx) {
        const auto& v = rule.composition(idx);
        bool possible = true;
        for (int i = 0; i < rule.colours(); ++i) {
            const std::int64_t available = state.counts[static_cast<std::size_t>(i)];
            const int want = v[static_cast<std::size_t>(i)];
            if (mode == SamplingMode::WithoutReplacement ? available < want : (want > 0 && available <= 0)) {
                possible = false;
                break;
            }
        }
        if (!possible) continue;
        polyurn::UrnState next = state;
        next.total = 0;
        bool negative = false;
        for (int i = 0; i < rule.colours(); ++i) {
            next.counts[static_cast<std::size_t>(i)] += rule.addition(idx, i);
            if (next.counts[static_cast<std::size_t>(i)] < 0) negative = true;
            next.total += next.counts[static_cast<std::size_t>(i)];
        }
        next.step += 1;
        if (negative) return true;
        if (oracle_negativity_reachable(rule, next, mode, depth - 1)) return true;
    }
    return false;
}

} // namespace test

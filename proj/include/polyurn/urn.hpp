#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polyurn/rng.hpp"
#include "polyurn/rule.hpp"

namespace polyurn {

enum class SamplingMode { WithReplacement, WithoutReplacement };

/// Urn contents at one time step: per-colour counts, their sum, and the step
/// index. Values, never mutated in place by the public operations.
struct UrnState {
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;
    std::int64_t step = 0;
};

/// Validates non-negative counts with a positive sum.
UrnState make_state(std::vector<std::int64_t> counts);

/// Probability of drawing composition v from `state` under `mode`.
/// Without replacement this is the multivariate hypergeometric mass, computed
/// as a product of falling-factorial ratios with numerator and denominator
/// factors interleaved pairwise so the partial products stay near 1.
double draw_probability(const UrnState& state, const DrawVector& v, SamplingMode mode);

/// Fills `out` (size rule.size()) with the draw distribution over the
/// canonical composition order.
void draw_distribution(const UrnState& state, const ReplacementRule& rule, SamplingMode mode,
                       std::span<double> out);

/// Inverse-CDF selection over the canonical composition order from a single
/// uniform variate.
std::size_t sample_draw_index(const UrnState& state, const ReplacementRule& rule, SamplingMode mode,
                              double unit);

DrawVector sample_draw(const UrnState& state, const ReplacementRule& rule, SamplingMode mode, RngStream& rng);

/// One sampling-and-replacement step. Throws TenabilityViolation if the
/// sampled addition would drive a count negative, std::overflow_error if a
/// count or the total would overflow 64 bits.
UrnState step(const UrnState& state, const ReplacementRule& rule, SamplingMode mode, RngStream& rng);

/// In-place variant applying addition row `idx`; shared by step() and the
/// ensemble runner.
void apply_addition(UrnState& state, const ReplacementRule& rule, std::size_t idx);

} // namespace polyurn

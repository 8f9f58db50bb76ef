#pragma once

#include <cstdint>
#include <vector>

namespace polyurn {

/// Counts of balls of each colour in one draw of m balls; entries are
/// non-negative and sum to m.
using DrawVector = std::vector<int>;

/// All compositions of m into d non-negative parts, in the canonical order
/// used throughout (lexicographic descending). Rejects d == 0 or m == 0.
std::vector<DrawVector> enumerate_compositions(int d, int m);

/// C(m+d-1, d-1), the number of compositions.
std::int64_t composition_count(int d, int m);

std::int64_t binomial(int n, int k);

/// m! / prod(v_i!), exact for the small m this library deals in.
std::int64_t multinomial_coefficient(const DrawVector& v);

} // namespace polyurn

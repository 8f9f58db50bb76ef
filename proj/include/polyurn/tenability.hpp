#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polyurn/urn.hpp"

namespace polyurn {

/// Per-colour tenability diagnostics: the divisor nu_i (gcd of the colour's
/// additions away from the pure draw m*e_i) and, when the colour fails, a
/// description of the violated condition.
struct ColourTenability {
    int colour = 0;
    std::int64_t nu = 0;
    bool ok = true;
    std::string violation; // empty when ok
};

struct TenabilityReport {
    bool tenable = true;
    std::vector<ColourTenability> colours;
    /// True when the algebraic conditions decided the verdict outright;
    /// false when the verdict came from the bounded reachability search.
    bool algebraic = true;
    std::string note;

    /// One-line summary of the first failed condition; empty when tenable.
    std::string first_violation() const;
};

/// Necessary-and-sufficient tenability test for the given initial state and
/// sampling mode. Always returns a report; never throws.
///
/// The algebraic screen works per colour: away from the pure draw m*e_i the
/// addition may not remove more balls of a colour than the draw itself
/// certifies present (v_i without replacement, one ball with replacement);
/// a removing pure draw must keep the reachable residue classes of the
/// colour count clear of the danger window [min_draw, -R_i(m*e_i) - 1],
/// where the reachable classes are the whole orbit of the initial count
/// under repeated pure draws modulo nu_i. When the screen trips, the
/// verdict is confirmed exactly by an exhaustive memoized search of every
/// positive-probability draw sequence of length `search_depth` from the
/// initial state, so that a screen condition whose violating draw is
/// unreachable from this particular composition does not condemn the
/// scheme.
TenabilityReport check_tenability(const ReplacementRule& rule, const UrnState& initial, SamplingMode mode,
                                  int search_depth = 6);

} // namespace polyurn

#pragma once

#include <vector>

#include "polyurn/urn.hpp"

namespace polyurn {

/// A point of the probability simplex: non-negative coordinates summing to 1
/// (within 1e-10, checked at construction).
class SimplexPoint {
public:
    explicit SimplexPoint(std::vector<double> coords);

    int dim() const noexcept { return static_cast<int>(coords_.size()); }
    const std::vector<double>& coords() const noexcept { return coords_; }
    double operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }

private:
    std::vector<double> coords_;
};

/// Normalized composition Z_n of an urn state.
SimplexPoint composition_of(const UrnState& state);

/// Clips coordinates negative by at most `clip_tol` to zero and renormalizes.
/// Throws if a coordinate is more negative than that.
SimplexPoint project_to_simplex(std::vector<double> coords, double clip_tol = 1e-9);

/// All simplex points with coordinates k/resolution (the deterministic grid
/// used for Newton multistarts and Lyapunov certificates).
std::vector<SimplexPoint> simplex_grid(int d, int resolution);

double distance(const SimplexPoint& a, const SimplexPoint& b);

} // namespace polyurn

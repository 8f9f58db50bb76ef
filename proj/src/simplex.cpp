#include "polyurn/simplex.hpp"

#include <cmath>
#include <stdexcept>

#include "polyurn/compositions.hpp"

namespace polyurn {

SimplexPoint::SimplexPoint(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw std::invalid_argument("SimplexPoint: empty coordinates");
    double sum = 0.0;
    for (double& x : coords_) {
        if (x < 0.0) {
            if (x < -1e-10) throw std::invalid_argument("SimplexPoint: negative coordinate");
            x = 0.0;
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-10) throw std::invalid_argument("SimplexPoint: coordinates do not sum to 1");
}

SimplexPoint composition_of(const UrnState& state) {
    std::vector<double> coords(state.counts.size());
    const double inv_total = 1.0 / static_cast<double>(state.total);
    for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = static_cast<double>(state.counts[i]) * inv_total;
    return SimplexPoint(std::move(coords));
}

SimplexPoint project_to_simplex(std::vector<double> coords, double clip_tol) {
    double sum = 0.0;
    for (double& x : coords) {
        if (x < 0.0) {
            if (x < -clip_tol) throw std::invalid_argument("project_to_simplex: coordinate below clip tolerance");
            x = 0.0;
        }
        sum += x;
    }
    if (sum <= 0.0) throw std::invalid_argument("project_to_simplex: non-positive mass");
    for (double& x : coords) x /= sum;
    return SimplexPoint(std::move(coords));
}

std::vector<SimplexPoint> simplex_grid(int d, int resolution) {
    if (resolution < 1) throw std::invalid_argument("simplex_grid: resolution must be positive");
    std::vector<SimplexPoint> grid;
    const auto compositions = enumerate_compositions(d, resolution);
    grid.reserve(compositions.size());
    const double inv = 1.0 / static_cast<double>(resolution);
    for (const auto& comp : compositions) {
        std::vector<double> coords(comp.size());
        for (std::size_t i = 0; i < comp.size(); ++i) coords[i] = static_cast<double>(comp[i]) * inv;
        grid.emplace_back(std::move(coords));
    }
    return grid;
}

double distance(const SimplexPoint& a, const SimplexPoint& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("distance: dimension mismatch");
    double sq = 0.0;
    for (int i = 0; i < a.dim(); ++i) {
        const double diff = a[i] - b[i];
        sq += diff * diff;
    }
    return std::sqrt(sq);
}

} // namespace polyurn

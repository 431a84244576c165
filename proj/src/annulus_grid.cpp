#include "confmet/annulus_grid.hpp"

#include <cmath>

#include "confmet/errors.hpp"

namespace confmet {

double AnnulusGrid::log_step() const {
    require(radii.size() >= 2, Errc::EmptyRegion, "grid has fewer than two radial nodes");
    return (std::log(r_max) - std::log(r_min)) / static_cast<double>(radii.size() - 1);
}

void AnnulusGrid::point(std::size_t ir, std::size_t is, double* out) const {
    const double* node = sphere.node(is);
    double r = radii[ir];
    for (int i = 0; i < sphere.n; ++i) out[i] = r * node[i];
}

std::vector<double> AnnulusGrid::point(std::size_t ir, std::size_t is) const {
    std::vector<double> p(sphere.n);
    point(ir, is, p.data());
    return p;
}

AnnulusGrid build_annulus_grid(double r_min, double r_max, int radial_count,
                               SphereQuadrature sphere) {
    require(r_min > 0.0 && r_min < r_max, Errc::BadRadii,
            "need 0 < r_min < r_max, got [" + std::to_string(r_min) + ", " + std::to_string(r_max) + "]");
    require(radial_count >= 2, Errc::BadRadii, "radial_count must be >= 2");

    AnnulusGrid g;
    g.r_min = r_min;
    g.r_max = r_max;
    g.sphere = std::move(sphere);
    g.radii.resize(radial_count);
    double ls = std::log(r_min);
    double step = (std::log(r_max) - ls) / (radial_count - 1);
    for (int j = 0; j < radial_count; ++j) g.radii[j] = std::exp(ls + j * step);
    g.radii.front() = r_min;
    g.radii.back() = r_max;
    return g;
}

}  // namespace confmet

#pragma once

#include <vector>

#include "confmet/sphere_quadrature.hpp"

namespace confmet {

/// Product discretization of the annulus B_{r_max} \ B_{r_min}: log-uniform
/// radial nodes times a sphere quadrature. The puncture is excluded by
/// construction (r_min > 0).
struct AnnulusGrid {
    double r_min = 0.0;
    double r_max = 0.0;
    std::vector<double> radii;  // strictly increasing, log-uniform
    SphereQuadrature sphere;

    int n() const { return sphere.n; }
    std::size_t radial_count() const { return radii.size(); }
    std::size_t point_count() const { return radii.size() * sphere.count(); }

    double log_step() const;

    /// Cartesian coordinates of grid point (radial index, sphere index).
    void point(std::size_t ir, std::size_t is, double* out) const;
    std::vector<double> point(std::size_t ir, std::size_t is) const;
};

/// Log-uniform radial nodes including both endpoints. radial_count >= 2
/// (the build contract's examples use counts as small as 2; integration
/// accuracy wants >= 4).
AnnulusGrid build_annulus_grid(double r_min, double r_max, int radial_count,
                               SphereQuadrature sphere);

}  // namespace confmet

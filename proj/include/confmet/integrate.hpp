#pragma once

#include <functional>
#include <optional>

#include "confmet/annulus_grid.hpp"
#include "confmet/background.hpp"
#include "confmet/conformal_factor.hpp"

namespace confmet {

/// Integration measure over an annulus grid or one of its coordinate spheres.
struct Measure {
    enum class Kind { VolumeG, VolumeG0, SphereG, SphereG0 };
    Kind kind = Kind::VolumeG0;
    double radius = 0.0;  // sphere kinds

    static Measure volume_g() { return {Kind::VolumeG, 0.0}; }
    static Measure volume_g0() { return {Kind::VolumeG0, 0.0}; }
    static Measure sphere_g(double r) { return {Kind::SphereG, r}; }
    static Measure sphere_g0(double r) { return {Kind::SphereG0, r}; }
};

using FieldFn = std::function<double(const double* x)>;

/// Quadrature of `f` against the requested measure. With `p` set, returns the
/// L^p norm (integral of |f|^p, then the p-th root). Radial integration is a
/// fourth-order composite rule on the log-uniform nodes; sums are compensated
/// so results do not depend on traversal order.
double integrate(const FieldFn& f, const ConformalFactor& u, const BackgroundMetric& g0,
                 const AnnulusGrid& grid, const Measure& m, std::optional<double> p = {});

/// Same, for a field already tabulated on the grid (ir-major). Entries on
/// flagged edge layers are excluded by shrinking the radial range.
double integrate_values(const std::vector<double>& values, const ConformalFactor& u,
                        const BackgroundMetric& g0, const AnnulusGrid& grid, const Measure& m,
                        std::optional<double> p = {},
                        const std::vector<unsigned char>* edge = nullptr);

}  // namespace confmet

#pragma once

#include <vector>

#include "confmet/conformal_factor.hpp"
#include "confmet/dimension.hpp"
#include "confmet/sphere_quadrature.hpp"

namespace confmet {

/// Green function of -Delta on the flat unit ball with pole at 0 and zero
/// boundary values: G(x) = (|x|^{2-n} - 1) / ((n-2) omega_{n-1}).
double green_function_flat_ball(const Dimension& dim, const double* x);

/// Per-radius sup and mean of w = u / G on coordinate spheres, with a
/// log-slope boundedness indicator (w may grow like log(1/r) while staying in
/// every W^{2,p}, p < n/2; the profile reports the growth rate rather than
/// declaring a theorem violation).
struct WProfile {
    std::vector<double> radii;  // decreasing
    std::vector<double> sup_w;
    std::vector<double> mean_w;
    double log_slope = 0.0;  // d(sup w)/d log(1/r) over the inner half
    bool bounded = false;    // |log_slope| small against the inner mean level
};
WProfile w_profile(const ConformalFactor& u, const Dimension& dim, std::vector<double> radii,
                   const SphereQuadrature& sq);

}  // namespace confmet

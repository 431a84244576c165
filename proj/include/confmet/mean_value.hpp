#pragma once

#include <functional>
#include <limits>

namespace confmet {

/// Result of the mean-value selector on [r0/4, 2 r0].
struct MeanValueResult {
    double xi = 0.0;
    double residual = 0.0;    // |f'(xi) + h(xi) - b1 - b2|
    double a_measured = 0.0;  // smallest a for which the integral hypotheses hold
};

/// Scans for the point xi in [r0/4, 2 r0] minimizing |f'(xi)+h(xi)-b1-b2|
/// (deterministic tie-break: smallest xi; a local refinement pass follows the
/// scan). `a_measured` is computed from
///   |int_{r0/4}^{r0/2} f - (3/32) b1 r0^2| + |int_{r0}^{2 r0} f - (3/2) b1 r0^2| <= a r0^2
///   int_{r0/4}^{2 r0} |h - b2| <= a r0
/// When the hypotheses hold, the residual is bounded by 12 a. A caller-supplied
/// `a_cap` turns an oversized measured a into a HypothesisViolated error that
/// reports the measurement.
MeanValueResult mean_value_select_xi(const std::function<double(double)>& f,
                                     const std::function<double(double)>& f_prime,
                                     const std::function<double(double)>& h, double b1, double b2,
                                     double r0, int scan_samples = 4096,
                                     double a_cap = std::numeric_limits<double>::infinity());

}  // namespace confmet

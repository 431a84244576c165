#include "confmet/mean_value.hpp"

#include <cmath>
#include <string>

#include "confmet/errors.hpp"
#include "confmet/numerics.hpp"

namespace confmet {

MeanValueResult mean_value_select_xi(const std::function<double(double)>& f,
                                     const std::function<double(double)>& f_prime,
                                     const std::function<double(double)>& h, double b1, double b2,
                                     double r0, int scan_samples, double a_cap) {
    require(r0 > 0.0, Errc::ValidationError, "r0 must be positive");
    require(scan_samples >= 16, Errc::ValidationError, "scan too coarse");
    double lo = 0.25 * r0, hi = 2.0 * r0;

    double dev1 = std::abs(integrate_gl(f, 0.25 * r0, 0.5 * r0, 16, 10) -
                           (3.0 / 32.0) * b1 * r0 * r0);
    double dev2 = std::abs(integrate_gl(f, r0, 2.0 * r0, 16, 10) - 1.5 * b1 * r0 * r0);
    double devh = integrate_gl([&](double t) { return std::abs(h(t) - b2); }, lo, hi, 64, 10);
    MeanValueResult out;
    out.a_measured = std::max((dev1 + dev2) / (r0 * r0), devh / r0);
    if (out.a_measured > a_cap)
        fail(Errc::HypothesisViolated,
             "integral bounds fail: measured a = " + std::to_string(out.a_measured) +
                 " exceeds cap " + std::to_string(a_cap));

    auto target = [&](double t) { return std::abs(f_prime(t) + h(t) - b1 - b2); };

    double best_t = lo, best_v = target(lo);
    double step = (hi - lo) / scan_samples;
    for (int k = 1; k <= scan_samples; ++k) {
        double t = lo + k * step;
        double v = target(t);
        if (v < best_v) {  // strict: ties keep the smallest xi
            best_v = v;
            best_t = t;
        }
    }
    // Local refinement around the scan winner.
    double a = std::max(lo, best_t - step), b = std::min(hi, best_t + step);
    for (int it = 0; it < 60; ++it) {
        double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
        if (target(m1) <= target(m2))
            b = m2;
        else
            a = m1;
    }
    double mid = 0.5 * (a + b);
    if (target(mid) < best_v) {
        best_v = target(mid);
        best_t = mid;
    }
    out.xi = best_t;
    out.residual = best_v;
    return out;
}

}  // namespace confmet

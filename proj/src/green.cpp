#include "confmet/green.hpp"

#include <algorithm>
#include <cmath>

#include "confmet/errors.hpp"
#include "confmet/numerics.hpp"

namespace confmet {

double green_function_flat_ball(const Dimension& dim, const double* x) {
    int n = dim.n();
    double r2 = 0;
    for (int i = 0; i < n; ++i) r2 += x[i] * x[i];
    double r = std::sqrt(r2);
    require(r > 0.0 && r <= 1.0 + 1e-15, Errc::OutOfBall, "Green function lives on 0 < |x| <= 1");
    return (std::pow(r, 2.0 - n) - 1.0) / ((n - 2) * dim.sphere_area());
}

WProfile w_profile(const ConformalFactor& u, const Dimension& dim, std::vector<double> radii,
                   const SphereQuadrature& sq) {
    require(!radii.empty(), Errc::ValidationError, "no radii requested");
    for (std::size_t i = 0; i + 1 < radii.size(); ++i)
        require(radii[i] > radii[i + 1], Errc::ValidationError, "radii must be strictly decreasing");
    require(radii.front() < 1.0, Errc::OutOfBall, "w-profile radii must sit inside the unit ball");
    int n = dim.n();
    double area = dim.sphere_area();

    WProfile out;
    out.radii = radii;
    std::vector<double> x(n);
    for (double r : radii) {
        double sup = 0.0;
        KahanSum mean;
        for (std::size_t is = 0; is < sq.count(); ++is) {
            const double* node = sq.node(is);
            for (int i = 0; i < n; ++i) x[i] = r * node[i];
            double g = green_function_flat_ball(dim, x.data());
            double w = u.value(x.data(), n) / g;
            sup = std::max(sup, w);
            mean.add(sq.weights[is] * w);
        }
        out.sup_w.push_back(sup);
        out.mean_w.push_back(mean.value() / area);
    }

    // slope of sup w against log(1/r), inner half of the radii
    std::size_t half = radii.size() / 2;
    if (radii.size() - half >= 2) {
        std::vector<double> lx, ly;
        for (std::size_t i = half; i < radii.size(); ++i) {
            lx.push_back(std::log(1.0 / radii[i]));
            ly.push_back(out.sup_w[i]);
        }
        out.log_slope = fit_slope(lx, ly);
        double level = std::abs(out.mean_w.back()) + 1e-300;
        out.bounded = std::abs(out.log_slope) < 0.05 * level;
    }
    return out;
}

}  // namespace confmet

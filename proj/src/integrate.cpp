#include "confmet/integrate.hpp"

#include <cmath>

#include "confmet/errors.hpp"
#include "confmet/numerics.hpp"

namespace confmet {

namespace {

double density_for(const Measure& m, const ConformalFactor& u, const BackgroundMetric& g0,
                   const double* x) {
    int n = g0.dim().n();
    switch (m.kind) {
        case Measure::Kind::VolumeG0: return g0.volume_density(x);
        case Measure::Kind::VolumeG: {
            double uv = u.value(x, n);
            return std::pow(uv, 2.0 * n / (n - 2)) * g0.volume_density(x);
        }
        case Measure::Kind::SphereG0: return g0.sphere_density(x);
        case Measure::Kind::SphereG: {
            double uv = u.value(x, n);
            return std::pow(uv, 2.0 * (n - 1) / (n - 2)) * g0.sphere_density(x);
        }
    }
    return 0.0;
}

double sphere_integral(const FieldFn& f, const ConformalFactor& u, const BackgroundMetric& g0,
                       const AnnulusGrid& grid, const Measure& m, std::optional<double> p) {
    require(m.radius >= grid.r_min * (1 - 1e-12) && m.radius <= grid.r_max * (1 + 1e-12),
            Errc::RadiusOutOfRange, "sphere radius outside the grid annulus");
    int n = grid.n();
    KahanSum acc;
    std::vector<double> x(n);
    for (std::size_t is = 0; is < grid.sphere.count(); ++is) {
        const double* node = grid.sphere.node(is);
        for (int i = 0; i < n; ++i) x[i] = m.radius * node[i];
        // dS_{g0} = Theta dS^{n-1}; the weights are unit-sphere weights.
        double dens = density_for(m, u, g0, x.data());
        double v = f(x.data());
        if (p) v = std::pow(std::abs(v), *p);
        acc.add(grid.sphere.weights[is] * v * dens);
    }
    double total = acc.value();
    return p ? std::pow(total, 1.0 / *p) : total;
}

}  // namespace

double integrate(const FieldFn& f, const ConformalFactor& u, const BackgroundMetric& g0,
                 const AnnulusGrid& grid, const Measure& m, std::optional<double> p) {
    require(grid.point_count() > 0, Errc::EmptyRegion, "empty grid");
    if (m.kind == Measure::Kind::SphereG || m.kind == Measure::Kind::SphereG0)
        return sphere_integral(f, u, g0, grid, m, p);

    require(grid.radial_count() >= 2, Errc::EmptyRegion, "need at least two radial nodes");
    int n = grid.n();
    auto wr = uniform_composite_weights(grid.radial_count(), grid.log_step());
    KahanSum acc;
    std::vector<double> x(n);
    for (std::size_t ir = 0; ir < grid.radial_count(); ++ir) {
        double r = grid.radii[ir];
        double rn = std::pow(r, n);  // dx = r^n ds dsigma in log-radius
        for (std::size_t is = 0; is < grid.sphere.count(); ++is) {
            grid.point(ir, is, x.data());
            double v = f(x.data());
            if (p) v = std::pow(std::abs(v), *p);
            acc.add(wr[ir] * grid.sphere.weights[is] * v * density_for(m, u, g0, x.data()) * rn);
        }
    }
    double total = acc.value();
    return p ? std::pow(total, 1.0 / *p) : total;
}

double integrate_values(const std::vector<double>& values, const ConformalFactor& u,
                        const BackgroundMetric& g0, const AnnulusGrid& grid, const Measure& m,
                        std::optional<double> p, const std::vector<unsigned char>* edge) {
    require(values.size() == grid.point_count(), Errc::ValidationError,
            "field size does not match grid");
    require(m.kind == Measure::Kind::VolumeG || m.kind == Measure::Kind::VolumeG0,
            Errc::ValidationError, "tabulated integration is a volume operation");

    std::size_t ns = grid.sphere.count();
    std::size_t lo = 0, hi = grid.radial_count();
    if (edge) {
        while (lo < hi && (*edge)[lo * ns] != 0) ++lo;
        while (hi > lo && (*edge)[(hi - 1) * ns] != 0) --hi;
    }
    require(hi - lo >= 2, Errc::EmptyRegion, "fewer than two interior radial layers");

    int n = grid.n();
    auto wr = uniform_composite_weights(hi - lo, grid.log_step());
    KahanSum acc;
    std::vector<double> x(n);
    for (std::size_t ir = lo; ir < hi; ++ir) {
        double rn = std::pow(grid.radii[ir], n);
        for (std::size_t is = 0; is < ns; ++is) {
            grid.point(ir, is, x.data());
            double v = values[ir * ns + is];
            if (p) v = std::pow(std::abs(v), *p);
            acc.add(wr[ir - lo] * grid.sphere.weights[is] * v * density_for(m, u, g0, x.data()) * rn);
        }
    }
    double total = acc.value();
    return p ? std::pow(total, 1.0 / *p) : total;
}

}  // namespace confmet

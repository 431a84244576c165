#include "confmet/conformal4d.hpp"

#include <algorithm>
#include <cmath>

#include "confmet/errors.hpp"
#include "confmet/numerics.hpp"

namespace confmet {

namespace {

void require_n4(const BackgroundMetric& g0, const char* what) {
    require(g0.dim().n() == 4, Errc::WrongDimension, std::string(what) + " is a dimension-4 operation");
}

/// Delta_{g0} f as an expression against a conformally flat background
/// g0 = b^{4/(n-2)} delta: b^{-4/(n-2)} (Delta f + 2 (grad b . grad f)/b).
Expr conf_laplacian(const Expr& f, const Expr& b, int n) {
    Expr lap, cross;
    for (int i = 0; i < n; ++i) {
        Expr fi = f.derivative(i);
        lap = lap + fi.derivative(i);
        cross = cross + b.derivative(i) * fi;
    }
    return b.pow(-4.0 / (n - 2)) * (lap + Expr::constant(2.0) * cross / b);
}

/// Radial directional derivative (x/|x|) . grad f.
Expr radial_derivative(const Expr& f, int n) {
    Expr out;
    for (int i = 0; i < n; ++i) out = out + Expr::variable(i) * f.derivative(i);
    return out * Expr::absx().pow(-1.0);
}

/// Einstein constant lambda0 with Ric(g0) = lambda0 g0.
double einstein_constant(const BackgroundMetric& g0) {
    switch (g0.kind()) {
        case BackgroundKind::Flat: return 0.0;
        case BackgroundKind::RoundSphereChart: return static_cast<double>(g0.dim().n() - 1);
        case BackgroundKind::Sampled:
            fail(Errc::UnsupportedBackground, "fourth-order operators need an analytic background");
    }
    return 0.0;
}

double background_r0(const BackgroundMetric& g0) {
    return g0.kind() == BackgroundKind::Flat ? 0.0
                                             : static_cast<double>(g0.dim().n() * (g0.dim().n() - 1));
}

}  // namespace

double paneitz_apply(const Expr& phi, const BackgroundMetric& g0, const double* x) {
    require_n4(g0, "paneitz_apply");
    require(g0.conformally_flat(), Errc::UnsupportedBackground,
            "paneitz_apply needs an analytic background");
    const Expr& b = g0.flat_factor();
    int n = 4;
    Expr lap1 = conf_laplacian(phi, b, n);
    Expr bilap = conf_laplacian(lap1, b, n);

    double coef = (2.0 / 3.0) * background_r0(g0) - 2.0 * einstein_constant(g0);
    if (coef == 0.0) return bilap.eval(x, n);

    // div_{g0}(c e^{-2w} grad phi) with e^{2w} = b^{4/(n-2)}, sqrt(det g0) = e^{n w}.
    Expr e2w = b.pow(4.0 / (n - 2));
    Expr enw = b.pow(2.0 * n / (n - 2));
    Expr div;
    for (int i = 0; i < n; ++i) {
        Expr Xi = phi.derivative(i) / e2w;
        div = div + (enw * Xi).derivative(i);
    }
    Expr term = Expr::constant(coef) * div / enw;
    return bilap.eval(x, n) + term.eval(x, n);
}

QCurvatureResult q_curvature(const Expr& phi, const BackgroundMetric& g0, const double* x) {
    require_n4(g0, "q_curvature");
    QCurvatureResult out;
    double p = paneitz_apply(phi, g0, x);
    double q0 = g0.q_curvature0(x);
    double e4phi = std::exp(4.0 * phi.eval(x, 4));
    out.q_law = (p + 2.0 * q0) / (2.0 * e4phi);

    ConformalFactor u = ConformalFactor::expression(phi.exp());
    CurvatureEvaluator ev(u, g0);
    auto pt = ev.at(x);
    double lapR = ev.laplacian_scalar_curvature_expr().eval(x, 4);
    out.q_def = -lapR / 12.0 - pt.ric_sq / 4.0 + pt.R * pt.R / 12.0;
    out.discrepancy = std::abs(out.q_law - out.q_def);
    return out;
}

PfaffianSample pfaffian_density(const CurvatureEvaluator::Point& p, const Dimension& dim) {
    require(dim.n() == 4, Errc::WrongDimension, "the Pfaffian density formula is dimension-4");
    PfaffianSample s;
    s.density = p.weyl_sq / 8.0 + p.R * p.R / 12.0 - p.ric_sq / 4.0;
    s.negative_part = std::max(0.0, -s.density);
    return s;
}

PfaffianSample pfaffian_density(const CurvatureBundle& b, std::size_t k) {
    require(b.dim.n() == 4, Errc::WrongDimension, "the Pfaffian density formula is dimension-4");
    PfaffianSample s;
    s.density = b.weyl_sq[k] / 8.0 + b.R[k] * b.R[k] / 12.0 - b.ric_sq[k] / 4.0;
    s.negative_part = std::max(0.0, -s.density);
    return s;
}

namespace {

// Integrates f(x) * Theta over the coordinate sphere of radius r.
template <typename F>
double sphere_theta_integral(const BackgroundMetric& g0, double r, const SphereQuadrature& sq,
                             F&& f) {
    int n = g0.dim().n();
    KahanSum acc;
    std::vector<double> x(n);
    for (std::size_t is = 0; is < sq.count(); ++is) {
        const double* node = sq.node(is);
        for (int i = 0; i < n; ++i) x[i] = r * node[i];
        acc.add(sq.weights[is] * f(x.data()) * g0.sphere_density(x.data()));
    }
    return acc.value();
}

struct BoundaryExprs {
    Expr R;
    Expr u2;
    Expr dr_u2T;  // d_r(u^2 Theta) / Theta
    Expr lap_phi;
    Expr dr_theta_over_theta;
    Expr t_phi;
    Expr dr_lap_phi;
    Expr dr_R;
    Expr grad_phi_norm_g0;
};

BoundaryExprs build_boundary_exprs(const ConformalFactor& u, const BackgroundMetric& g0) {
    require(u.is_expression(), Errc::DerivativeUnavailable,
            "boundary expressions need an expression factor");
    require(g0.conformally_flat(), Errc::UnsupportedBackground,
            "boundary terms need an analytic background");
    require_n4(g0, "boundary_terms");
    int n = 4;
    const Expr& b = g0.flat_factor();
    const Expr& ue = u.expr();
    BoundaryExprs e;

    CurvatureEvaluator ev(u, g0);
    e.R = ev.scalar_curvature_expr();
    e.u2 = ue * ue;
    Expr theta = g0.theta_expr();
    e.dr_theta_over_theta = radial_derivative(theta, n) / theta;
    e.dr_u2T = radial_derivative(e.u2, n) + e.u2 * e.dr_theta_over_theta;

    Expr phi = ue.log();
    e.lap_phi = conf_laplacian(phi, b, n);
    e.dr_lap_phi = radial_derivative(e.lap_phi, n);
    e.dr_R = radial_derivative(e.R, n);

    // T(phi) = (1/3) R0 d_r phi - Ric0(grad_{g0} phi, d_r); for the Einstein
    // backgrounds Ric0(grad_{g0} phi, d_r) = lambda0 d_r phi.
    double coef = background_r0(g0) / 3.0 - einstein_constant(g0);
    e.t_phi = Expr::constant(coef) * radial_derivative(phi, n);

    Expr grad2;
    for (int i = 0; i < n; ++i) grad2 = grad2 + phi.derivative(i) * phi.derivative(i);
    e.grad_phi_norm_g0 = grad2.pow(0.5) * b.pow(-2.0 / (n - 2));
    return e;
}

}  // namespace

BoundaryTermSeries boundary_terms(const ConformalFactor& u, const BackgroundMetric& g0,
                                  std::vector<double> radii, const SphereQuadrature& sq) {
    require_n4(g0, "boundary_terms");
    require(!radii.empty(), Errc::ValidationError, "no radii requested");
    for (std::size_t i = 0; i + 1 < radii.size(); ++i)
        require(radii[i] > radii[i + 1], Errc::ValidationError, "radii must be strictly decreasing");
    for (double r : radii) require(r > 0.0, Errc::RadiusOutOfRange, "radius must be positive");

    BoundaryTermSeries out;
    out.radii = radii;
    int n = 4;

    if (u.is_expression()) {
        BoundaryExprs e = build_boundary_exprs(u, g0);
        for (double r : radii) {
            out.F1.push_back(sphere_theta_integral(
                g0, r, sq, [&](const double* x) { return e.R.eval(x, n) * e.u2.eval(x, n); }));
            out.H1.push_back(-sphere_theta_integral(
                g0, r, sq, [&](const double* x) { return e.R.eval(x, n) * e.dr_u2T.eval(x, n); }));
            out.F2.push_back(sphere_theta_integral(
                g0, r, sq, [&](const double* x) { return e.lap_phi.eval(x, n); }));
            out.H2.push_back(-sphere_theta_integral(g0, r, sq, [&](const double* x) {
                return e.lap_phi.eval(x, n) * e.dr_theta_over_theta.eval(x, n);
            }));
            out.T_phi_integral.push_back(sphere_theta_integral(
                g0, r, sq, [&](const double* x) { return e.t_phi.eval(x, n); }));
        }
        return out;
    }

    // Sampled factor: radii must be interior grid radii; everything comes from
    // second-order jets.
    const SampledField& f = u.field();
    const AnnulusGrid& grid = f.grid();
    require(grid.sphere.count() == sq.count(), Errc::ValidationError,
            "sampled boundary terms use the field's own sphere quadrature");
    CurvatureEvaluator ev(u, g0);
    const Expr theta = g0.theta_expr();
    Expr dr_theta_over_theta = radial_derivative(theta, n) / theta;
    double t_coef = background_r0(g0) / 3.0 - einstein_constant(g0);
    const Expr& b = g0.flat_factor();

    for (double r : radii) {
        std::size_t ir = grid.radial_count();
        for (std::size_t j = 0; j < grid.radial_count(); ++j)
            if (std::abs(grid.radii[j] - r) <= 1e-10 * r) ir = j;
        require(ir < grid.radial_count(), Errc::RadiusOutOfRange,
                "sampled factors evaluate boundary terms at grid radii");
        require(!f.radial_edge(ir), Errc::StencilOutOfDomain, "radius lies on a flagged edge layer");

        KahanSum F1s, H1s, F2s, H2s, Ts;
        std::vector<double> x(n);
        for (std::size_t is = 0; is < sq.count(); ++is) {
            grid.point(ir, is, x.data());
            double w = sq.weights[is] * g0.sphere_density(x.data());
            auto pt = ev.at_node(ir, is);
            Jet2 j = f.jet_at_node(ir, is);
            double uu = j.value;
            double dru = 0.0, grad2 = 0.0;
            for (int i = 0; i < n; ++i) {
                dru += (x[i] / r) * j.grad[i];
                grad2 += j.grad[i] * j.grad[i];
            }
            double dtt = dr_theta_over_theta.eval(x.data(), n);
            double bval = b.eval(x.data(), n);
            double lapu = 0.0, crossb = 0.0;
            for (int i = 0; i < n; ++i) {
                lapu += j.hess[i * n + i];
                crossb += b.derivative(i).eval(x.data(), n) * j.grad[i];
            }
            double lap_g0_u = std::pow(bval, -4.0 / (n - 2)) * (lapu + 2.0 * crossb / bval);
            double grad_g0_sq = std::pow(bval, -4.0 / (n - 2)) * grad2;
            double lap_phi = lap_g0_u / uu - grad_g0_sq / (uu * uu);

            F1s.add(w * pt.R * uu * uu);
            H1s.add(-w * pt.R * (2.0 * uu * dru + uu * uu * dtt));
            F2s.add(w * lap_phi);
            H2s.add(-w * lap_phi * dtt);
            Ts.add(w * t_coef * dru / uu);
        }
        out.F1.push_back(F1s.value());
        out.H1.push_back(H1s.value());
        out.F2.push_back(F2s.value());
        out.H2.push_back(H2s.value());
        out.T_phi_integral.push_back(Ts.value());
    }
    return out;
}

double boundary_flux_lap_phi(const ConformalFactor& u, const BackgroundMetric& g0, double r,
                             const SphereQuadrature& sq) {
    BoundaryExprs e = build_boundary_exprs(u, g0);
    return sphere_theta_integral(g0, r, sq,
                                 [&](const double* x) { return e.dr_lap_phi.eval(x, 4); });
}

double boundary_flux_scalar(const ConformalFactor& u, const BackgroundMetric& g0, double r,
                            const SphereQuadrature& sq) {
    BoundaryExprs e = build_boundary_exprs(u, g0);
    return sphere_theta_integral(
        g0, r, sq, [&](const double* x) { return e.u2.eval(x, 4) * e.dr_R.eval(x, 4); });
}

double boundary_t_phi(const ConformalFactor& u, const BackgroundMetric& g0, double r,
                      const SphereQuadrature& sq) {
    BoundaryExprs e = build_boundary_exprs(u, g0);
    return sphere_theta_integral(g0, r, sq, [&](const double* x) { return e.t_phi.eval(x, 4); });
}

double boundary_grad_phi_l1(const ConformalFactor& u, const BackgroundMetric& g0, double r,
                            const SphereQuadrature& sq) {
    BoundaryExprs e = build_boundary_exprs(u, g0);
    return sphere_theta_integral(g0, r, sq,
                                 [&](const double* x) { return e.grad_phi_norm_g0.eval(x, 4); });
}

GbcLedger gbc_annulus_check(const ConformalFactor& u, const BackgroundMetric& g0, double r_in,
                            double r_out, int radial_count, const SphereQuadrature& sq) {
    require_n4(g0, "gbc_annulus_check");
    require(r_in > 0 && r_in < r_out, Errc::BadRadii, "need 0 < r_in < r_out");

    GbcLedger led;
    led.r_in = r_in;
    led.r_out = r_out;

    auto grid = build_annulus_grid(r_in, r_out, radial_count, sq);
    CurvatureEvaluator ev(u, g0);
    led.pf_integral = integrate(
        [&](const double* x) { return pfaffian_density(ev.at(x), g0.dim()).density; }, u, g0, grid,
        Measure::volume_g());
    led.pf_g0_integral = integrate([&](const double* x) { return g0.pfaffian_density0(x); }, u, g0,
                                   grid, Measure::volume_g0());
    led.interior_lap_r0 =
        integrate([&](const double* x) { return g0.laplacian_scalar_curvature0(x); }, u, g0, grid,
                  Measure::volume_g0()) /
        12.0;

    auto flux_bundle = [&](double r) {
        return 0.5 * boundary_flux_lap_phi(u, g0, r, sq) + boundary_t_phi(u, g0, r, sq) +
               boundary_flux_scalar(u, g0, r, sq) / 12.0;
    };
    led.boundary_inner = flux_bundle(r_in);
    led.boundary_outer = flux_bundle(r_out);
    led.boundary_sum = led.boundary_outer - led.boundary_inner;
    led.rhs = led.pf_g0_integral - led.interior_lap_r0 + led.boundary_sum;
    led.defect = led.pf_integral - led.rhs;
    return led;
}

double RiemL2Profile::cauchy_tail_after(std::size_t level) const {
    require(level < partial_sums.size(), Errc::ValidationError, "level beyond computed profile");
    double base = partial_sums[level];
    double tail = 0.0;
    for (std::size_t j = level; j < partial_sums.size(); ++j)
        tail = std::max(tail, std::abs(partial_sums[j] - base));
    return tail;
}

RiemL2Profile riem_l2_profile(const ConformalFactor& u, const BackgroundMetric& g0, double r0,
                              int levels, int radial_count, const SphereQuadrature& sq) {
    require_n4(g0, "riem_l2_profile");
    require(levels >= 1 && r0 > 0, Errc::ValidationError, "bad dyadic profile request");
    CurvatureEvaluator ev(u, g0);
    RiemL2Profile out;
    double sum = 0.0;
    for (int j = 0; j < levels; ++j) {
        double hi = r0 * std::pow(2.0, -j);
        double lo = 0.5 * hi;
        auto grid = build_annulus_grid(lo, hi, radial_count, sq);
        double e = integrate([&](const double* x) { return ev.at(x).riem_sq; }, u, g0, grid,
                             Measure::volume_g());
        out.outer_radii.push_back(hi);
        out.energies.push_back(e);
        sum += e;
        out.partial_sums.push_back(sum);
    }
    return out;
}

double q_integral_annulus(const ConformalFactor& u, const BackgroundMetric& g0, double r_in,
                          double r_out, int radial_count, const SphereQuadrature& sq) {
    require_n4(g0, "q_integral_annulus");
    CurvatureEvaluator ev(u, g0);
    const Expr& lapR = ev.laplacian_scalar_curvature_expr();
    auto grid = build_annulus_grid(r_in, r_out, radial_count, sq);
    return integrate(
        [&](const double* x) {
            auto p = ev.at(x);
            return -lapR.eval(x, 4) / 12.0 - p.ric_sq / 4.0 + p.R * p.R / 12.0;
        },
        u, g0, grid, Measure::volume_g());
}

}  // namespace confmet

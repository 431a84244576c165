#include "confmet/cylinder.hpp"

#include <cmath>

#include "confmet/curvature.hpp"
#include "confmet/errors.hpp"
#include "confmet/numerics.hpp"
#include "confmet/spherical_harmonics.hpp"

namespace confmet {

double CylinderField::cylinder_residual(double t, const double* theta) const {
    require(static_cast<bool>(lap_v), Errc::DerivativeUnavailable,
            "field carries no Laplacian evaluator");
    int n = dim.n();
    double c = 0.25 * (n - 2) * (n - 2);
    return -lap_v(t, theta) + c * v(t, theta);
}

CylinderField to_cylinder(const ConformalFactor& u, const BackgroundMetric& g0, double r_anchor,
                          double L) {
    require(r_anchor > 0 && L > 0, Errc::ValidationError, "need r_anchor > 0, L > 0");
    int n = g0.dim().n();
    require(g0.conformally_flat(), Errc::UnsupportedBackground,
            "cylinder transform implemented over analytic backgrounds");
    if (!u.is_expression()) {
        const auto& grid = u.field().grid();
        require(r_anchor <= grid.r_max * (1 + 1e-12) &&
                    r_anchor * std::exp(-3.0 * L) >= grid.r_min * (1 - 1e-12),
                Errc::ChartTooSmall, "cylinder window exceeds the sampled chart");
    }

    CylinderField f;
    f.dim = g0.dim();
    f.L = L;
    f.T0 = -std::log(r_anchor);
    f.exact_cylinder = g0.kind() == BackgroundKind::Flat;

    // capture by value; ConformalFactor and BackgroundMetric are cheap handles
    f.v = [u, n](double t, const double* theta) {
        double r = std::exp(-t);
        double x[8];
        for (int i = 0; i < n; ++i) x[i] = r * theta[i];
        return u.value(x, n) * std::exp(-0.5 * (n - 2) * t);
    };
    Expr b = g0.flat_factor();
    f.ghat_conf = [b, n](double t, const double* theta) {
        double r = std::exp(-t);
        double x[8];
        for (int i = 0; i < n; ++i) x[i] = r * theta[i];
        return std::pow(b.eval(x, n), 4.0 / (n - 2));
    };

    if (u.is_expression()) {
        // With V(x) = u(x) |x|^{(n-2)/2} (so v(t,theta) = V(e^{-t} theta)), the
        // cylinder Laplacian is Delta_Q v = r^2 Delta V - (n-2) r d_r V.
        Expr V = u.expr() * Expr::absx().pow(0.5 * (n - 2));
        Expr lapV;
        for (int i = 0; i < n; ++i) lapV = lapV + V.derivative(i).derivative(i);
        Expr drV;
        for (int i = 0; i < n; ++i) drV = drV + Expr::variable(i) * V.derivative(i);
        drV = drV * Expr::absx().pow(-1.0);
        Expr lap_cyl = Expr::absx() * Expr::absx() * lapV -
                       Expr::constant(static_cast<double>(n - 2)) * Expr::absx() * drV;
        f.lap_v = [lap_cyl, n](double t, const double* theta) {
            double r = std::exp(-t);
            double x[8];
            for (int i = 0; i < n; ++i) x[i] = r * theta[i];
            return lap_cyl.eval(x, n);
        };
    }
    return f;
}

double separable_lambda(int n, int l, int sign) {
    require(sign == 1 || sign == -1, Errc::ValidationError, "sign must be +1 or -1");
    require(l >= 0, Errc::ValidationError, "mode must be >= 0");
    double lam2 = 0.25 * (n - 2) * (n - 2) + harmonic_eigenvalue(n, l);
    return sign * std::sqrt(lam2);
}

CylinderField separable_solution(const Dimension& dim, int l, int sign, double L, double T0) {
    int n = dim.n();
    double lambda = separable_lambda(n, l, sign);
    CylinderField f;
    f.dim = dim;
    f.L = L;
    f.T0 = T0;
    f.exact_cylinder = true;
    double mu = harmonic_eigenvalue(n, l);
    f.v = [lambda, l, n](double t, const double* theta) {
        return std::exp(lambda * t) * sphere_harmonic(n, l, theta);
    };
    f.ghat_conf = [](double, const double*) { return 1.0; };
    // exact: Delta v = (lambda^2 - l(l+n-2)) v
    f.lap_v = [lambda, mu, l, n](double t, const double* theta) {
        return (lambda * lambda - mu) * std::exp(lambda * t) * sphere_harmonic(n, l, theta);
    };
    return f;
}

CylinderField separable_combination(const Dimension& dim, int l, double a, double b, double L,
                                    double T0) {
    require(a >= 0.0 && b >= 0.0 && (a > 0.0 || b > 0.0), Errc::ValidationError,
            "combination needs a,b >= 0, not both zero");
    int n = dim.n();
    double lp = separable_lambda(n, l, +1);
    double lm = separable_lambda(n, l, -1);
    double mu = harmonic_eigenvalue(n, l);
    CylinderField f;
    f.dim = dim;
    f.L = L;
    f.T0 = T0;
    f.exact_cylinder = true;
    f.v = [=](double t, const double* theta) {
        return (a * std::exp(lp * t) + b * std::exp(lm * t)) * sphere_harmonic(n, l, theta);
    };
    f.ghat_conf = [](double, const double*) { return 1.0; };
    f.lap_v = [=](double t, const double* theta) {
        return (a * (lp * lp - mu) * std::exp(lp * t) + b * (lm * lm - mu) * std::exp(lm * t)) *
               sphere_harmonic(n, l, theta);
    };
    return f;
}

double segment_energy(const CylinderField& f, double t_lo, double t_hi, const SphereQuadrature& sq,
                      int t_panels) {
    require(t_hi > t_lo, Errc::ValidationError, "empty t-interval");
    int n = f.dim.n();
    require(sq.n == n, Errc::WrongDimension, "sphere quadrature dimension mismatch");
    KahanSum acc;
    std::vector<double> tn, tw;
    gauss_legendre(10, tn, tw);
    double hp = (t_hi - t_lo) / t_panels;
    for (int p = 0; p < t_panels; ++p) {
        double mid = t_lo + (p + 0.5) * hp;
        for (std::size_t q = 0; q < tn.size(); ++q) {
            double t = mid + 0.5 * hp * tn[q];
            double wt = 0.5 * hp * tw[q];
            for (std::size_t is = 0; is < sq.count(); ++is) {
                const double* theta = sq.node(is);
                double vv = f.v(t, theta);
                double beta = f.ghat_conf(t, theta);
                acc.add(wt * sq.weights[is] * vv * vv * std::pow(beta, 0.5 * n));
            }
        }
    }
    return acc.value();
}

EnergyTriple segment_energies(const CylinderField& f, const SphereQuadrature& sq, int t_panels) {
    require(f.L > 0, Errc::ValidationError, "field has no segment length");
    EnergyTriple e;
    e.E1 = segment_energy(f, f.segment_start(0), f.segment_start(1), sq, t_panels);
    e.E2 = segment_energy(f, f.segment_start(1), f.segment_start(2), sq, t_panels);
    e.E3 = segment_energy(f, f.segment_start(2), f.segment_start(3), sq, t_panels);
    return e;
}

const char* verdict_name(ThreeCircleVerdict v) {
    switch (v) {
        case ThreeCircleVerdict::LeftDecay: return "LeftDecay";
        case ThreeCircleVerdict::RightDecay: return "RightDecay";
        case ThreeCircleVerdict::Both: return "Both";
        case ThreeCircleVerdict::Violation: return "Violation";
    }
    return "?";
}

ThreeCircleVerdict three_circle_classify(const EnergyTriple& e, double L) {
    require(L > 0, Errc::ValidationError, "need L > 0");
    double slack = 1e-12;
    bool left = e.E2 <= std::exp(-L) * e.E1 * (1.0 + slack);
    bool right = e.E2 <= std::exp(-L) * e.E3 * (1.0 + slack);
    if (left && right) return ThreeCircleVerdict::Both;
    if (left) return ThreeCircleVerdict::LeftDecay;
    if (right) return ThreeCircleVerdict::RightDecay;
    return ThreeCircleVerdict::Violation;
}

double annulus_energy_ratio(const ConformalFactor& u, const BackgroundMetric& g0, double r,
                            double theta, int radial_count, const SphereQuadrature& sq) {
    require(theta > 1.0, Errc::ValidationError, "need theta > 1");
    require(r > 0.0, Errc::ChartTooSmall, "annulus must have positive radius");
    int n = g0.dim().n();
    auto integrand = [&](const double* x) {
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) r2 += x[i] * x[i];
        double uv = u.value(x, n);
        return uv * uv / r2;
    };
    auto outer = build_annulus_grid(r / theta, r, radial_count, sq);
    auto inner = build_annulus_grid(r / (theta * theta), r / theta, radial_count, sq);
    double num = integrate(integrand, u, g0, outer, Measure::volume_g0());
    double den = integrate(integrand, u, g0, inner, Measure::volume_g0());
    require(den > 0.0, Errc::EmptyRegion, "inner annulus energy vanishes");
    return num / den;
}

CylinderHypothesisAudit cylinder_hypothesis_audit(const ConformalFactor& u,
                                                  const BackgroundMetric& g0, double r_anchor,
                                                  double L, int radial_count,
                                                  const SphereQuadrature& sq) {
    int n = g0.dim().n();
    CylinderHypothesisAudit audit;
    double c = g0.dim().yamabe_constant();

    CurvatureEvaluator ev(u, g0);
    auto grid = build_annulus_grid(r_anchor * std::exp(-3.0 * L), r_anchor, radial_count, sq);
    double rnorm = integrate([&](const double* x) { return ev.at(x).R; }, u, g0, grid,
                             Measure::volume_g(), 0.5 * n);
    audit.f_lp = std::pow(c, 0.5 * n) * std::pow(rnorm, 0.5 * n);

    auto f = to_cylinder(u, g0, r_anchor, L);
    double dev = 0.0;
    for (int k = 0; k <= 48; ++k) {
        double t = f.T0 + 3.0 * L * k / 48.0;
        for (std::size_t is = 0; is < sq.count(); ++is)
            dev = std::max(dev, std::abs(f.ghat_conf(t, sq.node(is)) - 1.0));
    }
    audit.metric_deviation = dev;
    return audit;
}

}  // namespace confmet

#include <cmath>
#include <random>

#include "confmet/annulus_grid.hpp"
#include "confmet/background.hpp"
#include "confmet/curvature.hpp"
#include "confmet/dimension.hpp"
#include "confmet/errors.hpp"
#include "confmet/expr.hpp"
#include "confmet/integrate.hpp"
#include "confmet/numerics.hpp"
#include "confmet/sampled_field.hpp"
#include "confmet/sphere_quadrature.hpp"
#include "doctest.h"

using namespace confmet;

namespace {

const double kOmega3 = 2.0 * kPi * kPi;          // area of S^3
const double kOmega2 = 4.0 * kPi;                // area of S^2

Expr inversion_factor(int n) { return Expr::absx().pow(2.0 - n); }

Expr round_sphere_factor(int n) {
    // Stereographic factor of the unit S^n over the flat background.
    Expr base = Expr::constant(2.0) / (Expr::constant(1.0) + Expr::absx() * Expr::absx());
    return base.pow(0.5 * (n - 2));
}

// Closed form for monomial integrals over S^{n-1}: all exponents even, else 0.
double sphere_monomial_integral(int n, const std::vector<int>& alpha) {
    double num = 2.0;
    int total = 0;
    for (int a : alpha) {
        if (a % 2 != 0) return 0.0;
        num *= std::tgamma(0.5 * (a + 1));
        total += a;
    }
    return num / std::tgamma(0.5 * (n + total));
}

}  // namespace

TEST_CASE("dimension constants") {
    Dimension d4(4);
    CHECK(d4.conformal_exponent() == doctest::Approx(2.0));
    CHECK(d4.yamabe_constant() == doctest::Approx(1.0 / 6.0));
    CHECK(d4.sphere_area() == doctest::Approx(kOmega3).epsilon(1e-14));
    CHECK(d4.ball_volume() == doctest::Approx(kPi * kPi / 2.0).epsilon(1e-14));
    Dimension d3(3);
    CHECK(d3.sphere_area() == doctest::Approx(kOmega2).epsilon(1e-14));
    CHECK(d3.ball_volume() == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(Dimension(2), Error);
}

TEST_CASE("sphere quadrature: weight sums") {
    // (n=4, degree=2): sum of weights = omega_3 = 2 pi^2
    auto q4 = build_sphere_quadrature(Dimension(4), 2);
    KahanSum s4;
    for (double w : q4.weights) s4.add(w);
    CHECK(s4.value() == doctest::Approx(kOmega3).epsilon(1e-13));

    // (n=3, degree=2): 4 pi
    auto q3 = build_sphere_quadrature(Dimension(3), 2);
    KahanSum s3;
    for (double w : q3.weights) s3.add(w);
    CHECK(s3.value() == doctest::Approx(kOmega2).epsilon(1e-13));

    for (int n = 5; n <= 8; ++n) {
        auto q = build_sphere_quadrature(Dimension(n), 4);
        KahanSum s;
        for (double w : q.weights) s.add(w);
        CHECK(s.value() == doctest::Approx(Dimension(n).sphere_area()).epsilon(1e-12));
    }

    CHECK_THROWS_AS(build_sphere_quadrature(Dimension(9), 4), Error);
}

TEST_CASE("sphere quadrature: node norms and theta^2 moment") {
    auto q = build_sphere_quadrature(Dimension(4), 6);
    for (std::size_t i = 0; i < q.count(); ++i) {
        double nn = 0;
        for (int k = 0; k < 4; ++k) nn += q.node(i)[k] * q.node(i)[k];
        CHECK(std::abs(std::sqrt(nn) - 1.0) < 1e-12);
    }
    // (n=4, degree=6): integral of (theta^1)^2 = omega_3 / 4
    for (int axis = 0; axis < 4; ++axis) {
        KahanSum s;
        for (std::size_t i = 0; i < q.count(); ++i)
            s.add(q.weights[i] * q.node(i)[axis] * q.node(i)[axis]);
        CHECK(s.value() == doctest::Approx(kOmega3 / 4.0).epsilon(1e-12));
    }
}

TEST_CASE("sphere quadrature: polynomial exactness against the monomial oracle") {
    for (int n : {3, 4, 5}) {
        int degree = 6;
        auto q = build_sphere_quadrature(Dimension(n), degree);
        std::mt19937_64 rng(7);
        std::uniform_int_distribution<int> pick(0, n - 1);
        for (int trial = 0; trial < 12; ++trial) {
            std::vector<int> alpha(n, 0);
            int budget = degree;
            while (budget > 0) {
                int step = std::min(budget, 2);
                alpha[pick(rng)] += step;
                budget -= step;
            }
            double expect = sphere_monomial_integral(n, alpha);
            KahanSum s;
            for (std::size_t i = 0; i < q.count(); ++i) {
                double v = q.weights[i];
                for (int k = 0; k < n; ++k)
                    for (int e = 0; e < alpha[k]; ++e) v *= q.node(i)[k];
                s.add(v);
            }
            CHECK(s.value() == doctest::Approx(expect).epsilon(1e-11));
        }
    }
}

TEST_CASE("annulus grid: log-uniform nodes and failure modes") {
    auto sq = build_sphere_quadrature(Dimension(4), 2);
    auto g = build_annulus_grid(1.0, 2.0, 4, sq);
    REQUIRE(g.radii.size() == 4);
    CHECK(g.radii[0] == doctest::Approx(1.0));
    CHECK(g.radii[1] == doctest::Approx(std::pow(2.0, 1.0 / 3.0)).epsilon(1e-14));
    CHECK(g.radii[2] == doctest::Approx(std::pow(2.0, 2.0 / 3.0)).epsilon(1e-14));
    CHECK(g.radii[3] == doctest::Approx(2.0));
    CHECK(g.point_count() == 4 * sq.count());

    auto g2 = build_annulus_grid(0.5, 1.0, 2, sq);
    REQUIRE(g2.radii.size() == 2);
    CHECK(g2.radii[0] == doctest::Approx(0.5));
    CHECK(g2.radii[1] == doctest::Approx(1.0));

    CHECK_THROWS_AS(build_annulus_grid(1.0, 1.0, 4, sq), Error);
    CHECK_THROWS_AS(build_annulus_grid(-1.0, 1.0, 4, sq), Error);

    // log-spacing uniform within 1e-12
    auto g3 = build_annulus_grid(0.05, 7.0, 33, sq);
    double h = g3.log_step();
    for (std::size_t i = 0; i + 1 < g3.radii.size(); ++i)
        CHECK(std::abs(std::log(g3.radii[i + 1] / g3.radii[i]) - h) < 1e-12);
}

TEST_CASE("expression parsing and derivatives") {
    Expr e = parse_expression("abs(x)^(2-n)", 4);
    double x[4] = {2.0, 0.0, 0.0, 0.0};
    CHECK(e.eval(x, 4) == doctest::Approx(0.25));  // |x|^-2 at |x|=2

    Expr f = parse_expression("(2/(1+absx^2))^((n-2)/2)", 4);
    double y[4] = {1.0, 0.0, 0.0, 0.0};
    CHECK(f.eval(y, 4) == doctest::Approx(1.0));

    CHECK_THROWS_AS(parse_expression("x1 ^ x2", 4), Error);
    CHECK_THROWS_AS(parse_expression("foo + 1", 4), Error);
    CHECK_THROWS_AS(parse_expression("x9", 4), Error);
    CHECK_THROWS_AS(parse_expression("(x1", 4), Error);

    // derivative vs central differences at random probe points
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coord(0.3, 1.4);
    Expr probe = parse_expression("exp(0.3*x1)*(1+absx^2)^(-1) + rho_2^2*log(absx)", 4);
    for (int t = 0; t < 20; ++t) {
        double p[4];
        for (auto& c : p) c = coord(rng);
        for (int i = 0; i < 4; ++i) {
            double h = 1e-5;
            double save = p[i];
            p[i] = save + h;
            double fp = probe.eval(p, 4);
            p[i] = save - h;
            double fm = probe.eval(p, 4);
            p[i] = save;
            double fd = (fp - fm) / (2 * h);
            double an = probe.derivative(i).eval(p, 4);
            CHECK(an == doctest::Approx(fd).epsilon(1e-6));
        }
    }

    // scale_argument: u(c x)
    Expr u = parse_expression("absx^(-2) + x1*x2", 4);
    Expr us = u.scale_argument(0.5);
    double z[4] = {0.8, 0.4, -0.2, 0.1};
    double zs[4] = {0.4, 0.2, -0.1, 0.05};
    CHECK(us.eval(z, 4) == doctest::Approx(u.eval(zs, 4)).epsilon(1e-14));
}

TEST_CASE("conformal_metric_at examples") {
    Dimension d(4);
    auto flat = BackgroundMetric::flat(d);

    auto ones = ConformalFactor::expression(Expr::constant(1.0));
    double x[4] = {0.3, 0.1, -0.2, 0.5};
    auto g = conformal_metric_at(ones, flat, x);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(g(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));

    auto inv = ConformalFactor::expression(inversion_factor(4));
    double x2[4] = {2.0, 0.0, 0.0, 0.0};
    auto g2 = conformal_metric_at(inv, flat, x2);
    CHECK(g2(0, 0) == doctest::Approx(std::pow(2.0, -4.0)));
    CHECK(g2(1, 1) == doctest::Approx(std::pow(2.0, -4.0)));

    double x3[4] = {1.0, 0.0, 0.0, 0.0};
    auto g3 = conformal_metric_at(inv, flat, x3);
    for (int i = 0; i < 4; ++i) CHECK(g3(i, i) == doctest::Approx(1.0));

    double origin[4] = {0, 0, 0, 0};
    CHECK_THROWS_AS(conformal_metric_at(inv, flat, origin), Error);
}

TEST_CASE("scalar curvature fixtures") {
    for (int n : {3, 4, 5, 6}) {
        Dimension d(n);
        auto flat = BackgroundMetric::flat(d);
        auto u = ConformalFactor::expression(inversion_factor(n));
        std::vector<double> x(n, 0.0);
        x[0] = 0.7;
        x[1] = -0.3;
        CHECK(std::abs(scalar_curvature_conformal(u, flat, x.data())) < 1e-9);

        auto round_u = ConformalFactor::expression(round_sphere_factor(n));
        CHECK(scalar_curvature_conformal(round_u, flat, x.data()) ==
              doctest::Approx(static_cast<double>(n * (n - 1))).epsilon(1e-9));
    }

    // u = rho_k^{2-k} (k > 2) is scalar-flat on the flat background.
    {
        Dimension d(5);
        auto flat = BackgroundMetric::flat(d);
        auto u = ConformalFactor::expression(Expr::rho(4).pow(-2.0));
        double x[5] = {0.4, 0.2, -0.5, 0.3, 0.9};
        CHECK(std::abs(scalar_curvature_conformal(u, flat, x)) < 1e-9);
    }

    // Round-sphere-chart background with u == 1: R(g) = R(g0) = n(n-1).
    {
        Dimension d(4);
        auto round = BackgroundMetric::round_sphere_chart(d);
        auto ones = ConformalFactor::expression(Expr::constant(1.0));
        double x[4] = {0.5, 0.2, 0.0, -0.3};
        CHECK(scalar_curvature_conformal(ones, round, x) == doctest::Approx(12.0).epsilon(1e-9));
        CurvatureEvaluator ev(ones, round);
        CHECK(ev.at(x).R == doctest::Approx(12.0).epsilon(1e-9));
    }
}

TEST_CASE("curvature bundle closed forms") {
    Dimension d(4);
    auto flat = BackgroundMetric::flat(d);
    auto sq = build_sphere_quadrature(d, 4);
    auto grid = build_annulus_grid(0.5, 2.0, 9, sq);

    SUBCASE("u == 1 on flat background: everything vanishes") {
        auto b = curvature_bundle(ConformalFactor::expression(Expr::constant(1.0)), flat, grid);
        for (std::size_t k = 0; k < b.point_count(); ++k) {
            CHECK(std::abs(b.R[k]) < 1e-12);
            CHECK(std::abs(b.riem_sq[k]) < 1e-12);
            CHECK(std::abs(b.ric_sq[k]) < 1e-12);
            CHECK(b.vol_density[k] == doctest::Approx(1.0));
        }
    }

    SUBCASE("inversion factor: g = |x|^-4 delta is flat") {
        auto b = curvature_bundle(ConformalFactor::expression(inversion_factor(4)), flat, grid);
        for (std::size_t k = 0; k < b.point_count(); ++k) {
            CHECK(std::abs(b.riem_sq[k]) < 1e-20);
            CHECK(std::abs(b.R[k]) < 1e-10);
        }
    }

    SUBCASE("round-sphere factor: unit S^4 curvature") {
        auto b = curvature_bundle(ConformalFactor::expression(round_sphere_factor(4)), flat, grid);
        for (std::size_t k = 0; k < b.point_count(); ++k) {
            CHECK(b.R[k] == doctest::Approx(12.0).epsilon(1e-10));
            CHECK(b.ric_sq[k] == doctest::Approx(36.0).epsilon(1e-10));
            CHECK(b.riem_sq[k] == doctest::Approx(24.0).epsilon(1e-10));
            CHECK(std::abs(b.weyl_sq[k]) < 1e-12);
        }
    }

    SUBCASE("cylinder factor u = |x|^-1 in n=4: R x S^3 quantities") {
        auto b = curvature_bundle(ConformalFactor::expression(Expr::absx().pow(-1.0)), flat, grid);
        for (std::size_t k = 0; k < b.point_count(); ++k) {
            CHECK(b.R[k] == doctest::Approx(6.0).epsilon(1e-10));
            CHECK(b.ric_sq[k] == doctest::Approx(12.0).epsilon(1e-10));
            CHECK(b.riem_sq[k] == doctest::Approx(12.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("bundle invariants: trace, Kulkarni-Nomizu split, Yamabe route") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> amp(-0.2, 0.2);
    for (int n : {3, 4, 5}) {
        Dimension d(n);
        auto flat = BackgroundMetric::flat(d);
        auto sqd = build_sphere_quadrature(d, 3);
        auto grid = build_annulus_grid(0.6, 1.8, 5, sqd);

        // randomized smooth positive factor
        Expr poly = Expr::constant(1.0) + Expr::constant(amp(rng)) * Expr::variable(0) +
                    Expr::constant(amp(rng)) * Expr::variable(1) * Expr::variable(n - 1) +
                    Expr::constant(amp(rng)) * Expr::absx() * Expr::absx();
        auto u = ConformalFactor::expression(poly.exp());
        CurvatureEvaluator ev(u, flat);

        for (int t = 0; t < 8; ++t) {
            std::size_t ir = rng() % grid.radial_count();
            std::size_t is = rng() % grid.sphere.count();
            auto x = grid.point(ir, is);
            auto p = ev.at(x.data());

            // trace of Ric equals R within 1e-8 (independent routes)
            double e2w = std::pow(p.U, 4.0 / (n - 2));
            double trace = 0.0;
            for (int i = 0; i < n; ++i) trace += p.ric(i, i);
            trace /= e2w;
            CHECK(trace == doctest::Approx(p.R).epsilon(1e-8));

            // Kulkarni-Nomizu: riem_sq - weyl_sq = 4(n-2)|P|^2 + 4(tr P)^2
            double R = p.R;
            double trP = R / (2.0 * (n - 1));
            // |P|^2_g with P = (Ric - R/(2(n-1)) g)/(n-2)
            double psq = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double pij = p.ric(i, j) - (i == j ? R / (2.0 * (n - 1)) * e2w : 0.0);
                    psq += pij * pij;
                }
            psq /= (n - 2.0) * (n - 2.0) * e2w * e2w;
            double kn = 4.0 * (n - 2) * psq + 4.0 * trP * trP;
            CHECK(p.riem_sq - p.weyl_sq == doctest::Approx(kn).epsilon(1e-6));

            // Yamabe-identity consistency across the two code paths
            double r_dir = scalar_curvature_conformal(u, flat, x.data());
            CHECK(r_dir == doctest::Approx(p.R).epsilon(1e-6));
        }
    }
}

TEST_CASE("integrate: shell volumes and L^p norms") {
    Dimension d(4);
    auto flat = BackgroundMetric::flat(d);
    auto ones = ConformalFactor::expression(Expr::constant(1.0));
    auto sq = build_sphere_quadrature(d, 4);

    // field 1, dV_{g0}, annulus 1..2: (2^4-1)/4 * omega_3 = 15 pi^2 / 2
    auto grid = build_annulus_grid(1.0, 2.0, 129, sq);
    double shell = integrate([](const double*) { return 1.0; }, ones, flat, grid,
                             Measure::volume_g0());
    CHECK(shell == doctest::Approx(15.0 * kPi * kPi / 2.0).epsilon(1e-8));

    // field 1, dV_g with u=|x|^{-2}: omega_3 r^{-4} (1-2^{-4})/4 over r..2r
    double r = 0.7;
    auto grid2 = build_annulus_grid(r, 2 * r, 129, sq);
    auto ginf = ConformalFactor::expression(inversion_factor(4));
    double vol = integrate([](const double*) { return 1.0; }, ginf, flat, grid2,
                           Measure::volume_g());
    CHECK(vol == doctest::Approx(kOmega3 * std::pow(r, -4.0) * (1 - std::pow(2.0, -4.0)) / 4.0)
                     .epsilon(1e-8));

    // L^{n/2} of R for the round factor: (n(n-1))^{n/2} * vol_g
    auto round_u = ConformalFactor::expression(round_sphere_factor(4));
    CurvatureEvaluator ev(round_u, flat);
    auto grid3 = build_annulus_grid(0.2, 1.0, 129, sq);
    double lp = integrate([&](const double* x) { return ev.at(x).R; }, round_u, flat, grid3,
                          Measure::volume_g(), 2.0);
    double volg = integrate([](const double*) { return 1.0; }, round_u, flat, grid3,
                            Measure::volume_g());
    CHECK(lp == doctest::Approx(12.0 * std::pow(volg, 0.5)).epsilon(1e-8));

    // sphere measure at fixed radius: area of coordinate sphere
    double area = integrate([](const double*) { return 1.0; }, ones, flat, grid,
                            Measure::sphere_g0(1.5));
    CHECK(area == doctest::Approx(kOmega3 * std::pow(1.5, 3.0)).epsilon(1e-11));
    CHECK_THROWS_AS(integrate([](const double*) { return 1.0; }, ones, flat, grid,
                              Measure::sphere_g0(5.0)),
                    Error);
}

TEST_CASE("quadrature convergence order >= 3.5 on smooth fields") {
    Dimension d(4);
    auto flat = BackgroundMetric::flat(d);
    auto ones = ConformalFactor::expression(Expr::constant(1.0));
    auto f = [](const double* x) {
        double r2 = 0;
        for (int i = 0; i < 4; ++i) r2 += x[i] * x[i];
        return std::exp(x[0]) / (1.0 + r2);
    };
    // dense reference
    auto qref = build_sphere_quadrature(d, 16);
    auto gref = build_annulus_grid(0.5, 2.0, 513, qref);
    double ref = integrate(f, ones, flat, gref, Measure::volume_g0());

    // double radial count and sphere degree together
    std::vector<double> hs, errs;
    int degree = 4;
    for (int m : {9, 17, 33, 65}) {
        auto q = build_sphere_quadrature(d, degree);
        auto g = build_annulus_grid(0.5, 2.0, m, q);
        double v = integrate(f, ones, flat, g, Measure::volume_g0());
        hs.push_back(std::log(g.log_step()));
        errs.push_back(std::log(std::abs(v - ref) + 1e-300));
        degree *= 2;
    }
    double order = fit_slope(hs, errs);
    CHECK(order >= 3.5);
}

TEST_CASE("conformal covariance of the Weyl energy") {
    // Both supported backgrounds are conformally flat, so the Weyl energy of g
    // must match the Weyl energy of g0 (both zero) for any smooth factor.
    Dimension d(4);
    auto flat = BackgroundMetric::flat(d);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> amp(-0.3, 0.3);
    auto sq = build_sphere_quadrature(d, 4);
    auto grid = build_annulus_grid(0.5, 1.5, 17, sq);
    for (int t = 0; t < 5; ++t) {
        Expr poly = Expr::constant(1.0) + Expr::constant(amp(rng)) * Expr::variable(rng() % 4) +
                    Expr::constant(amp(rng)) * Expr::absx() * Expr::absx();
        auto u = ConformalFactor::expression(poly.exp());
        auto b = curvature_bundle(u, flat, grid);
        double wg = integrate_values(b.weyl_sq, u, flat, grid, Measure::volume_g());
        double wg0 = integrate([&](const double* x) { return flat.weyl_sq0(x); }, u, flat, grid,
                               Measure::volume_g0());
        CHECK(std::abs(wg - wg0) < 1e-8);
        CHECK(std::abs(wg) < 1e-8);
    }
}

TEST_CASE("annulus volume ratio for the inversion metric is 2^{-n}") {
    for (int n : {3, 4, 5}) {
        Dimension d(n);
        auto flat = BackgroundMetric::flat(d);
        auto u = ConformalFactor::expression(inversion_factor(n));
        auto sq = build_sphere_quadrature(d, 3);
        double r = 0.31;
        auto outer = build_annulus_grid(r, 2 * r, 65, sq);
        auto inner = build_annulus_grid(r / 2, r, 65, sq);
        double vo = integrate([](const double*) { return 1.0; }, u, flat, outer, Measure::volume_g());
        double vi = integrate([](const double*) { return 1.0; }, u, flat, inner, Measure::volume_g());
        CHECK(vo / vi == doctest::Approx(std::pow(2.0, -n)).epsilon(1e-6));
    }
}

TEST_CASE("background metric invariants") {
    Dimension d(4);
    auto round = BackgroundMetric::round_sphere_chart(d);
    // |g0_ij - delta_ij| <= c |x|^2 near 0 (chart normalized to normal coords)
    for (double r : {0.01, 0.05, 0.1}) {
        double x[4] = {r, 0, 0, 0};
        double comp[16];
        round.components(x, comp);
        double dev = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) dev = std::max(dev, std::abs(comp[i * 4 + j] - (i == j ? 1.0 : 0.0)));
        CHECK(dev <= 0.51 * r * r);
    }
    // Theta for flat background is r^{n-1}
    auto flat = BackgroundMetric::flat(d);
    double x[4] = {0.0, 0.6, 0.0, 0.8};
    CHECK(flat.sphere_density(x) == doctest::Approx(1.0).epsilon(1e-12));

    // sampled background built from the round chart: agreement with closed form
    auto comp_fn = [&](const double* y, double* out) { round.components(y, out); };
    auto sampled = BackgroundMetric::sampled(
        d, comp_fn, [&](const double* y) { return round.scalar_curvature(y); },
        [&](const double* y, double* out) { round.ricci(y, out); });
    double xs[4] = {0.3, -0.2, 0.1, 0.4};
    CHECK(sampled.volume_density(xs) == doctest::Approx(round.volume_density(xs)).epsilon(1e-12));
    CHECK(sampled.sphere_density(xs) == doctest::Approx(round.sphere_density(xs)).epsilon(1e-10));
}

TEST_CASE("sampled factor: derivatives and curvature against the analytic route") {
    Dimension d(4);
    auto flat = BackgroundMetric::flat(d);
    auto sq = build_sphere_quadrature(d, 16);
    auto grid = build_annulus_grid(0.5, 2.0, 49, sq);

    // smooth anisotropic factor
    Expr ue = (Expr::constant(0.15) * Expr::variable(0) +
               Expr::constant(-0.1) * Expr::variable(2) * Expr::absx() +
               Expr::constant(0.05) * Expr::absx() * Expr::absx())
                  .exp();
    auto field = std::make_shared<SampledField>(
        sample_field(grid, [&](const double* x) { return ue.eval(x, 4); }));
    auto us = ConformalFactor::sampled(field);
    auto uexpr = ConformalFactor::expression(ue);

    // interpolation at off-grid points
    {
        double x[4] = {0.61, 0.42, -0.37, 0.54};
        CHECK(field->value(x) == doctest::Approx(ue.eval(x, 4)).epsilon(1e-4));
    }

    // jets at interior nodes
    std::vector<Expr> grads;
    for (int i = 0; i < 4; ++i) grads.push_back(ue.derivative(i));
    std::mt19937_64 rng(3);
    for (int t = 0; t < 10; ++t) {
        std::size_t ir = 2 + rng() % (grid.radial_count() - 4);
        std::size_t is = rng() % grid.sphere.count();
        auto x = grid.point(ir, is);
        Jet2 j = field->jet_at_node(ir, is);
        CHECK(j.value == doctest::Approx(ue.eval(x.data(), 4)).epsilon(1e-12));
        for (int i = 0; i < 4; ++i)
            CHECK(j.grad[i] == doctest::Approx(grads[i].eval(x.data(), 4)).epsilon(5e-4));
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k)
                CHECK(j.hess[i * 4 + k] ==
                      doctest::Approx(grads[i].derivative(k).eval(x.data(), 4)).epsilon(2e-2));
    }

    CHECK_THROWS_AS(field->jet_at_node(0, 0), Error);

    // bundle via finite differences tracks the analytic bundle in the interior
    auto bs = curvature_bundle(us, flat, grid);
    auto ba = curvature_bundle(uexpr, flat, grid);
    std::size_t ns = grid.sphere.count();
    for (int t = 0; t < 10; ++t) {
        std::size_t ir = 2 + rng() % (grid.radial_count() - 4);
        std::size_t is = rng() % ns;
        std::size_t k = ir * ns + is;
        CHECK(bs.edge[k] == 0);
        CHECK(bs.R[k] == doctest::Approx(ba.R[k]).epsilon(2e-2));
        CHECK(bs.riem_sq[k] == doctest::Approx(ba.riem_sq[k]).epsilon(5e-2));
    }
    CHECK(bs.edge[0] == 1);

    // scalar_curvature_conformal at a grid node (sampled route) and the
    // boundary error path
    {
        auto x = grid.point(5, 7);
        double rs = scalar_curvature_conformal(us, flat, x.data());
        double ra = scalar_curvature_conformal(uexpr, flat, x.data());
        CHECK(rs == doctest::Approx(ra).epsilon(2e-2));
        auto xe = grid.point(0, 3);
        CHECK_THROWS_AS(scalar_curvature_conformal(us, flat, xe.data()), Error);
    }
}

TEST_CASE("sampled background: scalar curvature via divergence form") {
    Dimension d(4);
    auto round = BackgroundMetric::round_sphere_chart(d);
    auto sampled = BackgroundMetric::sampled(
        d, [&](const double* y, double* out) { round.components(y, out); },
        [&](const double* y) { return round.scalar_curvature(y); },
        [&](const double* y, double* out) { round.ricci(y, out); });
    auto ones = ConformalFactor::expression(Expr::constant(1.0));
    double x[4] = {0.4, 0.1, -0.2, 0.3};
    CHECK(scalar_curvature_conformal(ones, sampled, x) == doctest::Approx(12.0).epsilon(1e-5));
}

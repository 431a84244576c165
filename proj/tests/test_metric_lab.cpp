#include <cmath>
#include <random>

#include "confmet/errors.hpp"
#include "confmet/green.hpp"
#include "confmet/metric_lab.hpp"
#include "confmet/numerics.hpp"
#include "doctest.h"

using namespace confmet;

namespace {

Expr inversion(int n) { return Expr::absx().pow(2.0 - n); }

}  // namespace

TEST_CASE("inversion oracle distance") {
    double e1[4] = {1, 0, 0, 0}, e2[4] = {0, 1, 0, 0}, twice[4] = {2, 0, 0, 0};
    CHECK(inversion_oracle_distance(e1, twice, 4) == doctest::Approx(0.5));
    CHECK(inversion_oracle_distance(e1, e1, 4) == doctest::Approx(0.0));
    CHECK(inversion_oracle_distance(e1, e2, 4) == doctest::Approx(std::sqrt(2.0)));
    double origin[4] = {0, 0, 0, 0};
    CHECK_THROWS_AS(inversion_oracle_distance(e1, origin, 4), Error);
}

TEST_CASE("geodesic distance: flat metric") {
    Dimension d(4);
    auto flat = BackgroundMetric::flat(d);
    auto ones = ConformalFactor::expression(Expr::constant(1.0));
    auto spec = make_grid_spec(4, 0.25, 4.0, 1.0);
    DistanceGraph graph(ones, flat, spec);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int t = 0; t < 8; ++t) {
        double x[4], y[4];
        double rx = 0, ry = 0;
        do {
            rx = 0;
            for (int i = 0; i < 4; ++i) {
                x[i] = 1.5 * U(rng);
                rx += x[i] * x[i];
            }
            rx = std::sqrt(rx);
        } while (rx < 0.5 || rx > 1.8);
        do {
            ry = 0;
            for (int i = 0; i < 4; ++i) {
                y[i] = 1.5 * U(rng);
                ry += y[i] * y[i];
            }
            ry = std::sqrt(ry);
        } while (ry < 0.5 || ry > 1.8);
        double ed = 0;
        for (int i = 0; i < 4; ++i) ed += (x[i] - y[i]) * (x[i] - y[i]);
        ed = std::sqrt(ed);
        // chords between sampled points can dip toward the inner boundary;
        // keep pairs whose straight segment stays inside the annulus
        double t0 = 0.0;
        {
            double num = 0, den = 0;
            for (int i = 0; i < 4; ++i) {
                num += x[i] * (x[i] - y[i]);
                den += (x[i] - y[i]) * (x[i] - y[i]);
            }
            t0 = std::clamp(num / den, 0.0, 1.0);
        }
        double minr2 = 0;
        for (int i = 0; i < 4; ++i) {
            double p = x[i] + t0 * (y[i] - x[i]);
            minr2 += p * p;
        }
        if (std::sqrt(minr2) < 0.3) continue;
        double gd = graph.distance(x, y);
        CHECK(gd >= ed * (1.0 - 1e-9));  // upper bias
        CHECK(gd <= ed * 1.02);
    }
}

TEST_CASE("geodesic distance: inversion metric against the oracle") {
    Dimension d(4);
    auto flat = BackgroundMetric::flat(d);
    auto u = ConformalFactor::expression(inversion(4));
    auto spec = make_grid_spec(4, 1.0 / 12.0, 6.0, 1.0);
    DistanceGraph graph(u, flat, spec);

    // radial pairs: d(x', sigma x') = 1 - 1/sigma exactly
    for (double sigma : {2.0, 4.0}) {
        double x[4] = {0.4, 0.0, 0.0, 0.0};
        double y[4] = {0.4 * sigma, 0.0, 0.0, 0.0};
        // oracle in the rescaled sense: d = 1/0.4 * (1 - 1/sigma) ... the
        // oracle formula directly:
        double expect = inversion_oracle_distance(x, y, 4);
        CHECK(expect == doctest::Approx((1.0 - 1.0 / sigma) / 0.4).epsilon(1e-14));
        double gd = graph.distance(x, y);
        CHECK(gd == doctest::Approx(expect).epsilon(0.02));
        CHECK(gd >= expect * (1 - 1e-9));
    }

    // general pairs with the oracle as the A* heuristic
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    int checked = 0;
    while (checked < 6) {
        double x[4], y[4];
        double rx = 0, ry = 0;
        for (int i = 0; i < 4; ++i) {
            x[i] = U(rng);
            rx += x[i] * x[i];
        }
        for (int i = 0; i < 4; ++i) {
            y[i] = U(rng);
            ry += y[i] * y[i];
        }
        rx = std::sqrt(rx);
        ry = std::sqrt(ry);
        if (rx < 0.3 || rx > 1.8 || ry < 0.3 || ry > 1.8) continue;
        // reject pairs whose z-image chord passes too close to the origin
        double zx[4], zy[4];
        for (int i = 0; i < 4; ++i) {
            zx[i] = x[i] / (rx * rx);
            zy[i] = y[i] / (ry * ry);
        }
        double num = 0, den = 0;
        for (int i = 0; i < 4; ++i) {
            num += zx[i] * (zx[i] - zy[i]);
            den += (zx[i] - zy[i]) * (zx[i] - zy[i]);
        }
        double tt = den > 0 ? std::clamp(num / den, 0.0, 1.0) : 0.0;
        double zmin = 0;
        for (int i = 0; i < 4; ++i) {
            double p = zx[i] + tt * (zy[i] - zx[i]);
            zmin += p * p;
        }
        if (std::sqrt(zmin) < 3.0 / 6.0) continue;
        ++checked;
        double expect = inversion_oracle_distance(x, y, 4);
        auto heur = [&](const double* p) { return inversion_oracle_distance(p, y, 4); };
        double gd = graph.distance(x, y, heur);
        CHECK(gd == doctest::Approx(expect).epsilon(0.02));
        CHECK(gd >= expect * (1 - 1e-9));
    }
}

TEST_CASE("distance solver converges from above under resolution doubling") {
    Dimension d(4);
    auto flat = BackgroundMetric::flat(d);
    auto u = ConformalFactor::expression(inversion(4));
    double x[4] = {0.5, 0.3, 0.0, 0.0};
    double y[4] = {-0.8, 0.9, 0.4, 0.0};
    double expect = inversion_oracle_distance(x, y, 4);

    double prev_err = 1e300;
    std::vector<double> errs;
    for (double res : {0.5, 1.0, 2.0}) {
        auto spec = make_grid_spec(4, 0.2, 3.0, res);
        DistanceGraph graph(u, flat, spec);
        auto heur = [&](const double* p) { return inversion_oracle_distance(p, y, 4); };
        double gd = graph.distance(x, y, heur);
        double err = gd - expect;
        CHECK(err >= -1e-9 * expect);  // never below the true distance
        CHECK(err < prev_err);
        errs.push_back(std::max(err, 1e-15));
        prev_err = err;
    }
    double order = std::log2(errs[0] / errs[2]) / 2.0;
    CHECK(order >= 0.9);
}

TEST_CASE("geodesic ball volumes") {
    Dimension d(4);
    auto flat = BackgroundMetric::flat(d);
    double v4 = d.ball_volume();

    SUBCASE("flat: V_n rho^n within 3%") {
        auto ones = ConformalFactor::expression(Expr::constant(1.0));
        auto spec = make_grid_spec(4, 0.05, 4.0, 1.0);
        DistanceGraph graph(ones, flat, spec);
        double center[4] = {1.0, 0.0, 0.0, 0.0};
        for (double rho : {0.5, 0.9}) {
            auto res = geodesic_ball_volume(graph, center, rho);
            CHECK(res.volume == doctest::Approx(v4 * std::pow(rho, 4.0)).epsilon(0.03));
        }
    }

    SUBCASE("inversion metric: escaping balls throw with the reachable fraction") {
        auto u = ConformalFactor::expression(inversion(4));
        auto spec = make_grid_spec(4, 0.2, 2.0, 0.75);
        DistanceGraph graph(u, flat, spec);
        double center[4] = {1.0, 0.0, 0.0, 0.0};
        CHECK_THROWS_AS(geodesic_ball_volume(graph, center, 3.5, 1e-4), Error);
    }
}

TEST_CASE("volume density profile: inversion metric approaches 1") {
    Dimension d(4);
    auto flat = BackgroundMetric::flat(d);
    auto u = ConformalFactor::expression(inversion(4));
    auto spec = make_grid_spec(4, 1.0 / 10.0, 4.0, 1.0);
    double x0[4] = {1.0, 0.0, 0.0, 0.0};
    auto prof = volume_density_profile(u, flat, x0, {4.0, 8.0}, spec);
    for (double r : prof.ratio) CHECK(r == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("volume density: the rho_k counterexample stays away from 1") {
    Dimension d(5);
    auto flat = BackgroundMetric::flat(d);
    auto u = ConformalFactor::expression(Expr::rho(4).pow(-2.0));
    auto spec = make_grid_spec(5, 0.1, 4.0, 0.7);
    double x0[5] = {1.0, 0.0, 0.0, 0.0, 0.0};
    // the axis tube escapes every bounded chart; the truncated volume is a
    // lower bound, so 'bounded away from 1' is still demonstrated
    auto prof = volume_density_profile(u, flat, x0, {2.0, 4.0}, spec, 0.6);
    for (double r : prof.ratio) CHECK(std::abs(r - 1.0) >= 0.2);
}

TEST_CASE("decay ratio suite on the inversion metric") {
    Dimension d(4);
    auto flat = BackgroundMetric::flat(d);
    auto u = ConformalFactor::expression(inversion(4));
    double r = 0.25;
    auto spec = make_grid_spec(4, r / 8.0, 4.0, 1.0);
    auto sq = build_sphere_quadrature(d, 6);
    auto suite = decay_ratio_suite(u, flat, r, spec, sq, 65);

    auto find = [&](const std::string& name) -> const RatioEntry& {
        for (const auto& e : suite.entries)
            if (e.name == name) return e;
        FAIL("missing entry");
        return suite.entries.front();
    };
    CHECK(find("annulus_volume_ratio").computed ==
          doctest::Approx(std::pow(2.0, -4.0)).epsilon(1e-6));
    CHECK(find("gradient_moment_ratio").computed ==
          doctest::Approx(find("gradient_moment_ratio").target).epsilon(1e-6));
    CHECK(find("u_moment_ratio").computed ==
          doctest::Approx(find("u_moment_ratio").target).epsilon(1e-6));
    CHECK(find("log_gradient_sphere_ratio").computed == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(find("distance_ratio").computed == doctest::Approx(0.5).epsilon(0.02));
    CHECK(find("volume_over_distance").computed == doctest::Approx(15.0).epsilon(0.05));
    CHECK(find("point_to_sphere_ratio").computed == doctest::Approx(1.0).epsilon(0.05));
    CHECK(find("sphere_diameter_ratio").computed == doctest::Approx(0.5).epsilon(0.05));
    const auto& band = find("annulus_diam_over_separation");
    CHECK(band.computed >= band.lo);
    CHECK(band.computed <= band.hi);
    CHECK(band.computed == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("decay suite flags the finite-volume fixture") {
    Dimension d(4);
    auto flat = BackgroundMetric::flat(d);
    auto ones = ConformalFactor::expression(Expr::constant(1.0));
    double r = 0.25;
    auto spec = make_grid_spec(4, r / 8.0, 4.0, 0.75);
    auto sq = build_sphere_quadrature(d, 4);
    auto suite = decay_ratio_suite(ones, flat, r, spec, sq, 65);
    for (const auto& e : suite.entries)
        if (e.name == "annulus_volume_ratio") {
            CHECK(e.computed == doctest::Approx(16.0).epsilon(1e-6));  // 2^n, off-target
            CHECK(e.rel_err > 0.5);
        }
}

TEST_CASE("blow-down normalization and deviations") {
    Dimension d(4);
    auto sq = build_sphere_quadrature(d, 8);

    SUBCASE("pure inversion factor is scale invariant") {
        auto seq = blow_down(inversion(4), d, {1e-1, 1e-2, 1e-3}, 0.5, 2.0, sq);
        for (std::size_t k = 0; k < seq.r_k.size(); ++k) {
            CHECK(seq.c_k[k] == doctest::Approx(std::pow(seq.r_k[k], 1.0)).epsilon(1e-12));
            CHECK(seq.sup_rel_deviation[k] < 1e-12);
            CHECK(seq.normalization_residual[k] < 1e-8);
        }
    }

    SUBCASE("a + b |x|^{2-n}: the constant washes out") {
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> U(0.3, 2.0);
        Expr u = Expr::constant(U(rng)) + Expr::constant(U(rng)) * inversion(4);
        auto seq = blow_down(u, d, {1e-1, 1e-2, 1e-3, 1e-4}, 0.5, 2.0, sq);
        for (std::size_t k = 1; k < seq.r_k.size(); ++k)
            CHECK(seq.sup_rel_deviation[k] < seq.sup_rel_deviation[k - 1]);
        CHECK(seq.sup_rel_deviation[2] < 0.01);  // r_k = 1e-3
        for (double rsd : seq.normalization_residual) CHECK(rsd < 1e-8);
    }

    SUBCASE("perturbation |x|^{2-n}(1 + |x|) vanishes under rescaling") {
        Expr u = inversion(4) * (Expr::constant(1.0) + Expr::absx());
        auto seq = blow_down(u, d, {1e-1, 1e-2, 1e-3}, 0.5, 2.0, sq);
        CHECK(seq.sup_rel_deviation[2] < 0.01);
        for (std::size_t k = 1; k < seq.r_k.size(); ++k)
            CHECK(seq.sup_rel_deviation[k] < seq.sup_rel_deviation[k - 1]);
    }
}

TEST_CASE("distance matrix comparison across a blow-down sequence") {
    Dimension d(4);
    auto flat = BackgroundMetric::flat(d);
    auto sq = build_sphere_quadrature(d, 6);
    Expr u = inversion(4) * (Expr::constant(1.0) + Expr::absx());
    auto seq = blow_down(u, d, {0.3, 0.05, 0.005}, 0.5, 2.0, sq);

    std::vector<std::pair<ConformalFactor, BackgroundMetric>> metrics;
    for (const auto& uk : seq.u_k) metrics.push_back({ConformalFactor::expression(uk), flat});

    std::vector<std::vector<double>> pts = {
        {0.9, 0.1, 0.0, 0.0}, {0.0, 1.2, 0.3, 0.0}, {-0.7, 0.0, 0.8, 0.2}, {0.3, -0.9, 0.0, 0.6}};
    auto spec = make_grid_spec(4, 0.25, 4.0, 0.75);
    auto devs = distance_matrix_compare(
        metrics, pts, [](const double* a, const double* b) { return inversion_oracle_distance(a, b, 4); },
        spec);
    REQUIRE(devs.size() == 3);
    CHECK(devs[2] < devs[0] + 0.02);
    CHECK(devs[2] < 0.15);

    // flat sequence vs flat oracle: deviation is pure discretization error
    std::vector<std::pair<ConformalFactor, BackgroundMetric>> flats = {
        {ConformalFactor::expression(Expr::constant(1.0)), flat}};
    auto devs2 = distance_matrix_compare(
        flats, pts,
        [](const double* a, const double* b) {
            double s = 0;
            for (int i = 0; i < 4; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
            return std::sqrt(s);
        },
        spec);
    CHECK(devs2[0] < 0.04);
}

TEST_CASE("green function closed forms") {
    Dimension d4(4);
    double x[4] = {0.5, 0, 0, 0};
    CHECK(green_function_flat_ball(d4, x) == doctest::Approx(3.0 / (4.0 * kPi * kPi)).epsilon(1e-14));

    double near_b[4] = {0.999999, 0, 0, 0};
    CHECK(std::abs(green_function_flat_ball(d4, near_b)) < 1e-5);

    // scaling: G(x) |x|^{n-2} -> 1/((n-2) omega_{n-1})
    for (int n : {3, 4, 5}) {
        Dimension d(n);
        std::vector<double> p(n, 0.0);
        p[0] = 1e-5;
        double lim = green_function_flat_ball(d, p.data()) * std::pow(1e-5, n - 2.0);
        CHECK(lim == doctest::Approx(1.0 / ((n - 2) * d.sphere_area())).epsilon(1e-5));
    }

    double out[4] = {1.5, 0, 0, 0};
    CHECK_THROWS_AS(green_function_flat_ball(d4, out), Error);
}

TEST_CASE("w profile") {
    Dimension d(4);
    auto sq = build_sphere_quadrature(d, 6);
    std::vector<double> radii = {0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};

    SUBCASE("u = G: w identically 1") {
        Expr g = (Expr::absx().pow(-2.0) - Expr::constant(1.0)) *
                 Expr::constant(1.0 / (2.0 * d.sphere_area()));
        auto prof = w_profile(ConformalFactor::expression(g), d, radii, sq);
        for (double s : prof.sup_w) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(prof.bounded);
        CHECK(std::abs(prof.log_slope) < 1e-10);
    }

    SUBCASE("u = |x|^{2-n}: w tends to (n-2) omega_{n-1}") {
        auto prof = w_profile(ConformalFactor::expression(inversion(4)), d, radii, sq);
        double expect = 2.0 * d.sphere_area();
        CHECK(prof.sup_w.back() == doctest::Approx(expect).epsilon(1e-3));
        CHECK(prof.bounded);
    }

    SUBCASE("logarithmic factor: unbounded with slope (n-2) omega_{n-1}") {
        Expr u = inversion(4) * Expr::absx().pow(-1.0).log();
        auto prof = w_profile(ConformalFactor::expression(u), d, radii, sq);
        CHECK_FALSE(prof.bounded);
        CHECK(prof.log_slope == doctest::Approx(2.0 * d.sphere_area()).epsilon(0.05));
        // the hypothesis audit shows volume divergence and small curvature mass:
        // the factor satisfies the theorem hypotheses, and log growth of w is
        // compatible with the W^{2,p} (p < n/2) conclusion.
        auto flat = BackgroundMetric::flat(d);
        auto audit = hypothesis_audit(ConformalFactor::expression(u), flat, 0.25, 8, 17, sq);
        CHECK(audit.volume_diverging);
        CHECK(audit.r_mass.back() < audit.r_mass.front());
    }
}

TEST_CASE("hypothesis audit separates infinite and finite volume fixtures") {
    Dimension d(4);
    auto flat = BackgroundMetric::flat(d);
    auto sq = build_sphere_quadrature(d, 4);
    auto a1 = hypothesis_audit(ConformalFactor::expression(inversion(4)), flat, 0.25, 6, 17, sq);
    CHECK(a1.volume_diverging);
    auto a2 = hypothesis_audit(ConformalFactor::expression(Expr::constant(1.0)), flat, 0.25, 6, 17, sq);
    CHECK_FALSE(a2.volume_diverging);
}

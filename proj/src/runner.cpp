#include "confmet/runner.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "confmet/conformal4d.hpp"
#include "confmet/curvature.hpp"
#include "confmet/cylinder.hpp"
#include "confmet/errors.hpp"
#include "confmet/green.hpp"
#include "confmet/metric_lab.hpp"

namespace confmet {

namespace {

struct Context {
    const Scenario& s;
    Dimension dim;
    BackgroundMetric g0;
    ConformalFactor u;
    SphereQuadrature sq;
};

ReportTable run_curvature(const Context& c) {
    ReportTable t{"curvature", "consistency", {}, "", };
    auto grid = build_annulus_grid(c.s.r_min, c.s.r_max, c.s.radial_count, c.sq);
    CurvatureEvaluator ev(c.u, c.g0);
    int n = c.dim.n();

    std::mt19937_64 rng(c.s.seed);
    double trace_dev = 0.0, yamabe_dev = 0.0, kn_dev = 0.0;
    for (int probe = 0; probe < 16; ++probe) {
        std::size_t ir = rng() % grid.radial_count();
        std::size_t is = rng() % grid.sphere.count();
        auto x = grid.point(ir, is);
        auto p = ev.at(x.data());
        double e2w = std::pow(p.U, 4.0 / (n - 2));
        double trace = 0.0;
        for (int i = 0; i < n; ++i) trace += p.ric(i, i);
        trace /= e2w;
        double scale = std::max({std::abs(p.R), p.ric_sq, 1e-12});
        trace_dev = std::max(trace_dev, std::abs(trace - p.R) / scale);

        double r_dir = scalar_curvature_conformal(c.u, c.g0, x.data());
        yamabe_dev = std::max(yamabe_dev, std::abs(r_dir - p.R) / scale);

        double trP = p.R / (2.0 * (n - 1));
        double psq = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double pij = p.ric(i, j) - (i == j ? p.R / (2.0 * (n - 1)) * e2w : 0.0);
                psq += pij * pij;
            }
        psq /= (n - 2.0) * (n - 2.0) * e2w * e2w;
        double kn = 4.0 * (n - 2) * psq + 4.0 * trP * trP;
        double kscale = std::max(std::abs(p.riem_sq), 1e-12);
        kn_dev = std::max(kn_dev, std::abs(p.riem_sq - p.weyl_sq - kn) / kscale);
    }
    t.rows.push_back(make_row("ric_trace_vs_R_max_rel", trace_dev, 0.0, 1e-8));
    t.rows.push_back(make_row("yamabe_two_route_max_rel", yamabe_dev, 0.0, 1e-6));
    t.rows.push_back(make_row("kulkarni_nomizu_split_max_rel", kn_dev, 0.0, 1e-6));

    if (n == 4) {
        auto bundle = curvature_bundle(c.u, c.g0, grid);
        double wg = integrate_values(bundle.weyl_sq, c.u, c.g0, grid, Measure::volume_g());
        double wg0 = integrate([&](const double* x) { return c.g0.weyl_sq0(x); }, c.u, c.g0, grid,
                               Measure::volume_g0());
        t.rows.push_back(make_row("weyl_energy_conformal_diff", wg - wg0, 0.0, 1e-8));
    }
    return t;
}

ReportTable run_three_circle(const Context& c) {
    ReportTable t{"three-circle", "cylinder", {}, ""};
    int n = c.dim.n();
    auto f = to_cylinder(c.u, c.g0, c.s.tc_r_anchor, c.s.tc_L);
    auto e = segment_energies(f, c.sq);
    t.rows.push_back(info_row("E1", e.E1));
    t.rows.push_back(info_row("E2", e.E2));
    t.rows.push_back(info_row("E3", e.E3));
    auto verdict = three_circle_classify(e, c.s.tc_L);
    t.rows.push_back(info_row("verdict_code", static_cast<double>(verdict)));
    t.rows.push_back(
        info_row("verdict_non_violation", verdict != ThreeCircleVerdict::Violation ? 1.0 : 0.0));

    // change-of-variables identity over the first segment
    double lhs = segment_energy(f, f.T0, f.T0 + c.s.tc_L, c.sq);
    double a = c.s.tc_r_anchor * std::exp(-c.s.tc_L);
    auto grid = build_annulus_grid(a, c.s.tc_r_anchor, 65, c.sq);
    double rhs = integrate(
        [&](const double* x) {
            double r2 = 0;
            for (int i = 0; i < n; ++i) r2 += x[i] * x[i];
            double uv = c.u.value(x, n);
            return uv * uv / r2;
        },
        c.u, c.g0, grid, Measure::volume_g0());
    t.rows.push_back(make_row("change_of_variables_rel", lhs / rhs - 1.0, 0.0, 1e-6));

    double ratio =
        annulus_energy_ratio(c.u, c.g0, c.s.tc_r_anchor, c.s.tc_theta, 65, c.sq);
    t.rows.push_back(info_row("annulus_energy_ratio", ratio));
    t.rows.push_back(info_row("annulus_energy_ratio_times_theta", ratio * c.s.tc_theta));

    auto audit = cylinder_hypothesis_audit(c.u, c.g0, c.s.tc_r_anchor, c.s.tc_L, 33, c.sq);
    t.rows.push_back(info_row("audit_f_lp", audit.f_lp));
    t.rows.push_back(info_row("audit_metric_deviation", audit.metric_deviation));
    return t;
}

ReportTable run_decay(const Context& c) {
    ReportTable t{"decay", "dyadic-ratios", {}, ""};
    auto spec = make_grid_spec(c.dim.n(), c.s.decay_r / 4.0, std::min(c.s.r_max, 16.0 * c.s.decay_r),
                               c.s.resolution);
    auto suite = decay_ratio_suite(c.u, c.g0, c.s.decay_r, spec, c.sq, 65);
    for (const auto& e : suite.entries) {
        if (e.lo == e.hi) {
            double tol = 0.02;
            if (e.name == "volume_over_distance" || e.name == "point_to_sphere_ratio") tol = 0.05;
            t.rows.push_back(make_row(e.name, e.computed, e.target, tol));
        } else {
            double mid = 0.5 * (e.lo + e.hi);
            double tol = (e.hi - e.lo) / (2.0 * mid);
            t.rows.push_back(make_row(e.name, e.computed, mid, tol));
        }
    }
    return t;
}

ReportTable run_volume_density(const Context& c) {
    ReportTable t{"volume-density", "profile", {}, ""};
    auto spec = make_grid_spec(c.dim.n(), c.s.vd_r_min, c.s.vd_r_max, c.s.resolution);
    std::vector<double> x0(c.dim.n(), 0.0);
    x0[0] = 1.0;
    auto prof = volume_density_profile(c.u, c.g0, x0.data(), c.s.vd_rho, spec);
    for (std::size_t i = 0; i < prof.rho.size(); ++i) {
        t.rows.push_back(
            make_row("density_ratio_rho_" + std::to_string(prof.rho[i]), prof.ratio[i], 1.0, 0.05));
        t.rows.push_back(info_row("reachable_rho_" + std::to_string(prof.rho[i]), prof.reachable[i]));
    }
    double worst_increase = 0.0;
    for (std::size_t i = 0; i + 1 < prof.ratio.size(); ++i)
        worst_increase = std::max(
            worst_increase, std::abs(prof.ratio[i + 1] - 1.0) - std::abs(prof.ratio[i] - 1.0));
    t.rows.push_back(make_row("monotone_approach_worst_increase", worst_increase, 0.0, 0.005));
    t.rows.push_back(info_row("trend_to_one_slope", prof.trend_to_one));
    return t;
}

ReportTable run_blow_down(const Context& c) {
    ReportTable t{"blow-down", "rescaled-factors", {}, ""};
    auto seq = blow_down(c.u.expr(), c.dim, c.s.blowdown_scales, 0.5, 2.0, c.sq);
    for (std::size_t k = 0; k < seq.r_k.size(); ++k) {
        std::string tag = "_rk_" + std::to_string(seq.r_k[k]);
        if (seq.r_k[k] <= 1e-3)
            t.rows.push_back(make_row("sup_rel_deviation" + tag, seq.sup_rel_deviation[k], 0.0, 0.01));
        else
            t.rows.push_back(info_row("sup_rel_deviation" + tag, seq.sup_rel_deviation[k]));
        t.rows.push_back(
            make_row("normalization_residual" + tag, seq.normalization_residual[k], 0.0, 1e-8));
    }
    return t;
}

ReportTable run_gbc(const Context& c) {
    ReportTable t{"gbc", "ledger", {}, ""};
    require(c.dim.n() == 4, Errc::WrongDimension, "the gbc suite needs dimension 4");
    double omega3 = 2.0 * kPi * kPi;

    double a = std::min(4.0 * c.s.r_min, 0.25 * c.s.r_max);
    double b = 0.5 * c.s.r_max;
    auto led = gbc_annulus_check(c.u, c.g0, a, b, c.s.radial_count, c.sq);
    t.rows.push_back(make_row("annulus_defect", led.defect, 0.0, 1e-3));
    t.rows.push_back(info_row("annulus_pf_integral", led.pf_integral));
    t.rows.push_back(info_row("annulus_boundary_sum", led.boundary_sum));

    // Pf integral over the whole chart against 4 pi^2 chi - 8 pi^2 m.
    auto grid = build_annulus_grid(c.s.r_min, c.s.r_max, c.s.radial_count, c.sq);
    CurvatureEvaluator ev(c.u, c.g0);
    double pf = integrate(
        [&](const double* x) { return pfaffian_density(ev.at(x), c.dim).density; }, c.u, c.g0,
        grid, Measure::volume_g());
    double target = 4.0 * kPi * kPi * c.s.chi - 8.0 * kPi * kPi * c.s.ends_m;
    t.rows.push_back(make_row("pf_total_vs_topology", pf, target, target != 0.0 ? 0.01 : 1e-3));

    double neg = integrate(
        [&](const double* x) { return pfaffian_density(ev.at(x), c.dim).negative_part; }, c.u,
        c.g0, grid, Measure::volume_g());
    t.rows.push_back(info_row("pf_negative_part_integral", neg));

    if (c.s.ends_m >= 1.0) {
        for (double rr : {2.0 * c.s.r_min, 4.0 * c.s.r_min, 8.0 * c.s.r_min}) {
            double flux = boundary_flux_lap_phi(c.u, c.g0, rr, c.sq);
            t.rows.push_back(
                make_row("lap_phi_flux_r_" + std::to_string(rr), flux, 8.0 * omega3, 1e-6));
        }
        // Exhaustion Omega_k = B_{r_out} \ B_{2^{-k}}: Q-integral limit.
        double r_out = std::min(0.5, 0.5 * c.s.r_max);
        double q_lim = 0.0;
        int kmax = std::max(3, static_cast<int>(std::floor(std::log2(1.0 / c.s.r_min))) - 1);
        for (int k = 2; k <= kmax; ++k) {
            double rin = std::pow(2.0, -k);
            if (rin <= c.s.r_min) break;
            q_lim = q_integral_annulus(c.u, c.g0, rin, r_out, c.s.radial_count, c.sq);
        }
        double rhs = integrate([&](const double* x) { return c.g0.q_curvature0(x); }, c.u, c.g0,
                               build_annulus_grid(c.s.r_min, r_out, c.s.radial_count, c.sq),
                               Measure::volume_g0()) -
                     4.0 * omega3 + 0.5 * boundary_flux_lap_phi(c.u, c.g0, r_out, c.sq) +
                     boundary_t_phi(c.u, c.g0, r_out, c.sq);
        t.rows.push_back(make_row("q_exhaustion_vs_local_identity", q_lim - rhs, 0.0, 1e-3));
        for (double rr : {2.0 * c.s.r_min, 8.0 * c.s.r_min, 32.0 * c.s.r_min})
            t.rows.push_back(info_row("grad_phi_sphere_l1_r_" + std::to_string(rr),
                                      boundary_grad_phi_l1(c.u, c.g0, rr, c.sq)));
    }
    return t;
}

ReportTable run_riem_l2(const Context& c) {
    ReportTable t{"riem-l2", "dyadic-energies", {}, ""};
    require(c.dim.n() == 4, Errc::WrongDimension, "the riem-l2 suite needs dimension 4");
    auto prof = riem_l2_profile(c.u, c.g0, c.s.riem_r0, c.s.riem_levels, 33, c.sq);
    for (std::size_t j = 0; j < prof.energies.size(); ++j)
        t.rows.push_back(info_row("energy_level_" + std::to_string(j), prof.energies[j]));
    std::size_t tail_level = prof.partial_sums.size() > 1 ? prof.partial_sums.size() - 1 : 0;
    double tail =
        prof.partial_sums.size() >= 2
            ? std::abs(prof.partial_sums[tail_level] - prof.partial_sums[tail_level - 1])
            : 0.0;
    t.rows.push_back(make_row("cauchy_tail_last_increment", tail, 0.0, 1e-3));
    t.rows.push_back(info_row("partial_sum_total", prof.partial_sums.back()));
    return t;
}

ReportTable run_w_profile(const Context& c) {
    ReportTable t{"w-profile", "green-ratio", {}, ""};
    require(c.s.background == "flat", Errc::UnsupportedBackground,
            "w-profile is defined against the flat-ball Green function");
    auto prof = w_profile(c.u, c.dim, c.s.wprofile_radii, c.sq);
    for (std::size_t i = 0; i < prof.radii.size(); ++i) {
        t.rows.push_back(info_row("sup_w_r_" + std::to_string(prof.radii[i]), prof.sup_w[i]));
        t.rows.push_back(info_row("mean_w_r_" + std::to_string(prof.radii[i]), prof.mean_w[i]));
    }
    t.rows.push_back(info_row("log_slope", prof.log_slope));
    t.rows.push_back(info_row("bounded_indicator", prof.bounded ? 1.0 : 0.0));

    auto audit = hypothesis_audit(c.u, c.g0, c.s.wprofile_radii.front(), 8, 33, c.sq);
    t.rows.push_back(info_row("audit_volume_diverging", audit.volume_diverging ? 1.0 : 0.0));
    t.rows.push_back(info_row("audit_r_mass_tail", audit.r_mass_tail));
    return t;
}

}  // namespace

Report run_scenario(const Scenario& s) {
    auto start = std::chrono::steady_clock::now();
    Report rep;
    rep.scenario = s;

    Context c{s, Dimension(s.dimension), scenario_background(s), scenario_factor(s),
              build_sphere_quadrature(Dimension(s.dimension), s.sphere_degree)};

    for (const auto& suite : s.suites) {
        ReportTable t;
        try {
            if (suite == "curvature")
                t = run_curvature(c);
            else if (suite == "three-circle")
                t = run_three_circle(c);
            else if (suite == "decay")
                t = run_decay(c);
            else if (suite == "volume-density")
                t = run_volume_density(c);
            else if (suite == "blow-down")
                t = run_blow_down(c);
            else if (suite == "gbc")
                t = run_gbc(c);
            else if (suite == "riem-l2")
                t = run_riem_l2(c);
            else if (suite == "w-profile")
                t = run_w_profile(c);
            else
                fail(Errc::ValidationError, "unknown suite " + suite);
        } catch (const Error& e) {
            t.suite = suite;
            t.name = "failed";
            t.rows.clear();
            t.error = e.what();
        } catch (const std::exception& e) {
            t.suite = suite;
            t.name = "failed";
            t.rows.clear();
            t.error = std::string("internal: ") + e.what();
        }
        rep.tables.push_back(std::move(t));
    }

    rep.all_pass = true;
    for (const auto& t : rep.tables)
        if (!t.pass()) rep.all_pass = false;
    rep.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

int exit_code_for(const Report& r) { return r.all_pass ? 0 : 1; }

}  // namespace confmet

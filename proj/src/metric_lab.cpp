#include "confmet/metric_lab.hpp"

#include <algorithm>
#include <cmath>

#include "confmet/curvature.hpp"
#include "confmet/errors.hpp"
#include "confmet/numerics.hpp"

namespace confmet {

double inversion_oracle_distance(const double* x, const double* y, int n) {
    double rx = 0, ry = 0;
    for (int i = 0; i < n; ++i) {
        rx += x[i] * x[i];
        ry += y[i] * y[i];
    }
    require(rx > 0 && ry > 0, Errc::OriginInput, "inversion oracle undefined at the origin");
    double d2 = 0;
    for (int i = 0; i < n; ++i) {
        double zi = x[i] / rx - y[i] / ry;
        d2 += zi * zi;
    }
    return std::sqrt(d2);
}

double geodesic_distance(const ConformalFactor& u, const BackgroundMetric& g0, const double* x,
                         const double* y, const GeodesicGridSpec& spec) {
    DistanceGraph graph(u, g0, spec);
    return graph.distance(x, y);
}

BallVolumeResult geodesic_ball_volume(const DistanceGraph& graph, const double* center, double rho,
                                      double escape_tolerance) {
    require(rho > 0, Errc::ValidationError, "ball radius must be positive");
    auto field = graph.distance_field(center);
    std::size_t total = graph.node_count();

    // local distance spread per node: conf * cell scale, estimated from the
    // radial spacing (the lattice is spacing-matched by construction)
    double hs = std::log(graph.spec().r_max / graph.spec().r_min) / (graph.spec().radial - 1);

    KahanSum vol, escaped;
    for (std::size_t k = 0; k < total; ++k) {
        double d = field[k];
        if (!std::isfinite(d)) continue;
        double width = graph.node_radius(k) * hs *
                       std::pow(graph.cell_volume(k) / (graph.node_radius(k) * hs), 0.0);
        // frontier smoothing over one cell diameter in metric units
        double conf_len = std::cbrt(1.0);
        (void)conf_len;
        double local = graph.node_radius(k) * hs;
        // metric width: cell_volume ~ (metric cell length)^n => length scale
        double metric_w = std::pow(graph.cell_volume(k), 1.0 / graph.n());
        width = std::max(local * 1e-12, metric_w);
        double frac = std::clamp(0.5 + (rho - d) / width, 0.0, 1.0);
        if (frac <= 0.0) continue;
        double dv = frac * graph.cell_volume(k);
        vol.add(dv);
        if (graph.boundary_node(k)) escaped.add(dv);
    }
    BallVolumeResult out;
    out.volume = vol.value();
    require(out.volume > 0, Errc::EmptyRegion, "ball captured no grid cells");
    out.reachable_fraction = 1.0 - escaped.value() / out.volume;
    if (1.0 - out.reachable_fraction > escape_tolerance)
        fail(Errc::BallEscapesDomain,
             "reachable fraction " + std::to_string(out.reachable_fraction) +
                 " below tolerance; enlarge the chart");
    return out;
}

VolumeDensityProfile volume_density_profile(const ConformalFactor& u, const BackgroundMetric& g0,
                                            const double* x0, const std::vector<double>& rhos,
                                            const GeodesicGridSpec& spec,
                                            double escape_tolerance) {
    require(!rhos.empty(), Errc::ValidationError, "no ball radii requested");
    DistanceGraph graph(u, g0, spec);
    int n = g0.dim().n();
    double vn = g0.dim().ball_volume();

    VolumeDensityProfile out;
    auto field = graph.distance_field(x0);
    double hs = std::log(spec.r_max / spec.r_min) / (spec.radial - 1);
    for (double rho : rhos) {
        KahanSum vol, escaped;
        for (std::size_t k = 0; k < graph.node_count(); ++k) {
            double d = field[k];
            if (!std::isfinite(d)) continue;
            double metric_w = std::pow(graph.cell_volume(k), 1.0 / n);
            double width = std::max(graph.node_radius(k) * hs * 1e-12, metric_w);
            double frac = std::clamp(0.5 + (rho - d) / width, 0.0, 1.0);
            if (frac <= 0.0) continue;
            double dv = frac * graph.cell_volume(k);
            vol.add(dv);
            if (graph.boundary_node(k)) escaped.add(dv);
        }
        double v = vol.value();
        require(v > 0, Errc::EmptyRegion, "ball captured no grid cells");
        double reach = 1.0 - escaped.value() / v;
        if (1.0 - reach > escape_tolerance)
            fail(Errc::BallEscapesDomain,
                 "reachable fraction " + std::to_string(reach) + " at rho " + std::to_string(rho));
        out.rho.push_back(rho);
        out.ratio.push_back(v / (vn * std::pow(rho, n)));
        out.reachable.push_back(reach);
    }
    if (out.rho.size() >= 2) {
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < out.rho.size(); ++i) {
            lx.push_back(std::log(out.rho[i]));
            ly.push_back(std::abs(out.ratio[i] - 1.0));
        }
        out.trend_to_one = fit_slope(lx, ly);
    }
    return out;
}

namespace {

RatioEntry exact_entry(const std::string& name, double computed, double target) {
    RatioEntry e;
    e.name = name;
    e.computed = computed;
    e.target = target;
    e.lo = e.hi = target;
    e.rel_err = target != 0.0 ? std::abs(computed - target) / std::abs(target) : std::abs(computed);
    e.in_band = false;
    return e;
}

RatioEntry band_entry(const std::string& name, double computed, double lo, double hi) {
    RatioEntry e;
    e.name = name;
    e.computed = computed;
    e.target = 0.0;
    e.lo = lo;
    e.hi = hi;
    e.rel_err = 0.0;
    e.in_band = computed >= lo && computed <= hi;
    return e;
}

}  // namespace

DecayRatioSuite decay_ratio_suite(const ConformalFactor& u, const BackgroundMetric& g0, double r,
                                  const GeodesicGridSpec& spec, const SphereQuadrature& sq,
                                  int radial_count, double alpha, double beta, int diam_sources) {
    int n = g0.dim().n();
    DecayRatioSuite out;

    // --- quadrature ratios ---------------------------------------------------
    auto outer = build_annulus_grid(r, 2 * r, radial_count, sq);
    auto inner = build_annulus_grid(0.5 * r, r, radial_count, sq);
    auto one = [](const double*) { return 1.0; };
    double vol_outer = integrate(one, u, g0, outer, Measure::volume_g());
    double vol_inner = integrate(one, u, g0, inner, Measure::volume_g());
    out.entries.push_back(
        exact_entry("annulus_volume_ratio", vol_outer / vol_inner, std::pow(2.0, -n)));

    require(u.is_expression(), Errc::DerivativeUnavailable,
            "decay suite gradient moments need an expression factor");
    const Expr& ue = u.expr();
    const Expr& b = g0.flat_factor();
    Expr grad2;
    for (int i = 0; i < n; ++i) grad2 = grad2 + ue.derivative(i) * ue.derivative(i);
    Expr grad_g0 = grad2.pow(0.5) * b.pow(-2.0 / (n - 2));
    auto moment = [&](const Expr& base, double a_exp, double b_exp, const AnnulusGrid& grid) {
        Expr integrand = Expr::absx().pow(b_exp) * base.pow(a_exp);
        return integrate([&](const double* x) { return integrand.eval(x, n); }, u, g0, grid,
                         Measure::volume_g0());
    };
    double grad_ratio = moment(grad_g0, alpha, beta, inner) / moment(grad_g0, alpha, beta, outer);
    out.entries.push_back(exact_entry("gradient_moment_ratio", grad_ratio,
                                      std::pow(2.0, (n - 1) * alpha - n - beta)));
    double u_ratio = moment(ue, alpha, beta, inner) / moment(ue, alpha, beta, outer);
    out.entries.push_back(
        exact_entry("u_moment_ratio", u_ratio, std::pow(2.0, (n - 2) * alpha - n - beta)));

    // boundary log-gradient ratio
    Expr phi = ue.log();
    Expr gphi2;
    for (int i = 0; i < n; ++i) gphi2 = gphi2 + phi.derivative(i) * phi.derivative(i);
    Expr gphi_g0 = gphi2.pow(0.5) * b.pow(-2.0 / (n - 2));
    auto sphere_l1 = [&](double rr) {
        return integrate([&](const double* x) { return gphi_g0.eval(x, n); }, u, g0, outer,
                         Measure::sphere_g0(rr));
    };
    out.entries.push_back(exact_entry("log_gradient_sphere_ratio", sphere_l1(r) / sphere_l1(2 * r),
                                      std::pow(2.0, -(n - 2))));

    // --- distance ratios -----------------------------------------------------
    DistanceGraph graph(u, g0, spec);
    std::vector<double> x0(n, 0.0);
    x0[0] = 1.0;  // direction of the radial probe
    std::vector<double> p_half(n), p_r(n), p_2r(n);
    for (int i = 0; i < n; ++i) {
        p_half[i] = 0.5 * r * x0[i];
        p_r[i] = r * x0[i];
        p_2r[i] = 2 * r * x0[i];
    }
    double d_r_2r = graph.distance(p_r.data(), p_2r.data());
    double d_half_r = graph.distance(p_half.data(), p_r.data());
    out.entries.push_back(exact_entry("distance_ratio", d_r_2r / d_half_r, 0.5));

    out.entries.push_back(exact_entry("volume_over_distance",
                                      vol_outer / (g0.dim().ball_volume() * std::pow(d_r_2r, n)),
                                      std::pow(2.0, n) - 1.0));

    // point-to-sphere: distance from r x0 to the 2r layer
    auto field_r = graph.distance_field(p_r.data());
    double d_point_sphere = std::numeric_limits<double>::infinity();
    for (auto k : graph.layer_nodes(2 * r))
        d_point_sphere = std::min(d_point_sphere, field_r[k]);
    out.entries.push_back(
        exact_entry("point_to_sphere_ratio", d_point_sphere / d_r_2r, 1.0));

    // sphere diameters via antipodal-paired sources
    auto sphere_diam = [&](double rr) {
        auto layer = graph.layer_nodes(rr);
        double diam = 0.0;
        std::size_t m = layer.size();
        for (int s = 0; s < diam_sources; ++s) {
            // golden-ratio hopping spreads sources across the tensor layer
            double frac = std::fmod(0.6180339887498949 * (s + 1), 1.0);
            auto f = graph.distance_field_multi({layer[static_cast<std::size_t>(frac * m) % m]});
            for (auto k : layer)
                if (std::isfinite(f[k])) diam = std::max(diam, f[k]);
        }
        return diam;
    };
    double diam_2r = sphere_diam(2 * r);
    double diam_r = sphere_diam(r);
    out.entries.push_back(exact_entry("sphere_diameter_ratio", diam_2r / diam_r, 0.5));

    // annulus diameter over boundary separation
    {
        auto layer_r = graph.layer_nodes(r);
        auto layer_2r = graph.layer_nodes(2 * r);
        auto f_set = graph.distance_field_multi(layer_r);
        double sep = std::numeric_limits<double>::infinity();
        for (auto k : layer_2r) sep = std::min(sep, f_set[k]);

        std::size_t lo_layer = graph.radial_layer(r), hi_layer = graph.radial_layer(2 * r);
        std::size_t per_layer = graph.lattice_per_layer();
        std::vector<std::size_t> annulus_nodes;
        for (std::size_t ir = lo_layer; ir <= hi_layer; ++ir)
            for (std::size_t j = 0; j < per_layer; ++j) annulus_nodes.push_back(ir * per_layer + j);
        double diam = 0.0;
        for (int s = 0; s < diam_sources; ++s) {
            double frac = std::fmod(0.6180339887498949 * (s + 1), 1.0);
            std::size_t src = annulus_nodes[static_cast<std::size_t>(frac * annulus_nodes.size()) %
                                            annulus_nodes.size()];
            auto f = graph.distance_field_multi({src});
            for (auto k : annulus_nodes)
                if (std::isfinite(f[k])) diam = std::max(diam, f[k]);
        }
        out.entries.push_back(band_entry("annulus_diam_over_separation", diam / sep, 2.0 * 0.98,
                                         (4.0 * kPi + 1.0) * 1.02));
    }
    return out;
}

BlowDownSequence blow_down(const Expr& u, const Dimension& dim, const std::vector<double>& r_ks,
                           double ref_lo, double ref_hi, const SphereQuadrature& sq,
                           int probe_radial) {
    require(!r_ks.empty(), Errc::ValidationError, "no scales requested");
    require(0 < ref_lo && ref_lo < 1.0 && 1.0 < ref_hi, Errc::ValidationError,
            "reference annulus must bracket radius 1");
    int n = dim.n();
    double area = dim.sphere_area();

    BlowDownSequence out;
    Expr model = Expr::absx().pow(2.0 - n);
    for (double rk : r_ks) {
        require(rk > 0, Errc::ChartTooSmall, "scale must be positive");
        Expr scaled = u.scale_argument(rk) * Expr::constant(std::pow(rk, 0.5 * (n - 2)));
        // log c_k = -mean of log(scaled) over the unit sphere
        KahanSum mean;
        for (std::size_t is = 0; is < sq.count(); ++is) {
            const double* node = sq.node(is);
            mean.add(sq.weights[is] * std::log(scaled.eval(node, n)));
        }
        double log_ck = -mean.value() / area;
        double ck = std::exp(log_ck);
        Expr uk = Expr::constant(ck) * scaled;

        // normalization residual with the same quadrature
        KahanSum resid;
        for (std::size_t is = 0; is < sq.count(); ++is)
            resid.add(sq.weights[is] * std::log(uk.eval(sq.node(is), n)));
        out.normalization_residual.push_back(std::abs(resid.value() / area));

        // sup relative deviation on the reference annulus
        double sup = 0.0;
        for (int ir = 0; ir < probe_radial; ++ir) {
            double rr = ref_lo * std::pow(ref_hi / ref_lo, ir / double(probe_radial - 1));
            std::vector<double> x(n);
            for (std::size_t is = 0; is < sq.count(); ++is) {
                const double* node = sq.node(is);
                for (int i = 0; i < n; ++i) x[i] = rr * node[i];
                double m = model.eval(x.data(), n);
                sup = std::max(sup, std::abs(uk.eval(x.data(), n) / m - 1.0));
            }
        }
        out.r_k.push_back(rk);
        out.c_k.push_back(ck);
        out.u_k.push_back(uk);
        out.sup_rel_deviation.push_back(sup);
    }
    return out;
}

std::vector<double> distance_matrix_compare(
    const std::vector<std::pair<ConformalFactor, BackgroundMetric>>& metrics,
    const std::vector<std::vector<double>>& sample_points,
    const std::function<double(const double*, const double*)>& oracle,
    const GeodesicGridSpec& spec) {
    require(sample_points.size() >= 2, Errc::ValidationError, "need at least two sample points");
    std::vector<double> out;
    for (const auto& [u, g0] : metrics) {
        DistanceGraph graph(u, g0, spec);
        double sup = 0.0;
        for (std::size_t i = 0; i < sample_points.size(); ++i) {
            auto field = graph.distance_field(sample_points[i].data());
            for (std::size_t j = 0; j < sample_points.size(); ++j) {
                if (j == i) continue;
                double d = graph.eval_to_field(sample_points[j].data(), field);
                sup = std::max(sup,
                               std::abs(d - oracle(sample_points[i].data(), sample_points[j].data())));
            }
        }
        out.push_back(sup);
    }
    return out;
}

HypothesisAudit hypothesis_audit(const ConformalFactor& u, const BackgroundMetric& g0, double r0,
                                 int levels, int radial_count, const SphereQuadrature& sq) {
    require(levels >= 2, Errc::ValidationError, "need at least two levels");
    int n = g0.dim().n();
    CurvatureEvaluator ev(u, g0);
    HypothesisAudit out;
    for (int j = 0; j < levels; ++j) {
        double hi = r0 * std::pow(2.0, -j);
        auto grid = build_annulus_grid(0.5 * hi, hi, radial_count, sq);
        double vol = integrate([](const double*) { return 1.0; }, u, g0, grid, Measure::volume_g());
        double rm = integrate([&](const double* x) { return std::pow(std::abs(ev.at(x).R), 0.5 * n); },
                              u, g0, grid, Measure::volume_g());
        out.outer_radii.push_back(hi);
        out.annulus_volume_g.push_back(vol);
        out.r_mass.push_back(rm);
    }
    // volume diverging if inward annulus volumes stay bounded away from zero
    double first = out.annulus_volume_g.front();
    double last = out.annulus_volume_g.back();
    out.volume_diverging = last > 0.25 * first;
    for (std::size_t j = out.r_mass.size() / 2; j < out.r_mass.size(); ++j)
        out.r_mass_tail += out.r_mass[j];
    return out;
}

}  // namespace confmet

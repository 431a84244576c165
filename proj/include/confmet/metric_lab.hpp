#pragma once

#include <string>
#include <vector>

#include "confmet/distance_graph.hpp"
#include "confmet/integrate.hpp"

namespace confmet {

/// Exact distance for g_inf = |x|^{-4/(n-2)*(n-2)} ... i.e. the inversion
/// model u = |x|^{2-n}: d(x, y) = | x/|x|^2 - y/|y|^2 |.
double inversion_oracle_distance(const double* x, const double* y, int n);

/// Graph shortest-path distance (see DistanceGraph for the bias/convergence
/// story).
double geodesic_distance(const ConformalFactor& u, const BackgroundMetric& g0, const double* x,
                         const double* y, const GeodesicGridSpec& spec);

struct BallVolumeResult {
    double volume = 0.0;
    double reachable_fraction = 1.0;  // 1 - (frontier g-volume escaping the chart)/(total)
};

/// Volume of {d_graph(center, .) <= rho} with fractional frontier cells via
/// the local distance-field spread. Throws BallEscapesDomain (reporting the
/// reachable fraction) when more than `escape_tolerance` of the ball volume
/// sits on chart-boundary cells.
BallVolumeResult geodesic_ball_volume(const DistanceGraph& graph, const double* center, double rho,
                                      double escape_tolerance = 0.01);

struct VolumeDensityProfile {
    std::vector<double> rho;
    std::vector<double> ratio;          // vol / (V_n rho^n)
    std::vector<double> reachable;
    double trend_to_one = 0.0;          // |ratio-1| slope against log rho
};
VolumeDensityProfile volume_density_profile(const ConformalFactor& u, const BackgroundMetric& g0,
                                            const double* x0, const std::vector<double>& rhos,
                                            const GeodesicGridSpec& spec,
                                            double escape_tolerance = 0.02);

struct RatioEntry {
    std::string name;
    double computed = 0.0;
    double target = 0.0;   // closed-form model target (0 when only a band applies)
    double lo = 0.0, hi = 0.0;  // admissible band; [target,target] when exact
    double rel_err = 0.0;  // |computed-target|/|target| when target != 0
    bool in_band = false;
};

/// The nine decay ratios of the dyadic-annulus suite at radius r, against
/// their inversion-model targets. `alpha`/`beta` are the moment exponents of
/// the two integral ratios.
struct DecayRatioSuite {
    std::vector<RatioEntry> entries;
};
DecayRatioSuite decay_ratio_suite(const ConformalFactor& u, const BackgroundMetric& g0, double r,
                                  const GeodesicGridSpec& spec, const SphereQuadrature& sq,
                                  int radial_count, double alpha = 2.0, double beta = 0.0,
                                  int diam_sources = 8);

/// Rescaled factors u_k(x) = c_k r_k^{(n-2)/2} u(r_k x) with the log-mean
/// normalization on the unit sphere; deviations are measured against the
/// harmonic model |x|^{2-n} on the reference annulus.
struct BlowDownSequence {
    std::vector<double> r_k;
    std::vector<double> c_k;
    std::vector<Expr> u_k;
    std::vector<double> sup_rel_deviation;       // sup |u_k/|x|^{2-n} - 1|
    std::vector<double> normalization_residual;  // | mean_{S^{n-1}} log u_k |
};
BlowDownSequence blow_down(const Expr& u, const Dimension& dim, const std::vector<double>& r_ks,
                           double ref_lo, double ref_hi, const SphereQuadrature& sq,
                           int probe_radial = 17);

/// sup over sample-point pairs of |d_{g_k} - d_oracle| for a sequence of
/// metrics (factor, background).
std::vector<double> distance_matrix_compare(
    const std::vector<std::pair<ConformalFactor, BackgroundMetric>>& metrics,
    const std::vector<std::vector<double>>& sample_points,
    const std::function<double(const double*, const double*)>& oracle,
    const GeodesicGridSpec& spec);

/// Volume-divergence and scalar-curvature-mass audit on shrinking dyadic
/// annuli; run before attributing a failed theorem target to the theorem.
struct HypothesisAudit {
    std::vector<double> outer_radii;
    std::vector<double> annulus_volume_g;  // vol(B_r \ B_{r/2}, g)
    std::vector<double> r_mass;            // int |R|^{n/2} dV_g per annulus
    bool volume_diverging = false;         // inward volumes bounded away from 0
    double r_mass_tail = 0.0;              // sum over the inner half of levels
};
HypothesisAudit hypothesis_audit(const ConformalFactor& u, const BackgroundMetric& g0, double r0,
                                 int levels, int radial_count, const SphereQuadrature& sq);

}  // namespace confmet

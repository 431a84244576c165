#pragma once

#include <functional>

#include "confmet/background.hpp"
#include "confmet/conformal_factor.hpp"
#include "confmet/integrate.hpp"

namespace confmet {

/// A field on the half-cylinder [T0, T0+3L] x S^{n-1} obtained from the chart
/// change (t, theta) -> x = e^{-t} theta, with ghat = e^{2t} (pullback of g0).
/// For conformally flat backgrounds ghat = beta(t,theta) (dt^2 + g_S) with
/// beta = b^{4/(n-2)}(e^{-t} theta); flat backgrounds give the exact cylinder.
struct CylinderField {
    Dimension dim{3};
    double T0 = 0.0;
    double L = 0.0;

    std::function<double(double t, const double* theta)> v;
    std::function<double(double t, const double* theta)> ghat_conf;  // beta
    /// Laplacian of v in the exact cylinder metric dt^2 + g_S (analytic).
    std::function<double(double t, const double* theta)> lap_v;
    bool exact_cylinder = false;

    double segment_start(int i) const { return T0 + i * L; }  // i = 0..3

    /// -Delta_Q v + ((n-2)^2/4) v under the field's Laplacian evaluator.
    double cylinder_residual(double t, const double* theta) const;
};

/// v(t,theta) = u(e^{-t} theta) e^{-(n-2)t/2} on [T0, T0+3L], T0 = -log r_anchor.
CylinderField to_cylinder(const ConformalFactor& u, const BackgroundMetric& g0, double r_anchor,
                          double L);

/// v = e^{lambda t} Y_l(theta), lambda = sign sqrt((n-2)^2/4 + l(l+n-2)):
/// the separable solutions of -Delta v + ((n-2)^2/4) v = 0 on the cylinder.
/// (Sign-changing for l >= 1; the positivity invariant applies to fields that
/// come from conformal factors, not to these test solutions.)
CylinderField separable_solution(const Dimension& dim, int l, int sign, double L, double T0 = 0.0);

double separable_lambda(int n, int l, int sign);

/// a * (mode l, +) + b * (mode l, -): the two-dimensional solution space of a
/// fixed angular mode.
CylinderField separable_combination(const Dimension& dim, int l, double a, double b, double L,
                                    double T0 = 0.0);

struct EnergyTriple {
    double E1 = 0.0, E2 = 0.0, E3 = 0.0;
};

/// int_{t_lo}^{t_hi} int_S v^2 dV_ghat.
double segment_energy(const CylinderField& f, double t_lo, double t_hi, const SphereQuadrature& sq,
                      int t_panels = 16);

EnergyTriple segment_energies(const CylinderField& f, const SphereQuadrature& sq,
                              int t_panels = 16);

enum class ThreeCircleVerdict { LeftDecay, RightDecay, Both, Violation };

const char* verdict_name(ThreeCircleVerdict v);

/// LeftDecay  iff E2 <= e^{-L} E1, RightDecay iff E2 <= e^{-L} E3 (Both when
/// both hold; comparisons take a 1e-12 relative slack so exact borderline
/// modes do not flip on rounding).
ThreeCircleVerdict three_circle_classify(const EnergyTriple& e, double L);

/// ratio of int_{B_r \ B_{r/theta}} u^2/|x|^2 dV_{g0} to the next inner
/// annulus [r/theta^2, r/theta].
double annulus_energy_ratio(const ConformalFactor& u, const BackgroundMetric& g0, double r,
                            double theta, int radial_count, const SphereQuadrature& sq);

/// Measured hypothesis proxies of the perturbed three-circle theorem:
/// the L^{n/2} mass of f = c(n) R(g') v^{4/(n-2)} over the cylinder window and
/// the sup deviation of ghat from the product cylinder metric.
struct CylinderHypothesisAudit {
    double f_lp = 0.0;
    double metric_deviation = 0.0;
};
CylinderHypothesisAudit cylinder_hypothesis_audit(const ConformalFactor& u,
                                                  const BackgroundMetric& g0, double r_anchor,
                                                  double L, int radial_count,
                                                  const SphereQuadrature& sq);

}  // namespace confmet

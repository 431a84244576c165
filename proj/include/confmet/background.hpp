#pragma once

#include <functional>
#include <memory>

#include "confmet/dimension.hpp"
#include "confmet/expr.hpp"

namespace confmet {

enum class BackgroundKind { Flat, RoundSphereChart, Sampled };

/// The background metric g0 in a chart around the puncture. Flat and the
/// round-sphere chart are conformally flat with a closed-form factor
/// (g0 = b^{4/(n-2)} delta), which is what the curvature pipeline exploits;
/// a Sampled background carries component and curvature evaluators supplied
/// by the caller.
///
/// The round chart is normalized so g0(0) = delta (chart respects the
/// normal-coordinate convention |g0_ij - delta_ij| <= c|x|^2):
/// g0 = (1 + |x|^2/4)^{-2} delta, unit sectional curvature, R(g0) = n(n-1).
class BackgroundMetric {
  public:
    using ComponentsFn = std::function<void(const double* x, double* g_out)>;  // row-major n*n
    using ScalarFn = std::function<double(const double* x)>;
    using RicciFn = std::function<void(const double* x, double* ric_out)>;  // row-major n*n

    static BackgroundMetric flat(const Dimension& dim);
    static BackgroundMetric round_sphere_chart(const Dimension& dim);
    static BackgroundMetric sampled(const Dimension& dim, ComponentsFn components,
                                    ScalarFn scalar_curvature, RicciFn ricci);

    BackgroundKind kind() const { return kind_; }
    const Dimension& dim() const { return dim_; }
    bool conformally_flat() const { return kind_ != BackgroundKind::Sampled; }

    /// Conformal-to-flat factor b with g0 = b^{4/(n-2)} delta.
    const Expr& flat_factor() const;

    /// g0_ij(x), row-major n*n.
    void components(const double* x, double* out) const;

    double scalar_curvature(const double* x) const;
    void ricci(const double* x, double* out) const;

    /// sqrt(det g0) at x.
    double volume_density(const double* x) const;

    /// Theta with dS_{g0} = Theta dS^{n-1} on the coordinate sphere through x.
    double sphere_density(const double* x) const;
    /// Theta as an expression (conformally flat kinds only).
    Expr theta_expr() const;

    // Closed-form dimension-4 background quantities for the analytic kinds.
    double q_curvature0(const double* x) const;        // Q(g0)
    double pfaffian_density0(const double* x) const;   // Pf(g0) density per dV_{g0}
    double laplacian_scalar_curvature0(const double* x) const;  // Delta_{g0} R(g0)
    double weyl_sq0(const double* x) const;            // |W(g0)|^2

  private:
    BackgroundMetric(BackgroundKind k, Dimension d) : kind_(k), dim_(d) {}

    BackgroundKind kind_;
    Dimension dim_;
    Expr flat_factor_;  // b, valid for conformally flat kinds
    ComponentsFn components_;
    ScalarFn scalar_;
    RicciFn ricci_;
};

}  // namespace confmet

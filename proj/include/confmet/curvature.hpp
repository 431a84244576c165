#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "confmet/annulus_grid.hpp"
#include "confmet/background.hpp"
#include "confmet/conformal_factor.hpp"

namespace confmet {

/// Analytic per-point curvature evaluator for g = u^{4/(n-2)} g0 with a
/// conformally flat background. Everything reduces to the effective factor
/// U = u * b against the flat metric, g = e^{2w} delta with w = 2/(n-2) log U:
///
///   Ric_ij  = -(n-2)(w_ij - w_i w_j) - (Lap w + (n-2)|grad w|^2) delta_ij
///   |Riem|^2 = e^{-4w} (4(n-2)|B|^2 + 4 (tr B)^2),  B = Hess w - dw dw + |dw|^2/2 delta
///   R       = -Lap U / (c(n) U^{(n+2)/(n-2)})   (independent route, Yamabe identity)
///   |W|^2   = 0 (conformally flat), cross-checked by the Kulkarni-Nomizu split.
class CurvatureEvaluator {
  public:
    CurvatureEvaluator(const ConformalFactor& u, const BackgroundMetric& g0);

    const Dimension& dim() const { return dim_; }

    struct Point {
        double R = 0.0;
        Eigen::MatrixXd ric;      // covariant components Ric_ij
        double ric_sq = 0.0;      // |Ric|_g^2
        double riem_sq = 0.0;     // |Riem|_g^2
        double weyl_sq = 0.0;     // |W|_g^2
        double vol_density = 0.0; // dV_g / dx
        double U = 0.0;           // effective flat-conformal factor
    };

    Point at(const double* x) const;

    /// Sampled-factor route: same formulas fed by a finite-difference jet of u
    /// at a grid node of the field's own grid.
    Point at_node(std::size_t ir, std::size_t is) const;

    /// |grad_g R|-free scalar pieces needed by fourth-order operators; only
    /// for expression factors. R(g) as an expression in x.
    const Expr& scalar_curvature_expr() const;
    /// Delta_g R(g) as an expression in x (needs four derivatives of u).
    const Expr& laplacian_scalar_curvature_expr() const;

    bool expression_route() const { return u_.is_expression(); }
    const ConformalFactor& factor() const { return u_; }
    const BackgroundMetric& background() const { return g0_; }

  private:
    Point from_jet(double Uval, const double* dU, const double* d2U) const;

    ConformalFactor u_;
    BackgroundMetric g0_;
    Dimension dim_;

    // Expression route: derivative tables of U.
    Expr U_;
    std::vector<Expr> dU_;
    std::vector<Expr> d2U_;  // row-major upper triangle flattened to full n*n
    mutable std::optional<Expr> R_expr_;
    mutable std::optional<Expr> lapR_expr_;
};

/// Pointwise curvature fields over a grid. Edge layers are flagged (and
/// excluded from integrals) when the factor is sampled.
struct CurvatureBundle {
    Dimension dim;
    std::vector<double> R;
    std::vector<double> ric;        // n*n per point
    std::vector<double> ric_sq;
    std::vector<double> riem_sq;
    std::vector<double> weyl_sq;
    std::vector<double> vol_density;
    std::vector<unsigned char> edge;  // 1 on excluded layers

    std::size_t point_count() const { return R.size(); }
};

CurvatureBundle curvature_bundle(const ConformalFactor& u, const BackgroundMetric& g0,
                                 const AnnulusGrid& grid);

/// Metric components u^{4/(n-2)} g0_ij at x (symmetric positive definite).
Eigen::MatrixXd conformal_metric_at(const ConformalFactor& u, const BackgroundMetric& g0,
                                    const double* x);

/// R(g) at x via the conformal scalar-curvature identity against g0 itself:
/// R(g) = [-Lap_{g0} u + c(n) R(g0) u] / (c(n) u^{(n+2)/(n-2)}).
double scalar_curvature_conformal(const ConformalFactor& u, const BackgroundMetric& g0,
                                  const double* x);

}  // namespace confmet

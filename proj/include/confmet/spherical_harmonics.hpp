#pragma once

#include "confmet/expr.hpp"

namespace confmet {

/// Low-degree spherical harmonics on S^{n-1} realized as harmonic homogeneous
/// polynomials restricted to the sphere: P_0 = 1, P_1 = x1, P_2 = x1 x2,
/// P_3 = x1 x2 x3 (mode l needs n >= l coordinates; l <= 3 supported).
/// Eigenvalue of -Delta_{S^{n-1}} on mode l: l (l + n - 2).
double sphere_harmonic(int n, int l, const double* unit_theta);

/// P_l(x) as an expression (homogeneous of degree l, harmonic).
Expr harmonic_polynomial(int l);

/// Y_l(x/|x|) = P_l(x) / |x|^l as an expression.
Expr sphere_harmonic_expr(int l);

double harmonic_eigenvalue(int n, int l);

}  // namespace confmet

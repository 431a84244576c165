#include "confmet/spherical_harmonics.hpp"

#include "confmet/errors.hpp"

namespace confmet {

double sphere_harmonic(int n, int l, const double* unit_theta) {
    require(l >= 0 && l <= 3, Errc::ValidationError, "harmonic modes implemented for l <= 3");
    require(l <= n, Errc::ValidationError, "mode l needs n >= l coordinates");
    double v = 1.0;
    for (int i = 0; i < l; ++i) v *= unit_theta[i];
    return v;
}

Expr harmonic_polynomial(int l) {
    require(l >= 0 && l <= 3, Errc::ValidationError, "harmonic modes implemented for l <= 3");
    Expr p = Expr::constant(1.0);
    for (int i = 0; i < l; ++i) p = p * Expr::variable(i);
    return p;
}

Expr sphere_harmonic_expr(int l) {
    if (l == 0) return Expr::constant(1.0);
    return harmonic_polynomial(l) * Expr::absx().pow(-static_cast<double>(l));
}

double harmonic_eigenvalue(int n, int l) { return static_cast<double>(l) * (l + n - 2); }

}  // namespace confmet

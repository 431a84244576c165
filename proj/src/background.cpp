#include "confmet/background.hpp"

#include <cmath>

#include "confmet/errors.hpp"

namespace confmet {

BackgroundMetric BackgroundMetric::flat(const Dimension& dim) {
    BackgroundMetric b(BackgroundKind::Flat, dim);
    b.flat_factor_ = Expr::constant(1.0);
    return b;
}

BackgroundMetric BackgroundMetric::round_sphere_chart(const Dimension& dim) {
    BackgroundMetric b(BackgroundKind::RoundSphereChart, dim);
    // b = (1 + |x|^2/4)^{-(n-2)/2} so that b^{4/(n-2)} = (1+|x|^2/4)^{-2}.
    Expr base = Expr::constant(1.0) + Expr::constant(0.25) * Expr::absx() * Expr::absx();
    b.flat_factor_ = base.pow(-0.5 * (dim.n() - 2));
    return b;
}

BackgroundMetric BackgroundMetric::sampled(const Dimension& dim, ComponentsFn components,
                                           ScalarFn scalar_curvature, RicciFn ricci) {
    require(static_cast<bool>(components), Errc::ValidationError, "sampled background needs components");
    BackgroundMetric b(BackgroundKind::Sampled, dim);
    b.components_ = std::move(components);
    b.scalar_ = std::move(scalar_curvature);
    b.ricci_ = std::move(ricci);
    return b;
}

const Expr& BackgroundMetric::flat_factor() const {
    require(conformally_flat(), Errc::UnsupportedBackground,
            "sampled background has no closed-form conformal factor");
    return flat_factor_;
}

void BackgroundMetric::components(const double* x, double* out) const {
    int n = dim_.n();
    if (kind_ == BackgroundKind::Sampled) {
        components_(x, out);
        return;
    }
    double c = std::pow(flat_factor_.eval(x, n), dim_.conformal_exponent());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[i * n + j] = (i == j) ? c : 0.0;
}

double BackgroundMetric::scalar_curvature(const double* x) const {
    switch (kind_) {
        case BackgroundKind::Flat: return 0.0;
        case BackgroundKind::RoundSphereChart: return static_cast<double>(dim_.n() * (dim_.n() - 1));
        case BackgroundKind::Sampled:
            require(static_cast<bool>(scalar_), Errc::UnsupportedBackground,
                    "sampled background has no scalar curvature evaluator");
            return scalar_(x);
    }
    return 0.0;
}

void BackgroundMetric::ricci(const double* x, double* out) const {
    int n = dim_.n();
    switch (kind_) {
        case BackgroundKind::Flat:
            for (int i = 0; i < n * n; ++i) out[i] = 0.0;
            return;
        case BackgroundKind::RoundSphereChart: {
            // Einstein: Ric = (n-1) g0.
            components(x, out);
            for (int i = 0; i < n * n; ++i) out[i] *= (n - 1);
            return;
        }
        case BackgroundKind::Sampled:
            require(static_cast<bool>(ricci_), Errc::UnsupportedBackground,
                    "sampled background has no Ricci evaluator");
            ricci_(x, out);
            return;
    }
}

double BackgroundMetric::volume_density(const double* x) const {
    int n = dim_.n();
    if (kind_ == BackgroundKind::Sampled) {
        // det of the sampled components; n is small.
        std::vector<double> g(n * n);
        components_(x, g.data());
        // Cholesky-free determinant via Gaussian elimination.
        double det = 1.0;
        for (int k = 0; k < n; ++k) {
            double piv = g[k * n + k];
            require(piv > 0.0, Errc::EvalOutsideDomain, "background metric not positive definite");
            det *= piv;
            for (int i = k + 1; i < n; ++i) {
                double f = g[i * n + k] / piv;
                for (int j = k; j < n; ++j) g[i * n + j] -= f * g[k * n + j];
            }
        }
        return std::sqrt(det);
    }
    return std::pow(flat_factor_.eval(x, n), 2.0 * n / (n - 2));
}

double BackgroundMetric::sphere_density(const double* x) const {
    int n = dim_.n();
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) r2 += x[i] * x[i];
    double r = std::sqrt(r2);
    require(r > 0.0, Errc::OriginInput, "sphere density undefined at the origin");
    if (conformally_flat()) {
        double b = flat_factor_.eval(x, n);
        return std::pow(r, n - 1) * std::pow(b, 2.0 * (n - 1) / (n - 2));
    }
    // Sampled: r^{n-1} sqrt(det of induced metric on the unit-sphere tangent frame).
    std::vector<double> g(n * n);
    components_(x, g.data());
    // Build an orthonormal tangent basis of the sphere at x/r by Gram-Schmidt
    // of coordinate axes against the radial direction.
    std::vector<double> basis;  // (n-1) x n
    std::vector<double> radial(n);
    for (int i = 0; i < n; ++i) radial[i] = x[i] / r;
    for (int axis = 0; axis < n && static_cast<int>(basis.size()) < (n - 1) * n; ++axis) {
        std::vector<double> v(n, 0.0);
        v[axis] = 1.0;
        double dr = 0.0;
        for (int i = 0; i < n; ++i) dr += v[i] * radial[i];
        for (int i = 0; i < n; ++i) v[i] -= dr * radial[i];
        for (std::size_t b = 0; b + n <= basis.size() + 0; b += n) {
            double d = 0.0;
            for (int i = 0; i < n; ++i) d += v[i] * basis[b + i];
            for (int i = 0; i < n; ++i) v[i] -= d * basis[b + i];
        }
        double norm = 0.0;
        for (int i = 0; i < n; ++i) norm += v[i] * v[i];
        if (norm < 1e-20) continue;
        norm = std::sqrt(norm);
        for (int i = 0; i < n; ++i) basis.push_back(v[i] / norm);
    }
    int m = static_cast<int>(basis.size()) / n;
    require(m == n - 1, Errc::InternalError, "failed to build sphere tangent frame");
    std::vector<double> induced(m * m, 0.0);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) s += basis[a * n + i] * g[i * n + j] * basis[b * n + j];
            induced[a * m + b] = s;
        }
    double det = 1.0;
    for (int k = 0; k < m; ++k) {
        double piv = induced[k * m + k];
        require(piv > 0.0, Errc::EvalOutsideDomain, "induced sphere metric not positive definite");
        det *= piv;
        for (int i = k + 1; i < m; ++i) {
            double f = induced[i * m + k] / piv;
            for (int j = k; j < m; ++j) induced[i * m + j] -= f * induced[k * m + j];
        }
    }
    return std::pow(r, n - 1) * std::sqrt(det);
}

Expr BackgroundMetric::theta_expr() const {
    require(conformally_flat(), Errc::UnsupportedBackground,
            "Theta expression needs a conformally flat background");
    int n = dim_.n();
    return Expr::absx().pow(n - 1) * flat_factor_.pow(2.0 * (n - 1) / (n - 2));
}

double BackgroundMetric::q_curvature0(const double*) const {
    require(dim_.n() == 4, Errc::WrongDimension, "Q(g0) is a dimension-4 quantity");
    switch (kind_) {
        case BackgroundKind::Flat: return 0.0;
        case BackgroundKind::RoundSphereChart: return 3.0;  // -(1/4)*36 + (1/12)*144
        case BackgroundKind::Sampled:
            fail(Errc::UnsupportedBackground, "Q(g0) unavailable for sampled backgrounds");
    }
    return 0.0;
}

double BackgroundMetric::pfaffian_density0(const double*) const {
    require(dim_.n() == 4, Errc::WrongDimension, "Pf(g0) is a dimension-4 quantity");
    switch (kind_) {
        case BackgroundKind::Flat: return 0.0;
        case BackgroundKind::RoundSphereChart: return 3.0;  // (1/12)*144 - (1/4)*36
        case BackgroundKind::Sampled:
            fail(Errc::UnsupportedBackground, "Pf(g0) unavailable for sampled backgrounds");
    }
    return 0.0;
}

double BackgroundMetric::laplacian_scalar_curvature0(const double*) const {
    switch (kind_) {
        case BackgroundKind::Flat:
        case BackgroundKind::RoundSphereChart: return 0.0;  // constant scalar curvature
        case BackgroundKind::Sampled:
            fail(Errc::UnsupportedBackground, "Delta R(g0) unavailable for sampled backgrounds");
    }
    return 0.0;
}

double BackgroundMetric::weyl_sq0(const double*) const {
    switch (kind_) {
        case BackgroundKind::Flat:
        case BackgroundKind::RoundSphereChart: return 0.0;  // conformally flat
        case BackgroundKind::Sampled:
            fail(Errc::UnsupportedBackground, "|W(g0)|^2 unavailable for sampled backgrounds");
    }
    return 0.0;
}

}  // namespace confmet

#include "confmet/numerics.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "confmet/errors.hpp"

namespace confmet {

std::vector<double> uniform_composite_weights(std::size_t m, double h) {
    require(m >= 2, Errc::EmptyRegion, "need at least two nodes to integrate");
    std::vector<double> w(m, 0.0);
    std::size_t intervals = m - 1;
    if (intervals == 1) {
        w[0] = w[1] = 0.5 * h;
        return w;
    }
    if (intervals == 2) {
        w[0] = h / 3.0;
        w[1] = 4.0 * h / 3.0;
        w[2] = h / 3.0;
        return w;
    }
    // Even interval count: plain composite Simpson. Odd: Simpson on the first
    // part, 3/8 rule on the trailing three intervals.
    std::size_t simpson_intervals = (intervals % 2 == 0) ? intervals : intervals - 3;
    for (std::size_t k = 0; k + 2 <= simpson_intervals; k += 2) {
        w[k] += h / 3.0;
        w[k + 1] += 4.0 * h / 3.0;
        w[k + 2] += h / 3.0;
    }
    if (intervals % 2 != 0) {
        std::size_t s = simpson_intervals;
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    return w;
}

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights come from
// the first eigenvector components times the zeroth moment.
void golub_welsch(const std::vector<double>& a, const std::vector<double>& b, double mu0,
                  std::vector<double>& nodes, std::vector<double>& weights) {
    int m = static_cast<int>(a.size());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        J(i, i) = a[i];
        if (i + 1 < m) {
            double s = std::sqrt(b[i + 1]);
            J(i, i + 1) = s;
            J(i + 1, i) = s;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    nodes.resize(m);
    weights.resize(m);
    for (int i = 0; i < m; ++i) {
        nodes[i] = es.eigenvalues()(i);
        double v0 = es.eigenvectors()(0, i);
        weights[i] = mu0 * v0 * v0;
    }
}

}  // namespace

void gauss_jacobi(int m, double alpha, double beta, std::vector<double>& nodes,
                  std::vector<double>& weights) {
    require(m >= 1, Errc::InternalError, "gauss_jacobi needs m >= 1");
    require(alpha > -1.0 && beta > -1.0, Errc::InternalError, "jacobi exponents must be > -1");
    std::vector<double> a(m), b(m);
    double ab = alpha + beta;
    // mu0 = integral of (1-x)^alpha (1+x)^beta over [-1,1].
    double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
                 std::tgamma(ab + 2.0);
    for (int k = 0; k < m; ++k) {
        if (k == 0) {
            a[0] = (beta - alpha) / (ab + 2.0);
        } else {
            double den = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
            a[k] = (beta * beta - alpha * alpha) / den;
        }
        if (k == 0) {
            b[0] = 0.0;
        } else if (k == 1) {
            b[1] = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        } else {
            double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
            double den = (2.0 * k + ab) * (2.0 * k + ab) * (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0);
            b[k] = num / den;
        }
    }
    golub_welsch(a, b, mu0, nodes, weights);
}

void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights) {
    gauss_jacobi(m, 0.0, 0.0, nodes, weights);
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int panels,
                    int points_per_panel) {
    std::vector<double> xs, ws;
    gauss_legendre(points_per_panel, xs, ws);
    KahanSum acc;
    double hp = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double lo = a + p * hp;
        double mid = lo + 0.5 * hp;
        for (int q = 0; q < points_per_panel; ++q) {
            acc.add(0.5 * hp * ws[q] * f(mid + 0.5 * hp * xs[q]));
        }
    }
    return acc.value();
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, Errc::InternalError, "fit_slope needs >= 2 samples");
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace confmet

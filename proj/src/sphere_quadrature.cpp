#include "confmet/sphere_quadrature.hpp"

#include <cmath>

#include "confmet/errors.hpp"
#include "confmet/numerics.hpp"

namespace confmet {

std::vector<std::size_t> SphereQuadrature::axis_sizes() const {
    std::vector<std::size_t> s;
    for (const auto& t : polar_t) s.push_back(t.size());
    s.push_back(azimuth.size());
    return s;
}

std::size_t SphereQuadrature::flat_index(const std::vector<std::size_t>& idx) const {
    auto sizes = axis_sizes();
    require(idx.size() == sizes.size(), Errc::InternalError, "tensor index rank mismatch");
    std::size_t flat = 0;
    for (std::size_t a = 0; a < sizes.size(); ++a) {
        require(idx[a] < sizes[a], Errc::InternalError, "tensor index out of range");
        flat = flat * sizes[a] + idx[a];
    }
    return flat;
}

SphereQuadrature build_sphere_quadrature(const Dimension& dim, int degree) {
    int n = dim.n();
    require(n >= 3 && n <= 8, Errc::UnsupportedDimension,
            "sphere quadrature supports n in [3,8], got " + std::to_string(n));
    require(degree >= 2, Errc::ValidationError, "quadrature degree must be >= 2");

    SphereQuadrature q;
    q.n = n;
    q.degree = degree;

    int polar_points = (degree + 2) / 2;  // ceil((degree+1)/2)
    int azimuth_points = std::max(degree + 1, 4);

    // Polar angle i (1-based) carries weight sin^{n-1-i}(theta); in t = cos
    // theta that is the Jacobi weight (1-t^2)^{(k-1)/2} with k = n-1-i.
    for (int i = 1; i <= n - 2; ++i) {
        int k = n - 1 - i;
        double a = 0.5 * (k - 1);
        std::vector<double> t, w;
        gauss_jacobi(polar_points, a, a, t, w);
        q.polar_t.push_back(std::move(t));
        q.polar_w.push_back(std::move(w));
    }
    q.azimuth.resize(azimuth_points);
    for (int j = 0; j < azimuth_points; ++j) q.azimuth[j] = 2.0 * kPi * (j + 0.5) / azimuth_points;
    q.azimuth_weight = 2.0 * kPi / azimuth_points;

    // Flatten the tensor product; polar axes first, azimuth fastest.
    auto sizes = q.axis_sizes();
    std::size_t total = 1;
    for (auto s : sizes) total *= s;
    q.nodes.resize(total * n);
    q.weights.resize(total);

    std::vector<std::size_t> idx(sizes.size(), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        double weight = q.azimuth_weight;
        double sin_prod = 1.0;
        double* node = q.nodes.data() + flat * n;
        for (int i = 0; i < n - 2; ++i) {
            double t = q.polar_t[i][idx[i]];
            weight *= q.polar_w[i][idx[i]];
            node[i] = sin_prod * t;
            sin_prod *= std::sqrt(std::max(0.0, 1.0 - t * t));
        }
        double phi = q.azimuth[idx[sizes.size() - 1]];
        node[n - 2] = sin_prod * std::cos(phi);
        node[n - 1] = sin_prod * std::sin(phi);
        q.weights[flat] = weight;

        for (int a = static_cast<int>(sizes.size()) - 1; a >= 0; --a) {
            if (++idx[a] < sizes[a]) break;
            idx[a] = 0;
        }
    }
    return q;
}

}  // namespace confmet

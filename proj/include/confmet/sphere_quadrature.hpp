#pragma once

#include <cstddef>
#include <vector>

#include "confmet/dimension.hpp"

namespace confmet {

/// Quadrature on the unit sphere S^{n-1}, exact for spherical polynomials up
/// to the declared degree. Product Gauss-Jacobi in the polar angles (via
/// t = cos theta) and a uniform periodic rule in the azimuth; the tensor
/// structure is kept so sampled fields can take angular stencils.
struct SphereQuadrature {
    int n = 0;        // ambient dimension
    int degree = 0;   // declared polynomial exactness

    // Tensor axes: (n-2) polar angles then one azimuth. For each polar axis we
    // store t = cos(theta) nodes (increasing) and their Jacobi weights.
    std::vector<std::vector<double>> polar_t;
    std::vector<std::vector<double>> polar_w;
    std::vector<double> azimuth;  // phi values, uniform in [0, 2pi)
    double azimuth_weight = 0.0;

    // Flattened nodes (count x n, row-major unit vectors) and weights
    // (surface-measure units, summing to omega_{n-1}).
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t count() const { return weights.size(); }
    const double* node(std::size_t i) const { return nodes.data() + i * n; }

    /// Axis sizes of the tensor grid: n-2 polar counts then the azimuth count.
    std::vector<std::size_t> axis_sizes() const;
    /// Flat index of a tensor multi-index (same ordering as `nodes`).
    std::size_t flat_index(const std::vector<std::size_t>& idx) const;
};

/// Build the product quadrature. Supported dimensions: 3..8.
SphereQuadrature build_sphere_quadrature(const Dimension& dim, int degree);

}  // namespace confmet

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "confmet/annulus_grid.hpp"

namespace confmet {

/// Value + first/second Cartesian derivatives of a scalar field at a point.
struct Jet2 {
    double value = 0.0;
    std::vector<double> grad;   // n
    std::vector<double> hess;   // n*n, symmetric row-major
};

/// A positive scalar field sampled on an AnnulusGrid. Derivatives are finite
/// differences taken in the chart coordinates (log-radius, polar angles,
/// azimuth) and chain-ruled to Cartesian: 5-point 4th-order stencils on the
/// uniform log-radial axis, Fornberg stencils on the Gauss polar nodes,
/// periodic stencils in the azimuth.
class SampledField {
  public:
    SampledField(AnnulusGrid grid, std::vector<double> values);

    const AnnulusGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }

    double value_at_node(std::size_t ir, std::size_t is) const;

    /// True when the radial 5-point stencil does not fit around ir.
    bool radial_edge(std::size_t ir) const;

    /// Cartesian jet at a grid node. Throws StencilOutOfDomain on radial edge
    /// layers.
    Jet2 jet_at_node(std::size_t ir, std::size_t is) const;

    /// Interpolated value at an arbitrary chart point (cubic in log-radius,
    /// barycentric across the angular tensor axes).
    double value(const double* x) const;

  private:
    AnnulusGrid grid_;
    std::vector<double> values_;  // ir-major, sphere-flat minor

    struct Stencils;
    std::shared_ptr<const Stencils> stencils_;
};

/// Sample an evaluator on a grid (test and fixture helper).
SampledField sample_field(const AnnulusGrid& grid,
                          const std::function<double(const double*)>& f);

/// Finite-difference weights on arbitrary nodes (Fornberg), for the m-th
/// derivative at point z using all given nodes.
std::vector<double> fornberg_weights(double z, const std::vector<double>& nodes, int m);

/// Chart helpers shared with the geodesic grid: hyperspherical angles.
void unit_vector_from_angles(const std::vector<double>& angles, int n, double* out);
std::vector<double> angles_from_unit_vector(const double* u, int n);

}  // namespace confmet

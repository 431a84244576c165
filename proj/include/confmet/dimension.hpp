#pragma once

#include <cmath>

#include "confmet/errors.hpp"

namespace confmet {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Ambient dimension n >= 3 together with the constants that the conformal
/// calculus keeps reaching for.
class Dimension {
  public:
    explicit Dimension(int n) : n_(n) {
        require(n >= 3, Errc::UnsupportedDimension, "dimension must be >= 3, got " + std::to_string(n));
    }

    int n() const { return n_; }

    /// Exponent in g = u^{4/(n-2)} g0.
    double conformal_exponent() const { return 4.0 / (n_ - 2); }

    /// c(n) = (n-2)/(4(n-1)), the conformal-Laplacian normalization.
    double yamabe_constant() const { return (n_ - 2) / (4.0 * (n_ - 1)); }

    /// Area of the unit sphere S^{n-1}: omega_{n-1} = 2 pi^{n/2} / Gamma(n/2).
    double sphere_area() const { return 2.0 * std::pow(kPi, 0.5 * n_) / std::tgamma(0.5 * n_); }

    /// Volume of the unit euclidean n-ball: V_n = pi^{n/2} / Gamma(n/2 + 1).
    double ball_volume() const { return std::pow(kPi, 0.5 * n_) / std::tgamma(0.5 * n_ + 1.0); }

    bool operator==(const Dimension& o) const { return n_ == o.n_; }

  private:
    int n_;
};

}  // namespace confmet

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace confmet {

/// Neumaier-compensated accumulator. Integrals use it so that results do not
/// depend on harmless reorderings of grid traversal.
class KahanSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Composite Newton-Cotes weights on a uniform grid with m >= 2 nodes and
/// spacing h. Simpson where the interval count allows it, with a 3/8 block
/// when the count is odd; trapezoid only for m < 4.
std::vector<double> uniform_composite_weights(std::size_t m, double h);

/// Gauss-Legendre nodes/weights on [-1,1].
void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights);

/// Gauss-Jacobi nodes/weights on [-1,1] for weight (1-x)^alpha (1+x)^beta.
void gauss_jacobi(int m, double alpha, double beta, std::vector<double>& nodes,
                  std::vector<double>& weights);

/// Integrate f over [a,b] with composite Gauss-Legendre panels.
double integrate_gl(const std::function<double(double)>& f, double a, double b, int panels = 8,
                    int points_per_panel = 8);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace confmet

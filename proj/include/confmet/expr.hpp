#pragma once

#include <memory>
#include <string>
#include <vector>

namespace confmet {

namespace detail {
struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;
}  // namespace detail

/// Immutable scalar expression over points of R^n.
///
/// Atoms: constants, coordinates x1..xn, absx = |x|, rho_k = sqrt(sum_{i<=k} xi^2).
/// Combinators: sums, products, powers with constant exponent, log, exp.
/// Differentiation is symbolic, so curvature formulas that need four or five
/// derivatives of a factor stay noise-free.
class Expr {
  public:
    Expr();  // the zero expression

    static Expr constant(double v);
    static Expr variable(int i);  // 0-based coordinate index
    static Expr absx();
    static Expr rho(int k);  // rho_k, k >= 1 coordinates

    Expr operator+(const Expr& o) const;
    Expr operator-(const Expr& o) const;
    Expr operator*(const Expr& o) const;
    Expr operator/(const Expr& o) const;
    Expr operator-() const;

    Expr pow(double e) const;
    Expr log() const;
    Expr exp() const;

    double eval(const double* x, int n) const;
    double eval(const std::vector<double>& x) const { return eval(x.data(), static_cast<int>(x.size())); }

    /// Symbolic partial derivative with respect to coordinate i.
    Expr derivative(int i) const;

    /// The expression x -> this(c * x).
    Expr scale_argument(double c) const;

    bool is_constant() const;
    double constant_value() const;  // valid only if is_constant()

    /// Conservative positivity certificate (used for pow-merging and factor checks).
    bool known_positive() const;

    /// Highest coordinate index used (0 if none), 1-based; absx/rho do not count
    /// beyond their span.
    int max_coordinate() const;

    std::string to_string() const;

    bool same_as(const Expr& o) const;

    friend Expr operator*(double c, const Expr& e) { return Expr::constant(c) * e; }
    friend Expr operator+(double c, const Expr& e) { return Expr::constant(c) + e; }
    friend Expr operator-(double c, const Expr& e) { return Expr::constant(c) - e; }

  private:
    explicit Expr(detail::NodePtr n) : node_(std::move(n)) {}
    detail::NodePtr node_;
    friend class ExprBuilder;
};

/// Parse the scenario expression mini-language.
///
/// Identifiers: x1..x9, absx (alias abs(x)), rho_2..rho_9, n (bound to
/// `dimension_n`), pi. Operators: + - * / ^ with the usual precedence, ^ is
/// right-associative and needs a constant exponent. Functions: log(e), exp(e).
Expr parse_expression(const std::string& text, int dimension_n);

}  // namespace confmet

#pragma once

#include <memory>

#include "confmet/expr.hpp"
#include "confmet/sampled_field.hpp"

namespace confmet {

/// The conformal factor u with g = u^{4/(n-2)} g0: either a closed-form
/// expression (symbolic derivatives to any order) or a positive field sampled
/// on an annulus grid (finite-difference derivatives up to order two).
class ConformalFactor {
  public:
    static ConformalFactor expression(Expr u) {
        ConformalFactor f;
        f.expr_ = std::move(u);
        f.is_expr_ = true;
        return f;
    }

    static ConformalFactor sampled(std::shared_ptr<const SampledField> field) {
        ConformalFactor f;
        f.field_ = std::move(field);
        f.is_expr_ = false;
        return f;
    }

    bool is_expression() const { return is_expr_; }

    const Expr& expr() const {
        require(is_expr_, Errc::DerivativeUnavailable, "factor is sampled, not an expression");
        return expr_;
    }

    const SampledField& field() const {
        require(!is_expr_, Errc::InternalError, "factor is an expression, not sampled");
        return *field_;
    }

    double value(const double* x, int n) const {
        return is_expr_ ? expr_.eval(x, n) : field_->value(x);
    }

  private:
    ConformalFactor() = default;
    bool is_expr_ = true;
    Expr expr_;
    std::shared_ptr<const SampledField> field_;
};

}  // namespace confmet

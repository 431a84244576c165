#include "confmet/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "confmet/dimension.hpp"
#include "confmet/errors.hpp"

namespace confmet {
namespace detail {

enum class Kind { Const, Var, AbsX, Rho, Sum, Prod, Pow, Log, Exp };

struct ExprNode {
    Kind kind;
    double value = 0.0;   // Const value or Pow exponent
    int index = 0;        // Var coordinate (0-based) or Rho span k
    std::vector<NodePtr> kids;
};

namespace {

NodePtr make_const(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Const;
    n->value = v;
    return n;
}

const NodePtr kZero = make_const(0.0);
const NodePtr kOne = make_const(1.0);

bool is_const(const NodePtr& n, double v) {
    return n->kind == Kind::Const && n->value == v;
}

int kind_rank(Kind k) { return static_cast<int>(k); }

// Deterministic total order; canonical child ordering makes structural
// equality catch algebraically identical terms.
int compare(const NodePtr& a, const NodePtr& b) {
    if (a.get() == b.get()) return 0;
    if (kind_rank(a->kind) != kind_rank(b->kind)) return kind_rank(a->kind) < kind_rank(b->kind) ? -1 : 1;
    if (a->index != b->index) return a->index < b->index ? -1 : 1;
    if (a->value != b->value) return a->value < b->value ? -1 : 1;
    if (a->kids.size() != b->kids.size()) return a->kids.size() < b->kids.size() ? -1 : 1;
    for (std::size_t i = 0; i < a->kids.size(); ++i) {
        int c = compare(a->kids[i], b->kids[i]);
        if (c != 0) return c;
    }
    return 0;
}

bool equal(const NodePtr& a, const NodePtr& b) { return compare(a, b) == 0; }

bool node_known_positive(const NodePtr& n);

NodePtr make_var(int i) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Var;
    n->index = i;
    return n;
}

NodePtr make_absx() {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::AbsX;
    return n;
}

NodePtr make_rho(int k) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Rho;
    n->index = k;
    return n;
}

NodePtr make_sum(std::vector<NodePtr> kids);
NodePtr make_prod(std::vector<NodePtr> kids);
NodePtr make_pow(NodePtr base, double e);

NodePtr make_sum(std::vector<NodePtr> kids) {
    // Flatten, fold constants, group identical cores by coefficient.
    std::vector<NodePtr> flat;
    double cst = 0.0;
    auto absorb = [&](auto&& self, const NodePtr& k) -> void {
        if (k->kind == Kind::Sum) {
            for (const auto& c : k->kids) self(self, c);
        } else if (k->kind == Kind::Const) {
            cst += k->value;
        } else {
            flat.push_back(k);
        }
    };
    for (const auto& k : kids) absorb(absorb, k);

    // Split each term into coefficient * core.
    struct Term {
        double coef;
        NodePtr core;
    };
    std::vector<Term> terms;
    for (const auto& t : flat) {
        double coef = 1.0;
        NodePtr core = t;
        if (t->kind == Kind::Prod && !t->kids.empty() && t->kids.front()->kind == Kind::Const) {
            coef = t->kids.front()->value;
            std::vector<NodePtr> rest(t->kids.begin() + 1, t->kids.end());
            core = rest.size() == 1 ? rest.front() : make_prod(std::move(rest));
        }
        bool merged = false;
        for (auto& existing : terms) {
            if (equal(existing.core, core)) {
                existing.coef += coef;
                merged = true;
                break;
            }
        }
        if (!merged) terms.push_back({coef, core});
    }

    std::vector<NodePtr> out;
    for (auto& t : terms) {
        if (t.coef == 0.0) continue;
        if (t.coef == 1.0)
            out.push_back(t.core);
        else
            out.push_back(make_prod({make_const(t.coef), t.core}));
    }
    if (cst != 0.0) out.push_back(make_const(cst));
    if (out.empty()) return kZero;
    if (out.size() == 1) return out.front();
    std::sort(out.begin(), out.end(), [](const NodePtr& a, const NodePtr& b) { return compare(a, b) < 0; });
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Sum;
    n->kids = std::move(out);
    return n;
}

NodePtr make_prod(std::vector<NodePtr> kids) {
    std::vector<NodePtr> flat;
    double cst = 1.0;
    auto absorb = [&](auto&& self, const NodePtr& k) -> void {
        if (k->kind == Kind::Prod) {
            for (const auto& c : k->kids) self(self, c);
        } else if (k->kind == Kind::Const) {
            cst *= k->value;
        } else {
            flat.push_back(k);
        }
    };
    for (const auto& k : kids) absorb(absorb, k);
    if (cst == 0.0) return kZero;

    // Merge factors sharing a base into powers. Integer exponents are safe for
    // any base; fractional merging needs a positivity certificate.
    struct Factor {
        NodePtr base;
        double expo;
    };
    std::vector<Factor> factors;
    auto base_of = [](const NodePtr& f) -> std::pair<NodePtr, double> {
        if (f->kind == Kind::Pow) return {f->kids.front(), f->value};
        return {f, 1.0};
    };
    for (const auto& f : flat) {
        auto [base, e] = base_of(f);
        bool merged = false;
        for (auto& existing : factors) {
            if (!equal(existing.base, base)) continue;
            double combined = existing.expo + e;
            bool ints = existing.expo == std::floor(existing.expo) && e == std::floor(e);
            if (ints || node_known_positive(base)) {
                existing.expo = combined;
                merged = true;
            }
            break;
        }
        if (!merged) factors.push_back({base, e});
    }

    std::vector<NodePtr> out;
    for (auto& f : factors) {
        NodePtr p = make_pow(f.base, f.expo);
        if (is_const(p, 1.0)) continue;
        if (p->kind == Kind::Const) {
            cst *= p->value;
            continue;
        }
        out.push_back(p);
    }
    if (out.empty()) return make_const(cst);
    std::sort(out.begin(), out.end(), [](const NodePtr& a, const NodePtr& b) { return compare(a, b) < 0; });
    if (cst != 1.0) out.insert(out.begin(), make_const(cst));
    if (out.size() == 1) return out.front();
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Prod;
    n->kids = std::move(out);
    return n;
}

NodePtr make_pow(NodePtr base, double e) {
    if (e == 0.0) return kOne;
    if (e == 1.0) return base;
    if (base->kind == Kind::Const) return make_const(std::pow(base->value, e));
    if (base->kind == Kind::Pow) {
        double inner = base->value;
        bool ints = inner == std::floor(inner) && inner * e == std::floor(inner * e);
        if (node_known_positive(base->kids.front()) || (ints && std::fmod(inner, 2.0) != 0.0)) {
            return make_pow(base->kids.front(), inner * e);
        }
    }
    if (base->kind == Kind::Exp) {
        // (e^f)^c = e^{c f}
        return [&] {
            auto n = std::make_shared<ExprNode>();
            n->kind = Kind::Exp;
            n->kids = {make_sum({}) /*placeholder*/};
            n->kids[0] = make_prod({make_const(e), base->kids.front()});
            return n;
        }();
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Pow;
    n->value = e;
    n->kids = {std::move(base)};
    return n;
}

NodePtr make_log(NodePtr f) {
    if (f->kind == Kind::Const) {
        require(f->value > 0.0, Errc::ValidationError, "log of non-positive constant");
        return make_const(std::log(f->value));
    }
    if (f->kind == Kind::Exp) return f->kids.front();
    if (f->kind == Kind::Pow && node_known_positive(f->kids.front())) {
        auto inner = std::make_shared<ExprNode>();
        inner->kind = Kind::Log;
        inner->kids = {f->kids.front()};
        return make_prod({make_const(f->value), inner});
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Log;
    n->kids = {std::move(f)};
    return n;
}

NodePtr make_exp(NodePtr f) {
    if (f->kind == Kind::Const) return make_const(std::exp(f->value));
    if (f->kind == Kind::Log) return f->kids.front();
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Exp;
    n->kids = {std::move(f)};
    return n;
}

bool node_known_positive(const NodePtr& n) {
    switch (n->kind) {
        case Kind::Const: return n->value > 0.0;
        case Kind::Var: return false;
        case Kind::AbsX:
        case Kind::Rho:
        case Kind::Exp: return true;
        case Kind::Log: return false;
        case Kind::Pow: return node_known_positive(n->kids.front());
        case Kind::Sum: {
            for (const auto& k : n->kids)
                if (!node_known_positive(k)) return false;
            return !n->kids.empty();
        }
        case Kind::Prod: {
            for (const auto& k : n->kids)
                if (!node_known_positive(k)) return false;
            return !n->kids.empty();
        }
    }
    return false;
}

double eval_node(const ExprNode* n, const double* x, int dim) {
    switch (n->kind) {
        case Kind::Const: return n->value;
        case Kind::Var:
            require(n->index < dim, Errc::EvalOutsideDomain,
                    "coordinate x" + std::to_string(n->index + 1) + " beyond dimension");
            return x[n->index];
        case Kind::AbsX: {
            double s = 0.0;
            for (int i = 0; i < dim; ++i) s += x[i] * x[i];
            return std::sqrt(s);
        }
        case Kind::Rho: {
            require(n->index <= dim, Errc::EvalOutsideDomain, "rho span beyond dimension");
            double s = 0.0;
            for (int i = 0; i < n->index; ++i) s += x[i] * x[i];
            return std::sqrt(s);
        }
        case Kind::Sum: {
            double s = 0.0;
            for (const auto& k : n->kids) s += eval_node(k.get(), x, dim);
            return s;
        }
        case Kind::Prod: {
            double p = 1.0;
            for (const auto& k : n->kids) p *= eval_node(k.get(), x, dim);
            return p;
        }
        case Kind::Pow: return std::pow(eval_node(n->kids.front().get(), x, dim), n->value);
        case Kind::Log: return std::log(eval_node(n->kids.front().get(), x, dim));
        case Kind::Exp: return std::exp(eval_node(n->kids.front().get(), x, dim));
    }
    return 0.0;
}

NodePtr diff_node(const NodePtr& n, int i) {
    switch (n->kind) {
        case Kind::Const: return kZero;
        case Kind::Var: return n->index == i ? kOne : kZero;
        case Kind::AbsX: return make_prod({make_var(i), make_pow(make_absx(), -1.0)});
        case Kind::Rho:
            if (i >= n->index) return kZero;
            return make_prod({make_var(i), make_pow(make_rho(n->index), -1.0)});
        case Kind::Sum: {
            std::vector<NodePtr> out;
            out.reserve(n->kids.size());
            for (const auto& k : n->kids) out.push_back(diff_node(k, i));
            return make_sum(std::move(out));
        }
        case Kind::Prod: {
            std::vector<NodePtr> terms;
            for (std::size_t j = 0; j < n->kids.size(); ++j) {
                std::vector<NodePtr> fac = n->kids;
                fac[j] = diff_node(n->kids[j], i);
                terms.push_back(make_prod(std::move(fac)));
            }
            return make_sum(std::move(terms));
        }
        case Kind::Pow: {
            NodePtr base = n->kids.front();
            NodePtr db = diff_node(base, i);
            if (is_const(db, 0.0)) return kZero;
            return make_prod({make_const(n->value), make_pow(base, n->value - 1.0), db});
        }
        case Kind::Log: {
            NodePtr f = n->kids.front();
            return make_prod({diff_node(f, i), make_pow(f, -1.0)});
        }
        case Kind::Exp: {
            auto self = std::const_pointer_cast<const ExprNode>(n);
            return make_prod({diff_node(n->kids.front(), i), self});
        }
    }
    return kZero;
}

NodePtr scale_node(const NodePtr& n, double c) {
    switch (n->kind) {
        case Kind::Const: return n;
        case Kind::Var: return make_prod({make_const(c), make_var(n->index)});
        case Kind::AbsX: return make_prod({make_const(std::abs(c)), make_absx()});
        case Kind::Rho: return make_prod({make_const(std::abs(c)), make_rho(n->index)});
        case Kind::Sum:
        case Kind::Prod: {
            std::vector<NodePtr> out;
            out.reserve(n->kids.size());
            for (const auto& k : n->kids) out.push_back(scale_node(k, c));
            return n->kind == Kind::Sum ? make_sum(std::move(out)) : make_prod(std::move(out));
        }
        case Kind::Pow: return make_pow(scale_node(n->kids.front(), c), n->value);
        case Kind::Log: return make_log(scale_node(n->kids.front(), c));
        case Kind::Exp: return make_exp(scale_node(n->kids.front(), c));
    }
    return n;
}

int max_coord_node(const NodePtr& n) {
    switch (n->kind) {
        case Kind::Const: return 0;
        case Kind::Var: return n->index + 1;
        case Kind::AbsX: return 0;
        case Kind::Rho: return n->index;
        default: {
            int m = 0;
            for (const auto& k : n->kids) m = std::max(m, max_coord_node(k));
            return m;
        }
    }
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string to_string_node(const NodePtr& n) {
    switch (n->kind) {
        case Kind::Const: return fmt_double(n->value);
        case Kind::Var: return "x" + std::to_string(n->index + 1);
        case Kind::AbsX: return "absx";
        case Kind::Rho: return "rho_" + std::to_string(n->index);
        case Kind::Sum: {
            std::string s = "(";
            for (std::size_t i = 0; i < n->kids.size(); ++i) {
                if (i) s += " + ";
                s += to_string_node(n->kids[i]);
            }
            return s + ")";
        }
        case Kind::Prod: {
            std::string s = "(";
            for (std::size_t i = 0; i < n->kids.size(); ++i) {
                if (i) s += " * ";
                s += to_string_node(n->kids[i]);
            }
            return s + ")";
        }
        case Kind::Pow: return to_string_node(n->kids.front()) + "^(" + fmt_double(n->value) + ")";
        case Kind::Log: return "log(" + to_string_node(n->kids.front()) + ")";
        case Kind::Exp: return "exp(" + to_string_node(n->kids.front()) + ")";
    }
    return "?";
}

}  // namespace
}  // namespace detail

using detail::NodePtr;

Expr::Expr() : node_(detail::kZero) {}

Expr Expr::constant(double v) { return Expr(detail::make_const(v)); }
Expr Expr::variable(int i) {
    require(i >= 0, Errc::ValidationError, "coordinate index must be >= 0");
    return Expr(detail::make_var(i));
}
Expr Expr::absx() { return Expr(detail::make_absx()); }
Expr Expr::rho(int k) {
    require(k >= 1, Errc::ValidationError, "rho span must be >= 1");
    return Expr(detail::make_rho(k));
}

Expr Expr::operator+(const Expr& o) const { return Expr(detail::make_sum({node_, o.node_})); }
Expr Expr::operator-(const Expr& o) const {
    return Expr(detail::make_sum({node_, detail::make_prod({detail::make_const(-1.0), o.node_})}));
}
Expr Expr::operator*(const Expr& o) const { return Expr(detail::make_prod({node_, o.node_})); }
Expr Expr::operator/(const Expr& o) const {
    return Expr(detail::make_prod({node_, detail::make_pow(o.node_, -1.0)}));
}
Expr Expr::operator-() const { return Expr(detail::make_prod({detail::make_const(-1.0), node_})); }

Expr Expr::pow(double e) const { return Expr(detail::make_pow(node_, e)); }
Expr Expr::log() const { return Expr(detail::make_log(node_)); }
Expr Expr::exp() const { return Expr(detail::make_exp(node_)); }

double Expr::eval(const double* x, int n) const { return detail::eval_node(node_.get(), x, n); }

Expr Expr::derivative(int i) const { return Expr(detail::diff_node(node_, i)); }

Expr Expr::scale_argument(double c) const {
    require(c != 0.0, Errc::ValidationError, "argument scale must be nonzero");
    return Expr(detail::scale_node(node_, c));
}

bool Expr::is_constant() const { return node_->kind == detail::Kind::Const; }
double Expr::constant_value() const {
    require(is_constant(), Errc::InternalError, "expression is not a constant");
    return node_->value;
}

bool Expr::known_positive() const { return detail::node_known_positive(node_); }

int Expr::max_coordinate() const { return detail::max_coord_node(node_); }

std::string Expr::to_string() const { return detail::to_string_node(node_); }

bool Expr::same_as(const Expr& o) const { return detail::equal(node_, o.node_); }

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Token {
    enum class Type { Number, Ident, Op, LParen, RParen, End } type;
    double number = 0.0;
    std::string text;
    int pos = 0;
};

class Lexer {
  public:
    explicit Lexer(const std::string& s) : s_(s) {}

    Token next() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
        Token t;
        t.pos = static_cast<int>(i_);
        if (i_ >= s_.size()) {
            t.type = Token::Type::End;
            return t;
        }
        char c = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t consumed = 0;
            t.number = std::stod(s_.substr(i_), &consumed);
            i_ += consumed;
            t.type = Token::Type::Number;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i_;
            while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
            t.text = s_.substr(i_, j - i_);
            i_ = j;
            t.type = Token::Type::Ident;
            return t;
        }
        if (c == '(') {
            ++i_;
            t.type = Token::Type::LParen;
            return t;
        }
        if (c == ')') {
            ++i_;
            t.type = Token::Type::RParen;
            return t;
        }
        if (std::string("+-*/^").find(c) != std::string::npos) {
            ++i_;
            t.type = Token::Type::Op;
            t.text = std::string(1, c);
            return t;
        }
        fail(Errc::ParseError, "unexpected character '" + std::string(1, c) + "' at column " +
                                  std::to_string(i_ + 1));
    }

  private:
    const std::string& s_;
    std::size_t i_ = 0;
};

class Parser {
  public:
    Parser(const std::string& text, int n) : lex_(text), n_(n) { advance(); }

    Expr parse() {
        Expr e = parse_sum();
        require(cur_.type == Token::Type::End, Errc::ParseError,
                "trailing input at column " + std::to_string(cur_.pos + 1));
        return e;
    }

  private:
    void advance() { cur_ = lex_.next(); }

    bool accept_op(const char* op) {
        if (cur_.type == Token::Type::Op && cur_.text == op) {
            advance();
            return true;
        }
        return false;
    }

    Expr parse_sum() {
        Expr e = parse_product();
        for (;;) {
            if (accept_op("+"))
                e = e + parse_product();
            else if (accept_op("-"))
                e = e - parse_product();
            else
                return e;
        }
    }

    Expr parse_product() {
        Expr e = parse_unary();
        for (;;) {
            if (accept_op("*"))
                e = e * parse_unary();
            else if (accept_op("/"))
                e = e / parse_unary();
            else
                return e;
        }
    }

    Expr parse_unary() {
        if (accept_op("-")) return -parse_unary();
        if (accept_op("+")) return parse_unary();
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (accept_op("^")) {
            Expr e = parse_unary();  // right-associative, unary minus allowed in exponent
            require(e.is_constant(), Errc::ValidationError,
                    "exponent must reduce to a constant, got " + e.to_string());
            return base.pow(e.constant_value());
        }
        return base;
    }

    Expr parse_atom() {
        Token t = cur_;
        if (t.type == Token::Type::Number) {
            advance();
            return Expr::constant(t.number);
        }
        if (t.type == Token::Type::LParen) {
            advance();
            Expr e = parse_sum();
            require(cur_.type == Token::Type::RParen, Errc::ParseError,
                    "expected ')' at column " + std::to_string(cur_.pos + 1));
            advance();
            return e;
        }
        if (t.type == Token::Type::Ident) {
            advance();
            return parse_ident(t);
        }
        fail(Errc::ParseError, "unexpected token at column " + std::to_string(t.pos + 1));
    }

    Expr parse_call_arg() {
        require(cur_.type == Token::Type::LParen, Errc::ParseError,
                "expected '(' at column " + std::to_string(cur_.pos + 1));
        advance();
        Expr e = parse_sum();
        require(cur_.type == Token::Type::RParen, Errc::ParseError,
                "expected ')' at column " + std::to_string(cur_.pos + 1));
        advance();
        return e;
    }

    Expr parse_ident(const Token& t) {
        const std::string& id = t.text;
        if (id == "n") return Expr::constant(static_cast<double>(n_));
        if (id == "pi") return Expr::constant(kPi);
        if (id == "absx") return Expr::absx();
        if (id == "log") return parse_call_arg().log();
        if (id == "exp") return parse_call_arg().exp();
        if (id == "abs") {
            // abs(x) is an alias for absx; only the whole point has an abs.
            require(cur_.type == Token::Type::LParen, Errc::ParseError,
                    "expected '(' after abs at column " + std::to_string(cur_.pos + 1));
            advance();
            require(cur_.type == Token::Type::Ident && cur_.text == "x", Errc::ValidationError,
                    "abs() takes the point 'x'; write abs(x) or absx");
            advance();
            require(cur_.type == Token::Type::RParen, Errc::ParseError,
                    "expected ')' at column " + std::to_string(cur_.pos + 1));
            advance();
            return Expr::absx();
        }
        if (id.size() >= 2 && id[0] == 'x' && std::isdigit(static_cast<unsigned char>(id[1]))) {
            int idx = std::stoi(id.substr(1));
            require(idx >= 1 && idx <= n_, Errc::ValidationError,
                    "coordinate " + id + " out of range for dimension " + std::to_string(n_));
            return Expr::variable(idx - 1);
        }
        if (id.rfind("rho_", 0) == 0) {
            int k = std::stoi(id.substr(4));
            require(k >= 1 && k <= n_, Errc::ValidationError,
                    "rho span " + id + " out of range for dimension " + std::to_string(n_));
            return Expr::rho(k);
        }
        fail(Errc::ValidationError, "unknown identifier '" + id + "'");
    }

    Lexer lex_;
    Token cur_;
    int n_;
};

}  // namespace

Expr parse_expression(const std::string& text, int dimension_n) {
    require(!text.empty(), Errc::ParseError, "empty expression");
    Parser p(text, dimension_n);
    return p.parse();
}

}  // namespace confmet

// expr.hpp — symbolic scalar fields on a coordinate chart of R^{2n}.
//
// FieldExpr is an immutable expression tree over chart coordinates, closed
// under arithmetic and exact symbolic differentiation.  Nodes are shared
// (shared_ptr DAG) and never mutated after construction, so trees are safe
// to evaluate from any number of threads.
//
// Univariate primitives carry a derivative order k and evaluate the k-th
// derivative of the primitive directly:
//
//   sin, cos      sin^{(k)}(t) = sin(t + k*pi/2)
//   exp           exp^{(k)} = exp
//   sqrt          d^k/dt^k t^{1/2} = (1/2)(1/2-1)...(1/2-k+1) t^{1/2-k}
//   expstep       s(t) = exp(-1/t) for t>0, 0 otherwise;
//                 s^{(k)}(t) = Q_k(1/t) exp(-1/t) with Q_{j+1} = v^2(Q_j - Q_j')
//   smoothstep    cubic 3t^2-2t^3 clamped to [0,1] (profile-backed)
//   profile       any piecewise-polynomial Profile
//
// The standard mollifier bump exp(-1/(1-t^2)) is exposed as bump(u), which
// expands to expstep(1-u^2); the chain rule then produces every derivative.
//
// Simplification is conservative: constant folding and 0/1 identities only,
// applied in the smart constructors.  Evaluation outside a primitive's
// domain (sqrt of a negative, division by zero) raises DomainError.

#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pblab/profile.hpp"

namespace pblab {

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

// ── Univariate primitives ─────────────────────────────────────────────────────

enum class Prim : std::uint8_t { Sin, Cos, Exp, Sqrt, ExpStep, Smoothstep, Custom };

namespace detail {

// Q_k polynomials for expstep: s^{(k)}(t) = Q_k(1/t) e^{-1/t}, Q_0 = 1,
// Q_{k+1}(v) = v^2 (Q_k(v) - Q_k'(v)).
inline const std::vector<std::vector<double>>& expstep_q_table() {
    static std::vector<std::vector<double>> table;
    static std::once_flag once;
    std::call_once(once, [] {
        table.push_back({1.0});
        for (int k = 0; k < 16; ++k) {
            const auto& q = table.back();
            std::vector<double> next(q.size() + 2, 0.0);
            for (std::size_t j = 0; j < q.size(); ++j) {
                next[j + 2] += q[j];                         // v^2 * Q_k
                if (j >= 1) next[j + 1] -= q[j] * double(j); // -v^2 * Q_k'
            }
            table.push_back(std::move(next));
        }
    });
    return table;
}

inline double expstep_deriv(int order, double t) {
    if (t <= 0.0) return 0.0;
    const double v = 1.0 / t;
    if (v >= 600.0) return 0.0;  // e^{-v} underflows past any Q_k growth
    const auto& table = expstep_q_table();
    if (order >= static_cast<int>(table.size()))
        throw DomainError("expstep: derivative order beyond table");
    const auto& q = table[static_cast<std::size_t>(order)];
    double poly = 0.0;
    for (std::size_t j = q.size(); j-- > 0;) poly = poly * v + q[j];
    return poly * std::exp(-v);
}

inline double sqrt_deriv(int order, double t) {
    if (order == 0) {
        if (t < 0.0) throw DomainError("sqrt: negative argument");
        return std::sqrt(t);
    }
    if (t <= 0.0) throw DomainError("sqrt: derivative at non-positive argument");
    double coeff = 1.0, e = 0.5;
    for (int j = 0; j < order; ++j) { coeff *= e; e -= 1.0; }
    return coeff * std::pow(t, 0.5 - order);
}

}  // namespace detail

// A primitive reference: builtin kind, or a shared Profile for Custom.
struct Primitive {
    Prim kind = Prim::Sin;
    std::shared_ptr<const Profile> profile;  // Custom / Smoothstep

    double eval_deriv(int order, double t) const {
        switch (kind) {
            case Prim::Sin: return std::sin(t + order * 1.5707963267948966);
            case Prim::Cos: return std::cos(t + order * 1.5707963267948966);
            case Prim::Exp: return std::exp(t);
            case Prim::Sqrt: return detail::sqrt_deriv(order, t);
            case Prim::ExpStep: return detail::expstep_deriv(order, t);
            case Prim::Smoothstep:
            case Prim::Custom: return profile->eval_deriv(order, t);
        }
        return 0.0;
    }

    std::string name() const {
        switch (kind) {
            case Prim::Sin: return "sin";
            case Prim::Cos: return "cos";
            case Prim::Exp: return "exp";
            case Prim::Sqrt: return "sqrt";
            case Prim::ExpStep: return "expstep";
            case Prim::Smoothstep: return "smoothstep";
            case Prim::Custom: return "profile";
        }
        return "?";
    }
};

inline Primitive smoothstep_primitive() {
    static const auto prof =
        std::make_shared<const Profile>(cubic_smoothstep_profile());
    return Primitive{Prim::Smoothstep, prof};
}

// ── Expression nodes ──────────────────────────────────────────────────────────

enum class Op : std::uint8_t { Const, Coord, Add, Sub, Mul, Div, Neg, Pow, Call };

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    Op op = Op::Const;
    double value = 0.0;   // Const
    int index = 0;        // Coord; Pow exponent
    Primitive prim;       // Call
    int deriv_order = 0;  // Call
    NodePtr a, b;
};

namespace detail {

inline NodePtr constant(double v) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Const;
    n->value = v;
    return n;
}

inline NodePtr coord(int i) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Coord;
    n->index = i;
    return n;
}

inline bool is_const(const NodePtr& n, double v) {
    return n->op == Op::Const && n->value == v;
}

inline NodePtr add(NodePtr a, NodePtr b) {
    if (a->op == Op::Const && b->op == Op::Const) return constant(a->value + b->value);
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Add; n->a = std::move(a); n->b = std::move(b);
    return n;
}

inline NodePtr neg(NodePtr a) {
    if (a->op == Op::Const) return constant(-a->value);
    if (a->op == Op::Neg) return a->a;
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Neg; n->a = std::move(a);
    return n;
}

inline NodePtr sub(NodePtr a, NodePtr b) {
    if (a->op == Op::Const && b->op == Op::Const) return constant(a->value - b->value);
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return neg(std::move(b));
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Sub; n->a = std::move(a); n->b = std::move(b);
    return n;
}

inline NodePtr mul(NodePtr a, NodePtr b) {
    if (a->op == Op::Const && b->op == Op::Const) return constant(a->value * b->value);
    if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (is_const(a, -1.0)) return neg(std::move(b));
    if (is_const(b, -1.0)) return neg(std::move(a));
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Mul; n->a = std::move(a); n->b = std::move(b);
    return n;
}

inline NodePtr div(NodePtr a, NodePtr b) {
    if (a->op == Op::Const && b->op == Op::Const && b->value != 0.0)
        return constant(a->value / b->value);
    if (is_const(b, 1.0)) return a;
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Div; n->a = std::move(a); n->b = std::move(b);
    return n;
}

inline NodePtr ipow(NodePtr a, int k) {
    if (k == 0) return constant(1.0);
    if (k == 1) return a;
    if (a->op == Op::Const) return constant(std::pow(a->value, k));
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Pow; n->a = std::move(a); n->index = k;
    return n;
}

inline NodePtr call(Primitive prim, int order, NodePtr arg) {
    if (arg->op == Op::Const)
        return constant(prim.eval_deriv(order, arg->value));
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Call; n->prim = std::move(prim); n->deriv_order = order;
    n->a = std::move(arg);
    return n;
}

inline double eval(const ExprNode* n, std::span<const double> pt) {
    switch (n->op) {
        case Op::Const: return n->value;
        case Op::Coord: return pt[static_cast<std::size_t>(n->index)];
        case Op::Add: return eval(n->a.get(), pt) + eval(n->b.get(), pt);
        case Op::Sub: return eval(n->a.get(), pt) - eval(n->b.get(), pt);
        case Op::Mul: return eval(n->a.get(), pt) * eval(n->b.get(), pt);
        case Op::Neg: return -eval(n->a.get(), pt);
        case Op::Div: {
            const double den = eval(n->b.get(), pt);
            if (den == 0.0) throw DomainError("division by zero");
            return eval(n->a.get(), pt) / den;
        }
        case Op::Pow: {
            const double base = eval(n->a.get(), pt);
            if (n->index < 0 && base == 0.0)
                throw DomainError("negative power of zero");
            double r = 1.0;
            int k = n->index < 0 ? -n->index : n->index;
            double x = base;
            while (k > 0) {  // binary exponentiation
                if (k & 1) r *= x;
                x *= x;
                k >>= 1;
            }
            return n->index < 0 ? 1.0 / r : r;
        }
        case Op::Call:
            return n->prim.eval_deriv(n->deriv_order, eval(n->a.get(), pt));
    }
    return 0.0;
}

inline NodePtr diff(const NodePtr& n, int i) {
    switch (n->op) {
        case Op::Const: return constant(0.0);
        case Op::Coord: return constant(n->index == i ? 1.0 : 0.0);
        case Op::Add: return add(diff(n->a, i), diff(n->b, i));
        case Op::Sub: return sub(diff(n->a, i), diff(n->b, i));
        case Op::Neg: return neg(diff(n->a, i));
        case Op::Mul:
            return add(mul(diff(n->a, i), n->b), mul(n->a, diff(n->b, i)));
        case Op::Div:
            // (a/b)' = a'/b - a b'/b^2
            return sub(div(diff(n->a, i), n->b),
                       div(mul(n->a, diff(n->b, i)), ipow(n->b, 2)));
        case Op::Pow:
            return mul(mul(constant(n->index), ipow(n->a, n->index - 1)),
                       diff(n->a, i));
        case Op::Call:
            return mul(call(n->prim, n->deriv_order + 1, n->a), diff(n->a, i));
    }
    return constant(0.0);
}

inline NodePtr substitute(const NodePtr& n, const std::vector<NodePtr>& repl) {
    switch (n->op) {
        case Op::Const: return n;
        case Op::Coord: return repl[static_cast<std::size_t>(n->index)];
        case Op::Add: return add(substitute(n->a, repl), substitute(n->b, repl));
        case Op::Sub: return sub(substitute(n->a, repl), substitute(n->b, repl));
        case Op::Mul: return mul(substitute(n->a, repl), substitute(n->b, repl));
        case Op::Div: return div(substitute(n->a, repl), substitute(n->b, repl));
        case Op::Neg: return neg(substitute(n->a, repl));
        case Op::Pow: return ipow(substitute(n->a, repl), n->index);
        case Op::Call: return call(n->prim, n->deriv_order, substitute(n->a, repl));
    }
    return n;
}

std::string print(const ExprNode* n, const std::vector<std::string>& names);

}  // namespace detail

// ── FieldExpr ─────────────────────────────────────────────────────────────────

// Default coordinate names for a chart: dim 2 -> (x, y); dim 4 -> (x, y, z, u);
// otherwise x1, y1, x2, y2, ...  The parser additionally accepts q/p aliases
// in dimension 2.
inline std::vector<std::string> default_coord_names(int dim) {
    if (dim == 2) return {"x", "y"};
    if (dim == 3) return {"x", "y", "z"};
    if (dim == 4) return {"x", "y", "z", "u"};
    std::vector<std::string> names;
    for (int i = 0; i < dim; i += 2) {
        names.push_back("x" + std::to_string(i / 2 + 1));
        names.push_back("y" + std::to_string(i / 2 + 1));
    }
    names.resize(static_cast<std::size_t>(dim));
    return names;
}

class FieldExpr {
public:
    FieldExpr() : dim_(0), root_(detail::constant(0.0)) {}
    FieldExpr(int dim, NodePtr root) : dim_(dim), root_(std::move(root)) {}

    static FieldExpr constant(int dim, double v) { return {dim, detail::constant(v)}; }
    static FieldExpr coordinate(int dim, int i) {
        if (i < 0 || i >= dim) throw DimensionError("coordinate index out of range");
        return {dim, detail::coord(i)};
    }

    int dim() const { return dim_; }
    const NodePtr& root() const { return root_; }
    bool is_zero() const { return root_->op == Op::Const && root_->value == 0.0; }

    double operator()(std::span<const double> pt) const {
        if (static_cast<int>(pt.size()) != dim_)
            throw DimensionError("evaluation point has wrong dimension");
        return detail::eval(root_.get(), pt);
    }
    double operator()(std::initializer_list<double> pt) const {
        return (*this)(std::span<const double>(pt.begin(), pt.size()));
    }

    // Exact symbolic partial derivative with respect to coordinate i (0-based).
    FieldExpr derivative(int i) const {
        if (i < 0 || i >= dim_) throw DimensionError("derivative index out of range");
        return {dim_, detail::diff(root_, i)};
    }

    // Replace each coordinate by the corresponding expression (all of
    // dimension new_dim).  Used to restrict fields to lines and to compose.
    FieldExpr substitute(const std::vector<FieldExpr>& repl, int new_dim) const {
        if (static_cast<int>(repl.size()) != dim_)
            throw DimensionError("substitute: replacement count mismatch");
        std::vector<NodePtr> nodes;
        nodes.reserve(repl.size());
        for (const auto& r : repl) {
            if (r.dim() != new_dim)
                throw DimensionError("substitute: replacement dim mismatch");
            nodes.push_back(r.root());
        }
        return {new_dim, detail::substitute(root_, nodes)};
    }

    std::string print(const std::vector<std::string>& names) const {
        return detail::print(root_.get(), names);
    }
    std::string print() const { return print(default_coord_names(dim_)); }

    friend FieldExpr operator+(const FieldExpr& a, const FieldExpr& b) {
        return combined(a, b, detail::add);
    }
    friend FieldExpr operator-(const FieldExpr& a, const FieldExpr& b) {
        return combined(a, b, detail::sub);
    }
    friend FieldExpr operator*(const FieldExpr& a, const FieldExpr& b) {
        return combined(a, b, detail::mul);
    }
    friend FieldExpr operator/(const FieldExpr& a, const FieldExpr& b) {
        return combined(a, b, detail::div);
    }
    friend FieldExpr operator-(const FieldExpr& a) {
        return {a.dim_, detail::neg(a.root_)};
    }
    friend FieldExpr operator*(double c, const FieldExpr& a) {
        return {a.dim_, detail::mul(detail::constant(c), a.root_)};
    }
    friend FieldExpr operator+(const FieldExpr& a, double c) {
        return {a.dim_, detail::add(a.root_, detail::constant(c))};
    }
    friend FieldExpr operator-(const FieldExpr& a, double c) {
        return {a.dim_, detail::sub(a.root_, detail::constant(c))};
    }

    FieldExpr pow(int k) const { return {dim_, detail::ipow(root_, k)}; }

private:
    template <typename F>
    static FieldExpr combined(const FieldExpr& a, const FieldExpr& b, F&& make) {
        if (a.dim_ != b.dim_)
            throw DimensionError("operands live on different charts");
        return {a.dim_, make(a.root_, b.root_)};
    }

    int dim_;
    NodePtr root_;
};

inline FieldExpr apply(Primitive prim, const FieldExpr& arg) {
    return {arg.dim(), detail::call(std::move(prim), 0, arg.root())};
}

inline FieldExpr sin(const FieldExpr& a) { return apply(Primitive{Prim::Sin, nullptr}, a); }
inline FieldExpr cos(const FieldExpr& a) { return apply(Primitive{Prim::Cos, nullptr}, a); }
inline FieldExpr exp(const FieldExpr& a) { return apply(Primitive{Prim::Exp, nullptr}, a); }
inline FieldExpr sqrt(const FieldExpr& a) { return apply(Primitive{Prim::Sqrt, nullptr}, a); }
inline FieldExpr expstep(const FieldExpr& a) { return apply(Primitive{Prim::ExpStep, nullptr}, a); }
inline FieldExpr smoothstep(const FieldExpr& a) { return apply(smoothstep_primitive(), a); }

// Standard mollifier bump exp(-1/(1-t^2)) on |t|<1, zero outside.
inline FieldExpr bump(const FieldExpr& a) {
    return expstep(FieldExpr::constant(a.dim(), 1.0) - a * a);
}

// C^infty step: 0 for t <= 0, 1 for t >= 1, strictly increasing between.
inline FieldExpr mollified_step(const FieldExpr& t) {
    const FieldExpr one = FieldExpr::constant(t.dim(), 1.0);
    return expstep(t) / (expstep(t) + expstep(one - t));
}

// C^infty window: 1 on |t| <= inner, 0 on |t| >= outer.
inline FieldExpr mollified_window(const FieldExpr& t, double inner, double outer) {
    const double w = outer - inner;
    const FieldExpr lo = (1.0 / w) * (FieldExpr::constant(t.dim(), outer) - t);
    const FieldExpr hi = (1.0 / w) * (FieldExpr::constant(t.dim(), outer) + t);
    return mollified_step(lo) * mollified_step(hi);
}

inline FieldExpr apply_profile(std::shared_ptr<const Profile> profile,
                               const FieldExpr& arg) {
    return apply(Primitive{Prim::Custom, std::move(profile)}, arg);
}

// ── Printer ───────────────────────────────────────────────────────────────────

namespace detail {

inline std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Precedence: Add/Sub 1, Mul/Div 2, Neg 3, Pow 4, atoms 5.
inline int precedence(const ExprNode* n) {
    switch (n->op) {
        case Op::Add: case Op::Sub: return 1;
        case Op::Mul: case Op::Div: return 2;
        case Op::Neg: return 3;
        case Op::Pow: return 4;
        default: return 5;
    }
}

inline std::string print_prec(const ExprNode* n, const std::vector<std::string>& names,
                              int parent) {
    const int prec = precedence(n);
    std::string s;
    switch (n->op) {
        case Op::Const: s = fmt_double(n->value); break;
        case Op::Coord: s = names[static_cast<std::size_t>(n->index)]; break;
        case Op::Add:
            s = print_prec(n->a.get(), names, 1) + " + " + print_prec(n->b.get(), names, 2);
            break;
        case Op::Sub:
            s = print_prec(n->a.get(), names, 1) + " - " + print_prec(n->b.get(), names, 2);
            break;
        case Op::Mul:
            s = print_prec(n->a.get(), names, 2) + "*" + print_prec(n->b.get(), names, 3);
            break;
        case Op::Div:
            s = print_prec(n->a.get(), names, 2) + "/" + print_prec(n->b.get(), names, 3);
            break;
        case Op::Neg:
            s = "-" + print_prec(n->a.get(), names, 3);
            break;
        case Op::Pow:
            s = print_prec(n->a.get(), names, 5) + "^" + std::to_string(n->index);
            break;
        case Op::Call: {
            s = n->prim.name();
            if (n->deriv_order > 0) s += "@" + std::to_string(n->deriv_order);
            s += "(" + print_prec(n->a.get(), names, 0) + ")";
            break;
        }
    }
    if (prec < parent) return "(" + s + ")";
    return s;
}

inline std::string print(const ExprNode* n, const std::vector<std::string>& names) {
    return print_prec(n, names, 0);
}

}  // namespace detail

}  // namespace pblab

#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "stratode/domain.hpp"
#include "stratode/errors.hpp"
#include "stratode/interval.hpp"
#include "stratode/modulus.hpp"
#include "stratode/rational.hpp"

namespace stratode {

enum class ExprKind { constant, var_t, var_y, add, sub, mul, div, sqrt, abs, min, max };

// Expression tree over {t, y1..yd, +, -, *, /, sqrt, |.|, min, max, constants}.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind;
    Rational value;  // constant
    int index = 0;   // var_y
    ExprPtr a, b;
};

inline ExprPtr expr_const(const Rational& c) {
    return std::make_shared<Expr>(Expr{ExprKind::constant, c, 0, nullptr, nullptr});
}
inline ExprPtr expr_t() {
    return std::make_shared<Expr>(Expr{ExprKind::var_t, 0, 0, nullptr, nullptr});
}
inline ExprPtr expr_y(int j) {
    return std::make_shared<Expr>(Expr{ExprKind::var_y, 0, j, nullptr, nullptr});
}
inline ExprPtr expr_node(ExprKind k, ExprPtr a, ExprPtr b = nullptr) {
    return std::make_shared<Expr>(Expr{k, 0, 0, std::move(a), std::move(b)});
}
inline ExprPtr operator+(ExprPtr a, ExprPtr b) {
    return expr_node(ExprKind::add, std::move(a), std::move(b));
}
inline ExprPtr operator-(ExprPtr a, ExprPtr b) {
    return expr_node(ExprKind::sub, std::move(a), std::move(b));
}
inline ExprPtr operator*(ExprPtr a, ExprPtr b) {
    return expr_node(ExprKind::mul, std::move(a), std::move(b));
}
inline ExprPtr operator/(ExprPtr a, ExprPtr b) {
    return expr_node(ExprKind::div, std::move(a), std::move(b));
}
inline ExprPtr expr_sqrt(ExprPtr a) { return expr_node(ExprKind::sqrt, std::move(a)); }
inline ExprPtr expr_abs(ExprPtr a) { return expr_node(ExprKind::abs, std::move(a)); }
inline ExprPtr expr_min(ExprPtr a, ExprPtr b) {
    return expr_node(ExprKind::min, std::move(a), std::move(b));
}
inline ExprPtr expr_max(ExprPtr a, ExprPtr b) {
    return expr_node(ExprKind::max, std::move(a), std::move(b));
}

// True when the expression maps rational inputs to rationals (no sqrt node).
inline bool expr_rational_valued(const ExprPtr& e) {
    if (!e) return true;
    if (e->kind == ExprKind::sqrt) return false;
    return expr_rational_valued(e->a) && expr_rational_valued(e->b);
}

inline Rational expr_eval_exact(const ExprPtr& e, const Rational& t,
                                const std::vector<Rational>& y) {
    switch (e->kind) {
        case ExprKind::constant: return e->value;
        case ExprKind::var_t: return t;
        case ExprKind::var_y: return y.at(e->index);
        case ExprKind::add: return expr_eval_exact(e->a, t, y) + expr_eval_exact(e->b, t, y);
        case ExprKind::sub: return expr_eval_exact(e->a, t, y) - expr_eval_exact(e->b, t, y);
        case ExprKind::mul: return expr_eval_exact(e->a, t, y) * expr_eval_exact(e->b, t, y);
        case ExprKind::div: {
            Rational d = expr_eval_exact(e->b, t, y);
            if (d == 0) throw evaluation_error("division by zero");
            return expr_eval_exact(e->a, t, y) / d;
        }
        case ExprKind::abs: return abs(expr_eval_exact(e->a, t, y));
        case ExprKind::min:
            return std::min(expr_eval_exact(e->a, t, y), expr_eval_exact(e->b, t, y));
        case ExprKind::max:
            return std::max(expr_eval_exact(e->a, t, y), expr_eval_exact(e->b, t, y));
        case ExprKind::sqrt:
            throw unsupported_error("sqrt has no exact rational value; use interval evaluation");
    }
    throw std::logic_error("unreachable");
}

inline Interval expr_eval(const ExprPtr& e, const Interval& t, const std::vector<Interval>& y,
                          long prec) {
    switch (e->kind) {
        case ExprKind::constant: return Interval::hull(e->value, prec);
        case ExprKind::var_t: return t;
        case ExprKind::var_y: return y.at(e->index);
        case ExprKind::add: return expr_eval(e->a, t, y, prec) + expr_eval(e->b, t, y, prec);
        case ExprKind::sub: return expr_eval(e->a, t, y, prec) - expr_eval(e->b, t, y, prec);
        case ExprKind::mul: return expr_eval(e->a, t, y, prec) * expr_eval(e->b, t, y, prec);
        case ExprKind::div: {
            Interval d = expr_eval(e->b, t, y, prec);
            if (d.contains_zero())
                throw evaluation_error("division by an interval containing zero");
            return divide(expr_eval(e->a, t, y, prec), d, prec);
        }
        case ExprKind::sqrt: {
            Interval v = expr_eval(e->a, t, y, prec);
            if (v.hi.sign() < 0) throw evaluation_error("sqrt of a negative interval");
            // Clamp outward-rounding noise below zero.
            if (v.lo.sign() < 0) v.lo = Dyadic(0);
            return sqrt_enclosure(v, prec);
        }
        case ExprKind::abs: return abs(expr_eval(e->a, t, y, prec));
        case ExprKind::min: return min(expr_eval(e->a, t, y, prec), expr_eval(e->b, t, y, prec));
        case ExprKind::max: return max(expr_eval(e->a, t, y, prec), expr_eval(e->b, t, y, prec));
    }
    throw std::logic_error("unreachable");
}

// Right-hand side given by expression trees on a rectangle, with optional
// modulus of continuity and field-bound hint.
struct FieldSpec {
    int dim = 1;
    std::vector<ExprPtr> comps;
    RectDomain domain;
    std::optional<ModulusSpec> modulus;
    std::optional<Rational> bound_hint;

    FieldSpec(std::vector<ExprPtr> c, RectDomain dom)
        : dim(static_cast<int>(c.size())), comps(std::move(c)), domain(std::move(dom)) {
        if (comps.empty()) throw std::domain_error("field needs at least one component");
        if (static_cast<int>(domain.box.size()) != dim)
            throw std::domain_error("field dimension does not match the domain box");
    }

    bool rational_valued() const {
        for (const auto& e : comps)
            if (!expr_rational_valued(e)) return false;
        return true;
    }

    std::vector<Rational> eval_exact(const Rational& t, const std::vector<Rational>& y) const {
        std::vector<Rational> out;
        out.reserve(comps.size());
        for (const auto& e : comps) out.push_back(expr_eval_exact(e, t, y));
        return out;
    }

    std::vector<Interval> eval(const Interval& t, const std::vector<Interval>& y,
                               long prec) const {
        std::vector<Interval> out;
        out.reserve(comps.size());
        for (const auto& e : comps) out.push_back(expr_eval(e, t, y, prec));
        return out;
    }
};

// Structural Lipschitz certificate over a rectangle: |f(t,y)-f(s,z)| <=
// in_t |t-s| + in_y ||y-z||_inf whenever both points lie in the rectangle.
struct LipschitzBounds {
    bool ok = false;
    Rational in_t = 0;
    Rational in_y = 0;
    Interval range;
};

namespace detail {

inline LipschitzBounds lipschitz_impl(const ExprPtr& e, const Interval& t,
                                      const std::vector<Interval>& y, long prec) {
    auto fail = [](Interval r) {
        LipschitzBounds lb;
        lb.ok = false;
        lb.range = std::move(r);
        return lb;
    };
    switch (e->kind) {
        case ExprKind::constant:
            return {true, 0, 0, Interval::hull(e->value, prec)};
        case ExprKind::var_t:
            return {true, 1, 0, t};
        case ExprKind::var_y:
            return {true, 0, 1, y.at(e->index)};
        case ExprKind::add:
        case ExprKind::sub: {
            LipschitzBounds A = lipschitz_impl(e->a, t, y, prec);
            LipschitzBounds B = lipschitz_impl(e->b, t, y, prec);
            Interval r = e->kind == ExprKind::add ? A.range + B.range : A.range - B.range;
            return {A.ok && B.ok, A.in_t + B.in_t, A.in_y + B.in_y, r};
        }
        case ExprKind::mul: {
            LipschitzBounds A = lipschitz_impl(e->a, t, y, prec);
            LipschitzBounds B = lipschitz_impl(e->b, t, y, prec);
            Rational Ma = A.range.mag(), Mb = B.range.mag();
            return {A.ok && B.ok, A.in_t * Mb + B.in_t * Ma, A.in_y * Mb + B.in_y * Ma,
                    A.range * B.range};
        }
        case ExprKind::div: {
            LipschitzBounds A = lipschitz_impl(e->a, t, y, prec);
            LipschitzBounds B = lipschitz_impl(e->b, t, y, prec);
            if (B.range.contains_zero())
                throw evaluation_error("division by an interval containing zero");
            Interval r = divide(A.range, B.range, prec);
            Rational Ma = A.range.mag(), Mb = B.range.mag();
            Rational m2 = B.range.mig() * B.range.mig();
            return {A.ok && B.ok, (A.in_t * Mb + B.in_t * Ma) / m2,
                    (A.in_y * Mb + B.in_y * Ma) / m2, r};
        }
        case ExprKind::sqrt: {
            LipschitzBounds A = lipschitz_impl(e->a, t, y, prec);
            Interval v = A.range;
            if (v.hi.sign() < 0) throw evaluation_error("sqrt of a negative interval");
            if (v.lo.sign() < 0) v.lo = Dyadic(0);
            Interval r = sqrt_enclosure(v, prec);
            // sqrt is Lipschitz only away from zero: slope 1/(2 sqrt(lo)).
            Rational lo_root = r.lo.to_rational();
            if (!A.ok || v.lo.sign() <= 0 || lo_root <= 0) return fail(r);
            return {true, A.in_t / (2 * lo_root), A.in_y / (2 * lo_root), r};
        }
        case ExprKind::abs: {
            LipschitzBounds A = lipschitz_impl(e->a, t, y, prec);
            return {A.ok, A.in_t, A.in_y, abs(A.range)};
        }
        case ExprKind::min:
        case ExprKind::max: {
            LipschitzBounds A = lipschitz_impl(e->a, t, y, prec);
            LipschitzBounds B = lipschitz_impl(e->b, t, y, prec);
            Interval r = e->kind == ExprKind::min ? min(A.range, B.range) : max(A.range, B.range);
            return {A.ok && B.ok, std::max(A.in_t, B.in_t), std::max(A.in_y, B.in_y), r};
        }
    }
    throw std::logic_error("unreachable");
}

} // namespace detail

// Lipschitz-in-both-variables certificate over the field's rectangle, or
// ok=false when the structural recursion cannot certify one.
inline LipschitzBounds lipschitz_bounds(const FieldSpec& f, long prec = 64) {
    Interval t = Interval::hull(f.domain.t_lo, f.domain.t_hi, prec);
    std::vector<Interval> y;
    for (const auto& [lo, hi] : f.domain.box) y.push_back(Interval::hull(lo, hi, prec));
    LipschitzBounds out{true, 0, 0, Interval(Dyadic(0))};
    bool first = true;
    for (const auto& e : f.comps) {
        LipschitzBounds c = detail::lipschitz_impl(e, t, y, prec);
        out.ok = out.ok && c.ok;
        out.in_t = std::max(out.in_t, c.in_t);
        out.in_y = std::max(out.in_y, c.in_y);
        out.range = first ? c.range
                          : Interval(min(out.range.lo, c.range.lo),
                                     max(out.range.hi, c.range.hi));
        first = false;
    }
    return out;
}

} // namespace stratode

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "stratode/interval.hpp"
#include "stratode/rational.hpp"

namespace stratode {

// Monomial t^a * y1^e1 * ... * yd^ed.
struct Monomial {
    unsigned t_exp = 0;
    std::vector<unsigned> y_exp;

    auto operator<=>(const Monomial&) const = default;

    unsigned total_degree() const {
        unsigned d = t_exp;
        for (unsigned e : y_exp) d += e;
        return d;
    }
};

// Polynomial in (t, y1..yd) with exact rational coefficients.
struct Polynomial {
    int dim = 1; // number of y variables
    std::map<Monomial, Rational> terms;

    explicit Polynomial(int d = 1) : dim(d) {}

    static Polynomial constant(const Rational& c, int dim) {
        Polynomial p(dim);
        if (c != 0) p.terms[Monomial{0, std::vector<unsigned>(dim, 0)}] = c;
        return p;
    }
    static Polynomial var_t(int dim) {
        Polynomial p(dim);
        p.terms[Monomial{1, std::vector<unsigned>(dim, 0)}] = 1;
        return p;
    }
    static Polynomial var_y(int j, int dim) {
        if (j < 0 || j >= dim) throw std::domain_error("variable index out of range");
        Polynomial p(dim);
        Monomial m{0, std::vector<unsigned>(dim, 0)};
        m.y_exp[j] = 1;
        p.terms[m] = 1;
        return p;
    }

    void add_term(Monomial m, const Rational& c) {
        auto it = terms.find(m);
        if (it == terms.end()) {
            if (c != 0) terms.emplace(std::move(m), c);
        } else {
            it->second += c;
            if (it->second == 0) terms.erase(it);
        }
    }

    bool is_zero() const { return terms.empty(); }
    bool depends_on_t() const {
        for (const auto& [m, c] : terms)
            if (m.t_exp > 0) return true;
        return false;
    }
    unsigned degree() const {
        unsigned d = 0;
        for (const auto& [m, c] : terms) d = std::max(d, m.total_degree());
        return d;
    }

    Rational eval(const Rational& t, const std::vector<Rational>& y) const {
        Rational sum = 0;
        for (const auto& [m, c] : terms) {
            Rational v = c * pow_int(t, m.t_exp);
            for (int j = 0; j < dim; ++j)
                if (m.y_exp[j]) v *= pow_int(y[j], m.y_exp[j]);
            sum += v;
        }
        return sum;
    }

    Interval eval(const Interval& t, const std::vector<Interval>& y) const {
        Interval sum(Dyadic(0));
        for (const auto& [m, c] : terms) {
            Interval v = Interval::hull(c, 64) * pow_int(t, m.t_exp);
            for (int j = 0; j < dim; ++j)
                if (m.y_exp[j]) v = v * pow_int(y[j], m.y_exp[j]);
            sum = sum + v;
        }
        return sum;
    }

    // d/dy_j.
    Polynomial jacobian_entry(int j) const {
        Polynomial out(dim);
        for (const auto& [m, c] : terms) {
            if (m.y_exp[j] == 0) continue;
            Monomial dm = m;
            dm.y_exp[j] -= 1;
            out.add_term(std::move(dm), c * Rational(m.y_exp[j]));
        }
        return out;
    }

    // Majorant on the complex polydisc of radius r around (t_c, y_c):
    // sum |c| (|t_c|+r)^a prod (|y_cj|+r)^ej bounds |P| there.
    Rational majorant(const Rational& t_c, const std::vector<Rational>& y_c,
                      const Rational& r) const {
        Rational t_abs = abs(t_c) + r;
        Rational sum = 0;
        for (const auto& [m, c] : terms) {
            Rational v = abs(c) * pow_int(t_abs, m.t_exp);
            for (int j = 0; j < dim; ++j)
                if (m.y_exp[j]) v *= pow_int(abs(y_c[j]) + r, m.y_exp[j]);
            sum += v;
        }
        return sum;
    }
};

inline Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    if (a.dim != b.dim) throw std::domain_error("polynomial dimension mismatch");
    Polynomial r = a;
    for (const auto& [m, c] : b.terms) r.add_term(m, c);
    return r;
}
inline Polynomial operator-(const Polynomial& a) {
    Polynomial r = a;
    for (auto& [m, c] : r.terms) c = -c;
    return r;
}
inline Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
inline Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.dim != b.dim) throw std::domain_error("polynomial dimension mismatch");
    Polynomial r(a.dim);
    for (const auto& [ma, ca] : a.terms)
        for (const auto& [mb, cb] : b.terms) {
            Monomial m{ma.t_exp + mb.t_exp, ma.y_exp};
            for (int j = 0; j < a.dim; ++j) m.y_exp[j] += mb.y_exp[j];
            r.add_term(std::move(m), ca * cb);
        }
    return r;
}
inline Polynomial operator*(const Rational& c, const Polynomial& a) {
    return Polynomial::constant(c, a.dim) * a;
}
inline Polynomial pow_int(const Polynomial& a, unsigned e) {
    Polynomial r = Polynomial::constant(1, a.dim);
    for (unsigned i = 0; i < e; ++i) r = r * a;
    return r;
}

// Right-hand side of a polynomial system: one polynomial per component.
struct PolynomialSystem {
    int dim = 1;
    std::vector<Polynomial> comps;

    explicit PolynomialSystem(int d = 1) : dim(d), comps(d, Polynomial(d)) {}
    // dim is the number of y variables; the number of output components is
    // comps.size() and may differ (e.g. a single Jacobian entry).
    explicit PolynomialSystem(std::vector<Polynomial> c)
        : dim(c.empty() ? 1 : c.front().dim), comps(std::move(c)) {
        for (const auto& p : comps)
            if (p.dim != dim) throw std::domain_error("system component dimension mismatch");
    }

    bool depends_on_t() const {
        for (const auto& p : comps)
            if (p.depends_on_t()) return true;
        return false;
    }

    // Sup-norm majorant over the polydisc of radius r.
    Rational majorant(const Rational& t_c, const std::vector<Rational>& y_c,
                      const Rational& r) const {
        Rational m = 0;
        for (const auto& p : comps) m = std::max(m, p.majorant(t_c, y_c, r));
        return m;
    }

    // Majorant of the Jacobian in the induced sup-norm (max row sum).
    Rational jacobian_majorant(const Rational& t_c, const std::vector<Rational>& y_c,
                               const Rational& r) const {
        Rational m = 0;
        for (const auto& p : comps) {
            Rational row = 0;
            for (int j = 0; j < dim; ++j) row += p.jacobian_entry(j).majorant(t_c, y_c, r);
            m = std::max(m, row);
        }
        return m;
    }
};

} // namespace stratode

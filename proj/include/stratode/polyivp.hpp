#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "stratode/domain.hpp"
#include "stratode/errors.hpp"
#include "stratode/polynomial.hpp"
#include "stratode/series.hpp"

namespace stratode {

// Polynomial initial value problem y' = P(t, y), y(t0) = y0 on a rectangle.
struct PolyIVP {
    PolynomialSystem P;
    Rational t0 = 0;
    std::vector<Rational> y0;
    RectDomain domain;

    PolyIVP(PolynomialSystem p, Rational t, std::vector<Rational> y, RectDomain dom)
        : P(std::move(p)), t0(std::move(t)), y0(std::move(y)), domain(std::move(dom)) {
        if (P.dim < 1) throw std::domain_error("system dimension must be >= 1");
        if (static_cast<int>(y0.size()) != P.dim)
            throw std::domain_error("initial value dimension mismatch");
        if (!domain.contains(t0, y0))
            throw std::domain_error("initial data outside the domain rectangle");
    }
};

// Order of vanishing of y' - P(y) at t0.
struct ResidualReport {
    std::size_t valuation = 0;
    std::size_t truncation_checked = 0;
};

// One Picard step: y0 + integral of P(u), truncated at order N.
inline TruncatedSeries picard_step(const PolyIVP& ivp, const TruncatedSeries& u, std::size_t N) {
    TruncatedSeries pu = poly_compose_series(ivp.P, u, N == 0 ? 0 : N - 1);
    TruncatedSeries r = series_integrate(pu).truncated(N);
    for (int j = 0; j < ivp.P.dim; ++j) r.coeffs[0][j] += ivp.y0[j];
    return r;
}

// N Picard steps from the constant series; coefficients 0..N-1 are exact.
//
// With the truncation schedule N_i = min(i+1, N), every coefficient a step
// reads from its predecessor is already final, so the iteration is realized
// order by order: step k appends the single new coefficient
// (P(u))_k / (k+1), which is exactly what y0 + integral of P(u) produces.
// This avoids recomputing the settled prefix at every step (cubic work)
// while returning bit-identical coefficients.
inline TruncatedSeries picard_solve(const PolyIVP& ivp, std::size_t N) {
    const PolynomialSystem& P = ivp.P;
    const int d = P.dim;
    if (N == 0) return TruncatedSeries::constant(ivp.y0, ivp.t0, 1);

    // Incremental scalar series: u components, powers of t and of each
    // component, and the partial products of each monomial's factor chain.
    // arrays[i] holds coefficients 0..k after step k.
    std::vector<std::vector<Rational>> arrays;
    auto new_array = [&]() {
        arrays.emplace_back();
        return arrays.size() - 1;
    };
    std::vector<std::size_t> u_idx(d);
    for (int j = 0; j < d; ++j) u_idx[j] = new_array();

    // t series is t0 + tau; its coefficients are known in closed form.
    std::size_t t_idx = new_array();

    unsigned max_t = 0;
    std::vector<unsigned> max_y(d, 0);
    for (const auto& comp : P.comps)
        for (const auto& [m, c] : comp.terms) {
            max_t = std::max(max_t, m.t_exp);
            for (int j = 0; j < d; ++j) max_y[j] = std::max(max_y[j], m.y_exp[j]);
        }

    // product nodes, extended in creation order (dependencies come first)
    struct Prod {
        std::size_t a, b, out;
    };
    std::vector<Prod> prods;
    auto make_prod = [&](std::size_t a, std::size_t b) {
        std::size_t out = new_array();
        prods.push_back({a, b, out});
        return out;
    };

    std::vector<std::size_t> t_pow{t_idx};  // t^1, t^2, ...
    for (unsigned e = 2; e <= max_t; ++e) t_pow.push_back(make_prod(t_pow.back(), t_idx));
    std::vector<std::vector<std::size_t>> y_pow(d);
    for (int j = 0; j < d; ++j) {
        y_pow[j].push_back(u_idx[j]);
        for (unsigned e = 2; e <= max_y[j]; ++e)
            y_pow[j].push_back(make_prod(y_pow[j].back(), u_idx[j]));
    }

    // one cached root per monomial: the full factor product (or none for a
    // constant monomial)
    struct TermRoot {
        bool constant = true;
        std::size_t idx = 0;
        Rational coeff;
    };
    std::vector<std::vector<TermRoot>> roots(P.comps.size());
    for (std::size_t ci = 0; ci < P.comps.size(); ++ci) {
        for (const auto& [m, c] : P.comps[ci].terms) {
            std::vector<std::size_t> chain;
            if (m.t_exp > 0) chain.push_back(t_pow[m.t_exp - 1]);
            for (int j = 0; j < d; ++j)
                if (m.y_exp[j] > 0) chain.push_back(y_pow[j][m.y_exp[j] - 1]);
            TermRoot tr;
            tr.coeff = c;
            if (!chain.empty()) {
                tr.constant = false;
                std::size_t acc = chain[0];
                for (std::size_t i = 1; i < chain.size(); ++i) acc = make_prod(acc, chain[i]);
                tr.idx = acc;
            }
            roots[ci].push_back(tr);
        }
    }

    TruncatedSeries out(ivp.t0, d, N);
    for (int j = 0; j < d; ++j) out.coeffs[0][j] = ivp.y0[j];

    for (std::size_t k = 0; k < N; ++k) {
        for (int j = 0; j < d; ++j) arrays[u_idx[j]].push_back(out.coeffs[k][j]);
        arrays[t_idx].push_back(k == 0 ? ivp.t0 : k == 1 ? Rational(1) : Rational(0));
        for (const auto& p : prods) {
            const auto& a = arrays[p.a];
            const auto& b = arrays[p.b];
            Rational s = 0;
            for (std::size_t i = 0; i <= k; ++i)
                if (a[i] != 0 && b[k - i] != 0) s += a[i] * b[k - i];
            arrays[p.out].push_back(std::move(s));
        }
        if (k + 1 < N) {
            for (std::size_t ci = 0; ci < roots.size(); ++ci) {
                Rational pk = 0;
                for (const auto& tr : roots[ci]) {
                    if (tr.constant) {
                        if (k == 0) pk += tr.coeff;
                    } else if (arrays[tr.idx][k] != 0) {
                        pk += tr.coeff * arrays[tr.idx][k];
                    }
                }
                out.coeffs[k + 1][ci] = pk / Rational(static_cast<long>(k + 1));
            }
        }
    }
    return out;
}

// Solves delta' - A delta = b mod t^(N-1) with delta(0) = 0 by the
// order-by-order recurrence delta_{k+1} = ((A delta)_k + b_k) / (k+1).
inline TruncatedSeries linear_series_solve(const std::vector<std::vector<TruncatedSeries>>& A,
                                           const std::vector<TruncatedSeries>& b,
                                           std::size_t N) {
    if (N < 1) throw std::domain_error("linear_series_solve needs N >= 1");
    int d = static_cast<int>(b.size());
    Rational center = b[0].center;
    for (const auto& row : A)
        for (const auto& e : row)
            if (e.center != center) throw std::domain_error("series expansion point mismatch");
    TruncatedSeries delta(center, d, N);
    for (std::size_t k = 0; k + 1 < N; ++k) {
        for (int i = 0; i < d; ++i) {
            Rational rhs = k < b[i].order() ? b[i].coeffs[k][0] : Rational(0);
            for (int j = 0; j < d; ++j) {
                const TruncatedSeries& aij = A[i][j];
                for (std::size_t m = 0; m <= k && m < aij.order(); ++m)
                    rhs += aij.coeffs[m][0] * delta.coeffs[k - m][j];
            }
            delta.coeffs[k + 1][i] = rhs / Rational(static_cast<long>(k + 1));
        }
    }
    return delta;
}

namespace detail {

inline TruncatedSeries newton_step_impl(const PolynomialSystem& P, const TruncatedSeries& y_k,
                                        std::size_t N_k) {
    std::size_t N2 = 2 * N_k;
    TruncatedSeries y = y_k.padded(N2).truncated(N2);
    TruncatedSeries py = poly_compose_series(P, y, N2 - 1);
    TruncatedSeries dy = series_differentiate(y.padded(N2)); // order N2-1
    TruncatedSeries residual_rhs = py - dy;                  // b = -(y' - P(y))

    std::vector<TruncatedSeries> b;
    b.reserve(P.dim);
    for (int j = 0; j < P.dim; ++j) b.push_back(residual_rhs.component(j));

    std::vector<std::vector<TruncatedSeries>> A(P.dim);
    for (int i = 0; i < P.dim; ++i)
        for (int j = 0; j < P.dim; ++j) {
            PolynomialSystem entry(std::vector<Polynomial>{P.comps[i].jacobian_entry(j)});
            A[i].push_back(poly_compose_series(entry, y, N2 - 1));
        }

    TruncatedSeries delta = linear_series_solve(A, b, N2);
    return (y + delta).truncated(N2);
}

inline std::pair<TruncatedSeries, std::size_t> newton_solve_impl(const PolynomialSystem& P,
                                                                 const Rational& t0,
                                                                 const std::vector<Rational>& y0,
                                                                 std::size_t N) {
    if (N < 1) throw std::domain_error("newton_solve needs N >= 1");
    TruncatedSeries y = TruncatedSeries::constant(y0, t0, 1);
    std::size_t correct = 1;
    std::size_t steps = 0;
    while (correct < N) {
        y = newton_step_impl(P, y, correct);
        correct *= 2;
        ++steps;
    }
    return {y.truncated(N), steps};
}

} // namespace detail

// Newton-Kantorovich step: correct order N_k in, correct order 2*N_k out.
inline TruncatedSeries newton_step(const PolyIVP& ivp, const TruncatedSeries& y_k,
                                   std::size_t N_k) {
    return detail::newton_step_impl(ivp.P, y_k, N_k);
}

// Newton lifting from the constant series; orders double each step.
inline std::pair<TruncatedSeries, std::size_t> newton_solve(const PolyIVP& ivp, std::size_t N) {
    return detail::newton_solve_impl(ivp.P, ivp.t0, ivp.y0, N);
}

inline ResidualReport residual_valuation(const PolyIVP& ivp, const TruncatedSeries& y) {
    std::size_t n = y.order();
    if (n == 0) return {0, 0};
    TruncatedSeries dy = series_differentiate(y);                  // order n-1
    TruncatedSeries py = poly_compose_series(ivp.P, y, n - 1);     // order n-1
    TruncatedSeries res = dy - py;
    std::size_t val = n - 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        bool nonzero = false;
        for (int j = 0; j < ivp.P.dim; ++j)
            if (res.coeffs[k][j] != 0) nonzero = true;
        if (nonzero) {
            val = k;
            break;
        }
    }
    return {val, n - 1};
}

} // namespace stratode

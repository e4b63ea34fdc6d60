#pragma once

#include <cstddef>
#include <vector>

#include "stratode/errors.hpp"
#include "stratode/interval.hpp"
#include "stratode/polynomial.hpp"
#include "stratode/rational.hpp"

namespace stratode {

// Truncated power series sum_k c_k (t - center)^k with exact rational
// coefficient vectors; order N means coefficients 0..N-1 are stored.
struct TruncatedSeries {
    Rational center = 0;
    int dim = 1;
    std::vector<std::vector<Rational>> coeffs; // [k][component]

    TruncatedSeries() = default;
    TruncatedSeries(Rational c, int d, std::size_t order)
        : center(std::move(c)), dim(d), coeffs(order, std::vector<Rational>(d, Rational(0))) {}

    static TruncatedSeries constant(const std::vector<Rational>& v, Rational center,
                                    std::size_t order) {
        TruncatedSeries s(std::move(center), static_cast<int>(v.size()), order);
        if (order > 0) s.coeffs[0] = v;
        return s;
    }

    std::size_t order() const { return coeffs.size(); }

    const Rational& at(std::size_t k, int comp = 0) const { return coeffs[k][comp]; }
    Rational& at(std::size_t k, int comp = 0) { return coeffs[k][comp]; }

    TruncatedSeries truncated(std::size_t n) const {
        TruncatedSeries s = *this;
        if (s.coeffs.size() > n) s.coeffs.resize(n);
        return s;
    }
    TruncatedSeries padded(std::size_t n) const {
        TruncatedSeries s = *this;
        while (s.coeffs.size() < n) s.coeffs.emplace_back(dim, Rational(0));
        return s;
    }

    TruncatedSeries component(int j) const {
        TruncatedSeries s(center, 1, order());
        for (std::size_t k = 0; k < order(); ++k) s.coeffs[k][0] = coeffs[k][j];
        return s;
    }

    bool operator==(const TruncatedSeries& o) const {
        return center == o.center && dim == o.dim && coeffs == o.coeffs;
    }
};

inline TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
    if (a.center != b.center) throw std::domain_error("series expansion point mismatch");
    if (a.dim != b.dim) throw std::domain_error("series dimension mismatch");
    std::size_t n = std::max(a.order(), b.order());
    TruncatedSeries r(a.center, a.dim, n);
    for (std::size_t k = 0; k < n; ++k)
        for (int j = 0; j < a.dim; ++j) {
            Rational v = 0;
            if (k < a.order()) v += a.coeffs[k][j];
            if (k < b.order()) v += b.coeffs[k][j];
            r.coeffs[k][j] = v;
        }
    return r;
}

inline TruncatedSeries operator-(const TruncatedSeries& a) {
    TruncatedSeries r = a;
    for (auto& row : r.coeffs)
        for (auto& c : row) c = -c;
    return r;
}
inline TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
    return a + (-b);
}

// Product of two scalar series, truncated to order N. Schoolbook convolution.
inline TruncatedSeries series_mul(const TruncatedSeries& a, const TruncatedSeries& b,
                                  std::size_t N) {
    if (a.center != b.center) throw std::domain_error("series expansion point mismatch");
    if (a.dim != 1 || b.dim != 1)
        throw std::domain_error("series_mul operates on scalar series");
    TruncatedSeries r(a.center, 1, N);
    std::size_t na = std::min(a.order(), N);
    for (std::size_t i = 0; i < na; ++i) {
        const Rational& ai = a.coeffs[i][0];
        if (ai == 0) continue;
        std::size_t nb = std::min(b.order(), N - i);
        for (std::size_t j = 0; j < nb; ++j) {
            if (b.coeffs[j][0] == 0) continue;
            r.coeffs[i + j][0] += ai * b.coeffs[j][0];
        }
    }
    return r;
}

// Term-wise antiderivative with zero constant term; order grows by one.
inline TruncatedSeries series_integrate(const TruncatedSeries& a) {
    TruncatedSeries r(a.center, a.dim, a.order() + 1);
    for (std::size_t k = 0; k < a.order(); ++k)
        for (int j = 0; j < a.dim; ++j)
            r.coeffs[k + 1][j] = a.coeffs[k][j] / Rational(static_cast<long>(k + 1));
    return r;
}

// Formal derivative; order shrinks by one.
inline TruncatedSeries series_differentiate(const TruncatedSeries& a) {
    std::size_t n = a.order() == 0 ? 0 : a.order() - 1;
    TruncatedSeries r(a.center, a.dim, n);
    for (std::size_t k = 0; k < n; ++k)
        for (int j = 0; j < a.dim; ++j)
            r.coeffs[k][j] = a.coeffs[k + 1][j] * Rational(static_cast<long>(k + 1));
    return r;
}

// P(center + tau, a(tau)) truncated at order N, exact. The series for the
// time variable is center + tau.
inline TruncatedSeries poly_compose_series(const PolynomialSystem& P, const TruncatedSeries& a,
                                           std::size_t N) {
    if (P.dim != a.dim) throw std::domain_error("polynomial/series dimension mismatch");
    // Cache powers of the substituted variables.
    unsigned max_t = 0;
    std::vector<unsigned> max_y(P.dim, 0);
    for (const auto& comp : P.comps)
        for (const auto& [m, c] : comp.terms) {
            max_t = std::max(max_t, m.t_exp);
            for (int j = 0; j < P.dim; ++j) max_y[j] = std::max(max_y[j], m.y_exp[j]);
        }
    TruncatedSeries one(a.center, 1, N);
    if (N > 0) one.coeffs[0][0] = 1;
    TruncatedSeries t_series(a.center, 1, N);
    if (N > 0) t_series.coeffs[0][0] = a.center;
    if (N > 1) t_series.coeffs[1][0] = 1;

    std::vector<TruncatedSeries> t_pow{one};
    for (unsigned e = 1; e <= max_t; ++e) t_pow.push_back(series_mul(t_pow.back(), t_series, N));
    std::vector<std::vector<TruncatedSeries>> y_pow(P.dim);
    for (int j = 0; j < P.dim; ++j) {
        y_pow[j].push_back(one);
        TruncatedSeries aj = a.component(j);
        for (unsigned e = 1; e <= max_y[j]; ++e)
            y_pow[j].push_back(series_mul(y_pow[j].back(), aj, N));
    }

    TruncatedSeries out(a.center, static_cast<int>(P.comps.size()), N);
    for (std::size_t ci = 0; ci < P.comps.size(); ++ci) {
        for (const auto& [m, c] : P.comps[ci].terms) {
            TruncatedSeries term = t_pow[m.t_exp];
            for (int j = 0; j < P.dim; ++j)
                if (m.y_exp[j]) term = series_mul(term, y_pow[j][m.y_exp[j]], N);
            for (std::size_t k = 0; k < N; ++k)
                out.coeffs[k][ci] += c * term.coeffs[k][0];
        }
    }
    return out;
}

// Tail majorant: |sum_{k>=order} c_k s^k| <= magnitude for |s| < radius.
struct TailBound {
    Rational magnitude;
    Rational radius;
};

// Certified evaluation: exact partial sum at t, widened by the tail bound
// and rounded outward at precision n.
inline std::vector<Interval> eval_certified(const TruncatedSeries& a, const TailBound& tail,
                                            const Rational& t, long n) {
    Rational s = t - a.center;
    if (!(abs(s) < tail.radius))
        throw radius_error("evaluation point outside certified radius");
    std::vector<Interval> out;
    out.reserve(a.dim);
    for (int j = 0; j < a.dim; ++j) {
        // Horner, exact.
        Rational sum = 0;
        for (std::size_t k = a.order(); k-- > 0;) sum = sum * s + a.coeffs[k][j];
        out.push_back(Interval::hull(sum - tail.magnitude, sum + tail.magnitude, n + 2));
    }
    return out;
}

} // namespace stratode

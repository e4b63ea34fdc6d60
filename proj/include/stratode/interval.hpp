#pragma once

#include <algorithm>
#include <initializer_list>
#include <stdexcept>
#include <string>

#include "stratode/dyadic.hpp"
#include "stratode/rational.hpp"

namespace stratode {

// Closed interval with exact dyadic endpoints. Ring operations are exact;
// division, sqrt and log round outward to a requested precision.
struct Interval {
    Dyadic lo;
    Dyadic hi;

    Interval() = default;
    Interval(Dyadic l, Dyadic h) : lo(std::move(l)), hi(std::move(h)) {
        if (hi < lo) throw std::domain_error("interval with hi < lo");
    }
    explicit Interval(const Dyadic& point) : lo(point), hi(point) {}

    static Interval hull(const Rational& q, long prec) {
        return Interval(dyadic_floor(q, prec), dyadic_ceil(q, prec));
    }
    static Interval hull(const Rational& a, const Rational& b, long prec) {
        const Rational& l = a <= b ? a : b;
        const Rational& h = a <= b ? b : a;
        return Interval(dyadic_floor(l, prec), dyadic_ceil(h, prec));
    }

    Rational width() const { return hi.to_rational() - lo.to_rational(); }
    Rational midpoint() const { return (lo.to_rational() + hi.to_rational()) / 2; }
    bool contains(const Rational& q) const {
        return lo.to_rational() <= q && q <= hi.to_rational();
    }
    bool contains_zero() const { return lo.sign() <= 0 && hi.sign() >= 0; }

    // Magnitude bound: sup |x| over the interval, as a rational.
    Rational mag() const {
        return std::max(abs(lo.to_rational()), abs(hi.to_rational()));
    }
    // Mignitude: inf |x| over the interval (0 if it straddles zero).
    Rational mig() const {
        if (contains_zero()) return 0;
        return std::min(abs(lo.to_rational()), abs(hi.to_rational()));
    }

    Interval rounded(long prec) const {
        return Interval(dyadic_floor(lo.to_rational(), prec), dyadic_ceil(hi.to_rational(), prec));
    }
};

inline Interval operator-(const Interval& a) { return Interval(-a.hi, -a.lo); }
inline Interval operator+(const Interval& a, const Interval& b) {
    return Interval(a.lo + b.lo, a.hi + b.hi);
}
inline Interval operator-(const Interval& a, const Interval& b) {
    return Interval(a.lo - b.hi, a.hi - b.lo);
}
inline Interval operator*(const Interval& a, const Interval& b) {
    Dyadic c1 = a.lo * b.lo, c2 = a.lo * b.hi, c3 = a.hi * b.lo, c4 = a.hi * b.hi;
    return Interval(min(min(c1, c2), min(c3, c4)), max(max(c1, c2), max(c3, c4)));
}

inline Interval divide(const Interval& a, const Interval& b, long prec) {
    if (b.contains_zero()) throw std::domain_error("interval division by interval containing zero");
    Rational bl = b.lo.to_rational(), bh = b.hi.to_rational();
    Rational al = a.lo.to_rational(), ah = a.hi.to_rational();
    Rational c[4] = {al / bl, al / bh, ah / bl, ah / bh};
    Rational mn = *std::min_element(c, c + 4);
    Rational mx = *std::max_element(c, c + 4);
    return Interval(dyadic_floor(mn, prec), dyadic_ceil(mx, prec));
}

inline Interval abs(const Interval& a) {
    if (a.lo.sign() >= 0) return a;
    if (a.hi.sign() <= 0) return -a;
    return Interval(Dyadic(0), max(-a.lo, a.hi));
}
inline Interval min(const Interval& a, const Interval& b) {
    return Interval(min(a.lo, b.lo), min(a.hi, b.hi));
}
inline Interval max(const Interval& a, const Interval& b) {
    return Interval(max(a.lo, b.lo), max(a.hi, b.hi));
}

inline Interval pow_int(const Interval& a, unsigned long n) {
    if (n == 0) return Interval(Dyadic(1));
    Interval r = a;
    for (unsigned long i = 1; i < n; ++i) r = r * a;
    if (n % 2 == 0 && a.contains_zero()) r.lo = Dyadic(0);
    return r;
}

// Enclosure of sqrt(q) for q >= 0, outward to 2^-prec.
inline Interval sqrt_enclosure(const Rational& q, long prec) {
    if (q < 0) throw std::domain_error("sqrt of negative value");
    // floor(sqrt(q * 4^prec)) gives the lower mantissa.
    Integer scaled_num = q.get_num() << (2 * prec);
    Integer floor_div;
    mpz_fdiv_q(floor_div.get_mpz_t(), scaled_num.get_mpz_t(), q.get_den().get_mpz_t());
    Integer root;
    mpz_sqrt(root.get_mpz_t(), floor_div.get_mpz_t());
    Dyadic lo(root, -prec);
    Dyadic hi(root + 1, -prec);
    if (lo.to_rational() * lo.to_rational() == q) hi = lo;
    return Interval(lo, hi);
}

// Enclosure of the k-th root of q >= 0, outward to 2^-prec.
inline Interval root_enclosure(const Rational& q, unsigned long k, long prec) {
    if (q < 0) throw std::domain_error("root of negative value");
    if (k == 0) throw std::domain_error("zeroth root");
    Integer scaled_num = q.get_num() << (k * static_cast<unsigned long>(prec));
    Integer floor_div;
    mpz_fdiv_q(floor_div.get_mpz_t(), scaled_num.get_mpz_t(), q.get_den().get_mpz_t());
    Integer root;
    mpz_root(root.get_mpz_t(), floor_div.get_mpz_t(), k);
    Dyadic lo(root, -prec);
    Dyadic hi(root + 1, -prec);
    if (pow_int(lo.to_rational(), k) == q) hi = lo;
    return Interval(lo, hi);
}

inline Interval sqrt_enclosure(const Interval& a, long prec) {
    if (a.lo.sign() < 0) throw std::domain_error("sqrt of interval with negative part");
    return Interval(sqrt_enclosure(a.lo.to_rational(), prec).lo,
                    sqrt_enclosure(a.hi.to_rational(), prec).hi);
}

namespace detail {

// atanh(u) enclosure via the odd power series, |u| <= 1/3.
inline Interval atanh_enclosure(const Rational& u, long prec) {
    Rational u2 = u * u;
    Rational term = u; // u^(2k+1)
    Rational sum = 0;
    Rational tail_target = Rational(1, 2) / pow_int(rat(2), static_cast<unsigned long>(prec + 2));
    unsigned long k = 0;
    while (true) {
        sum += term / Rational(2 * k + 1);
        term *= u2;
        ++k;
        // remaining tail is bounded by the geometric sum of |term|.
        Rational tail = abs(term) / ((1 - u2) * Rational(2 * k + 1));
        if (tail <= tail_target) {
            return Interval::hull(sum - tail, sum + tail, prec + 2);
        }
    }
}

inline Interval ln2_enclosure(long prec) {
    Interval a = atanh_enclosure(Rational(1, 3), prec + 2);
    return (a + a).rounded(prec);
}

} // namespace detail

// Enclosure of ln(x) for rational x > 0, outward to roughly 2^-prec.
inline Interval log_enclosure(const Rational& x, long prec) {
    if (x <= 0) throw std::domain_error("log of non-positive value");
    // Reduce x = m * 2^e with m in [3/4, 3/2).
    Rational m = x;
    long e = 0;
    while (m >= Rational(3, 2)) { m /= 2; ++e; }
    while (m < Rational(3, 4)) { m *= 2; --e; }
    Rational u = (m - 1) / (m + 1); // |u| <= 1/5
    long guard = prec + 8;
    Interval ln_m = detail::atanh_enclosure(u, guard);
    ln_m = ln_m + ln_m;
    if (e != 0) {
        Interval ln2 = detail::ln2_enclosure(guard + 8);
        Interval ee = Interval(Dyadic(e));
        ln_m = ln_m + ee * ln2;
    }
    return ln_m.rounded(prec);
}

inline Interval log_enclosure(const Interval& a, long prec) {
    if (a.lo.sign() <= 0) throw std::domain_error("log of interval touching zero");
    return Interval(log_enclosure(a.lo.to_rational(), prec).lo,
                    log_enclosure(a.hi.to_rational(), prec).hi);
}

// Rational upper bound of exp(x) for x >= 0, from exp(x) <= (k/(k-x))^k
// with k chosen so x/k <= 1/2.
inline Rational exp_upper(const Rational& x) {
    if (x < 0) throw std::domain_error("exp_upper expects x >= 0");
    if (x == 0) return 1;
    Integer fl;
    mpz_fdiv_q(fl.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
    unsigned long k = 2 * (fl.get_ui() + 1);
    Rational base = Rational(Integer(k)) / (Rational(Integer(k)) - x);
    return pow_int(base, k);
}

inline std::string to_string(const Interval& iv) {
    return "[" + to_string(iv.lo) + ", " + to_string(iv.hi) + "]";
}

} // namespace stratode

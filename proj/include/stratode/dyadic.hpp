#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>

#include "stratode/rational.hpp"

namespace stratode {

// Dyadic number m * 2^e with odd (or zero) mantissa.
struct Dyadic {
    Integer mantissa = 0;
    long exponent = 0;

    Dyadic() = default;
    Dyadic(long v) : mantissa(v) { normalize(); }
    Dyadic(Integer m, long e) : mantissa(std::move(m)), exponent(e) { normalize(); }

    void normalize() {
        if (mantissa == 0) {
            exponent = 0;
            return;
        }
        auto shift = mpz_scan1(mantissa.get_mpz_t(), 0);
        if (shift > 0) {
            mantissa >>= shift;
            exponent += static_cast<long>(shift);
        }
    }

    bool is_zero() const { return mantissa == 0; }
    int sign() const { return sgn(mantissa); }

    Rational to_rational() const {
        Rational q(mantissa);
        if (exponent >= 0) {
            q <<= exponent;
        } else {
            Rational den = 1;
            den <<= -exponent;
            q /= den;
        }
        return q;
    }
};

inline Dyadic operator-(const Dyadic& a) { return Dyadic(-a.mantissa, a.exponent); }

inline Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    long e = std::min(a.exponent, b.exponent);
    Integer ma = a.mantissa << (a.exponent - e);
    Integer mb = b.mantissa << (b.exponent - e);
    return Dyadic(ma + mb, e);
}

inline Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

inline Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    return Dyadic(a.mantissa * b.mantissa, a.exponent + b.exponent);
}

inline int compare(const Dyadic& a, const Dyadic& b) {
    Dyadic d = a - b;
    return d.sign();
}

inline bool operator<(const Dyadic& a, const Dyadic& b) { return compare(a, b) < 0; }
inline bool operator<=(const Dyadic& a, const Dyadic& b) { return compare(a, b) <= 0; }
inline bool operator>(const Dyadic& a, const Dyadic& b) { return compare(a, b) > 0; }
inline bool operator>=(const Dyadic& a, const Dyadic& b) { return compare(a, b) >= 0; }
inline bool operator==(const Dyadic& a, const Dyadic& b) { return compare(a, b) == 0; }

inline Dyadic min(const Dyadic& a, const Dyadic& b) { return a < b ? a : b; }
inline Dyadic max(const Dyadic& a, const Dyadic& b) { return a < b ? b : a; }
inline Dyadic abs(const Dyadic& a) { return a.sign() < 0 ? -a : a; }

// Largest dyadic multiple of 2^-prec that is <= q.
inline Dyadic dyadic_floor(const Rational& q, long prec) {
    Integer scaled_num = q.get_num() << (prec > 0 ? prec : 0);
    Integer den = q.get_den();
    if (prec < 0) den <<= -prec;
    Integer m;
    mpz_fdiv_q(m.get_mpz_t(), scaled_num.get_mpz_t(), den.get_mpz_t());
    return Dyadic(m, -prec);
}

// Smallest dyadic multiple of 2^-prec that is >= q.
inline Dyadic dyadic_ceil(const Rational& q, long prec) {
    Integer scaled_num = q.get_num() << (prec > 0 ? prec : 0);
    Integer den = q.get_den();
    if (prec < 0) den <<= -prec;
    Integer m;
    mpz_cdiv_q(m.get_mpz_t(), scaled_num.get_mpz_t(), den.get_mpz_t());
    return Dyadic(m, -prec);
}

inline Dyadic pow2(long e) { return Dyadic(Integer(1), e); }

inline std::string to_string(const Dyadic& d) {
    return d.mantissa.get_str() + "*2^" + std::to_string(d.exponent);
}

// Decimal rendering with the given number of fractional digits, truncated
// toward zero; enough for human-readable reports.
inline std::string decimal_string(const Rational& q, int digits = 12) {
    Integer scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    Rational scaled = q * Rational(scale);
    Integer t;
    mpz_tdiv_q(t.get_mpz_t(), scaled.get_num().get_mpz_t(), scaled.get_den().get_mpz_t());
    bool neg = t < 0;
    if (neg) t = -t;
    std::string s = t.get_str();
    if (static_cast<int>(s.size()) <= digits) s.insert(0, digits + 1 - s.size(), '0');
    s.insert(s.size() - digits, ".");
    if (neg) s.insert(0, "-");
    return s;
}

} // namespace stratode

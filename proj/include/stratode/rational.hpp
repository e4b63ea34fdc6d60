#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace stratode {

// Exact rational arithmetic. mpq_class keeps values canonical
// (gcd-reduced, positive denominator) after every operation.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational rat(long num, long den = 1) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// Parses "p", "-p/q" or a plain decimal integer.
inline Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            auto dot = text.find('.');
            if (dot != std::string::npos) {
                // decimal literal a.b -> (a*10^k + b)/10^k
                std::string digits = text.substr(0, dot) + text.substr(dot + 1);
                // base must be explicit: the mpz string constructor defaults
                // to base 0, which reads a leading zero as octal
                Integer num(digits, 10);
                Integer den = 1;
                for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
                Rational q(num, den);
                q.canonicalize();
                return q;
            }
            return Rational(Integer(text, 10));
        }
        Integer num(text.substr(0, slash), 10);
        Integer den(text.substr(slash + 1), 10);
        if (den <= 0) throw std::domain_error("rational with non-positive denominator: " + text);
        Rational q(num, den);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw std::domain_error("malformed rational literal: " + text);
    }
}

inline std::string to_string(const Rational& q) {
    return q.get_str();
}

inline Rational abs(const Rational& q) {
    return q < 0 ? Rational(-q) : q;
}

inline Rational pow_int(const Rational& base, unsigned long e) {
    Rational r = 1;
    Rational b = base;
    while (e) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

} // namespace stratode

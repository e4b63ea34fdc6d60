#pragma once

#include <string>
#include <utility>
#include <vector>

#include "stratode/errors.hpp"
#include "stratode/interval.hpp"
#include "stratode/rational.hpp"

namespace stratode {

enum class ModulusFamily { linear, power, rlog, table };

// Modulus of continuity omega from a closed-form family, valid on [0, delta).
//   linear: omega(r) = L r
//   power:  omega(r) = c r^p, 0 < p < 1
//   rlog:   omega(r) = c r ln(1/r)   (increasing only for r <= 1/e)
//   table:  piecewise-linear through (0,0) and the given breakpoints
struct ModulusSpec {
    ModulusFamily family = ModulusFamily::linear;
    Rational c = 1;  // L for the linear family
    Rational p = 0;  // power exponent
    std::vector<std::pair<Rational, Rational>> breakpoints;  // (r_i, w_i), increasing
    Rational delta = 1;

    static ModulusSpec linear(const Rational& L, const Rational& delta = 1) {
        if (L <= 0) throw invalid_modulus_error("linear modulus needs L > 0");
        if (delta <= 0) throw invalid_modulus_error("validity radius must be positive");
        ModulusSpec m;
        m.family = ModulusFamily::linear;
        m.c = L;
        m.delta = delta;
        return m;
    }

    static ModulusSpec power(const Rational& c, const Rational& p, const Rational& delta = 1) {
        if (c <= 0) throw invalid_modulus_error("power modulus needs c > 0");
        if (p <= 0 || p >= 1) throw invalid_modulus_error("power exponent must be in (0,1)");
        if (delta <= 0) throw invalid_modulus_error("validity radius must be positive");
        ModulusSpec m;
        m.family = ModulusFamily::power;
        m.c = c;
        m.p = p;
        m.delta = delta;
        return m;
    }

    static ModulusSpec rlog(const Rational& c, const Rational& delta = Rational(1, 3)) {
        if (c <= 0) throw invalid_modulus_error("rlog modulus needs c > 0");
        // r ln(1/r) is increasing only up to 1/e; 1/3 is a rational stand-in.
        if (delta <= 0 || delta > Rational(1, 3))
            throw invalid_modulus_error("rlog validity radius must lie in (0, 1/3]");
        ModulusSpec m;
        m.family = ModulusFamily::rlog;
        m.c = c;
        m.delta = delta;
        return m;
    }

    static ModulusSpec table(std::vector<std::pair<Rational, Rational>> pts,
                             const Rational& delta = 0) {
        if (pts.empty()) throw invalid_modulus_error("table modulus needs breakpoints");
        Rational prev_r = 0, prev_w = 0;
        for (const auto& [r, w] : pts) {
            if (r <= prev_r) throw invalid_modulus_error("table radii must be increasing");
            if (w <= prev_w) throw invalid_modulus_error("table modulus not increasing");
            prev_r = r;
            prev_w = w;
        }
        ModulusSpec m;
        m.family = ModulusFamily::table;
        m.breakpoints = std::move(pts);
        m.delta = delta > 0 ? delta : m.breakpoints.back().first;
        if (m.delta > m.breakpoints.back().first)
            throw invalid_modulus_error("validity radius beyond the last breakpoint");
        return m;
    }

    // Exact value for the rational-valued families (linear, table).
    Rational eval_exact(const Rational& r) const {
        switch (family) {
            case ModulusFamily::linear:
                return c * r;
            case ModulusFamily::table: {
                Rational prev_r = 0, prev_w = 0;
                for (const auto& [br, bw] : breakpoints) {
                    if (r <= br)
                        return prev_w + (bw - prev_w) * (r - prev_r) / (br - prev_r);
                    prev_r = br;
                    prev_w = bw;
                }
                throw std::domain_error("table modulus evaluated beyond breakpoints");
            }
            default:
                throw std::domain_error("modulus has no exact rational value");
        }
    }
};

// Certified enclosure of omega(r) for 0 <= r < delta.
inline Interval modulus_eval(const ModulusSpec& m, const Rational& r, long prec = 64) {
    if (r < 0 || r >= m.delta) throw std::domain_error("modulus evaluated outside [0, delta)");
    if (r == 0) return Interval(Dyadic(0));
    switch (m.family) {
        case ModulusFamily::linear:
        case ModulusFamily::table:
            return Interval::hull(m.eval_exact(r), prec);
        case ModulusFamily::power: {
            // r^p = (r^a)^(1/b) for p = a/b.
            unsigned long a = m.p.get_num().get_ui();
            unsigned long b = m.p.get_den().get_ui();
            Interval root = root_enclosure(pow_int(r, a), b, prec + 4);
            return (Interval::hull(m.c, prec + 4) * root).rounded(prec);
        }
        case ModulusFamily::rlog: {
            Interval ln = log_enclosure(1 / r, prec + 4);
            return (Interval::hull(m.c * r, prec + 4) * ln).rounded(prec);
        }
    }
    throw std::logic_error("unreachable");
}

// Rational upper bound of omega(r), for folding into error terms.
inline Rational modulus_upper(const ModulusSpec& m, const Rational& r, long prec = 64) {
    return modulus_eval(m, r, prec).hi.to_rational();
}

struct DivergenceCertificate {
    bool diverges = false;
    std::string certificate;
};

// Whether the Osgood integral of dr/omega(r) diverges at 0, decided per family.
inline DivergenceCertificate osgood_diverges(const ModulusSpec& m) {
    switch (m.family) {
        case ModulusFamily::linear:
            return {true, "integral of dr/(L r) diverges logarithmically at 0"};
        case ModulusFamily::power:
            return {false, "integral of dr/(c r^p) = r^(1-p)/(c(1-p)) is finite at 0"};
        case ModulusFamily::rlog:
            return {true, "integral of dr/(c r ln(1/r)) diverges as ln ln at 0"};
        case ModulusFamily::table: {
            // Near 0 the table is linear with slope w_1/r_1 > 0, so the
            // integrand dominates that of a linear modulus.
            return {true, "table modulus is bounded above by a linear modulus near 0"};
        }
    }
    throw std::logic_error("unreachable");
}

namespace detail {

// Certified lower bound of the integral of dr/omega(r) over [a, b],
// 0 < a <= b < delta.
inline Rational osgood_integral_lb(const ModulusSpec& m, const Rational& a, const Rational& b,
                                   long prec) {
    if (b <= a) return 0;
    switch (m.family) {
        case ModulusFamily::linear:
            // (ln b - ln a) / L
            return (log_enclosure(b, prec).lo.to_rational() -
                    log_enclosure(a, prec).hi.to_rational()) /
                   m.c;
        case ModulusFamily::rlog: {
            // ln ln(1/a) - ln ln(1/b), over c. Both inner logs exceed 1 since
            // a, b < delta <= 1/3 < 1/e.
            Interval la = log_enclosure(1 / a, prec + 4);
            Interval lb = log_enclosure(1 / b, prec + 4);
            return (log_enclosure(la, prec).lo.to_rational() -
                    log_enclosure(lb, prec).hi.to_rational()) /
                   m.c;
        }
        case ModulusFamily::table: {
            // Sum per linear segment: dr/(w0 + s (r-r0)) integrates to
            // (ln omega(hi) - ln omega(lo)) / s, or (hi-lo)/w for flat s=0
            // (excluded by validation, kept for completeness).
            Rational total = 0;
            Rational prev_r = 0, prev_w = 0;
            for (const auto& [br, bw] : m.breakpoints) {
                Rational lo = std::max(a, prev_r);
                Rational hi = std::min(b, br);
                if (lo < hi) {
                    Rational s = (bw - prev_w) / (br - prev_r);
                    Rational wl = prev_w + s * (lo - prev_r);
                    Rational wh = prev_w + s * (hi - prev_r);
                    total += (log_enclosure(wh, prec).lo.to_rational() -
                              log_enclosure(wl, prec).hi.to_rational()) /
                             s;
                }
                prev_r = br;
                prev_w = bw;
            }
            return total;
        }
        case ModulusFamily::power:
            throw uniqueness_error("power modulus fails the Osgood divergence test");
    }
    throw std::logic_error("unreachable");
}

} // namespace detail

// Least S on a dyadic grid with a certified integral of dr/omega(r) over
// [E t, S] at least 2t. S bounds the sup-distance of two Euler polygons whose
// mesh-error term is E, and tends to 0 with E.
inline Rational osgood_gap_bound(const ModulusSpec& m, const Rational& E, const Rational& t,
                                 long prec = 64) {
    if (E < 0 || t <= 0) throw std::domain_error("osgood_gap_bound needs E >= 0, t > 0");
    if (!osgood_diverges(m).diverges)
        throw uniqueness_error("modulus fails the Osgood divergence test");
    if (E == 0) return 0;
    Rational a = E * t;
    if (a >= m.delta)
        throw std::domain_error("mesh-error term already exceeds the modulus validity radius");
    Rational two_t = 2 * t;

    // Bracket by doubling, then binary-search the least grid point.
    Rational hi = a;
    while (detail::osgood_integral_lb(m, a, hi, prec) < two_t) {
        hi *= 2;
        if (hi >= m.delta) {
            if (detail::osgood_integral_lb(m, a, m.delta, prec) < two_t)
                throw std::domain_error("gap bound exceeds the modulus validity radius");
            hi = m.delta;
            break;
        }
    }
    // Grid resolution: the largest power of two <= hi, divided by 2^16.
    Rational pw = 1;
    while (pw > hi) pw /= 2;
    Rational grid = pw / pow_int(rat(2), 16);
    // Least multiple of `grid` in (lo_mult, hi_mult] satisfying the bound.
    Integer lo_mult = 0;
    Integer hi_mult;
    {
        Rational q = hi / grid;
        mpz_cdiv_q(hi_mult.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    }
    while (lo_mult + 1 < hi_mult) {
        Integer mid = (lo_mult + hi_mult) / 2;
        Rational S = Rational(mid) * grid;
        if (S > a && detail::osgood_integral_lb(m, a, S, prec) >= two_t)
            hi_mult = mid;
        else
            lo_mult = mid;
    }
    return Rational(hi_mult) * grid;
}

} // namespace stratode

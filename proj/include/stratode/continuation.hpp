#pragma once

#include <cstddef>
#include <vector>

#include "stratode/errors.hpp"
#include "stratode/polyivp.hpp"
#include "stratode/series.hpp"

namespace stratode {

// One analytic-continuation patch.
struct Patch {
    Rational center;                 // expansion time t_c
    std::vector<Interval> value;     // enclosure of y(t_c)
    Rational radius_lb;              // certified convergence radius lower bound
    Rational step;                   // step taken (<= radius_lb / 2)
    std::size_t truncation_order;
};

struct ContinuationTrace {
    std::vector<Patch> patches;
    std::vector<Interval> final_value;
    std::size_t patch_count = 0;
    long working_precision = 0;
};

// Output of the box existence bound at one center.
struct RadiusBound {
    Rational radius_lb;      // series_radius capped by the remaining time room
    Rational series_radius;  // solution is analytic for |t - t_c| < series_radius
    Rational box_radius;     // the maximizing ball radius r
    Rational field_bound;    // majorant of ||P|| on the polydisc of radius r (+inflation)
    Rational coeff_bound;    // majorant of ||y|| on the disc: ||y_c|| + inflation + r
};

struct ContinuationOptions {
    Rational step_fraction = Rational(1, 2); // theta
    long radius_floor_log2 = -64;            // stall once R_lb < 2^radius_floor_log2
    int grid_points = 64;                    // radius grid r = scale * k/8, k = 1..grid_points
};

// Certified lower bound on the radius of convergence at (t_c, y_c), by
// maximizing r / M(r) over a rational grid. `inflate` widens the majorant
// box so the bound also covers initial points within `inflate` of y_c.
inline RadiusBound certified_radius_bound(const PolyIVP& ivp, const Rational& t_c,
                                          const std::vector<Rational>& y_c,
                                          const Rational& inflate = 0,
                                          const ContinuationOptions& opt = {}) {
    const RectDomain& dom = ivp.domain;
    Rational time_room = dom.t_hi - t_c;
    Rational space_room = dom.space_distance(y_c) - inflate;
    if (time_room <= 0 || space_room <= 0)
        throw boundary_error("initial point on the domain boundary");

    Rational scale = 1;
    Rational norm_yc = 0;
    for (const Rational& v : y_c) {
        scale = std::max(scale, abs(v));
        norm_yc = std::max(norm_yc, abs(v));
    }

    RadiusBound best{0, 0, 0, 0, 0};
    for (int k = 1; k <= opt.grid_points; ++k) {
        Rational r = scale * rat(k, 8);
        if (r > space_room) r = space_room;
        Rational M = ivp.P.majorant(t_c, y_c, r + inflate);
        Rational rho;
        if (M == 0) {
            // The field vanishes identically on the box, so the solution is
            // constant; any finite radius beyond the time room works.
            rho = time_room + 1;
        } else {
            rho = r / M;
            // A t-dependent majorant is only valid within r of t_c.
            if (ivp.P.depends_on_t()) rho = std::min(rho, r);
        }
        if (rho > best.series_radius) {
            best = RadiusBound{std::min(rho, time_room), rho, r, M, norm_yc + inflate + r};
        }
        if (r == space_room) break;
    }
    return best;
}

inline Rational certified_radius_lb(const PolyIVP& ivp, const Rational& t_c,
                                    const std::vector<Rational>& y_c) {
    return certified_radius_bound(ivp, t_c, y_c).radius_lb;
}

// Least N with M (step/R)^N / (1 - step/R) <= 2^-(n+1): the geometric tail
// after N terms is below the precision target.
inline std::size_t truncation_order(const Rational& R_lb, const Rational& step, long n,
                                    const Rational& M) {
    if (!(step < R_lb)) throw radius_error("step must be strictly below the certified radius");
    if (step <= 0) throw std::domain_error("step must be positive");
    Rational q = step / R_lb;
    Rational target = Rational(1) / pow_int(rat(2), static_cast<unsigned long>(n + 1));
    Rational tail = M / (1 - q); // value at N = 0, one q factor applied per loop turn
    std::size_t N = 0;
    do {
        tail *= q;
        ++N;
    } while (tail > target);
    return N;
}

namespace detail {

// Internal signal: the running enclosure outgrew the requested width, so the
// attempt cannot succeed and the caller should retry at higher precision.
struct width_budget_exceeded {
    Rational reached_time;
};

// Geometric tail magnitude after N terms at offset s: C q^N / (1-q), q = s/R.
inline Rational geometric_tail(const Rational& C, const Rational& R, const Rational& s,
                               std::size_t N) {
    Rational q = s / R;
    return C * pow_int(q, N) / (1 - q);
}

inline ContinuationTrace continuation_attempt(const PolyIVP& ivp, const Rational& T, long n,
                                              long prec, const ContinuationOptions& opt) {
    ContinuationTrace trace;
    trace.working_precision = prec;
    Rational floor = Rational(1);
    for (long i = 0; i < -opt.radius_floor_log2; ++i) floor /= 2;

    Rational t_c = ivp.t0;
    std::vector<Interval> enclosure;
    for (const Rational& v : ivp.y0) enclosure.push_back(Interval::hull(v, prec));

    Rational target = Rational(1) / pow_int(rat(2), static_cast<unsigned long>(n));
    while (t_c < T) {
        std::vector<Rational> y_mid;
        Rational half_width = 0;
        for (const auto& iv : enclosure) {
            y_mid.push_back(iv.midpoint());
            half_width = std::max(half_width, Rational(iv.width() / 2));
        }
        // The enclosure width never shrinks from here on, so once it exceeds
        // half the requested width this attempt is written off.
        if (4 * half_width > target) throw width_budget_exceeded{t_c};
        RadiusBound rb = certified_radius_bound(ivp, t_c, y_mid, half_width, opt);
        if (rb.series_radius < floor)
            throw stall_error("continuation stalled: certified radius below floor", t_c);

        // Step against the series radius, not the domain-capped radius_lb:
        // otherwise a target at the domain's time end is never reached.
        Rational h =
            std::min(Rational(rb.series_radius * opt.step_fraction), Rational(T - t_c));
        std::size_t N = truncation_order(rb.series_radius, h, prec + 1, rb.coeff_bound);
        TruncatedSeries local = detail::newton_solve_impl(ivp.P, t_c, y_mid, N).first;
        Rational tail = geometric_tail(rb.coeff_bound, rb.series_radius, h, N);
        std::vector<Interval> value =
            eval_certified(local, TailBound{tail, rb.series_radius}, t_c + h, prec + 2);

        // Propagate the incoming enclosure width through the flow: two
        // solutions started within half_width of each other stay within
        // half_width * e^(L h) over the patch.
        if (half_width > 0) {
            Rational L = ivp.P.jacobian_majorant(t_c, y_mid, rb.box_radius + half_width);
            Rational grow = half_width * exp_upper(L * h);
            for (auto& iv : value)
                iv = Interval::hull(iv.lo.to_rational() - grow, iv.hi.to_rational() + grow,
                                    prec + 2);
        }

        trace.patches.push_back(Patch{t_c, enclosure, rb.radius_lb, h, N});
        enclosure = std::move(value);
        t_c += h;
    }
    trace.final_value = enclosure;
    trace.patch_count = trace.patches.size();
    return trace;
}

} // namespace detail

// Certified evaluation of the solution at time T: enclosure of y(T) with
// width <= 2^-n, re-solving at doubled working precision when interval
// growth across patches eats the budget.
inline ContinuationTrace continue_to(const PolyIVP& ivp, const Rational& T, long n,
                                     const ContinuationOptions& opt = {}) {
    if (T < ivp.t0) throw std::domain_error("target time before t0");
    if (!ivp.domain.contains_time(T)) throw std::domain_error("target time outside time domain");
    Rational target = Rational(1) / pow_int(rat(2), static_cast<unsigned long>(n));
    for (long prec = n + 6;; prec *= 2) {
        Rational width;
        try {
            ContinuationTrace trace = detail::continuation_attempt(ivp, T, n, prec, opt);
            width = 0;
            for (const auto& iv : trace.final_value) width = std::max(width, iv.width());
            if (width <= target) return trace;
        } catch (const detail::width_budget_exceeded& e) {
            width = 2 * target; // any value above target; the attempt was cut short
        }
        if (prec > 1 << 20)
            throw precision_error("continuation cannot reach requested width", width);
    }
}

} // namespace stratode

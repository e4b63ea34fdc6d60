#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "stratode/errors.hpp"
#include "stratode/expr.hpp"
#include "stratode/modulus.hpp"

namespace stratode {

// Piecewise-linear Euler approximant with left-endpoint slope sampling.
struct Polygon {
    std::vector<Rational> times;
    std::vector<std::vector<Rational>> values;
    std::optional<Rational> error_bound;  // certified sup error vs. the true solution
    Rational slope_error = 0;             // sampling + rounding error, as a slope bound

    std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
    Rational mesh_width() const {
        Rational w = 0;
        for (std::size_t i = 1; i < times.size(); ++i)
            w = std::max(w, Rational(times[i] - times[i - 1]));
        return w;
    }

    // Linear interpolation at t within [times.front(), times.back()].
    std::vector<Rational> value_at(const Rational& t) const {
        if (times.empty() || t < times.front() || t > times.back())
            throw std::domain_error("evaluation outside the polygon's time range");
        std::size_t i = 1;
        while (i + 1 < times.size() && times[i] < t) ++i;
        Rational lam = (t - times[i - 1]) / (times[i] - times[i - 1]);
        std::vector<Rational> out(values[i].size());
        for (std::size_t j = 0; j < out.size(); ++j)
            out[j] = values[i - 1][j] + lam * (values[i][j] - values[i - 1][j]);
        return out;
    }
};

struct EulerOptions {
    long sampling_guard = 20;           // dyadic slope precision = ceil(log2 k) + guard
    long round_prec = -1;               // >= 0: round values to 2^-round_prec each step
    unsigned long mesh_cap = 1ul << 22; // largest mesh solve_certified will try
    int bisect_depth = 8;               // field_bound subdivision levels
    int segment_mesh = 512;             // extend_maximal mesh per local segment
    long horizon_floor_log2 = -24;      // extend_maximal stops once t* < 2^floor
};

namespace detail {

inline long ceil_log2(unsigned long k) {
    long b = 0;
    while ((1ul << b) < k) ++b;
    return b;
}

inline Rational field_bound_rec(const FieldSpec& f, const Interval& t,
                                std::vector<Interval>& y, int depth, long prec) {
    if (depth <= 0) {
        Rational m = 0;
        for (const Interval& v : f.eval(t, y, prec)) m = std::max(m, v.mag());
        return m;
    }
    // Split the widest axis (time axis index -1).
    int widest = -1;
    Rational w = t.width();
    for (std::size_t j = 0; j < y.size(); ++j)
        if (y[j].width() > w) {
            w = y[j].width();
            widest = static_cast<int>(j);
        }
    Interval full = widest < 0 ? t : y[static_cast<std::size_t>(widest)];
    Dyadic mid = dyadic_floor(full.midpoint(), prec);
    Interval left(full.lo, mid), right(mid, full.hi);
    Rational m;
    if (widest < 0) {
        m = field_bound_rec(f, left, y, depth - 1, prec);
        m = std::max(m, field_bound_rec(f, right, y, depth - 1, prec));
    } else {
        auto& slot = y[static_cast<std::size_t>(widest)];
        Interval saved = slot;
        slot = left;
        m = field_bound_rec(f, t, y, depth - 1, prec);
        slot = right;
        m = std::max(m, field_bound_rec(f, t, y, depth - 1, prec));
        slot = saved;
    }
    return m;
}

} // namespace detail

// Rational M with ||f||_inf <= M on the given rectangle, by interval
// evaluation refined by bisection.
inline Rational field_bound_on(const FieldSpec& f, const RectDomain& dom,
                               const EulerOptions& opt = {}) {
    long prec = 64;
    Interval t = Interval::hull(dom.t_lo, dom.t_hi, prec);
    std::vector<Interval> y;
    for (const auto& [lo, hi] : dom.box) y.push_back(Interval::hull(lo, hi, prec));
    return detail::field_bound_rec(f, t, y, opt.bisect_depth, prec);
}

inline Rational field_bound(const FieldSpec& f, const EulerOptions& opt = {}) {
    if (f.bound_hint) return *f.bound_hint;
    return field_bound_on(f, f.domain, opt);
}

// t* = min(r/M, time remaining): polygons started inside the ball of radius r
// stay inside it for that long.
inline Rational safe_time_horizon(const Rational& M, const Rational& r,
                                  const Rational& time_remaining) {
    if (M < 0 || r <= 0) throw std::domain_error("safe_time_horizon needs M >= 0, r > 0");
    if (M == 0) return time_remaining;
    return std::min(Rational(r / M), time_remaining);
}

// Euler polygon with mesh t0 + i t*/k. Rational-valued fields are stepped
// exactly; otherwise slopes are dyadic midpoints at precision tied to k, with
// the sampling error recorded as a slope bound.
inline Polygon euler_polygon(const FieldSpec& f, const Rational& t0,
                             const std::vector<Rational>& y0, const Rational& tstar,
                             unsigned long k, const EulerOptions& opt = {}) {
    if (k < 1) throw std::domain_error("mesh count must be >= 1");
    if (tstar <= 0) throw std::domain_error("time horizon must be positive");
    if (!f.domain.contains(t0, y0)) throw std::domain_error("initial data outside the rectangle");
    Rational h = tstar / Rational(Integer(k));
    bool exact = f.rational_valued();
    long prec = detail::ceil_log2(k) + opt.sampling_guard;

    Polygon poly;
    poly.times.push_back(t0);
    poly.values.push_back(y0);
    Rational round_step = opt.round_prec >= 0
                              ? Rational(1) / pow_int(rat(2), static_cast<unsigned long>(opt.round_prec))
                              : Rational(0);
    if (round_step > 0) poly.slope_error += round_step / h;

    std::vector<Rational> y = y0;
    for (unsigned long i = 0; i < k; ++i) {
        Rational tau = t0 + Rational(Integer(i)) * h;
        std::vector<Rational> slope;
        if (exact) {
            slope = f.eval_exact(tau, y);
        } else {
            Interval ti = Interval::hull(tau, prec + 16);
            std::vector<Interval> yi;
            for (const Rational& v : y) yi.push_back(Interval::hull(v, prec + 16));
            for (const Interval& s : f.eval(ti, yi, prec + 16)) {
                slope.push_back(s.midpoint());
                poly.slope_error = std::max(poly.slope_error, Rational(s.width() / 2));
            }
        }
        for (std::size_t j = 0; j < y.size(); ++j) {
            y[j] += h * slope[j];
            if (opt.round_prec >= 0)
                y[j] = dyadic_floor(y[j], opt.round_prec).to_rational();
        }
        Rational tnext = i + 1 == k ? t0 + tstar : tau + h;
        if (!f.domain.contains_space(y)) {
            std::size_t bad = 0;
            for (std::size_t j = 0; j < y.size(); ++j)
                if (y[j] < f.domain.box[j].first || y[j] > f.domain.box[j].second) bad = j;
            throw domain_exit_error("polygon exits the rectangle", tnext, bad);
        }
        poly.times.push_back(tnext);
        poly.values.push_back(y);
    }
    return poly;
}

// Mesh-error slope term for one polygon at mesh width h: the t-variation of
// the field across a step plus its y-variation over the step's travel.
inline Rational mesh_error_term(const FieldSpec& f, const ModulusSpec& m, const Rational& M,
                                const Rational& h, const Rational& sampling) {
    LipschitzBounds lb = lipschitz_bounds(f);
    Rational lt;
    if (lb.ok) {
        lt = lb.in_t;
    } else {
        bool autonomous = true;
        for (const auto& e : f.comps) {
            // structural t-independence
            struct Walker {
                static bool depends_t(const ExprPtr& n) {
                    if (!n) return false;
                    if (n->kind == ExprKind::var_t) return true;
                    return depends_t(n->a) || depends_t(n->b);
                }
            };
            if (Walker::depends_t(e)) autonomous = false;
        }
        if (!autonomous)
            throw unsupported_error("no t-Lipschitz certificate for a t-dependent field");
        lt = 0;
    }
    Rational travel = M * h;
    if (travel >= m.delta)
        throw std::domain_error("step travel exceeds the modulus validity radius");
    Rational yterm = modulus_upper(m, travel);
    if (lb.ok) yterm = std::min(yterm, Rational(lb.in_y * travel));
    return lt * h + yterm + sampling;
}

// Euler solve with a certified sup-error bound <= eps against the (unique)
// true solution, by choosing the mesh through the Osgood gap bound.
inline Polygon solve_certified(const FieldSpec& f, const Rational& t0,
                               const std::vector<Rational>& y0, const Rational& tstar,
                               const Rational& eps, const EulerOptions& opt = {}) {
    if (!f.modulus) throw unsupported_error("solve_certified needs a modulus of continuity");
    const ModulusSpec& m = *f.modulus;
    if (!osgood_diverges(m).diverges)
        throw uniqueness_error("modulus fails the Osgood divergence test");
    Rational M = field_bound(f, opt);
    Rational best = -1;
    for (unsigned long k = 1; k <= opt.mesh_cap; k *= 2) {
        Rational h = tstar / Rational(Integer(k));
        if (M * h >= m.delta) continue;
        // Plan with zero sampling, then confirm on the built polygon: the
        // two-polygon mesh-error term is at most twice the one-mesh term.
        Rational planned = 2 * mesh_error_term(f, m, M, h, 0);
        if (planned * tstar >= m.delta) continue;
        Rational S;
        try {
            S = osgood_gap_bound(m, planned, tstar);
        } catch (const std::domain_error&) {
            continue; // bound exceeds the validity radius at this mesh
        }
        if (best < 0 || S < best) best = S;
        if (S > eps) continue;
        Polygon poly = euler_polygon(f, t0, y0, tstar, k, opt);
        Rational E = 2 * mesh_error_term(f, m, M, h, poly.slope_error);
        if (E * tstar >= m.delta) continue;
        S = osgood_gap_bound(m, E, tstar);
        if (best < 0 || S < best) best = S;
        if (S <= eps) {
            poly.error_bound = S;
            return poly;
        }
    }
    throw precision_error("mesh cap reached before the requested error bound",
                          best < 0 ? Rational(1) : best);
}

enum class ExitReason { boundary, domain_exit };

struct MaximalExtension {
    Polygon polygon;
    Rational beta = 0;
    ExitReason reason = ExitReason::boundary;
};

// Greedy maximal extension: local existence from the current endpoint with
// ball radius half the distance to the space boundary, repeated until the
// time boundary is met or the step horizon collapses at the space boundary.
inline MaximalExtension extend_maximal(const FieldSpec& f, const Rational& t0,
                                       const std::vector<Rational>& y0,
                                       const EulerOptions& opt = {}) {
    if (!f.domain.contains(t0, y0)) throw std::domain_error("initial data outside the rectangle");
    Rational floor = Rational(1);
    for (long i = 0; i < -opt.horizon_floor_log2; ++i) floor /= 2;

    MaximalExtension out;
    out.polygon.times.push_back(t0);
    out.polygon.values.push_back(y0);

    Rational t = t0;
    std::vector<Rational> y = y0;
    EulerOptions seg_opt = opt;
    seg_opt.round_prec = 50;

    while (true) {
        if (t >= f.domain.t_hi) {
            out.beta = f.domain.t_hi;
            out.reason = ExitReason::boundary;
            return out;
        }
        Rational dist = f.domain.space_distance(y);
        Rational r = dist / 2;
        if (r <= 0) {
            out.beta = t;
            out.reason = ExitReason::domain_exit;
            return out;
        }
        // Local rectangle: the ball of radius 2r around y clipped to the box.
        std::vector<std::pair<Rational, Rational>> sub;
        for (std::size_t j = 0; j < y.size(); ++j)
            sub.emplace_back(std::max(Rational(y[j] - dist), f.domain.box[j].first),
                             std::min(Rational(y[j] + dist), f.domain.box[j].second));
        RectDomain local(t, f.domain.t_hi, sub);
        FieldSpec lf(f.comps, local);
        Rational M = field_bound_on(lf, local, opt);
        Rational tstar = safe_time_horizon(M == 0 ? Rational(0) : M, r, f.domain.t_hi - t);
        if (tstar < floor) {
            // Boundary contact is judged relative to the box scale so that the
            // verdict is invariant under rescaling the space coordinates.
            Rational side = 0;
            for (const auto& [lo, hi] : f.domain.box)
                side = std::max(side, Rational(hi - lo));
            if (dist <= side / (1 << 16)) {
                out.beta = t;
                out.reason = ExitReason::domain_exit;
                return out;
            }
            throw stall_error("step horizon collapsed away from the boundary", t);
        }
        Polygon seg;
        try {
            seg = euler_polygon(lf, t, y, tstar,
                                static_cast<unsigned long>(opt.segment_mesh), seg_opt);
        } catch (const domain_exit_error& e) {
            // The local ball keeps the polygon inside; rounding can graze the
            // clipped wall, which means the box boundary was reached.
            out.beta = e.exit_time;
            out.reason = ExitReason::domain_exit;
            return out;
        }
        for (std::size_t i = 1; i < seg.times.size(); ++i) {
            out.polygon.times.push_back(seg.times[i]);
            out.polygon.values.push_back(seg.values[i]);
        }
        out.polygon.slope_error = std::max(out.polygon.slope_error, seg.slope_error);
        t = seg.times.back();
        y = seg.values.back();
    }
}

} // namespace stratode

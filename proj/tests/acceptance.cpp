// Acceptance harness: prints one pass/fail line per criterion and exits
// nonzero if any criterion fails. Tolerances are pinned in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "stratode/classify.hpp"
#include "stratode/continuation.hpp"
#include "stratode/euler.hpp"
#include "stratode/io.hpp"
#include "stratode/polyivp.hpp"
#include "stratode/strata.hpp"

using namespace stratode;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& what) {
    std::printf("criterion %2d: %s  %s\n", n, ok ? "PASS" : "FAIL", what.c_str());
    if (!ok) ++failures;
}

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

PolyIVP square_ivp() {
    int d = 1;
    Polynomial p = Polynomial::var_y(0, d) * Polynomial::var_y(0, d);
    return PolyIVP(PolynomialSystem({p}), 0, {1},
                   RectDomain(0, 1, {{-1000000, 1000000}}));
}

PolyIVP exp_ivp(const Rational& t_hi, const Rational& y_hi) {
    int d = 1;
    return PolyIVP(PolynomialSystem({Polynomial::var_y(0, d)}), 0, {1},
                   RectDomain(0, t_hi, {{-y_hi, y_hi}}));
}

Rational e_partial_sum(int terms) {
    Rational sum = 0, fact = 1;
    for (int k = 0; k <= terms; ++k) {
        if (k > 0) fact *= k;
        sum += 1 / fact;
    }
    return sum;
}

// 1. Newton doubling: valuations v_{i+1} >= 2 v_i - 1, <= 12 steps, < 10 s.
void criterion_1() {
    double start = now_ms();
    PolyIVP ivp = square_ivp();
    TruncatedSeries y = TruncatedSeries::constant(ivp.y0, ivp.t0, 1);
    std::size_t correct = 1, steps = 0;
    std::size_t prev_val = 0;
    bool doubling = true;
    while (correct < 1024 && steps <= 12) {
        y = newton_step(ivp, y, correct);
        correct *= 2;
        ++steps;
        std::size_t val = residual_valuation(ivp, y).valuation;
        if (prev_val > 0 && val + 1 < 2 * prev_val) doubling = false;
        prev_val = val;
    }
    double ms = now_ms() - start;
    report(1, doubling && steps <= 12 && ms < 10000,
           "Newton residual valuation doubles per step on y'=y^2 to order 1024 "
           "(steps=" + std::to_string(steps) + ", " + std::to_string((int)ms) + " ms)");
}

// 2. Picard and Newton coefficients bit-identical on 20 random systems.
void criterion_2() {
    double start = now_ms();
    std::mt19937 rng(20260823);
    std::uniform_int_distribution<int> dim_pick(1, 2), num(-3, 3), den(1, 2),
        texp(0, 1), yexp(0, 3), nterms(1, 3);
    bool ok = true;
    for (int trial = 0; trial < 20 && ok; ++trial) {
        int d = dim_pick(rng);
        std::vector<Polynomial> comps;
        for (int j = 0; j < d; ++j) {
            Polynomial p = Polynomial::constant(0, d);
            int terms = nterms(rng);
            for (int m = 0; m < terms; ++m) {
                Polynomial mono = Polynomial::constant(rat(num(rng), den(rng)), d);
                mono = mono * pow_int(Polynomial::var_t(d), (unsigned)texp(rng));
                int total = 0;
                for (int v = 0; v < d && total < 3; ++v) {
                    int e = yexp(rng);
                    e = std::min(e, 3 - total);
                    total += e;
                    mono = mono * pow_int(Polynomial::var_y(v, d), (unsigned)e);
                }
                p = p + mono;
            }
            comps.push_back(p);
        }
        std::vector<Rational> y0;
        for (int j = 0; j < d; ++j) y0.push_back(rat(num(rng), 2));
        std::vector<std::pair<Rational, Rational>> box(d, {-1000000, 1000000});
        PolyIVP ivp(PolynomialSystem(comps), 0, y0, RectDomain(0, 1, box));
        TruncatedSeries a = picard_solve(ivp, 256).truncated(256);
        TruncatedSeries b = newton_solve(ivp, 256).first.truncated(256);
        if (a.coeffs != b.coeffs) ok = false;
    }
    double ms = now_ms() - start;
    report(2, ok && ms < 60000,
           "Picard and Newton agree bit-for-bit to order 256 on 20 random systems (" +
               std::to_string((int)ms) + " ms)");
}

// 3. Closed-form coefficients, exact.
void criterion_3() {
    TruncatedSeries exp_series = newton_solve(exp_ivp(2, 100), 65).first;
    bool ok = true;
    Rational fact = 1;
    for (int k = 0; k <= 64; ++k) {
        if (k > 0) fact *= k;
        if (exp_series.coeffs[k][0] != 1 / fact) ok = false;
    }
    TruncatedSeries geo = newton_solve(square_ivp(), 65).first;
    for (int k = 0; k <= 64; ++k)
        if (geo.coeffs[k][0] != 1) ok = false;
    report(3, ok, "y'=y gives 1/k! and y'=y^2 gives all ones to order 64, exactly");
}

// 4. Continuation accuracy at T=9/10 (pole) and T=1 (e).
void criterion_4() {
    bool ok = true;
    ContinuationTrace pole = continue_to(square_ivp(), rat(9, 10), 30);
    Rational lo = pole.final_value[0].lo.to_rational();
    Rational hi = pole.final_value[0].hi.to_rational();
    if (!(lo <= 10 && 10 <= hi)) ok = false;
    if (Rational(hi - lo) > rat(1, 1l << 30)) ok = false;

    ContinuationTrace exp_run = continue_to(exp_ivp(2, 100), 1, 30);
    Rational elo = exp_run.final_value[0].lo.to_rational();
    Rational ehi = exp_run.final_value[0].hi.to_rational();
    Rational e_lo = e_partial_sum(60);
    Rational e_hi = e_lo + rat(1, 1l << 60);  // tail of the series is tiny
    if (!(elo <= e_hi && e_lo <= ehi)) ok = false;
    report(4, ok, "continuation encloses 10 at T=9/10 within 2^-30 and e at T=1");
}

// 5. Patch counts grow like ln(1/(1-T)) with slope stable within factor 3.
void criterion_5() {
    std::vector<Rational> targets = {rat(9, 10), rat(99, 100), rat(999, 1000),
                                     rat(9999, 10000)};
    std::vector<std::size_t> m;
    for (const auto& T : targets)
        m.push_back(continue_to(square_ivp(), T, 10).patches.size());
    bool increasing = m[0] < m[1] && m[1] < m[2] && m[2] < m[3];
    // targets are spaced by factors of 10 in 1/(1-T), so the per-decade
    // increments are the fitted slope up to the constant ln 10
    std::size_t dmin = m[1] - m[0], dmax = dmin;
    for (int i = 1; i < 3; ++i) {
        dmin = std::min(dmin, m[i + 1] - m[i]);
        dmax = std::max(dmax, m[i + 1] - m[i]);
    }
    bool stable = dmax <= 3 * dmin && dmin > 0;
    report(5, increasing && stable,
           "patch counts " + std::to_string(m[0]) + "," + std::to_string(m[1]) + "," +
               std::to_string(m[2]) + "," + std::to_string(m[3]) +
               " grow logarithmically with stable slope");
}

// 6. Wall clock of continue_to at T in {4,8,16,32} grows >= 1.8x per doubling.
void criterion_6() {
    std::vector<double> ms;
    for (long T : {4l, 8l, 16l, 32l}) {
        Rational y_hi = pow_int(rat(4), 64);  // room for e^32
        double best = 1e18;
        for (int rep = 0; rep < 5; ++rep) {
            double s = now_ms();
            continue_to(exp_ivp(T, y_hi), T, 10);
            best = std::min(best, now_ms() - s);
        }
        ms.push_back(best);
    }
    // fitted per-doubling growth over the whole range; single adjacent ratios
    // are dominated by fixed per-call overhead at the small end
    double rate = std::cbrt(ms[3] / ms[0]);
    bool ok = rate >= 1.8 && ms[0] < ms[1] && ms[1] < ms[2] && ms[2] < ms[3];
    char desc[160];
    std::snprintf(desc, sizeof desc,
                  "continue_to ms: %.1f %.1f %.1f %.1f, fitted growth %.2fx per "
                  "doubling of T (>= 1.8 required)",
                  ms[0], ms[1], ms[2], ms[3], rate);
    report(6, ok, desc);
}

// 7. Euler first-order convergence plus certified-bound soundness.
void criterion_7() {
    FieldSpec f({expr_y(0)}, RectDomain(0, 3, {{-4, 4}}));
    ModulusSpec mod = ModulusSpec::linear(1, 1000);
    f.modulus = mod;
    Rational M = field_bound(f);
    Rational e = e_partial_sum(40);
    bool ok = true;
    Rational prev = 0;
    for (unsigned long k = 1ul << 6; k <= (1ul << 12); k <<= 1) {
        Polygon p = euler_polygon(f, 0, {1}, 1, k);
        Rational err = abs(Rational(p.values.back()[0] - e));
        if (prev != 0) {
            Rational ratio = err / prev;
            if (ratio < rat(2, 5) || ratio > rat(3, 5)) ok = false;
        }
        prev = err;
        // the a-priori two-mesh bound must dominate the observed error
        Rational E = 2 * mesh_error_term(f, mod, M, Rational(1) / Rational(k),
                                         p.slope_error);
        if (err > osgood_gap_bound(mod, E, 1)) ok = false;
    }
    Polygon cert = solve_certified(f, 0, {1}, 1, rat(1, 256));
    if (!cert.error_bound || abs(Rational(cert.values.back()[0] - e)) > *cert.error_bound)
        ok = false;
    report(7, ok, "Euler error halves per mesh doubling and stays under the "
                  "certified bound");
}

// 8. Two-mesh sup gap <= Osgood gap bound at 20 random (k, t*) pairs.
void criterion_8() {
    std::mt19937 rng(8);
    bool ok = true;
    auto sup_gap = [](const Polygon& a, const Polygon& b) {
        Rational g = 0;
        for (std::size_t i = 0; i < a.times.size(); ++i)
            g = std::max(g, abs(Rational(a.values[i][0] - b.values[2 * i][0])));
        return g;
    };
    // linear family: f = y with L = 1
    FieldSpec lin({expr_y(0)}, RectDomain(0, 2, {{-4, 4}}));
    ModulusSpec lm = ModulusSpec::linear(1, 1000);
    lin.modulus = lm;
    Rational Ml = field_bound(lin);
    std::uniform_int_distribution<int> lk(16, 512), lt(1, 8);
    for (int i = 0; i < 10 && ok; ++i) {
        unsigned long k = (unsigned long)lk(rng);
        Rational tstar = rat(lt(rng), 8);
        Polygon a = euler_polygon(lin, 0, {1}, tstar, k);
        Polygon b = euler_polygon(lin, 0, {1}, tstar, 2 * k);
        Rational E = mesh_error_term(lin, lm, Ml, tstar / Rational(k), a.slope_error) +
                     mesh_error_term(lin, lm, Ml, tstar / Rational(2 * k), b.slope_error);
        if (sup_gap(a, b) > osgood_gap_bound(lm, E, tstar)) ok = false;
    }
    // rlog family: f = y/2 under omega(r) = r ln(1/r)
    FieldSpec rl({expr_y(0) / expr_const(2)}, RectDomain(0, 1, {{-2, 2}}));
    ModulusSpec rm = ModulusSpec::rlog(1);
    rl.modulus = rm;
    Rational Mr = field_bound(rl);
    std::uniform_int_distribution<int> rk(1024, 3072), rt(1, 2);
    for (int i = 0; i < 10 && ok; ++i) {
        unsigned long k = (unsigned long)rk(rng);
        Rational tstar = rat(rt(rng), 8);
        Polygon a = euler_polygon(rl, 0, {1}, tstar, k);
        Polygon b = euler_polygon(rl, 0, {1}, tstar, 2 * k);
        Rational E = mesh_error_term(rl, rm, Mr, tstar / Rational(k), a.slope_error) +
                     mesh_error_term(rl, rm, Mr, tstar / Rational(2 * k), b.slope_error);
        if (sup_gap(a, b) > osgood_gap_bound(rm, E, tstar)) ok = false;
    }
    report(8, ok, "two-mesh gaps stay under the Osgood bound for linear and "
                  "rlog families at 20 random (k, t*)");
}

// 9. Non-uniqueness witness: 2 sqrt|y| sits at the third stratum and both
// candidate solutions have vanishing residuals.
void criterion_9() {
    FieldSpec f({expr_const(2) * expr_sqrt(expr_abs(expr_y(0)))},
                RectDomain(0, 1, {{-4, 4}}));
    bool ok = classify_stratum(f).stratum == Stratum::aca0;
    Rational tol = rat(1, 1l << 20);
    for (int i = 0; i < 100 && ok; ++i) {
        Rational t = rat(i, 100);
        // y = 0: derivative 0, field value 2 sqrt(0) = 0
        Interval f0 = expr_eval(f.comps[0], Interval::hull(t, 64),
                                {Interval::hull(Rational(0), 64)}, 64);
        if (f0.mag() > tol) ok = false;
        // y = t^2: derivative 2t, field value 2 sqrt(t^2) = 2t
        Interval ft = expr_eval(f.comps[0], Interval::hull(t, 64),
                                {Interval::hull(t * t, 64)}, 64);
        Interval resid = ft - Interval::hull(2 * t, 64);
        if (resid.mag() > tol) ok = false;
    }
    report(9, ok, "2 sqrt|y| classifies without a divergence certificate and "
                  "both 0 and t^2 are residual-free at 100 points");
}

// 10. Maximal extension of y'=y^2 exits the box at beta = 9/10 +- 1e-3.
void criterion_10() {
    FieldSpec f({expr_y(0) * expr_y(0)}, RectDomain(0, 2, {{-10, 10}}));
    MaximalExtension ext = extend_maximal(f, 0, {1});
    bool ok = ext.reason == ExitReason::domain_exit &&
              abs(Rational(ext.beta - rat(9, 10))) <= rat(1, 1000);
    report(10, ok, "y'=y^2 on [0,2]x[-10,10] exits the box at beta = 9/10 "
                   "within 1e-3");
}

// 11. Derived ranks on the three fixtures, with chain nesting and closedness.
void criterion_11() {
    bool ok = true;
    PiecewiseField cont;
    cont.dim = 1;
    cont.domain = RectDomain(0, 1, {{-10, 10}});
    cont.pieces = {{expr_const(1)}};

    PiecewiseField jumps;
    jumps.dim = 1;
    jumps.domain = RectDomain(0, 1, {{-10, 10}});
    jumps.breaks.points = {rat(1, 4), rat(1, 2), rat(3, 4)};
    jumps.values.point_values = {{1}, {-1}, {1}};
    jumps.pieces = {{expr_const(1)}, {expr_const(-1)}, {expr_const(1)},
                    {expr_const(-1)}};

    PiecewiseField tower;
    tower.dim = 1;
    tower.domain = RectDomain(0, 1, {{-10, 10}});
    tower.breaks.towers.push_back(geometric_tower(0, 1, rat(1, 2)));
    TowerValues tv;
    tv.limit_value = {0};
    tv.member_values = {{1}, {-1}};
    tv.gap_values = {{1}, {-1}};
    tower.values.tower_values.push_back(tv);
    tower.pieces = {{expr_const(0)}, {expr_const(0)}};

    std::vector<std::pair<PiecewiseField*, int>> cases = {
        {&cont, 1}, {&jumps, 2}, {&tower, 3}};
    for (auto& [pf, want] : cases) {
        RankCertificate cert = derived_rank(*pf);
        if (cert.rank != want || cert.exceeded) ok = false;
        for (std::size_t i = 1; i < cert.chain.size(); ++i)
            if (!cert.chain[i].subset_of(cert.chain[i - 1])) ok = false;
        if (!cert.chain.back().empty()) ok = false;
    }
    report(11, ok, "ranks 1/2/3 on the continuous, finite-jump, and "
                   "alternating-tower fixtures with nested closed chains");
}

// 12. Stratified glue on the step field matches a k=2^20 Euler oracle.
void criterion_12() {
    PiecewiseField f;
    f.dim = 1;
    f.domain = RectDomain(0, 1, {{-10, 10}});
    f.breaks.points = {rat(1, 2)};
    f.values.point_values = {{1}};
    f.pieces = {{expr_const(1)}, {expr_const(-1)}};

    Polygon sol = solve_stratified(f, {0});

    // full-interval left-endpoint Euler across the discontinuity
    const unsigned long k = 1ul << 20;
    Rational h = rat(1, 1l << 20);
    Rational y = 0, t = 0;
    Rational worst = 0;
    for (unsigned long i = 0; i < k; ++i) {
        y += h * field_value(f, t, {y})[0];
        t += h;
        if (i % 1024 == 1023)
            worst = std::max(worst, abs(Rational(sol.value_at(t)[0] - y)));
    }
    bool ok = worst <= 10 * h;

    // glue continuity: adjacent polygon vertices move at most M dt apart
    for (std::size_t i = 1; i < sol.times.size(); ++i) {
        Rational dt = sol.times[i] - sol.times[i - 1];
        Rational dy = abs(Rational(sol.values[i][0] - sol.values[i - 1][0]));
        if (dy > dt + rat(1, 1l << 40)) ok = false;
    }
    report(12, ok, "glued step-field solution within 10/2^20 of a 2^20-step "
                   "Euler oracle, continuous at glue points");
}

} // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    if (failures == 0) {
        std::printf("all 12 acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria failed\n", failures);
    return 1;
}

#include <catch2/catch_amalgamated.hpp>

#include "stratode/interval.hpp"
#include "stratode/series.hpp"

using namespace stratode;

namespace {

// Small deterministic generator for property checks.
struct Lcg {
    unsigned long long state;
    explicit Lcg(unsigned long long seed) : state(seed) {}
    unsigned long long next() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return state >> 33;
    }
    long next_in(long lo, long hi) { return lo + static_cast<long>(next() % (hi - lo + 1)); }
    Rational next_rational() {
        Rational q(next_in(-9, 9), next_in(1, 7));
        q.canonicalize();
        return q;
    }
};

TruncatedSeries scalar(std::initializer_list<Rational> cs, Rational center = 0) {
    TruncatedSeries s(center, 1, cs.size());
    std::size_t k = 0;
    for (const auto& c : cs) s.coeffs[k++][0] = c;
    return s;
}

// Independent convolution oracle: plain double loop, no truncation tricks.
std::vector<Rational> conv_oracle(const TruncatedSeries& a, const TruncatedSeries& b,
                                  std::size_t N) {
    std::vector<Rational> out(N, Rational(0));
    for (std::size_t i = 0; i < a.order(); ++i)
        for (std::size_t j = 0; j < b.order(); ++j)
            if (i + j < N) out[i + j] += a.coeffs[i][0] * b.coeffs[j][0];
    return out;
}

} // namespace

TEST_CASE("series_mul binomial identity") {
    auto a = scalar({1, 1});
    auto p = series_mul(a, a, 3);
    CHECK(p.at(0) == 1);
    CHECK(p.at(1) == 2);
    CHECK(p.at(2) == 1);
}

TEST_CASE("series_mul annihilator") {
    auto a = scalar({3, rat(-1, 2), 5});
    auto z = scalar({0, 0, 0});
    auto p = series_mul(a, z, 3);
    for (std::size_t k = 0; k < 3; ++k) CHECK(p.at(k) == 0);
}

TEST_CASE("series_mul geometric times (1-t) telescopes") {
    TruncatedSeries geo(Rational(0), 1, 8);
    for (std::size_t k = 0; k < 8; ++k) geo.coeffs[k][0] = 1;
    auto one_minus_t = scalar({1, -1});
    auto p = series_mul(geo, one_minus_t, 8);
    // oracle: brute-force convolution over indices 0..7
    auto expect = conv_oracle(geo, one_minus_t, 8);
    CHECK(p.at(0) == 1);
    for (std::size_t k = 1; k < 8; ++k) CHECK(p.at(k) == 0);
    for (std::size_t k = 0; k < 8; ++k) CHECK(p.at(k) == expect[k]);
}

TEST_CASE("series_mul rejects mismatched expansion points") {
    auto a = scalar({1, 1}, Rational(0));
    auto b = scalar({1, 1}, Rational(1));
    CHECK_THROWS_AS(series_mul(a, b, 2), std::domain_error);
}

TEST_CASE("series_mul agrees with convolution oracle on random inputs") {
    Lcg rng(12345);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t na = 1 + rng.next() % 32;
        std::size_t nb = 1 + rng.next() % 32;
        TruncatedSeries a(Rational(0), 1, na), b(Rational(0), 1, nb);
        for (std::size_t k = 0; k < na; ++k) a.coeffs[k][0] = rng.next_rational();
        for (std::size_t k = 0; k < nb; ++k) b.coeffs[k][0] = rng.next_rational();
        std::size_t N = 1 + rng.next() % 32;
        auto p = series_mul(a, b, N);
        auto expect = conv_oracle(a, b, N);
        for (std::size_t k = 0; k < N; ++k) CHECK(p.at(k) == expect[k]);
    }
}

TEST_CASE("series_integrate power rule") {
    auto r = series_integrate(scalar({1, 1}));
    CHECK(r.at(0) == 0);
    CHECK(r.at(1) == 1);
    CHECK(r.at(2) == rat(1, 2));
}

TEST_CASE("series_integrate zero") {
    auto r = series_integrate(scalar({0, 0}));
    for (std::size_t k = 0; k < r.order(); ++k) CHECK(r.at(k) == 0);
}

TEST_CASE("series_integrate term-wise division") {
    TruncatedSeries a(Rational(0), 1, 5);
    for (std::size_t k = 0; k < 5; ++k) a.coeffs[k][0] = 1;
    auto r = series_integrate(a);
    CHECK(r.at(0) == 0);
    for (std::size_t k = 1; k <= 5; ++k)
        CHECK(r.at(k) == Rational(1, static_cast<long>(k)));
}

TEST_CASE("integrate then differentiate is the identity") {
    Lcg rng(777);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 1 + rng.next() % 16;
        TruncatedSeries a(Rational(0), 1, n);
        for (std::size_t k = 0; k < n; ++k) a.coeffs[k][0] = rng.next_rational();
        auto back = series_differentiate(series_integrate(a));
        REQUIRE(back.order() == n);
        for (std::size_t k = 0; k < n; ++k) CHECK(back.at(k) == a.at(k));
    }
}

TEST_CASE("poly_compose_series squaring") {
    PolynomialSystem P(1);
    P.comps[0] = pow_int(Polynomial::var_y(0, 1), 2);
    auto r = poly_compose_series(P, scalar({1, 1}), 3);
    CHECK(r.at(0) == 1);
    CHECK(r.at(1) == 2);
    CHECK(r.at(2) == 1);
}

TEST_CASE("poly_compose_series constant map") {
    PolynomialSystem P(1);
    P.comps[0] = Polynomial::constant(rat(7, 3), 1);
    auto r = poly_compose_series(P, scalar({2, -1, 4}), 3);
    CHECK(r.at(0) == rat(7, 3));
    CHECK(r.at(1) == 0);
    CHECK(r.at(2) == 0);
}

TEST_CASE("poly_compose_series cubic minus identity") {
    PolynomialSystem P(1);
    auto y = Polynomial::var_y(0, 1);
    P.comps[0] = pow_int(y, 3) - y;
    auto r = poly_compose_series(P, scalar({0, 1}), 4);
    CHECK(r.at(0) == 0);
    CHECK(r.at(1) == -1);
    CHECK(r.at(2) == 0);
    CHECK(r.at(3) == 1);
}

TEST_CASE("eval_certified encloses exp(1)") {
    // First 30 terms of exp at 0, tail bounded by twice the next term.
    TruncatedSeries a(Rational(0), 1, 30);
    Rational fact = 1;
    for (std::size_t k = 0; k < 30; ++k) {
        if (k > 0) fact *= Rational(static_cast<long>(k));
        a.coeffs[k][0] = 1 / fact;
    }
    Rational tail = 2 / (fact * Rational(30));
    auto iv = eval_certified(a, TailBound{tail, Rational(2)}, Rational(1), 20);
    // oracle: 60-term partial sum brackets e from below, plus a coarse cap
    Rational lo = 0, f = 1;
    for (long k = 0; k < 60; ++k) {
        if (k > 0) f *= Rational(k);
        lo += 1 / f;
    }
    Rational hi = lo + rat(1, 1000000000);
    CHECK(iv[0].lo.to_rational() <= lo);
    CHECK(iv[0].hi.to_rational() >= lo);
    CHECK(iv[0].hi.to_rational() <= hi + tail * 2 + Rational(1) / pow_int(rat(2), 20));
}

TEST_CASE("eval_certified constant series") {
    auto a = scalar({rat(5, 7)});
    auto iv = eval_certified(a, TailBound{0, Rational(10)}, rat(3, 2), 20);
    CHECK(iv[0].contains(rat(5, 7)));
    CHECK(iv[0].width() <= Rational(1) / pow_int(rat(2), 19));
}

TEST_CASE("eval_certified geometric series at 1/2 encloses 2") {
    TruncatedSeries a(Rational(0), 1, 40);
    for (std::size_t k = 0; k < 40; ++k) a.coeffs[k][0] = 1;
    // tail = sum_{k>=40} (1/2)^k = 2^-39
    Rational tail = Rational(1) / pow_int(rat(2), 39);
    auto iv = eval_certified(a, TailBound{tail, Rational(1)}, rat(1, 2), 20);
    CHECK(iv[0].contains(Rational(2)));
}

TEST_CASE("eval_certified rejects points outside certified radius") {
    auto a = scalar({1, 1});
    CHECK_THROWS_AS(eval_certified(a, TailBound{0, rat(1, 2)}, Rational(1), 10), radius_error);
}

TEST_CASE("eval_certified contains closed forms at random admissible points") {
    Lcg rng(2024);
    // polynomial case: series of 1 + 3t + t^2 evaluated anywhere, zero tail
    auto a = scalar({1, 3, 1});
    for (int trial = 0; trial < 100; ++trial) {
        Rational t = rat(rng.next_in(-50, 50), 64);
        auto iv = eval_certified(a, TailBound{0, Rational(2)}, t, 24);
        Rational exact = 1 + 3 * t + t * t;
        CHECK(iv[0].contains(exact));
        CHECK(iv[0].width() <= Rational(1) / pow_int(rat(2), 23));
    }
}

TEST_CASE("interval log and sqrt enclosures") {
    auto l2 = log_enclosure(Rational(2), 40);
    CHECK(l2.lo.to_rational() > rat(693146, 1000000));
    CHECK(l2.hi.to_rational() < rat(693148, 1000000));
    auto s2 = sqrt_enclosure(Rational(2), 40);
    CHECK(s2.lo.to_rational() * s2.lo.to_rational() <= Rational(2));
    CHECK(s2.hi.to_rational() * s2.hi.to_rational() >= Rational(2));
    CHECK(s2.width() <= Rational(1) / pow_int(rat(2), 38));
    CHECK(exp_upper(Rational(1)) >= rat(271828, 100000));
    CHECK(exp_upper(Rational(1)) <= Rational(4));
}

TEST_CASE("dyadic canonical form and rounding") {
    Dyadic d(Integer(12), 0);
    CHECK(d.mantissa == 3);
    CHECK(d.exponent == 2);
    CHECK(dyadic_floor(rat(1, 3), 4).to_rational() == rat(5, 16));
    CHECK(dyadic_ceil(rat(1, 3), 4).to_rational() == rat(6, 16));
    CHECK(dyadic_floor(rat(1, 2), 4).to_rational() == rat(1, 2));
}

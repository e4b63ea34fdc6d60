#include <catch2/catch_amalgamated.hpp>

#include "stratode/io.hpp"

using namespace stratode;

namespace {

// canonical-form fixed point: emitting a reparsed echo reproduces the echo
void check_roundtrip(const ProblemFile& pf) {
    std::string echo = emit_problem(pf);
    ProblemFile again = parse_problem(echo);
    CHECK(emit_problem(again) == echo);
}

} // namespace

TEST_CASE("polynomial right-hand sides parse and round-trip") {
    ProblemFile pf = parse_problem(
        "dim=1\nt0=0\ny0=1\nrhs=poly: y1^2\ndomain=[0,2]x[-10,10]\n");
    CHECK(pf.rhs == RhsKind::poly);
    REQUIRE(pf.poly.has_value());
    CHECK(pf.poly->dim == 1);
    CHECK(pf.poly->comps[0].degree() == 2);
    CHECK(pf.t0 == 0);
    CHECK(pf.y0 == std::vector<Rational>{1});
    CHECK(pf.domain.t_hi == 2);
    check_roundtrip(pf);
}

TEST_CASE("multi-component systems with time dependence") {
    ProblemFile pf = parse_problem(
        "dim=2\nt0=0\ny0=1,0\nrhs=poly: t*y2; y1 - 1/3\n"
        "domain=[0,1]x[-2,2]x[-2,2]\n");
    REQUIRE(pf.poly.has_value());
    CHECK(pf.poly->dim == 2);
    CHECK(pf.poly->depends_on_t());
    CHECK(pf.domain.box.size() == 2);
    check_roundtrip(pf);
}

TEST_CASE("expression right-hand sides keep sqrt and abs") {
    ProblemFile pf = parse_problem(
        "dim=1\nt0=0\ny0=0\nrhs=expr: 2*sqrt(abs(y1))\ndomain=[0,1]x[-4,4]\n");
    CHECK(pf.rhs == RhsKind::expr);
    CHECK_FALSE(expr_rational_valued(pf.comps[0]));
    check_roundtrip(pf);
    // f(0, 1/4) = 2 sqrt(1/4) = 1
    Interval v = expr_eval(pf.comps[0], Interval(Dyadic(0)),
                           {Interval::hull(rat(1, 4), 64)}, 64);
    CHECK(v.lo.to_rational() <= 1);
    CHECK(v.hi.to_rational() >= 1);
    CHECK(Rational(v.hi.to_rational() - v.lo.to_rational()) <= rat(1, 1l << 40));
}

TEST_CASE("modulus lines parse every family") {
    ProblemFile rlog = parse_problem(
        "dim=1\nrhs=expr: y1\ndomain=[0,1]x[-1,1]\nmodulus=osgood: rlog 1\n");
    REQUIRE(rlog.modulus.has_value());
    CHECK(rlog.modulus->family == ModulusFamily::rlog);
    CHECK(rlog.modulus->c == 1);
    check_roundtrip(rlog);

    ProblemFile lin = parse_problem(
        "dim=1\nrhs=expr: y1\ndomain=[0,1]x[-1,1]\nmodulus=osgood: linear 3/2\n");
    REQUIRE(lin.modulus.has_value());
    CHECK(lin.modulus->family == ModulusFamily::linear);
    CHECK(lin.modulus->c == rat(3, 2));
    check_roundtrip(lin);

    ProblemFile pow = parse_problem(
        "dim=1\nrhs=expr: y1\ndomain=[0,1]x[-1,1]\nmodulus=osgood: power 2 1/2\n");
    REQUIRE(pow.modulus.has_value());
    CHECK(pow.modulus->family == ModulusFamily::power);
    check_roundtrip(pow);

    ProblemFile tab = parse_problem(
        "dim=1\nrhs=expr: y1\ndomain=[0,1]x[-1,1]\n"
        "modulus=osgood: table 1/8:1/16,1/4:1/4\n");
    REQUIRE(tab.modulus.has_value());
    CHECK(tab.modulus->family == ModulusFamily::table);
    check_roundtrip(tab);
}

TEST_CASE("piecewise fields parse into working layered structures") {
    ProblemFile pf = parse_problem(
        "dim=1\nt0=0\ny0=0\ndomain=[0,1]x[-10,10]\n"
        "break.tower=harmonic a=0 c=1 n0=1\n"
        "tower.limit=0\ntower.members=1|-1\ntower.gaps=1|-1\n"
        "piece=0\npiece=0\n");
    CHECK(pf.rhs == RhsKind::piecewise);
    REQUIRE(pf.piecewise.has_value());
    CHECK(derived_rank(*pf.piecewise).rank == 3);
    check_roundtrip(pf);
}

TEST_CASE("point breaks and geometric towers parse") {
    ProblemFile pf = parse_problem(
        "dim=1\nt0=0\ny0=0\ndomain=[0,1]x[-10,10]\n"
        "break.point=1/2:1\n"
        "piece=1\npiece=-1\n");
    REQUIRE(pf.piecewise.has_value());
    CHECK(pf.piecewise->breaks.points == std::vector<Rational>{rat(1, 2)});
    CHECK(derived_rank(*pf.piecewise).rank == 2);
    check_roundtrip(pf);

    ProblemFile geo = parse_problem(
        "dim=1\nt0=0\ny0=0\ndomain=[0,1]x[-10,10]\n"
        "break.tower=geometric a=0 c=1 q=1/2\n"
        "tower.limit=0\ntower.members=1\ntower.gaps=1|-1\n"
        "piece=0\npiece=0\n");
    REQUIRE(geo.piecewise.has_value());
    REQUIRE(geo.piecewise->breaks.towers.size() == 1);
    CHECK(geo.piecewise->breaks.towers[0].q == rat(1, 2));
    check_roundtrip(geo);
}

TEST_CASE("options are carried through verbatim") {
    ProblemFile pf = parse_problem(
        "dim=1\nrhs=poly: y1\ndomain=[0,1]x[-2,2]\noption.order=32\n");
    REQUIRE(pf.options.count("order") == 1);
    CHECK(pf.options.at("order") == "32");
    check_roundtrip(pf);
}

TEST_CASE("parse errors carry line and column information") {
    try {
        parse_problem("dim=1\nrhs=poly: y1^^2\ndomain=[0,1]x[0,1]\n");
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line == 2);
        CHECK(e.column > 0);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_problem("bogus=1\ndomain=[0,1]x[0,1]\nrhs=poly: y1\n"),
                    parse_error);
    // missing required pieces
    CHECK_THROWS_AS(parse_problem("dim=1\nrhs=poly: y1\n"), parse_error);
    CHECK_THROWS_AS(parse_problem("dim=1\ndomain=[0,1]x[0,1]\n"), parse_error);
    // malformed domain
    CHECK_THROWS_AS(parse_problem("dim=1\nrhs=poly: y1\ndomain=[0,1]\n"), parse_error);
    CHECK_THROWS_AS(parse_problem("dim=1\nrhs=poly: y1\ndomain=[1,0]x[0,1]\n"),
                    parse_error);
    // component count must match dim
    CHECK_THROWS_AS(parse_problem("dim=2\nrhs=poly: y1\ndomain=[0,1]x[0,1]x[0,1]\n"),
                    parse_error);
    // unknown variable index
    CHECK_THROWS_AS(parse_problem("dim=1\nrhs=poly: y2\ndomain=[0,1]x[0,1]\n"),
                    parse_error);
}

TEST_CASE("rational literals versus division in expressions") {
    // digits '/' digits immediately adjacent form one literal
    ExprPtr lit = parse_expression("1/2");
    CHECK(lit->kind == ExprKind::constant);
    CHECK(lit->value == rat(1, 2));
    // spaced or non-literal operands are a division node
    CHECK(parse_expression("1 / 2")->kind == ExprKind::div);
    CHECK(parse_expression("y1/2")->kind == ExprKind::div);
    // decimals
    CHECK(parse_expression("0.25")->value == rat(1, 4));
    // precedence and exponent expansion
    ExprPtr e = parse_expression("1/2*t - y1/2 + min(t, y2)^2");
    CHECK(e->kind == ExprKind::add);
    CHECK_THROWS_AS(parse_expression("t^"), parse_error);
    CHECK_THROWS_AS(parse_expression("t^y1"), parse_error);
    CHECK_THROWS_AS(parse_expression("(t"), parse_error);
}

TEST_CASE("expressions lower to polynomials when possible") {
    Polynomial p = expr_to_polynomial(parse_expression("(1+t)*y1^2 - 3/4"), 1);
    CHECK(p.degree() == 3);
    CHECK(p.eval(rat(1), {rat(2)}) == rat(2) * 4 - rat(3, 4));
    // dividing by a constant is fine; by a variable is not
    CHECK(expr_to_polynomial(parse_expression("y1 / 2"), 1).degree() == 1);
    CHECK_THROWS_AS(expr_to_polynomial(parse_expression("1 / y1"), 1), parse_error);
    CHECK_THROWS_AS(expr_to_polynomial(parse_expression("sqrt(y1)"), 1), parse_error);
}

TEST_CASE("reports serialize to clean TSV") {
    RunReport rep;
    rep.command = "solve prob.ivp";
    rep.tsv_header = {"k", "value"};
    rep.row({"1", "2"});
    CHECK(emit_tsv(rep) == "k\tvalue\n1\t2\n");
    rep.add("note");
    std::string text = emit_report(rep);
    CHECK(text.find("solve prob.ivp") != std::string::npos);
    CHECK(text.find("note") != std::string::npos);
}

TEST_CASE("value_string shows exact values with decimal hints") {
    std::string s = value_string(rat(1, 3));
    CHECK(s.find("1/3") != std::string::npos);
    CHECK(s.find("0.333333") != std::string::npos);
}

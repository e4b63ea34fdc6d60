#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "stratode/classify.hpp"
#include "stratode/errors.hpp"
#include "stratode/expr.hpp"
#include "stratode/modulus.hpp"
#include "stratode/polynomial.hpp"
#include "stratode/strata.hpp"

namespace stratode {

// ---------------------------------------------------------------------------
// Expression parsing: rational literals p/q or decimals, variables t and
// y1..yd, operators + - * / ^, parentheses, and sqrt/abs/min/max calls.

namespace detail {

struct ExprParser {
    const std::string& s;
    std::size_t pos = 0;
    int line;
    int col_base;  // column of s[0] in the original file line

    ExprParser(const std::string& text, int line_, int col_base_)
        : s(text), line(line_), col_base(col_base_) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error(msg, line, col_base + static_cast<int>(pos));
    }
    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }

    ExprPtr parse() {
        ExprPtr e = parse_sum();
        skip_ws();
        if (pos != s.size()) fail("unexpected trailing input in expression");
        return e;
    }

    ExprPtr parse_sum() {
        ExprPtr e = parse_term();
        for (;;) {
            if (eat('+'))
                e = e + parse_term();
            else if (eat('-'))
                e = e - parse_term();
            else
                return e;
        }
    }
    ExprPtr parse_term() {
        ExprPtr e = parse_power();
        for (;;) {
            if (eat('*'))
                e = e * parse_power();
            else if (eat('/'))
                e = e / parse_power();
            else
                return e;
        }
    }
    ExprPtr parse_power() {
        ExprPtr e = parse_unary();
        if (eat('^')) {
            skip_ws();
            std::size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (pos == start) fail("exponent must be a nonnegative integer");
            unsigned long k = std::stoul(s.substr(start, pos - start));
            ExprPtr r = expr_const(1);
            for (unsigned long i = 0; i < k; ++i) r = r * e;
            return r;
        }
        return e;
    }
    ExprPtr parse_unary() {
        if (eat('-')) return expr_const(0) - parse_unary();
        return parse_atom();
    }
    ExprPtr parse_atom() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end of expression");
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        if (c == '(') {
            ++pos;
            ExprPtr e = parse_sum();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos;
            while (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos]))) ++pos;
            std::string word = s.substr(start, pos - start);
            if (word == "t") return expr_t();
            if (word.size() >= 2 && word[0] == 'y') {
                for (std::size_t i = 1; i < word.size(); ++i)
                    if (!std::isdigit(static_cast<unsigned char>(word[i])))
                        fail("unknown identifier '" + word + "'");
                int j = std::stoi(word.substr(1));
                if (j < 1) fail("variable indices start at y1");
                return expr_y(j - 1);
            }
            if (word == "sqrt" || word == "abs") {
                if (!eat('(')) fail("expected '(' after " + word);
                ExprPtr a = parse_sum();
                if (!eat(')')) fail("expected ')'");
                return word == "sqrt" ? expr_sqrt(a) : expr_abs(a);
            }
            if (word == "min" || word == "max") {
                if (!eat('(')) fail("expected '(' after " + word);
                ExprPtr a = parse_sum();
                if (!eat(',')) fail("expected ',' in " + word);
                ExprPtr b = parse_sum();
                if (!eat(')')) fail("expected ')'");
                return word == "min" ? expr_min(a, b) : expr_max(a, b);
            }
            fail("unknown identifier '" + word + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }
    ExprPtr parse_number() {
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos < s.size() && s[pos] == '.') {
            ++pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            return expr_const(parse_rational(s.substr(start, pos - start)));
        }
        if (pos < s.size() && s[pos] == '/') {
            // a '/' directly after digits is a rational literal only when
            // followed by digits with no space (else it is division)
            std::size_t save = pos;
            ++pos;
            std::size_t dstart = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (pos > dstart) return expr_const(parse_rational(s.substr(start, pos - start)));
            pos = save;
        }
        return expr_const(parse_rational(s.substr(start, pos - start)));
    }
};

} // namespace detail

inline ExprPtr parse_expression(const std::string& text, int line = 0, int col_base = 0) {
    detail::ExprParser p(text, line, col_base);
    return p.parse();
}

// Lower an expression tree to a polynomial; fails on non-polynomial nodes.
inline Polynomial expr_to_polynomial(const ExprPtr& e, int dim, int line = 0) {
    switch (e->kind) {
        case ExprKind::constant: return Polynomial::constant(e->value, dim);
        case ExprKind::var_t: return Polynomial::var_t(dim);
        case ExprKind::var_y:
            if (e->index >= dim) throw parse_error("variable index exceeds dim", line);
            return Polynomial::var_y(e->index, dim);
        case ExprKind::add:
            return expr_to_polynomial(e->a, dim, line) + expr_to_polynomial(e->b, dim, line);
        case ExprKind::sub:
            return expr_to_polynomial(e->a, dim, line) - expr_to_polynomial(e->b, dim, line);
        case ExprKind::mul:
            return expr_to_polynomial(e->a, dim, line) * expr_to_polynomial(e->b, dim, line);
        case ExprKind::div: {
            Polynomial d = expr_to_polynomial(e->b, dim, line);
            if (d.depends_on_t() || d.degree() > 0 || d.is_zero())
                throw parse_error("polynomial rhs allows division by constants only", line);
            Rational c = d.eval(0, std::vector<Rational>(dim, 0));
            return (1 / c) * expr_to_polynomial(e->a, dim, line);
        }
        default:
            throw parse_error("sqrt/abs/min/max are not allowed in a polynomial rhs", line);
    }
}

inline std::string expr_to_string(const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::constant: return e->value.get_str();
        case ExprKind::var_t: return "t";
        case ExprKind::var_y: return "y" + std::to_string(e->index + 1);
        case ExprKind::add: return "(" + expr_to_string(e->a) + "+" + expr_to_string(e->b) + ")";
        case ExprKind::sub: return "(" + expr_to_string(e->a) + "-" + expr_to_string(e->b) + ")";
        case ExprKind::mul: return "(" + expr_to_string(e->a) + "*" + expr_to_string(e->b) + ")";
        case ExprKind::div: return "(" + expr_to_string(e->a) + "/" + expr_to_string(e->b) + ")";
        case ExprKind::sqrt: return "sqrt(" + expr_to_string(e->a) + ")";
        case ExprKind::abs: return "abs(" + expr_to_string(e->a) + ")";
        case ExprKind::min:
            return "min(" + expr_to_string(e->a) + "," + expr_to_string(e->b) + ")";
        case ExprKind::max:
            return "max(" + expr_to_string(e->a) + "," + expr_to_string(e->b) + ")";
    }
    throw std::logic_error("unreachable");
}

inline std::string polynomial_to_string(const Polynomial& p) {
    if (p.is_zero()) return "0";
    std::string out;
    for (const auto& [m, c] : p.terms) {
        std::string term = c.get_str();
        if (m.t_exp == 1) term += "*t";
        if (m.t_exp > 1) term += "*t^" + std::to_string(m.t_exp);
        for (int j = 0; j < p.dim; ++j) {
            if (m.y_exp[j] == 1) term += "*y" + std::to_string(j + 1);
            if (m.y_exp[j] > 1)
                term += "*y" + std::to_string(j + 1) + "^" + std::to_string(m.y_exp[j]);
        }
        if (!out.empty()) out += " + ";
        out += term;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Problem files.

enum class RhsKind { none, poly, expr, piecewise };

struct ProblemFile {
    int dim = 1;
    Rational t0 = 0;
    std::vector<Rational> y0;
    RhsKind rhs = RhsKind::none;
    std::vector<ExprPtr> comps;  // expression form of the rhs (poly and expr)
    std::optional<PolynomialSystem> poly;
    RectDomain domain;
    std::optional<ModulusSpec> modulus;
    std::optional<PiecewiseField> piecewise;
    std::map<std::string, std::string> options;

    FieldSpec field() const {
        if (rhs != RhsKind::poly && rhs != RhsKind::expr)
            throw std::domain_error("problem has no continuous rhs");
        FieldSpec f(comps, domain);
        f.modulus = modulus;
        f.bound_hint = std::nullopt;
        return f;
    }
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline Rational parse_rat_or_fail(const std::string& text, int line) {
    try {
        return parse_rational(trim(text));
    } catch (const std::domain_error& e) {
        throw parse_error(e.what(), line);
    }
}

inline std::vector<Rational> parse_rat_list(const std::string& text, int line) {
    std::vector<Rational> out;
    for (const std::string& part : split(text, ','))
        out.push_back(parse_rat_or_fail(part, line));
    return out;
}

// "[a,b]x[c,d]x..." -> time interval plus space box
inline RectDomain parse_domain(const std::string& text, int line) {
    std::vector<std::pair<Rational, Rational>> intervals;
    std::size_t pos = 0;
    std::string s = trim(text);
    while (pos < s.size()) {
        if (s[pos] != '[') throw parse_error("expected '[' in domain", line);
        std::size_t close = s.find(']', pos);
        if (close == std::string::npos) throw parse_error("unterminated interval in domain", line);
        std::string inner = s.substr(pos + 1, close - pos - 1);
        auto parts = split(inner, ',');
        if (parts.size() != 2) throw parse_error("interval needs two endpoints", line);
        intervals.emplace_back(parse_rat_or_fail(parts[0], line),
                               parse_rat_or_fail(parts[1], line));
        pos = close + 1;
        if (pos < s.size()) {
            if (s[pos] != 'x') throw parse_error("expected 'x' between intervals", line);
            ++pos;
        }
    }
    if (intervals.size() < 2)
        throw parse_error("domain needs a time interval and at least one space interval", line);
    std::vector<std::pair<Rational, Rational>> box(intervals.begin() + 1, intervals.end());
    try {
        return RectDomain(intervals[0].first, intervals[0].second, std::move(box));
    } catch (const std::domain_error& e) {
        throw parse_error(e.what(), line);
    }
}

// "osgood: <family> <params...>"
inline ModulusSpec parse_modulus(const std::string& text, int line) {
    std::string s = trim(text);
    const std::string prefix = "osgood:";
    if (s.rfind(prefix, 0) != 0) throw parse_error("modulus must start with 'osgood:'", line);
    std::istringstream in(s.substr(prefix.size()));
    std::string family;
    in >> family;
    std::vector<std::string> args;
    std::string tok;
    while (in >> tok) args.push_back(tok);
    try {
        if (family == "linear") {
            if (args.empty()) throw parse_error("linear modulus needs L", line);
            Rational L = parse_rat_or_fail(args[0], line);
            return args.size() > 1 ? ModulusSpec::linear(L, parse_rat_or_fail(args[1], line))
                                   : ModulusSpec::linear(L);
        }
        if (family == "power") {
            if (args.size() < 2) throw parse_error("power modulus needs c and p", line);
            Rational c = parse_rat_or_fail(args[0], line);
            Rational p = parse_rat_or_fail(args[1], line);
            return args.size() > 2 ? ModulusSpec::power(c, p, parse_rat_or_fail(args[2], line))
                                   : ModulusSpec::power(c, p);
        }
        if (family == "rlog") {
            if (args.empty()) throw parse_error("rlog modulus needs c", line);
            Rational c = parse_rat_or_fail(args[0], line);
            return args.size() > 1 ? ModulusSpec::rlog(c, parse_rat_or_fail(args[1], line))
                                   : ModulusSpec::rlog(c);
        }
        if (family == "table") {
            if (args.empty()) throw parse_error("table modulus needs breakpoints", line);
            std::vector<std::pair<Rational, Rational>> pts;
            for (const std::string& pair : split(args[0], ',')) {
                auto rw = split(pair, ':');
                if (rw.size() != 2) throw parse_error("table breakpoint must be r:w", line);
                pts.emplace_back(parse_rat_or_fail(rw[0], line), parse_rat_or_fail(rw[1], line));
            }
            return args.size() > 1 ? ModulusSpec::table(pts, parse_rat_or_fail(args[1], line))
                                   : ModulusSpec::table(pts);
        }
    } catch (const invalid_modulus_error& e) {
        throw parse_error(e.what(), line);
    }
    throw parse_error("unknown modulus family '" + family + "'", line);
}

// one or two '|'-separated rational vectors
inline std::vector<std::vector<Rational>> parse_patterns(const std::string& text, int line) {
    std::vector<std::vector<Rational>> out;
    for (const std::string& part : split(text, '|')) out.push_back(parse_rat_list(part, line));
    if (out.empty() || out.size() > 2)
        throw parse_error("value pattern needs one or two '|'-separated vectors", line);
    return out;
}

} // namespace detail

inline ProblemFile parse_problem(const std::string& text) {
    ProblemFile pf;
    bool have_domain = false;
    std::vector<std::pair<Rational, std::vector<Rational>>> break_points;
    std::vector<TowerComponent> towers;
    std::vector<TowerValues> tower_vals;
    std::vector<std::vector<ExprPtr>> pieces;
    std::string rhs_text;
    int rhs_line = 0, rhs_col = 0;

    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = detail::trim(s);
        if (s.empty()) continue;
        auto eq = s.find('=');
        if (eq == std::string::npos) throw parse_error("expected key=value", line);
        std::string key = detail::trim(s.substr(0, eq));
        std::string val = detail::trim(s.substr(eq + 1));

        if (key == "dim") {
            try {
                pf.dim = std::stoi(val);
            } catch (...) {
                throw parse_error("dim must be an integer", line);
            }
            if (pf.dim < 1) throw parse_error("dim must be positive", line);
        } else if (key == "t0") {
            pf.t0 = detail::parse_rat_or_fail(val, line);
        } else if (key == "y0") {
            pf.y0 = detail::parse_rat_list(val, line);
        } else if (key == "rhs") {
            if (pf.rhs != RhsKind::none) throw parse_error("duplicate rhs", line);
            if (val.rfind("poly:", 0) == 0) {
                pf.rhs = RhsKind::poly;
                rhs_text = detail::trim(val.substr(5));
            } else if (val.rfind("expr:", 0) == 0) {
                pf.rhs = RhsKind::expr;
                rhs_text = detail::trim(val.substr(5));
            } else {
                throw parse_error("rhs must start with 'poly:' or 'expr:'", line);
            }
            rhs_line = line;
            rhs_col = static_cast<int>(raw.find(rhs_text));
        } else if (key == "domain") {
            pf.domain = detail::parse_domain(val, line);
            have_domain = true;
        } else if (key == "modulus") {
            pf.modulus = detail::parse_modulus(val, line);
        } else if (key == "break.point") {
            auto parts = detail::split(val, ':');
            if (parts.size() != 2) throw parse_error("break.point must be t:values", line);
            break_points.emplace_back(detail::parse_rat_or_fail(parts[0], line),
                                      detail::parse_rat_list(parts[1], line));
        } else if (key == "break.tower") {
            std::istringstream ts(val);
            std::string family;
            ts >> family;
            std::map<std::string, std::string> kv;
            std::string tok;
            while (ts >> tok) {
                auto e2 = tok.find('=');
                if (e2 == std::string::npos)
                    throw parse_error("tower parameters must be key=value", line);
                kv[tok.substr(0, e2)] = tok.substr(e2 + 1);
            }
            Rational a = kv.count("a") ? detail::parse_rat_or_fail(kv["a"], line) : Rational(0);
            Rational c = kv.count("c") ? detail::parse_rat_or_fail(kv["c"], line) : Rational(1);
            long n0 = kv.count("n0") ? std::stol(kv["n0"]) : 1;
            try {
                if (family == "harmonic") {
                    towers.push_back(harmonic_tower(a, c, n0));
                } else if (family == "geometric") {
                    Rational q = kv.count("q") ? detail::parse_rat_or_fail(kv["q"], line)
                                               : Rational(1, 2);
                    towers.push_back(geometric_tower(a, c, q, n0));
                } else {
                    throw parse_error("tower family must be harmonic or geometric", line);
                }
            } catch (const std::domain_error& e) {
                throw parse_error(e.what(), line);
            }
            tower_vals.emplace_back();
        } else if (key == "tower.limit" || key == "tower.members" || key == "tower.gaps") {
            if (tower_vals.empty())
                throw parse_error("tower values before any break.tower", line);
            TowerValues& tv = tower_vals.back();
            if (key == "tower.limit")
                tv.limit_value = detail::parse_rat_list(val, line);
            else if (key == "tower.members")
                tv.member_values = detail::parse_patterns(val, line);
            else
                tv.gap_values = detail::parse_patterns(val, line);
        } else if (key == "piece") {
            std::vector<ExprPtr> comps;
            for (const std::string& part : detail::split(val, ';'))
                comps.push_back(parse_expression(detail::trim(part), line));
            pieces.push_back(std::move(comps));
        } else if (key.rfind("option.", 0) == 0) {
            pf.options[key.substr(7)] = val;
        } else {
            throw parse_error("unknown key '" + key + "'", line);
        }
    }

    if (!have_domain) throw parse_error("missing domain", line);
    if (pf.y0.empty()) pf.y0.assign(pf.dim, 0);
    if (static_cast<int>(pf.y0.size()) != pf.dim)
        throw parse_error("y0 length does not match dim", line);
    if (pf.domain.dim() != pf.dim) throw parse_error("domain box does not match dim", line);

    bool has_piecewise = !break_points.empty() || !towers.empty() || !pieces.empty();
    if (pf.rhs != RhsKind::none && has_piecewise)
        throw parse_error("a file holds either a continuous rhs or a piecewise spec", line);

    if (pf.rhs == RhsKind::poly || pf.rhs == RhsKind::expr) {
        for (const std::string& part : detail::split(rhs_text, ';'))
            pf.comps.push_back(parse_expression(detail::trim(part), rhs_line, rhs_col));
        if (static_cast<int>(pf.comps.size()) != pf.dim)
            throw parse_error("rhs component count does not match dim", rhs_line);
        if (pf.rhs == RhsKind::poly) {
            std::vector<Polynomial> ps;
            for (const auto& e : pf.comps) ps.push_back(expr_to_polynomial(e, pf.dim, rhs_line));
            pf.poly = PolynomialSystem(std::move(ps));
        }
    } else if (has_piecewise) {
        pf.rhs = RhsKind::piecewise;
        PiecewiseField f;
        f.dim = pf.dim;
        f.domain = pf.domain;
        for (auto& [t, v] : break_points) {
            f.breaks.points.push_back(t);
            f.values.point_values.push_back(v);
        }
        f.breaks.towers = std::move(towers);
        f.values.tower_values = std::move(tower_vals);
        f.pieces = std::move(pieces);
        try {
            f.validate();
        } catch (const std::domain_error& e) {
            throw parse_error(e.what(), line);
        }
        pf.piecewise = std::move(f);
    } else {
        throw parse_error("missing rhs", line);
    }
    return pf;
}

// Canonical echo: a deterministic rendering that parse_problem maps back to
// an identical structure.
inline std::string emit_problem(const ProblemFile& pf) {
    std::ostringstream out;
    out << "dim=" << pf.dim << "\n";
    out << "t0=" << pf.t0.get_str() << "\n";
    out << "y0=";
    for (std::size_t i = 0; i < pf.y0.size(); ++i)
        out << (i ? "," : "") << pf.y0[i].get_str();
    out << "\n";
    out << "domain=[" << pf.domain.t_lo.get_str() << "," << pf.domain.t_hi.get_str() << "]";
    for (const auto& [lo, hi] : pf.domain.box)
        out << "x[" << lo.get_str() << "," << hi.get_str() << "]";
    out << "\n";
    if (pf.rhs == RhsKind::poly || pf.rhs == RhsKind::expr) {
        out << "rhs=" << (pf.rhs == RhsKind::poly ? "poly: " : "expr: ");
        for (std::size_t i = 0; i < pf.comps.size(); ++i)
            out << (i ? "; " : "") << expr_to_string(pf.comps[i]);
        out << "\n";
    }
    if (pf.modulus) {
        const ModulusSpec& m = *pf.modulus;
        out << "modulus=osgood: ";
        switch (m.family) {
            case ModulusFamily::linear:
                out << "linear " << m.c.get_str() << " " << m.delta.get_str();
                break;
            case ModulusFamily::power:
                out << "power " << m.c.get_str() << " " << m.p.get_str() << " "
                    << m.delta.get_str();
                break;
            case ModulusFamily::rlog:
                out << "rlog " << m.c.get_str() << " " << m.delta.get_str();
                break;
            case ModulusFamily::table: {
                out << "table ";
                for (std::size_t i = 0; i < m.breakpoints.size(); ++i)
                    out << (i ? "," : "") << m.breakpoints[i].first.get_str() << ":"
                        << m.breakpoints[i].second.get_str();
                out << " " << m.delta.get_str();
                break;
            }
        }
        out << "\n";
    }
    if (pf.piecewise) {
        const PiecewiseField& f = *pf.piecewise;
        for (std::size_t i = 0; i < f.breaks.points.size(); ++i) {
            out << "break.point=" << f.breaks.points[i].get_str() << ":";
            const auto& v = f.values.point_values[i];
            for (std::size_t j = 0; j < v.size(); ++j) out << (j ? "," : "") << v[j].get_str();
            out << "\n";
        }
        auto emit_patterns = [&](const std::vector<std::vector<Rational>>& pats) {
            for (std::size_t p = 0; p < pats.size(); ++p) {
                if (p) out << "|";
                for (std::size_t j = 0; j < pats[p].size(); ++j)
                    out << (j ? "," : "") << pats[p][j].get_str();
            }
        };
        for (std::size_t i = 0; i < f.breaks.towers.size(); ++i) {
            const TowerComponent& t = f.breaks.towers[i];
            out << "break.tower="
                << (t.family == TowerFamily::harmonic ? "harmonic" : "geometric")
                << " a=" << t.a.get_str() << " c=" << t.c.get_str();
            if (t.family == TowerFamily::geometric) out << " q=" << t.q.get_str();
            out << " n0=" << t.n0 << "\n";
            const TowerValues& tv = f.values.tower_values[i];
            out << "tower.limit=";
            for (std::size_t j = 0; j < tv.limit_value.size(); ++j)
                out << (j ? "," : "") << tv.limit_value[j].get_str();
            out << "\n";
            out << "tower.members=";
            emit_patterns(tv.member_values);
            out << "\n";
            out << "tower.gaps=";
            emit_patterns(tv.gap_values);
            out << "\n";
        }
        for (const auto& piece : f.pieces) {
            out << "piece=";
            for (std::size_t j = 0; j < piece.size(); ++j)
                out << (j ? "; " : "") << expr_to_string(piece[j]);
            out << "\n";
        }
    }
    for (const auto& [k, v] : pf.options) out << "option." << k << "=" << v << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Reports.

struct RunReport {
    std::string command;
    std::vector<std::string> lines;  // human-readable section
    std::vector<std::string> tsv_header;
    std::vector<std::vector<std::string>> tsv_rows;
    long millis = 0;

    void add(const std::string& s) { lines.push_back(s); }
    void row(std::vector<std::string> r) {
        if (r.size() != tsv_header.size())
            throw std::logic_error("TSV row width does not match the header");
        tsv_rows.push_back(std::move(r));
    }
};

inline std::string emit_tsv(const RunReport& rep) {
    std::ostringstream out;
    for (std::size_t i = 0; i < rep.tsv_header.size(); ++i)
        out << (i ? "\t" : "") << rep.tsv_header[i];
    out << "\n";
    for (const auto& r : rep.tsv_rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "\t" : "") << r[i];
        out << "\n";
    }
    return out.str();
}

inline std::string emit_report(const RunReport& rep) {
    std::ostringstream out;
    out << "command: " << rep.command << "\n";
    for (const auto& l : rep.lines) out << l << "\n";
    out << "elapsed_ms: " << rep.millis << "\n";
    return out.str();
}

// Exact rational plus m*2^e and decimal renderings, for result values.
inline std::string value_string(const Rational& q) {
    return q.get_str() + " (~" + decimal_string(q) + ")";
}
inline std::string value_string(const Dyadic& d) {
    return to_string(d) + " (~" + decimal_string(d.to_rational()) + ")";
}

} // namespace stratode

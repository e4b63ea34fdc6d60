// stratode: certified solving, continuation, classification and benchmarks
// for ODE initial value problems on rectangles.
//
// Usage:
//   stratode solve FILE [--method picard|newton|euler] [--order N]
//                       [--to T] [--prec n] [--out TSV]
//   stratode continue FILE --to T --prec n [--out TSV]
//   stratode classify FILE [--max-rank r] [--out TSV]
//   stratode stratify FILE [--max-rank r] [--out TSV]
//   stratode bench <doubling|patches|expblowup|eulerorder> [--targets a,b,..]
//                  [--out TSV]
//
// Exit status: 0 success, 2 parse/usage errors, 3 solver errors.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "stratode/continuation.hpp"
#include "stratode/euler.hpp"
#include "stratode/io.hpp"
#include "stratode/polyivp.hpp"

namespace {

using namespace stratode;

struct Args {
    std::string sub;
    std::string file;
    std::map<std::string, std::string> flags;

    std::string flag(const std::string& k, const std::string& dflt = "") const {
        auto it = flags.find(k);
        return it == flags.end() ? dflt : it->second;
    }
    bool has(const std::string& k) const { return flags.count(k) > 0; }
};

Args parse_args(int argc, char** argv) {
    Args a;
    if (argc < 2) throw std::domain_error("missing subcommand");
    a.sub = argv[1];
    for (int i = 2; i < argc; ++i) {
        std::string s = argv[i];
        if (s.rfind("--", 0) == 0) {
            if (i + 1 >= argc) throw std::domain_error("flag " + s + " needs a value");
            a.flags[s.substr(2)] = argv[++i];
        } else if (a.file.empty()) {
            a.file = s;
        } else {
            throw std::domain_error("unexpected argument " + s);
        }
    }
    return a;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::domain_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

PolyIVP make_polyivp(const ProblemFile& pf) {
    if (!pf.poly) throw std::domain_error("this command needs a polynomial rhs (rhs=poly:)");
    return PolyIVP(*pf.poly, pf.t0, pf.y0, pf.domain);
}

Rational resolution_floor() {
    const char* env = std::getenv("STRATA_RESOLUTION_FLOOR");
    if (!env) return Rational(1, 1024);
    Rational f = parse_rational(env);
    if (f <= 0) throw std::domain_error("STRATA_RESOLUTION_FLOOR must be positive");
    return f;
}

long flag_long(const Args& a, const std::string& k, long dflt) {
    std::string v = a.flag(k);
    return v.empty() ? dflt : std::stol(v);
}

Rational eps_from_prec(long n) {
    return 1 / pow_int(rat(2), static_cast<unsigned long>(n));
}

// ---------------------------------------------------------------------------

void cmd_solve(const Args& args, RunReport& rep) {
    ProblemFile pf = parse_problem(read_file(args.file));
    std::string method = args.flag("method", "newton");
    if (method == "picard" || method == "newton") {
        PolyIVP ivp = make_polyivp(pf);
        std::size_t order = static_cast<std::size_t>(flag_long(args, "order", 16));
        TruncatedSeries s = method == "picard" ? picard_solve(ivp, order)
                                               : newton_solve(ivp, order).first;
        rep.add("method: " + method);
        rep.add("order: " + std::to_string(order));
        rep.tsv_header = {"k"};
        for (int j = 0; j < ivp.P.dim; ++j) rep.tsv_header.push_back("c" + std::to_string(j + 1));
        for (std::size_t k = 0; k < s.order(); ++k) {
            std::vector<std::string> row{std::to_string(k)};
            for (int j = 0; j < ivp.P.dim; ++j) row.push_back(s.at(k, j).get_str());
            rep.row(std::move(row));
        }
        rep.add("coefficients: " + std::to_string(s.order()) + " orders emitted");
        return;
    }
    if (method == "euler") {
        FieldSpec f = pf.field();
        Rational T = args.has("to") ? parse_rational(args.flag("to")) : pf.domain.t_hi;
        long n = flag_long(args, "prec", 10);
        Polygon sol = solve_certified(f, pf.t0, pf.y0, T - pf.t0, eps_from_prec(n));
        rep.add("method: euler (certified)");
        rep.add("steps: " + std::to_string(sol.steps()));
        for (std::size_t j = 0; j < sol.values.back().size(); ++j)
            rep.add("y" + std::to_string(j + 1) + "(T) = " +
                    value_string(sol.values.back()[j]));
        if (sol.error_bound) rep.add("error_bound: " + value_string(*sol.error_bound));
        rep.tsv_header = {"t"};
        for (std::size_t j = 0; j < sol.values.back().size(); ++j)
            rep.tsv_header.push_back("y" + std::to_string(j + 1));
        std::size_t stride = std::max<std::size_t>(1, sol.steps() / 64);
        for (std::size_t i = 0; i < sol.times.size(); i += stride) {
            std::vector<std::string> row{sol.times[i].get_str()};
            for (const Rational& v : sol.values[i]) row.push_back(v.get_str());
            rep.row(std::move(row));
        }
        return;
    }
    throw std::domain_error("unknown --method " + method);
}

void cmd_continue(const Args& args, RunReport& rep) {
    ProblemFile pf = parse_problem(read_file(args.file));
    PolyIVP ivp = make_polyivp(pf);
    if (!args.has("to")) throw std::domain_error("continue needs --to T");
    Rational T = parse_rational(args.flag("to"));
    long n = flag_long(args, "prec", 30);
    ContinuationTrace trace = continue_to(ivp, T, n);
    rep.add("patches: " + std::to_string(trace.patches.size()));
    rep.add("working_precision: " + std::to_string(trace.working_precision));
    for (std::size_t j = 0; j < trace.final_value.size(); ++j) {
        const Interval& iv = trace.final_value[j];
        rep.add("y" + std::to_string(j + 1) + "(T) in [" + value_string(iv.lo) + ", " +
                value_string(iv.hi) + "]");
    }
    rep.tsv_header = {"patch", "center", "radius_lb", "step"};
    for (std::size_t i = 0; i < trace.patches.size(); ++i) {
        const Patch& p = trace.patches[i];
        rep.row({std::to_string(i), p.center.get_str(), p.radius_lb.get_str(),
                 p.step.get_str()});
    }
}

void cmd_classify(const Args& args, RunReport& rep) {
    ProblemFile pf = parse_problem(read_file(args.file));
    int max_rank = static_cast<int>(flag_long(args, "max-rank", 4));
    StratumReport sr = pf.piecewise ? classify_stratum(*pf.piecewise, max_rank)
                                    : classify_stratum(pf.field());
    rep.add(std::string("stratum: ") + stratum_name(sr.stratum));
    rep.add("evidence: " + sr.evidence);
    rep.tsv_header = {"key", "value"};
    rep.row({"stratum", stratum_name(sr.stratum)});
    for (const auto& [k, v] : sr.parameters) rep.row({k, v.get_str()});
}

void cmd_stratify(const Args& args, RunReport& rep) {
    ProblemFile pf = parse_problem(read_file(args.file));
    if (!pf.piecewise) throw std::domain_error("stratify needs a piecewise problem");
    int max_rank = static_cast<int>(flag_long(args, "max-rank", 4));
    RankCertificate cert = derived_rank(*pf.piecewise, max_rank);
    rep.add("rank: " + std::to_string(cert.rank) +
            (cert.exceeded ? " (bound exceeded)" : ""));
    rep.tsv_header = {"level", "points", "towers"};
    for (std::size_t i = 0; i < cert.chain.size(); ++i)
        rep.row({std::to_string(i),
                 cert.chain[i].whole_interval ? "interval"
                                              : std::to_string(cert.chain[i].points.size()),
                 std::to_string(cert.chain[i].towers.size())});
    if (cert.exceeded) {
        rep.add("glue: skipped (rank bound exceeded)");
        return;
    }
    Polygon sol = solve_stratified(*pf.piecewise, pf.y0, max_rank, resolution_floor());
    rep.add("glued_steps: " + std::to_string(sol.steps()));
    for (std::size_t j = 0; j < sol.values.back().size(); ++j)
        rep.add("y" + std::to_string(j + 1) + "(T) = " + value_string(sol.values.back()[j]));
}

// ---------------------------------------------------------------------------

long now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

PolyIVP bench_square_ivp() {
    // y' = y^2, y(0) = 1 on [0, 1) x [-1e6, 1e6]
    Polynomial p = Polynomial::var_y(0, 1) * Polynomial::var_y(0, 1);
    return PolyIVP(PolynomialSystem({p}), 0, {1},
                   RectDomain(0, 1, {{-1000000, 1000000}}));
}

PolyIVP bench_exp_ivp(const Rational& t_hi) {
    // y' = y, y(0) = 1 on [0, t_hi] with a box generous enough for e^t_hi
    Polynomial p = Polynomial::var_y(0, 1);
    Rational cap = pow_int(rat(4), 64);  // 4^64 > e^64
    return PolyIVP(PolynomialSystem({p}), 0, {1}, RectDomain(0, t_hi, {{-cap, cap}}));
}

void cmd_bench(const Args& args, RunReport& rep) {
    if (args.file.empty()) throw std::domain_error("bench needs a mode");
    const std::string mode = args.file;

    if (mode == "doubling") {
        // residual valuation per Newton step on y' = y^2 to the target order
        std::size_t order = static_cast<std::size_t>(flag_long(args, "order", 1024));
        PolyIVP ivp = bench_square_ivp();
        rep.tsv_header = {"step", "residual_valuation"};
        TruncatedSeries y = TruncatedSeries::constant(ivp.y0, ivp.t0, order + 1);
        std::size_t val = 0;
        for (int step = 1; step <= 32 && val < order; ++step) {
            y = newton_step(ivp, y, order + 1);
            val = residual_valuation(ivp, y).valuation;
            rep.row({std::to_string(step), std::to_string(val)});
        }
        rep.add("target_order: " + std::to_string(order));
        return;
    }
    if (mode == "patches") {
        PolyIVP ivp = bench_square_ivp();
        rep.tsv_header = {"T", "patches", "ms"};
        Rational T = rat(9, 10);
        Rational gap = rat(1, 10);
        for (int i = 0; i < 4; ++i) {
            long t0 = now_ms();
            ContinuationTrace trace = continue_to(ivp, T, 10);
            long t1 = now_ms();
            rep.row({T.get_str(), std::to_string(trace.patches.size()),
                     std::to_string(t1 - t0)});
            gap /= 10;
            T = 1 - gap;
        }
        return;
    }
    if (mode == "expblowup") {
        std::string targets = args.flag("targets", "4,8,16,32");
        rep.tsv_header = {"T", "ms", "patches"};
        for (const std::string& part : detail::split(targets, ',')) {
            Rational T = parse_rational(detail::trim(part));
            PolyIVP ivp = bench_exp_ivp(T);
            long t0 = now_ms();
            ContinuationTrace trace = continue_to(ivp, T, 10);
            long t1 = now_ms();
            rep.row({T.get_str(), std::to_string(t1 - t0),
                     std::to_string(trace.patches.size())});
        }
        return;
    }
    if (mode == "eulerorder") {
        // |y_k(1) - e| halving for y' = y
        FieldSpec f({expr_y(0)}, RectDomain(0, 1, {{-4, 4}}));
        PolyIVP ivp = bench_exp_ivp(1);
        ContinuationTrace oracle = continue_to(ivp, 1, 60);
        Rational e_lo = oracle.final_value[0].lo.to_rational();
        rep.tsv_header = {"k", "error", "ratio"};
        Rational prev = 0;
        for (unsigned long k = 1ul << 6; k <= (1ul << 12); k <<= 1) {
            Polygon sol = euler_polygon(f, 0, {1}, 1, k);
            Rational err = abs(Rational(sol.values.back()[0] - e_lo));
            std::string ratio = prev == 0 ? "-" : decimal_string(err / prev, 4);
            rep.row({std::to_string(k), decimal_string(err), ratio});
            prev = err;
        }
        return;
    }
    throw std::domain_error("unknown bench mode " + mode);
}

} // namespace

int main(int argc, char** argv) {
    using namespace stratode;
    Args args;
    RunReport rep;
    try {
        args = parse_args(argc, argv);
        std::ostringstream cmd;
        for (int i = 1; i < argc; ++i) cmd << (i > 1 ? " " : "") << argv[i];
        rep.command = cmd.str();

        long t0 = now_ms();
        if (args.sub == "solve")
            cmd_solve(args, rep);
        else if (args.sub == "continue")
            cmd_continue(args, rep);
        else if (args.sub == "classify")
            cmd_classify(args, rep);
        else if (args.sub == "stratify")
            cmd_stratify(args, rep);
        else if (args.sub == "bench")
            cmd_bench(args, rep);
        else
            throw std::domain_error("unknown subcommand " + args.sub);
        rep.millis = now_ms() - t0;

        std::cout << emit_report(rep);
        if (args.has("out")) {
            std::ofstream out(args.flag("out"));
            if (!out) throw std::domain_error("cannot write " + args.flag("out"));
            out << emit_tsv(rep);
        }
        return 0;
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const solver_error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

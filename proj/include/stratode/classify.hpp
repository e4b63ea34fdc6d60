#pragma once

#include <map>
#include <string>

#include "stratode/errors.hpp"
#include "stratode/expr.hpp"
#include "stratode/modulus.hpp"
#include "stratode/strata.hpp"

namespace stratode {

// Difficulty strata ordered by strength; a problem's stratum is the least
// level whose hypotheses are certified.
enum class Stratum { rca0, wkl0, aca0, atr0, pi11ca0 };

inline const char* stratum_name(Stratum s) {
    switch (s) {
        case Stratum::rca0: return "RCA0";
        case Stratum::wkl0: return "WKL0";
        case Stratum::aca0: return "ACA0";
        case Stratum::atr0: return "ATR0";
        case Stratum::pi11ca0: return "PI11CA0";
    }
    return "?";
}

struct StratumReport {
    Stratum stratum = Stratum::pi11ca0;
    std::string evidence;
    std::map<std::string, Rational> parameters;
};

// Continuous (expression) field: RCA0 with a two-variable Lipschitz
// certificate, WKL0 with a divergent Osgood modulus, ACA0 when merely
// interval-evaluable on the rectangle.
inline StratumReport classify_stratum(const FieldSpec& f, long prec = 64) {
    StratumReport rep;

    LipschitzBounds lb;
    bool lb_ok = false;
    try {
        lb = lipschitz_bounds(f, prec);
        lb_ok = lb.ok;
    } catch (const evaluation_error&) {
        lb_ok = false;
    }
    if (lb_ok) {
        rep.stratum = Stratum::rca0;
        rep.evidence = "Lipschitz certificate in both variables over the rectangle";
        rep.parameters["lipschitz_t"] = lb.in_t;
        rep.parameters["lipschitz_y"] = lb.in_y;
        return rep;
    }

    if (f.modulus) {
        DivergenceCertificate dc = osgood_diverges(*f.modulus);
        if (dc.diverges) {
            rep.stratum = Stratum::wkl0;
            rep.evidence = "divergent Osgood modulus: " + dc.certificate;
            rep.parameters["modulus_c"] = f.modulus->c;
            rep.parameters["modulus_delta"] = f.modulus->delta;
            return rep;
        }
    }

    // continuity witness: interval evaluation succeeds on the whole rectangle
    Interval t = Interval::hull(f.domain.t_lo, f.domain.t_hi, prec);
    std::vector<Interval> y;
    for (const auto& [lo, hi] : f.domain.box) y.push_back(Interval::hull(lo, hi, prec));
    f.eval(t, y, prec);  // throws evaluation_error when not certifiable
    rep.stratum = Stratum::aca0;
    rep.evidence = "continuous field (interval-evaluable), no usable modulus";
    return rep;
}

// Piecewise field: ACA0 when the derived rank is 1 (no actual jumps), ATR0
// when the derived rank is finite within the bound, PI11CA0 otherwise.
inline StratumReport classify_stratum(const PiecewiseField& f, int max_rank = 4) {
    StratumReport rep;
    RankCertificate cert = derived_rank(f, max_rank);
    if (!cert.exceeded && cert.rank == 1) {
        rep.stratum = Stratum::aca0;
        rep.evidence = "piecewise representation with no actual jumps";
        rep.parameters["rank"] = 1;
        return rep;
    }
    if (!cert.exceeded) {
        rep.stratum = Stratum::atr0;
        rep.evidence = "finite derived rank of the discontinuity recursion";
        rep.parameters["rank"] = cert.rank;
        return rep;
    }
    rep.stratum = Stratum::pi11ca0;
    rep.evidence = "derived rank not certified finite within the bound";
    rep.parameters["rank_bound"] = max_rank;
    return rep;
}

} // namespace stratode

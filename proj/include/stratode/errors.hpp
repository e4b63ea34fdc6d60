#pragma once

#include <stdexcept>
#include <string>

#include "stratode/rational.hpp"

namespace stratode {

struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Evaluation point outside the certified convergence region.
struct radius_error : solver_error {
    using solver_error::solver_error;
};

// Initial point on (or outside) the domain boundary.
struct boundary_error : solver_error {
    using solver_error::solver_error;
};

// Continuation or extension stopped making progress before the target.
struct stall_error : solver_error {
    Rational reached_time;
    stall_error(const std::string& what, Rational reached)
        : solver_error(what), reached_time(std::move(reached)) {}
};

// Trajectory left the rectangle.
struct domain_exit_error : solver_error {
    Rational exit_time;
    std::size_t exit_index;
    domain_exit_error(const std::string& what, Rational t, std::size_t idx)
        : solver_error(what), exit_time(std::move(t)), exit_index(idx) {}
};

// Requested certified accuracy not reachable within the configured mesh cap.
struct precision_error : solver_error {
    Rational achievable;
    precision_error(const std::string& what, Rational eps)
        : solver_error(what), achievable(std::move(eps)) {}
};

struct unsupported_error : solver_error {
    using solver_error::solver_error;
};

// No uniqueness-based gap bound exists (Osgood divergence test failed).
struct uniqueness_error : solver_error {
    using solver_error::solver_error;
};

// Interval evaluation failed (e.g. division by an interval containing zero).
struct evaluation_error : solver_error {
    using solver_error::solver_error;
};

// A solve covered only part of the requested time interval.
struct partial_solution_error : solver_error {
    Rational reached_time;
    partial_solution_error(const std::string& what, Rational reached)
        : solver_error(what), reached_time(std::move(reached)) {}
};

struct invalid_modulus_error : solver_error {
    using solver_error::solver_error;
};

struct parse_error : std::runtime_error {
    int line;
    int column;
    parse_error(const std::string& what, int l, int c = 0)
        : std::runtime_error("line " + std::to_string(l) + ": " + what), line(l), column(c) {}
};

} // namespace stratode

#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "stratode/rational.hpp"

namespace stratode {

// Rectangle I x D = [t_lo, t_hi] x prod_j [lo_j, hi_j].
struct RectDomain {
    Rational t_lo = 0;
    Rational t_hi = 1;
    std::vector<std::pair<Rational, Rational>> box; // per space coordinate

    RectDomain() = default;
    RectDomain(Rational tl, Rational th, std::vector<std::pair<Rational, Rational>> b)
        : t_lo(std::move(tl)), t_hi(std::move(th)), box(std::move(b)) {
        if (!(t_lo < t_hi)) throw std::domain_error("time interval must have t_lo < t_hi");
        for (const auto& [lo, hi] : box)
            if (!(lo <= hi)) throw std::domain_error("empty space box");
    }

    int dim() const { return static_cast<int>(box.size()); }

    bool contains_time(const Rational& t) const { return t_lo <= t && t <= t_hi; }
    bool contains_space(const std::vector<Rational>& y) const {
        for (std::size_t j = 0; j < box.size(); ++j)
            if (y[j] < box[j].first || y[j] > box[j].second) return false;
        return true;
    }
    bool contains(const Rational& t, const std::vector<Rational>& y) const {
        return contains_time(t) && contains_space(y);
    }

    // Distance from y to the nearest face of the space box (0 on the boundary).
    Rational space_distance(const std::vector<Rational>& y) const {
        Rational d;
        bool first = true;
        for (std::size_t j = 0; j < box.size(); ++j) {
            Rational dj = std::min(y[j] - box[j].first, box[j].second - y[j]);
            if (first || dj < d) {
                d = dj;
                first = false;
            }
        }
        return first ? Rational(0) : d;
    }
};

} // namespace stratode

#pragma once

#include <algorithm>
#include <memory>
#include <utility>
#include <vector>

#include "stratode/errors.hpp"
#include "stratode/euler.hpp"
#include "stratode/expr.hpp"

namespace stratode {

enum class TowerFamily { geometric, harmonic };

struct LayeredSet;

// One accumulation family t_n -> a with optional nested clusters: member n
// carries a scaled copy of `cluster` (a set accumulating at 0 in template
// coordinates) inside the neighborhood of radius gap(n)/4.
struct TowerComponent {
    TowerFamily family = TowerFamily::geometric;
    Rational a;
    Rational c;  // nonzero; sign gives the approach side
    Rational q;  // geometric ratio in (0,1)
    long n0 = 1;
    std::shared_ptr<const LayeredSet> cluster;

    Rational member(long n) const {
        if (family == TowerFamily::geometric)
            return a + c * pow_int(q, static_cast<unsigned long>(n));
        return a + c / Rational(n);
    }
    // Radius of the cluster neighborhood at member n.
    Rational cluster_scale(long n) const { return abs(Rational(member(n + 1) - member(n))) / 4; }
    Rational span_lo() const { return std::min(a, member(n0)); }
    Rational span_hi() const { return std::max(a, member(n0)); }

    bool same_family(const TowerComponent& o) const {
        return family == o.family && a == o.a && c == o.c &&
               (family == TowerFamily::harmonic || q == o.q);
    }
};

// Symbolic closed subset of the time interval: finite points plus towers,
// or the whole interval (the recursion's starting level).
struct LayeredSet {
    bool whole_interval = false;
    Rational lo, hi;  // bounds, used when whole_interval
    std::vector<Rational> points;
    std::vector<TowerComponent> towers;

    static LayeredSet whole(const Rational& lo, const Rational& hi) {
        LayeredSet s;
        s.whole_interval = true;
        s.lo = lo;
        s.hi = hi;
        return s;
    }
    static LayeredSet finite(std::vector<Rational> pts) {
        LayeredSet s;
        s.points = std::move(pts);
        std::sort(s.points.begin(), s.points.end());
        return s;
    }

    bool empty() const { return !whole_interval && points.empty() && towers.empty(); }

    int depth() const {
        int d = points.empty() ? 0 : 1;
        for (const auto& t : towers) {
            int td = 2;
            if (t.cluster) td = std::max(td, 1 + std::max(1, t.cluster->depth()));
            d = std::max(d, td);
        }
        return d;
    }

    // Closed-set membership, resolved exactly.
    bool contains(const Rational& x) const {
        if (whole_interval) return lo <= x && x <= hi;
        for (const Rational& p : points)
            if (p == x) return true;
        for (const auto& t : towers) {
            if (x == t.a) return true;
            if (x < t.span_lo() || x > t.span_hi()) continue;
            Rational off = abs(Rational(x - t.a));
            for (long n = t.n0; n - t.n0 < (1l << 22); ++n) {
                Rational m = t.member(n);
                if (m == x) return true;
                if (abs(Rational(m - t.a)) < off) {
                    // x sits strictly between members n-1 and n by distance
                    // from a: only a cluster copy can hold it.
                    for (long cand : {n - 1, n}) {
                        if (cand < t.n0 || !t.cluster) continue;
                        Rational s = t.cluster_scale(cand);
                        Rational center = t.member(cand);
                        if (abs(Rational(x - center)) <= s &&
                            t.cluster->contains((x - center) / s))
                            return true;
                    }
                    break;
                }
            }
        }
        return false;
    }

    // Symbolic subset check, sampled on the representation (used for chain
    // nesting assertions).
    bool subset_of(const LayeredSet& other) const {
        if (other.whole_interval) return true;
        if (whole_interval) return false;
        for (const Rational& p : points)
            if (!other.contains(p)) return false;
        for (const auto& t : towers) {
            if (!other.contains(t.a)) return false;
            for (long n = t.n0; n < t.n0 + 8; ++n)
                if (!other.contains(t.member(n))) return false;
        }
        return true;
    }
};

inline TowerComponent geometric_tower(const Rational& a, const Rational& c, const Rational& q,
                                      long n0 = 1,
                                      std::shared_ptr<const LayeredSet> cluster = nullptr) {
    if (c == 0) throw std::domain_error("tower offset must be nonzero");
    if (q <= 0 || q >= 1) throw std::domain_error("geometric ratio must be in (0,1)");
    if (n0 < 0) throw std::domain_error("geometric towers start at n >= 0");
    return TowerComponent{TowerFamily::geometric, a, c, q, n0, std::move(cluster)};
}
inline TowerComponent harmonic_tower(const Rational& a, const Rational& c, long n0 = 1,
                                     std::shared_ptr<const LayeredSet> cluster = nullptr) {
    if (c == 0) throw std::domain_error("tower offset must be nonzero");
    if (n0 < 1) throw std::domain_error("harmonic towers start at n >= 1");
    return TowerComponent{TowerFamily::harmonic, a, c, 1, n0, std::move(cluster)};
}

// Value patterns along one tower. Member and gap patterns hold one entry
// (constant) or two entries (alternating by the parity of n). Gap n is the
// open interval between member(n) and member(n+1).
struct TowerValues;
struct LayeredValues {
    std::vector<std::vector<Rational>> point_values;
    std::vector<TowerValues> tower_values;
};
struct TowerValues {
    std::vector<Rational> limit_value;
    std::vector<std::vector<Rational>> member_values;  // 1 or 2 patterns
    std::vector<std::vector<Rational>> gap_values;     // 1 or 2 patterns
    std::shared_ptr<const LayeredValues> cluster_values;
};

namespace detail {

inline const std::vector<Rational>& pattern_at(const std::vector<std::vector<Rational>>& pat,
                                               long n) {
    if (pat.empty()) throw unsupported_error("missing value pattern");
    return pat.size() == 1 ? pat[0] : pat[static_cast<std::size_t>(((n % 2) + 2) % 2)];
}

inline void push_unique(std::vector<std::vector<Rational>>& out, const std::vector<Rational>& v) {
    for (const auto& u : out)
        if (u == v) return;
    out.push_back(v);
}

inline void collect_values(const LayeredSet& set, const LayeredValues& vals, bool include_gaps,
                           std::vector<std::vector<Rational>>& out);

// Values accumulating at a tower's limit from its members, gaps and clusters.
inline void limit_value_set(const TowerComponent& t, const TowerValues& tv, bool include_gaps,
                            std::vector<std::vector<Rational>>& out) {
    for (const auto& v : tv.member_values) push_unique(out, v);
    if (include_gaps)
        for (const auto& v : tv.gap_values) push_unique(out, v);
    if (t.cluster && tv.cluster_values)
        collect_values(*t.cluster, *tv.cluster_values, include_gaps, out);
}

// Every value f takes on (and, if include_gaps, between) the points of a
// cluster template — the values seen around any member's cluster copy.
inline void collect_values(const LayeredSet& set, const LayeredValues& vals, bool include_gaps,
                           std::vector<std::vector<Rational>>& out) {
    for (const auto& v : vals.point_values) push_unique(out, v);
    for (std::size_t i = 0; i < set.towers.size(); ++i) {
        const TowerValues& tv = vals.tower_values.at(i);
        push_unique(out, tv.limit_value);
        limit_value_set(set.towers[i], tv, include_gaps, out);
    }
}

inline bool accumulates_at_zero(const LayeredSet& s) {
    for (const auto& t : s.towers)
        if (t.a == 0) return true;
    return false;
}

// Values accumulating at template coordinate 0 within a cluster.
inline void zero_limit_values(const LayeredSet& set, const LayeredValues& vals, bool include_gaps,
                              std::vector<std::vector<Rational>>& out) {
    for (std::size_t i = 0; i < set.towers.size(); ++i)
        if (set.towers[i].a == 0)
            limit_value_set(set.towers[i], vals.tower_values.at(i), include_gaps, out);
}

// Value lookup inside another (sub)set: find f's tower with the same family
// parameters as kt, for its value patterns.
inline const TowerValues* find_tower_values(const LayeredSet& fset, const LayeredValues& fvals,
                                            const TowerComponent& kt) {
    for (std::size_t i = 0; i < fset.towers.size(); ++i)
        if (fset.towers[i].same_family(kt)) return &fvals.tower_values.at(i);
    return nullptr;
}

} // namespace detail

// Baire-one field on a rectangle: discontinuities confined to a symbolic
// breakpoint set in t, locally constant near every accumulation structure,
// with expression pieces on the finitely many remaining intervals.
struct PiecewiseField {
    int dim = 1;
    RectDomain domain;
    LayeredSet breaks;
    LayeredValues values;
    // Expression pieces on the maximal intervals of the complement of the
    // top-level cuts (each point and each tower span), in increasing order.
    std::vector<std::vector<ExprPtr>> pieces;

    struct Cut {
        Rational lo, hi;  // equal for a point cut
        const TowerComponent* tower = nullptr;
        const TowerValues* tower_vals = nullptr;
        std::size_t point_index = 0;
    };

    std::vector<Cut> sorted_cuts() const {
        std::vector<Cut> cuts;
        for (std::size_t i = 0; i < breaks.points.size(); ++i)
            cuts.push_back(Cut{breaks.points[i], breaks.points[i], nullptr, nullptr, i});
        for (std::size_t i = 0; i < breaks.towers.size(); ++i)
            cuts.push_back(Cut{breaks.towers[i].span_lo(), breaks.towers[i].span_hi(),
                               &breaks.towers[i], &values.tower_values.at(i), 0});
        std::sort(cuts.begin(), cuts.end(), [](const Cut& a, const Cut& b) { return a.lo < b.lo; });
        for (std::size_t i = 0; i < cuts.size(); ++i) {
            if (i > 0 && cuts[i].lo <= cuts[i - 1].hi)
                throw std::domain_error("overlapping breakpoint components");
            if (cuts[i].lo < domain.t_lo || cuts[i].hi > domain.t_hi)
                throw std::domain_error("breakpoints outside the time interval");
        }
        return cuts;
    }

    void validate() const {
        if (breaks.whole_interval)
            throw std::domain_error("breakpoint set cannot be the whole interval");
        if (breaks.depth() > 3)
            throw unsupported_error("breakpoint sets deeper than 3 are not supported");
        if (values.point_values.size() != breaks.points.size() ||
            values.tower_values.size() != breaks.towers.size())
            throw std::domain_error("breakpoint values do not match the breakpoint set");
        std::vector<Cut> cuts = sorted_cuts();
        if (pieces.size() != cuts.size() + 1)
            throw std::domain_error("piece count must be one more than the cut count");
        for (const auto& p : pieces)
            if (static_cast<int>(p.size()) != dim)
                throw std::domain_error("piece dimension mismatch");
    }
};

namespace detail {

// Field value inside a tower span at time x: the member / cluster value at a
// breakpoint, the governing gap constant otherwise.
inline std::vector<Rational> tower_value_at(const TowerComponent& t, const TowerValues& tv,
                                            const Rational& x) {
    if (x == t.a) return tv.limit_value;
    Rational off = abs(Rational(x - t.a));
    long n = t.n0;
    while (abs(Rational(t.member(n + 1) - t.a)) >= off) {
        ++n;
        if (n - t.n0 > (1l << 24)) throw unsupported_error("tower index lookup overflow");
    }
    // x lies between member(n+1) and member(n) by distance from a.
    for (long cand : {n, n + 1}) {
        if (cand < t.n0) continue;
        Rational m = t.member(cand);
        if (m == x) return pattern_at(tv.member_values, cand);
        if (t.cluster && tv.cluster_values) {
            Rational s = t.cluster_scale(cand);
            if (abs(Rational(x - m)) <= s) {
                const LayeredSet& cs = *t.cluster;
                const LayeredValues& cv = *tv.cluster_values;
                Rational u = (x - m) / s;
                for (std::size_t i = 0; i < cs.points.size(); ++i)
                    if (cs.points[i] == u) return cv.point_values.at(i);
                for (std::size_t i = 0; i < cs.towers.size(); ++i) {
                    const TowerComponent& ct = cs.towers[i];
                    if (u >= ct.span_lo() && u <= ct.span_hi())
                        return tower_value_at(ct, cv.tower_values.at(i), u);
                }
                // inside the neighborhood, off the cluster span: the
                // enclosing gap constant governs (fall through)
                break;
            }
        }
    }
    // gap index: gap n when x is closer to a than member(n), else gap n-1
    long g = off < abs(Rational(t.member(n) - t.a)) ? n : n - 1;
    if (g < t.n0) g = t.n0;
    return pattern_at(tv.gap_values, g);
}

} // namespace detail

// Exact field value at time t (the pieces must be rational-valued there).
inline std::vector<Rational> field_value(const PiecewiseField& f, const Rational& t,
                                         const std::vector<Rational>& y) {
    auto cuts = f.sorted_cuts();
    std::size_t piece = 0;
    for (const auto& c : cuts) {
        if (t < c.lo) break;
        if (t <= c.hi) {
            if (c.tower) return detail::tower_value_at(*c.tower, *c.tower_vals, t);
            return f.values.point_values.at(c.point_index);
        }
        ++piece;
    }
    std::vector<Rational> out;
    for (const auto& e : f.pieces.at(piece)) out.push_back(expr_eval_exact(e, t, y));
    return out;
}

// ---------------------------------------------------------------------------
// Derived-set recursion.

namespace detail {

// One-sided limit of an expression piece at a cut (pieces are continuous in
// t; y-dependent limits at a cut would make the jump y-dependent).
inline std::vector<Rational> piece_limit(const PiecewiseField& f, std::size_t piece_idx,
                                         const Rational& t) {
    struct W {
        static bool depends_y(const ExprPtr& n) {
            if (!n) return false;
            if (n->kind == ExprKind::var_y) return true;
            return depends_y(n->a) || depends_y(n->b);
        }
    };
    std::vector<Rational> out;
    for (const auto& e : f.pieces.at(piece_idx)) {
        if (W::depends_y(e))
            throw unsupported_error("rank analysis needs y-independent piece limits at cuts");
        out.push_back(expr_eval_exact(e, t, {}));
    }
    return out;
}

struct FullTowerDisc {
    bool members = false;       // every interior member is a jump point
    bool limit = false;         // the limit a is a jump point
    bool first_member = false;  // the edge member n0 is a jump point
    std::shared_ptr<LayeredSet> cluster_result;  // jump subset of the cluster
};

// Jump analysis of one tower against the ambient field, recursing into its
// clusters. `far_value` is the constant adjacent to member(n0) on the side
// away from a (null when that side has no neighbor).
inline FullTowerDisc full_tower_disc(const TowerComponent& t, const TowerValues& tv,
                                     const std::vector<Rational>* far_value) {
    if (tv.gap_values.empty()) throw unsupported_error("tower needs gap value patterns");
    FullTowerDisc out;

    // Values accumulating at member n: the two adjacent gaps plus the
    // member's cluster copy (whose points crowd arbitrarily close).
    auto member_seen = [&](long n, bool edge) {
        std::vector<std::vector<Rational>> seen;
        push_unique(seen, pattern_at(tv.gap_values, n));
        if (edge) {
            if (far_value) push_unique(seen, *far_value);
        } else {
            push_unique(seen, pattern_at(tv.gap_values, n - 1));
        }
        if (t.cluster && tv.cluster_values && accumulates_at_zero(*t.cluster))
            zero_limit_values(*t.cluster, *tv.cluster_values, true, seen);
        return seen;
    };
    auto disc_at = [&](long n, bool edge) {
        auto seen = member_seen(n, edge);
        return seen.size() > 1 || seen[0] != pattern_at(tv.member_values, n);
    };
    bool disc_even = disc_at(t.n0 + 2, false);
    bool disc_odd = disc_at(t.n0 + 3, false);
    if (disc_even != disc_odd)
        throw unsupported_error("parity-dependent member discontinuity pattern");
    out.members = disc_even;
    out.first_member = disc_at(t.n0, true);

    // Cluster points and interior cluster limits.
    if (t.cluster && tv.cluster_values) {
        const LayeredSet& cs = *t.cluster;
        const LayeredValues& cv = *tv.cluster_values;
        if (tv.gap_values.size() != 1)
            throw unsupported_error("clusters require a constant enclosing gap value");
        const std::vector<Rational>& ambient = tv.gap_values[0];
        auto res = std::make_shared<LayeredSet>();
        for (std::size_t i = 0; i < cs.points.size(); ++i)
            if (cv.point_values.at(i) != ambient) res->points.push_back(cs.points[i]);
        for (std::size_t i = 0; i < cs.towers.size(); ++i) {
            const TowerComponent& ct = cs.towers[i];
            if (ct.cluster) throw unsupported_error("cluster nesting deeper than one level");
            FullTowerDisc inner = full_tower_disc(ct, cv.tower_values.at(i), &ambient);
            if (inner.members != inner.first_member)
                throw unsupported_error("edge member breaks the uniform jump pattern");
            if (inner.members) {
                if (ct.a != 0 && !inner.limit)
                    throw unsupported_error("non-closed cluster jump pattern");
                res->towers.push_back(ct);
            } else if (ct.a != 0 && inner.limit) {
                res->points.push_back(ct.a);
            }
        }
        std::sort(res->points.begin(), res->points.end());
        if (!res->empty()) out.cluster_result = res;
    }

    // Limit a: everything in the span accumulates there.
    std::vector<std::vector<Rational>> near_a;
    limit_value_set(t, tv, true, near_a);
    out.limit = near_a.size() > 1 || near_a[0] != tv.limit_value;
    return out;
}

} // namespace detail

// Points of K at which f restricted to K is discontinuous, as a symbolic set.
inline LayeredSet discontinuity_set(const PiecewiseField& f, const LayeredSet& K) {
    f.validate();
    LayeredSet out;

    if (K.whole_interval) {
        auto cuts = f.sorted_cuts();
        std::size_t piece = 0;
        for (const auto& c : cuts) {
            if (c.tower == nullptr) {
                const std::vector<Rational>& v = f.values.point_values.at(c.point_index);
                std::vector<Rational> left = detail::piece_limit(f, piece, c.lo);
                std::vector<Rational> right = detail::piece_limit(f, piece + 1, c.lo);
                if (left != v || right != v) out.points.push_back(c.lo);
            } else {
                const TowerComponent& t = *c.tower;
                // the piece on the far side of member(n0)
                std::vector<Rational> far;
                const std::vector<Rational>* far_ptr = nullptr;
                Rational far_t = t.member(t.n0);
                if (far_t > f.domain.t_lo && far_t < f.domain.t_hi) {
                    far = detail::piece_limit(f, t.c > 0 ? piece + 1 : piece, far_t);
                    far_ptr = &far;
                }
                detail::FullTowerDisc d = detail::full_tower_disc(t, *c.tower_vals, far_ptr);
                if (d.members) {
                    if (!d.limit) throw unsupported_error("non-closed discontinuity pattern");
                    TowerComponent r = t;
                    r.cluster = d.cluster_result;
                    if (!d.first_member) r.n0 = t.n0 + 1;
                    out.towers.push_back(r);
                } else {
                    if (d.cluster_result)
                        throw unsupported_error("cluster jumps without member jumps are not "
                                                "representable as a closed symbolic set");
                    if (d.limit) out.points.push_back(t.a);
                    if (d.first_member) out.points.push_back(far_t);
                }
            }
            ++piece;
        }
        std::sort(out.points.begin(), out.points.end());
        return out;
    }

    // K is a symbolic subset of the breakpoint set: isolated points of K are
    // continuity points of the restriction; only accumulation points matter.
    for (const auto& kt : K.towers) {
        const TowerValues* ftv = detail::find_tower_values(f.breaks, f.values, kt);
        if (!ftv) throw unsupported_error("derived tower does not match a breakpoint family");

        // values along K accumulating at the limit: member values, plus the
        // cluster values when K retains the clusters (no gap values: gaps
        // are not points of K)
        std::vector<std::vector<Rational>> seen;
        for (const auto& v : ftv->member_values) detail::push_unique(seen, v);
        if (kt.cluster && ftv->cluster_values)
            detail::collect_values(*kt.cluster, *ftv->cluster_values, false, seen);
        bool limit_disc = seen.size() > 1 || seen[0] != ftv->limit_value;

        bool member_disc = false;
        std::shared_ptr<LayeredSet> cluster_result;
        if (kt.cluster && ftv->cluster_values && detail::accumulates_at_zero(*kt.cluster)) {
            // members of K are limits of their cluster copies
            std::vector<std::vector<Rational>> at_member;
            detail::zero_limit_values(*kt.cluster, *ftv->cluster_values, false, at_member);
            bool first = true;
            for (const auto& mv : ftv->member_values) {
                bool disc = at_member.size() > 1 || at_member[0] != mv;
                if (first)
                    member_disc = disc;
                else if (disc != member_disc)
                    throw unsupported_error("parity-dependent member discontinuity pattern");
                first = false;
            }
            // interior cluster limits (template coordinate != 0)
            auto res = std::make_shared<LayeredSet>();
            for (std::size_t i = 0; i < kt.cluster->towers.size(); ++i) {
                const TowerComponent& ct = kt.cluster->towers[i];
                if (ct.a == 0) continue;
                const TowerValues* ctv =
                    detail::find_tower_values(*kt.cluster, *ftv->cluster_values, ct);
                if (!ctv) throw unsupported_error("cluster tower without value patterns");
                std::vector<std::vector<Rational>> cseen;
                for (const auto& v : ctv->member_values) detail::push_unique(cseen, v);
                if (cseen.size() > 1 || cseen[0] != ctv->limit_value)
                    res->points.push_back(ct.a);
            }
            if (!res->empty()) {
                if (!member_disc)
                    throw unsupported_error("cluster jumps without member jumps are not "
                                            "representable as a closed symbolic set");
                std::sort(res->points.begin(), res->points.end());
                cluster_result = res;
            }
        }

        if (member_disc) {
            if (!limit_disc) throw unsupported_error("non-closed discontinuity pattern");
            TowerComponent r = kt;
            r.cluster = cluster_result;
            out.towers.push_back(r);
        } else if (limit_disc) {
            out.points.push_back(kt.a);
        }
    }
    std::sort(out.points.begin(), out.points.end());
    return out;
}

struct RankCertificate {
    int rank = 0;
    bool exceeded = false;
    std::vector<LayeredSet> chain;  // levels 0 .. rank (last level empty unless exceeded)
};

// Iterated discontinuity sets starting from the whole time interval; the
// rank is the number of nonempty levels.
inline RankCertificate derived_rank(const PiecewiseField& f, int max_rank = 4) {
    if (max_rank < 1 || max_rank > 4)
        throw std::domain_error("max_rank must be between 1 and 4");
    RankCertificate cert;
    LayeredSet level = LayeredSet::whole(f.domain.t_lo, f.domain.t_hi);
    cert.chain.push_back(level);
    for (int r = 1; r <= max_rank; ++r) {
        LayeredSet next = discontinuity_set(f, level);
        cert.chain.push_back(next);
        if (next.empty()) {
            cert.rank = r;
            return cert;
        }
        level = next;
    }
    cert.rank = max_rank;
    cert.exceeded = true;
    return cert;
}

// ---------------------------------------------------------------------------
// Continuity intervals and stratified solving.

struct TimeInterval {
    Rational lo, hi;
    bool stub = false;  // unresolved residue around an accumulation point
};

namespace detail {

struct FlatCut {
    Rational lo, hi;
    bool stub = false;
};

// Flatten a symbolic set into sorted cut points and stub intervals at the
// given absolute resolution.
inline void flatten_set(const LayeredSet& K, const Rational& floor, std::vector<FlatCut>& out) {
    for (const Rational& p : K.points) out.push_back(FlatCut{p, p, false});
    for (const auto& t : K.towers) {
        long n = t.n0;
        while (abs(Rational(t.member(n) - t.a)) > floor) {
            Rational m = t.member(n);
            if (t.cluster) {
                Rational s = t.cluster_scale(n);
                std::vector<FlatCut> inner;
                flatten_set(*t.cluster, floor / s, inner);
                for (const auto& cpart : inner)
                    out.push_back(FlatCut{m + s * cpart.lo, m + s * cpart.hi, cpart.stub});
            } else {
                out.push_back(FlatCut{m, m, false});
            }
            ++n;
            if (n - t.n0 > (1l << 22))
                throw unsupported_error("tower enumeration exceeds the resolution budget");
        }
        Rational edge = t.member(n);
        out.push_back(FlatCut{std::min(t.a, edge), std::max(t.a, edge), true});
    }
    std::sort(out.begin(), out.end(),
              [](const FlatCut& a, const FlatCut& b) { return a.lo < b.lo; });
}

} // namespace detail

// Maximal open intervals of the complement of `next` inside the projection of
// `level`, truncated at the resolution floor: countable families are cut off
// near their accumulation points, leaving stub intervals.
inline std::vector<TimeInterval> continuity_intervals(const LayeredSet& level,
                                                      const LayeredSet& next,
                                                      const Rational& floor = Rational(1, 1024)) {
    if (!level.whole_interval)
        throw unsupported_error("continuity intervals need the whole-interval base level");
    if (floor <= 0) throw std::domain_error("resolution floor must be positive");
    std::vector<detail::FlatCut> cuts;
    detail::flatten_set(next, floor, cuts);
    std::vector<TimeInterval> out;
    Rational t = level.lo;
    for (const auto& c : cuts) {
        if (c.lo > t) out.push_back(TimeInterval{t, c.lo, false});
        if (c.stub && c.hi > std::max(t, c.lo))
            out.push_back(TimeInterval{std::max(t, c.lo), c.hi, true});
        t = std::max(t, c.hi);
    }
    if (t < level.hi) out.push_back(TimeInterval{t, level.hi, false});
    return out;
}

namespace detail {

// Governing expressions of f on an open interval free of breakpoints.
inline std::vector<ExprPtr> field_on(const PiecewiseField& f, const Rational& lo,
                                     const Rational& hi) {
    Rational mid = (lo + hi) / 2;
    auto cuts = f.sorted_cuts();
    std::size_t piece = 0;
    for (const auto& c : cuts) {
        if (mid < c.lo) break;
        if (mid <= c.hi) {
            if (!c.tower) throw std::logic_error("interval overlaps a point cut");
            std::vector<Rational> v = tower_value_at(*c.tower, *c.tower_vals, mid);
            std::vector<ExprPtr> e;
            for (const Rational& x : v) e.push_back(expr_const(x));
            return e;
        }
        ++piece;
    }
    return f.pieces.at(piece);
}

} // namespace detail

// Solve-and-glue: extend_maximal on each continuity interval in time order,
// holding the value constant across sub-resolution stubs. The glued polygon
// is continuous and differentiable off the breakpoint set.
inline Polygon solve_stratified(const PiecewiseField& f, const std::vector<Rational>& y0,
                                int max_rank = 4, const Rational& floor = Rational(1, 1024),
                                const EulerOptions& opt = {}) {
    f.validate();
    RankCertificate cert = derived_rank(f, max_rank);
    if (cert.exceeded) throw unsupported_error("derived rank exceeds the requested bound");

    std::vector<TimeInterval> intervals =
        continuity_intervals(cert.chain.front(), cert.chain.at(1), floor);

    Polygon glued;
    glued.times.push_back(f.domain.t_lo);
    glued.values.push_back(y0);
    std::vector<Rational> y = y0;

    for (const auto& iv : intervals) {
        if (iv.hi <= iv.lo) continue;
        if (iv.stub) {
            // hold across the stub; the drift is at most M * |stub|
            glued.times.push_back(iv.hi);
            glued.values.push_back(y);
            continue;
        }
        std::vector<ExprPtr> comps = detail::field_on(f, iv.lo, iv.hi);
        FieldSpec piece(comps, RectDomain(iv.lo, iv.hi, f.domain.box));
        MaximalExtension ext = extend_maximal(piece, iv.lo, y, opt);
        if (ext.reason != ExitReason::boundary)
            throw partial_solution_error("trajectory left the space box", ext.beta);
        for (std::size_t i = 1; i < ext.polygon.times.size(); ++i) {
            glued.times.push_back(ext.polygon.times[i]);
            glued.values.push_back(ext.polygon.values[i]);
        }
        glued.slope_error = std::max(glued.slope_error, ext.polygon.slope_error);
        y = glued.values.back();
        if (glued.times.back() < iv.hi) {
            glued.times.push_back(iv.hi);
            glued.values.push_back(y);
        }
    }
    if (glued.times.back() < f.domain.t_hi) {
        glued.times.push_back(f.domain.t_hi);
        glued.values.push_back(y);
    }
    return glued;
}

} // namespace stratode

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "flab/dyadic.hpp"
#include "flab/geometry.hpp"

namespace flab {

/**
 * Points, lines and an explicit incidence relation with CSR adjacency in both directions.
 * Edges are (point index, line index), sorted and distinct.
 */
class Arrangement {
public:
    Arrangement() = default;
    Arrangement(ScaleFrame frame, GridSet2D points, std::vector<Line> lines,
                std::vector<std::pair<uint32_t, uint32_t>> edges, int slack = 1, Rational V = Rational(1));

    const ScaleFrame& frame() const { return frame_; }
    const GridSet2D& points() const { return points_; }
    const std::vector<Line>& lines() const { return lines_; }
    const std::vector<std::pair<uint32_t, uint32_t>>& edges() const { return edges_; }
    int slack() const { return slack_; }
    const Rational& V() const { return V_; }
    void set_V(Rational v) { V_ = std::move(v); }

    size_t num_points() const { return points_.size(); }
    size_t num_lines() const { return lines_.size(); }
    size_t num_incidences() const { return edges_.size(); }

    // Lines incident to point p, ascending.
    std::pair<const uint32_t*, const uint32_t*> lines_of(size_t p) const {
        return {line_ids_.data() + point_off_[p], line_ids_.data() + point_off_[p + 1]};
    }
    // Points incident to line l, ascending.
    std::pair<const uint32_t*, const uint32_t*> points_of(size_t l) const {
        return {point_ids_.data() + line_off_[l], point_ids_.data() + line_off_[l + 1]};
    }
    size_t point_degree(size_t p) const { return point_off_[p + 1] - point_off_[p]; }
    size_t line_degree(size_t l) const { return line_off_[l + 1] - line_off_[l]; }
    bool has_edge(size_t p, size_t l) const;

    QPoint point_value(size_t p) const { return to_qpoint(points_.points()[p], frame_.bits()); }
    // Number of edges violating dist(p, l) <= slack * delta.
    size_t count_slack_violations() const;

private:
    ScaleFrame frame_;
    GridSet2D points_;
    std::vector<Line> lines_;
    std::vector<std::pair<uint32_t, uint32_t>> edges_;
    int slack_ = 1;
    Rational V_ = 1;
    std::vector<size_t> point_off_{0}, line_off_{0};
    std::vector<uint32_t> line_ids_, point_ids_;
};

// All pairs with dist(p, l) <= slack * delta, decided exactly.
Arrangement build_incidences(const GridSet2D& P, const std::vector<Line>& L, const ScaleFrame& frame, int slack = 1,
                             Rational V = Rational(1));

void write_arrangement(std::ostream& os, const Arrangement& arr);
Arrangement read_arrangement(std::istream& is, const ScaleFrame& frame, int slack = 1, Rational V = Rational(1));

/** A measured constant; zero is kept apart because ExactPower is strictly positive. */
struct Measured {
    bool is_zero = true;
    ExactPower value;
    double approx() const { return is_zero ? 0.0 : value.to_double(); }
    static Measured of(const ExactPower& v) { return {false, v}; }
    bool operator<(const Measured& o) const { return is_zero ? !o.is_zero : (!o.is_zero && value < o.value); }
};

struct PropertyCheck {
    Measured constant;
    bool pass = false;
};

/**
 * Minimal constants for the six arrangement properties.
 * A: min_l #I(l) / (delta^{-alpha} V), needs >= delta^eps.
 * B: max over lines, dyadic squares B of side r: #(I(l) cap B) / ((r/delta)^alpha V), needs <= delta^{-eps}.
 * C: max over dyadic cells B of side r in slope-intercept space: #(B cap iota(L)) / (r/delta)^{2 alpha}.
 * D: min and max of #I(p) / (#I/#P), need >= delta^eps and <= delta^{-eps}.
 * E: max over p and net directions v of the fraction of I(p) within angle delta^eps of v, needs <= 1/2.
 * F: max over p, net directions v, dyadic r in [delta, 2]: #{l in I(p): angle(l, v) <= r} / (r/delta)^alpha.
 * The direction net at p is the set of directions of the lines in I(p).
 */
struct PropertyReport {
    PropertyCheck A, B, C, F;
    PropertyCheck D_lower, D_upper;
    Measured E_fraction;
    bool E_pass = true;
    bool D_pass() const { return D_lower.pass && D_upper.pass; }
    bool all_pass() const { return A.pass && B.pass && C.pass && D_pass() && E_pass && F.pass; }
};

PropertyReport validate_properties(const Arrangement& arr, const Rational& alpha, const Rational& epsilon,
                                   const Rational& V);

/** Result of the two-ends pigeonhole. r is 2^{-r_exp}, or pi when r_is_pi. */
struct TwoEndsResult {
    bool r_is_pi = false;
    int r_exp = 0;
    size_t v_index = 0;           // index in Lq of the line giving direction v
    std::vector<size_t> kept;     // indices in Lq with angle(l, v) < r
    ExactPower f_value;           // r^{-eps} * #{l : angle(l, v) <= r}, exact unless r is pi
    Angle r_angle() const { return r_is_pi ? Angle::pi_times(Rational(1)) : Angle::radians(ExactPower::pow2(-r_exp)); }
};

/**
 * Maximizes f(r, v) = r^{-eps} #{l : angle(l, v) <= r} over r in {2^{-e} : delta <= 2^{-e} <= 1} and r = pi,
 * v over the directions of Lq. Ties: larger f, then smaller r, then lower v index.
 */
TwoEndsResult two_ends(const std::vector<Line>& Lq, const Rational& epsilon, int delta_exp);

// Count of lines l in Lq with angle(l, v) <= r for the given net point.
size_t two_ends_count(const std::vector<Line>& Lq, size_t v_index, const Angle& r);

/** Peeling of a bipartite graph to the degree thresholds #E/(4#A) and #E/(4#B). */
struct BipartiteRefinement {
    std::vector<bool> keep_a, keep_b;
    std::vector<std::pair<uint32_t, uint32_t>> edges;  // surviving edges, original indices
};

BipartiteRefinement refine_bipartite(size_t na, size_t nb, const std::vector<std::pair<uint32_t, uint32_t>>& edges);

struct RefinedArrangement {
    Arrangement arr;
    std::vector<size_t> point_map;  // new index -> original index
    std::vector<size_t> line_map;
};

RefinedArrangement refine_graph(const Arrangement& arr);

struct TripleParams {
    Rational min_distance = 0;
    Angle min_angle = Angle::zero();
    size_t min_between = 0;
};

// Triples (p, l, q) with p in I(l0), p, q in I(l), q != p and the three thresholds met.
uint64_t census_triples(const Arrangement& arr, size_t l0, const TripleParams& params);

// Position of p along l, increasing in the direction (1, m), or along y for vertical lines.
Rational projection_parameter(const Line& l, const QPoint& p);

}  // namespace flab

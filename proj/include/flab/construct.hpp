#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "flab/incidence.hpp"
#include "flab/moran.hpp"

namespace flab {

/** One kept-digit list per level; level j has digits in base 2^bits_at(j). */
struct DigitPattern {
    int base_bits = 2;
    std::vector<std::vector<int>> keep;
    std::vector<int> level_bits;  // per-level override of base_bits; empty means uniform
    std::vector<int64_t> expand() const;  // sorted integer indices
    int bits_at(size_t j) const { return level_bits.empty() ? base_bits : level_bits.at(j); }
    int resolution_bits() const;
};

struct FurstenbergInstance {
    ScaleFrame frame;
    Rational alpha, beta;
    std::vector<Line> lines;             // ascending
    std::vector<GridSet2D> point_sets;   // P_l, one per line, on the frame grid
};

struct InstanceReport {
    size_t num_lines = 0;
    size_t min_points = 0;
    ExactPower line_constant;   // nonconcentration constant of iota(L) at exponent beta
    ExactPower point_constant;  // max over lines of the constant of P_l (x-projection) at exponent alpha
    bool lines_separated = true;
    bool lines_count_ok = false;
    bool points_count_ok = false;
    bool lines_nonconcentrated = false;
    bool points_nonconcentrated = false;
    bool valid() const {
        return lines_separated && lines_count_ok && points_count_ok && lines_nonconcentrated && points_nonconcentrated;
    }
};

// Grid points (x, floor((m x + b) 2^{kT}) 2^{-kT}) for x = i 2^{-kT}; the line meets each point's cell.
GridSet2D points_on_line(const ScaleFrame& frame, const Line& l, const std::vector<int64_t>& x_indices);

InstanceReport validate_instance(const FurstenbergInstance& inst);

/**
 * Lines y = m x + b with m, b from the slope and intercept patterns, and points with x from the point pattern.
 * Pattern resolutions must equal delta. Throws with the failing check if the instance is invalid.
 */
FurstenbergInstance gen_furstenberg(const ScaleFrame& frame, const Rational& alpha, const Rational& beta,
                                    const DigitPattern& slopes, const DigitPattern& intercepts,
                                    const DigitPattern& points);

/** Lines surviving the common-branching refinement with their regular point sets. */
struct RegularizedInstance {
    ScaleFrame frame;
    Rational alpha, beta;
    std::vector<Line> lines;
    std::vector<GridSet2D> point_sets;  // P'_l, all Moran-regular with `branching`
    Branching branching;
    std::vector<size_t> source;  // index in the original instance
};

RegularizedInstance regularize_instance(const FurstenbergInstance& inst);

/** Contributed and dominated squares of every processed line. */
struct DominationLedger {
    int k = 0;
    std::vector<std::set<DyadicSquare>> contributed;
    std::vector<std::map<DyadicSquare, uint32_t>> dominated;  // square -> dominating line
    std::vector<uint32_t> owner;  // per point of P1: the line that added it

    bool contributed_in(size_t line, const DyadicSquare& s) const;
    // Dominating line if s is a dominated square of `line`.
    std::optional<uint32_t> dominated_at(size_t line, const DyadicSquare& s) const;
    // Dominated square of `line` containing s, strictly larger when strict is set.
    std::optional<DyadicSquare> dominated_ancestor(const ScaleFrame& f, size_t line, const DyadicSquare& s,
                                                   bool strict) const;
};

struct ArrangementBuild {
    Arrangement arr;
    DominationLedger ledger;
    std::vector<uint32_t> order;  // processing order of line indices
};

/**
 * Stopping-time construction. A square S of level j is dominated for l_m by the lowest processed l_n that
 * contributed in S, with angle(l_m, l_n) <= (pi/2) 2^{(j-k)T} and dist(l_m cap S, l_n cap S) <= sqrt(2) 2^{-kT}.
 * Default order is ascending (m, b).
 */
ArrangementBuild build_arrangement(const RegularizedInstance& inst, std::optional<std::vector<uint32_t>> order = {});

void write_ledger(std::ostream& os, const DominationLedger& ledger, const ScaleFrame& frame);

struct PinCheck {
    size_t incident_in_square = 0;  // #{p in P1 cap S : (p, l) in I1}
    size_t own_in_square = 0;       // #(P'_l cap S)
    bool in_domain = true;          // S not strictly inside a dominated square of l
    bool holds() const { return incident_in_square == own_in_square; }
};

PinCheck pin_check(const ArrangementBuild& b, const RegularizedInstance& inst, size_t line, const DyadicSquare& s);

struct ContributorCensus {
    size_t cells_zero = 0;      // (p, level) pairs with no contributing line in I1(p)
    size_t cells_one = 0;
    size_t cells_many = 0;
    size_t max_points_per_cell = 0;  // over level-k cells
};

ContributorCensus contributor_census(const ArrangementBuild& b);

// Slope of l as an index on the frame grid; throws unless m * 2^{kT} is an integer in [0, 2^{kT}).
int64_t slope_index(const ScaleFrame& f, const Line& l);

struct SlopeRegularization {
    Arrangement arr;               // P2, all lines, I2
    std::vector<size_t> source;    // P2 index -> P1 index
    Branching branching;           // (M_0, ..., M_{k-1})
    size_t slopes_before = 0;      // sum of #A_p
    size_t slopes_after = 0;       // sum of #A'_p
    Rational mass_factor;          // guaranteed slopes_after / slopes_before
    std::vector<double> concentration_exponent;  // per level j: minimal C0 in prod M_i <= delta^{-C0 eps}(2^{(j-k)T}/delta)^alpha
};

SlopeRegularization regularize_slopes(const Arrangement& arr, const Rational& alpha);

struct Truncation {
    bool early_exit = false;
    size_t witnessed_points = 0;  // #P2 when exiting early
    size_t witnessed_incidences = 0;
    Arrangement arr;              // I3
    int j0 = -1;                  // s = 2^{-j0 T}
    size_t max_window_count = 0;  // worst count in a window of length s 2^{-T}
    bool window_bound_ok = false; // 20 * count <= #I3(p) for every point and window
};

Truncation truncate_slopes(const Arrangement& arr2, const Branching& branching);

struct Tube {
    Rational m, b;
    Arrangement arr;               // points of the tube, all lines, I3^z
    std::vector<size_t> points;    // indices into the input arrangement
    std::vector<uint32_t> lines;   // L^z
};

struct TubeDecomposition {
    int j0 = 0;
    Rational s;
    size_t num_centers = 0;
    size_t cover_min = 0, cover_max = 0;  // over points, number of centers whose P^z holds the point
    size_t line_multiplicity_max = 0;
    std::vector<Tube> tubes;            // disjoint, sizes within a factor 2
    size_t retained_incidences = 0, total_incidences = 0;
};

TubeDecomposition partition_tubes(const Arrangement& arr3, int j0);

struct Representatives {
    GridSet2D Q;
    Arrangement IQ;  // Q, all lines, I cap (Q x L)
    int64_t M = 1;
    int level = 0;
    size_t groups_total = 0, groups_kept = 0;
    size_t claim_i_failures = 0;   // points without exactly one contributing line
    size_t claim_ii_failures = 0;  // (p, l') pairs not dominated by the contributor on a square containing S
    double retained_ratio = 0;     // M #I_Q / #I
};

Representatives select_representatives(const Tube& tube, const DominationLedger& ledger, int j0);

}  // namespace flab

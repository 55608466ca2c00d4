#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "flab/rational.hpp"

namespace flab {

// Which relation between the grid resolution 2^{-kT} and delta a frame obeys.
enum class FrameConvention {
    Plain,  // 2^{-kT} <= delta < 2^{-k(T-1)}
    Sixth,  // 2^{-kT} <= delta/6 < 2^{-k(T-1)}
};

/**
 * Discretization parameters. delta is stored as its exponent: delta = 2^{-delta_exp}.
 * Grid indices i mean i * 2^{-kT}.
 */
struct ScaleFrame {
    int k = 1;
    int T = 1;
    int delta_exp = 1;
    Rational epsilon = Rational(1);
    Rational C = Rational(1);

    static ScaleFrame make(int k, int T, int delta_exp, Rational epsilon = Rational(1, 10),
                           Rational C = Rational(1));
    // k = floor(1/epsilon); T is the least integer satisfying the convention.
    static ScaleFrame from_delta(int delta_exp, const Rational& epsilon,
                                 FrameConvention conv = FrameConvention::Plain, Rational C = Rational(1));

    int bits() const { return k * T; }
    Rational delta() const { return pow2q(-delta_exp); }
    Rational resolution() const { return pow2q(-bits()); }
    // Number of grid units in one delta.
    int64_t delta_units() const { return int64_t(1) << (bits() - delta_exp); }
    void validate() const;
    bool operator==(const ScaleFrame& o) const {
        return k == o.k && T == o.T && delta_exp == o.delta_exp && epsilon == o.epsilon && C == o.C;
    }
};

enum class Domain { Unit, Shifted, Free };

std::string domain_name(Domain d);

struct Point2 {
    int64_t x = 0;
    int64_t y = 0;
    auto operator<=>(const Point2&) const = default;
};

class GridSet1D {
public:
    GridSet1D() = default;
    // Sorts and deduplicates; throws DomainError if an index leaves the domain.
    GridSet1D(const ScaleFrame& frame, std::vector<int64_t> indices, Domain domain = Domain::Unit);

    const ScaleFrame& frame() const { return frame_; }
    Domain domain() const { return domain_; }
    const std::vector<int64_t>& indices() const { return idx_; }
    size_t size() const { return idx_.size(); }
    bool empty() const { return idx_.empty(); }
    bool contains(int64_t i) const;
    Rational value(size_t pos) const { return Rational(BigInt(static_cast<long>(idx_[pos]))) * frame_.resolution(); }

    bool operator==(const GridSet1D& o) const {
        return frame_.bits() == o.frame_.bits() && domain_ == o.domain_ && idx_ == o.idx_;
    }

private:
    ScaleFrame frame_;
    Domain domain_ = Domain::Unit;
    std::vector<int64_t> idx_;
};

class GridSet2D {
public:
    GridSet2D() = default;
    GridSet2D(const ScaleFrame& frame, std::vector<Point2> points, Domain domain = Domain::Free);

    const ScaleFrame& frame() const { return frame_; }
    Domain domain() const { return domain_; }
    const std::vector<Point2>& points() const { return pts_; }
    size_t size() const { return pts_.size(); }
    bool empty() const { return pts_.empty(); }
    bool contains(const Point2& p) const;
    // Position of p in points(), or -1.
    long find(const Point2& p) const;

    bool operator==(const GridSet2D& o) const {
        return frame_.bits() == o.frame_.bits() && domain_ == o.domain_ && pts_ == o.pts_;
    }

private:
    ScaleFrame frame_;
    Domain domain_ = Domain::Free;
    std::vector<Point2> pts_;
};

/** Cell [index * 2^{-level T}, (index+1) * 2^{-level T}) of the 2^T-adic tree. */
struct DyadicCell {
    int level = 0;
    int64_t index = 0;
    auto operator<=>(const DyadicCell&) const = default;
};

struct DyadicSquare {
    int level = 0;
    int64_t ix = 0;
    int64_t iy = 0;
    auto operator<=>(const DyadicSquare&) const = default;
};

DyadicCell cell_of(const ScaleFrame& f, int64_t index, int level);
DyadicSquare square_of(const ScaleFrame& f, const Point2& p, int level);
bool cell_contains(const ScaleFrame& f, const DyadicCell& outer, const DyadicCell& inner);
bool cells_disjoint(const ScaleFrame& f, const DyadicCell& a, const DyadicCell& b);
bool square_contains(const ScaleFrame& f, const DyadicSquare& outer, const DyadicSquare& inner);

// Arithmetic shift by a binary scale: floor(i / 2^shift).
inline int64_t floor_shift(int64_t i, int shift) { return shift >= 63 ? (i < 0 ? -1 : 0) : (i >> shift); }

// rho = 2^{-rho_exp}; requires 0 <= rho_exp <= kT.
size_t covering_number(const GridSet1D& X, int rho_exp);
size_t covering_number(const GridSet2D& X, int rho_exp);
size_t covering_number(const GridSet1D& X, const Rational& rho);
size_t covering_number(const GridSet2D& X, const Rational& rho);
int scale_exponent(const ScaleFrame& f, const Rational& rho);

// All grid points within r = 2^{-r_exp} (sup-norm in 2D), clipped to the domain.
GridSet1D neighborhood(const GridSet1D& X, int r_exp);
GridSet2D neighborhood(const GridSet2D& X, int r_exp);
GridSet1D neighborhood(const GridSet1D& X, const Rational& r);
GridSet2D neighborhood(const GridSet2D& X, const Rational& r);

struct NonconcentrationResult {
    ExactPower K;        // minimal K >= 1
    int worst_scale_exp; // scale 2^{-e} where the maximum is attained
    size_t worst_count;
    bool is_nset;        // K <= C * delta^{-epsilon}
};

NonconcentrationResult nonconcentration(const GridSet1D& X, const Rational& alpha, const ScaleFrame& frame);
NonconcentrationResult nonconcentration(const GridSet2D& X, const Rational& alpha, const ScaleFrame& frame);
ExactPower nonconcentration_constant(const GridSet1D& X, const Rational& alpha, const ScaleFrame& frame);
ExactPower nonconcentration_constant(const GridSet2D& X, const Rational& alpha, const ScaleFrame& frame);

// keep_pattern[j] lists the kept child digits (< 2^T) at level j; size must equal k.
GridSet1D cantor_generator(const ScaleFrame& frame, const std::vector<std::vector<int>>& keep_pattern,
                           Domain domain = Domain::Unit);

void write_gridset(std::ostream& os, const GridSet1D& X);
void write_gridset(std::ostream& os, const GridSet2D& X);
// The frame supplies k and T; its kT must match the header.
GridSet1D read_gridset1d(std::istream& is, const ScaleFrame& frame);
GridSet2D read_gridset2d(std::istream& is, const ScaleFrame& frame);

}  // namespace flab

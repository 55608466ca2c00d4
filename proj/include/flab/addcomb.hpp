#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "flab/dyadic.hpp"

namespace flab {

/** Bipartite edge set between index ranges [0,a_size) and [0,b_size). Sorted, no duplicates. */
class EdgeSet {
public:
    EdgeSet() = default;
    EdgeSet(size_t a_size, size_t b_size, std::vector<std::pair<uint32_t, uint32_t>> edges);
    static EdgeSet complete(size_t a_size, size_t b_size);

    size_t a_size() const { return a_size_; }
    size_t b_size() const { return b_size_; }
    const std::vector<std::pair<uint32_t, uint32_t>>& edges() const { return edges_; }
    size_t size() const { return edges_.size(); }
    bool empty() const { return edges_.empty(); }

private:
    size_t a_size_ = 0;
    size_t b_size_ = 0;
    std::vector<std::pair<uint32_t, uint32_t>> edges_;
};

void write_edgeset(std::ostream& os, const EdgeSet& E);
EdgeSet read_edgeset(std::istream& is);

enum class LatticeMode { Additive, Multiplicative };

/** Integer lattice coordinates: multiples of delta, or exponents of 2^delta. */
struct LatticePoints {
    LatticeMode mode = LatticeMode::Additive;
    std::vector<int64_t> elements;  // sorted, unique

    static LatticePoints make(LatticeMode mode, std::vector<int64_t> elements);
    size_t size() const { return elements.size(); }
};

enum class SumOp { Plus, Minus };

GridSet1D partial_sum(const GridSet1D& A, const GridSet1D& B, const EdgeSet& E, SumOp op);
// Minkowski sum/difference over all pairs.
GridSet1D full_sum(const GridSet1D& A, const GridSet1D& B, SumOp op);

uint64_t additive_energy(const LatticePoints& A, const LatticePoints& B);
// Quadruple enumeration; only for small inputs.
uint64_t additive_energy_bruteforce(const LatticePoints& A, const LatticePoints& B);
// Representation function r(s) = #{(a,b): a+b = s} as sorted (s, r) pairs.
std::vector<std::pair<int64_t, uint64_t>> representation_function(const LatticePoints& A, const LatticePoints& B);

LatticePoints embed(const GridSet1D& A, const ScaleFrame& frame, LatticeMode mode);
// Lattice points assigned to one element x of A (its embedding neighbourhood).
std::vector<int64_t> embed_element(const Rational& x, const ScaleFrame& frame, LatticeMode mode);
// Exact test of |2^{e delta} - x| <= bound.
bool multiplicative_point_within(int64_t e, int delta_exp, const Rational& x, const Rational& bound);

uint64_t discretized_energy(const GridSet1D& A, const GridSet1D& B, const ScaleFrame& frame, LatticeMode mode);

struct CauchySchwarzCheck {
    BigInt lhs;  // E(A,B)^2
    BigInt rhs;  // E(A,A) E(B,B)
    bool holds;
};

CauchySchwarzCheck energy_cauchy_schwarz_check(const LatticePoints& A, const LatticePoints& B);

struct BsgReport {
    size_t pivot = 0;             // index in B whose neighbourhood seeds A'
    size_t pivot_degree = 0;
    Rational codegree_threshold;  // pairs below it count as "bad"
    size_t a_prime_size = 0;
    size_t difference_size = 0;   // #(A' - A')
    size_t partial_difference_size = 0;  // #(A -_E B)
    Rational size_lower_bound;     // c1 * #E / #B
    Rational difference_upper_bound;  // c2 * #A^4 #B^3 #(A -_E B)^4 / #E^5
    bool size_ok = false;
    bool difference_ok = false;
};

// Constants guaranteed by the construction in bsg_extract.
Rational bsg_c1();
Rational bsg_c2();

struct BsgResult {
    GridSet1D a_prime;
    std::vector<size_t> a_prime_positions;  // positions in A
    BsgReport report;
};

BsgResult bsg_extract(const GridSet1D& A, const GridSet1D& B, const EdgeSet& E);

}  // namespace flab

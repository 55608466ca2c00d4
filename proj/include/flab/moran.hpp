#pragma once

#include <vector>

#include "flab/dyadic.hpp"

namespace flab {

/** Per-level child counts (N_0, ..., N_{k-1}), each a power of two. */
struct Branching {
    std::vector<int64_t> levels;

    int64_t product_from(int j) const;  // N_j * ... * N_{k-1}
    bool operator==(const Branching&) const = default;
    auto operator<=>(const Branching&) const = default;
};

bool is_moran_regular(const GridSet1D& A, const Branching& branching);
bool is_moran_regular(const GridSet2D& A, const Branching& branching);

template <class Set>
struct MoranResult {
    Set refined;
    Branching branching;
};

MoranResult<GridSet1D> moran_regularize(const GridSet1D& A);
MoranResult<GridSet2D> moran_regularize(const GridSet2D& A);

/**
 * Guaranteed retained fraction of moran_regularize: (4T)^{-k} in one dimension and
 * (2(2T+1))^{-k} in two, where a level can have 2T+1 child-count buckets.
 */
Rational moran_mass_factor(int k, int T, int dim);

template <class Set>
struct CommonBranchingResult {
    std::vector<size_t> kept;  // indices into the family
    std::vector<Set> refined;  // one per kept index
    Branching branching;
    // Refined mass of every branching class found, for auditing the pigeonhole.
    std::vector<std::pair<Branching, size_t>> class_mass;
};

CommonBranchingResult<GridSet1D> common_branching(const std::vector<GridSet1D>& family);
CommonBranchingResult<GridSet2D> common_branching(const std::vector<GridSet2D>& family);

// Guaranteed retained fraction of common_branching.
Rational common_branching_mass_factor(int k, int T, int dim);

}  // namespace flab

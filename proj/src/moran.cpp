#include "flab/moran.hpp"

#include <algorithm>
#include <map>

namespace flab {

int64_t Branching::product_from(int j) const {
    int64_t p = 1;
    for (size_t i = static_cast<size_t>(j); i < levels.size(); ++i) p *= levels[i];
    return p;
}

namespace {

Point2 cell_key(const Point2& p, int shift, int dim) {
    return dim == 1 ? Point2{floor_shift(p.x, shift), 0} : Point2{floor_shift(p.x, shift), floor_shift(p.y, shift)};
}

Point2 parent_key(const Point2& c, int T, int dim) { return cell_key(c, T, dim); }

// Distinct children at level j+1 grouped by their level-j parent: (parent, sorted children).
std::vector<std::pair<Point2, std::vector<Point2>>> children_by_parent(const std::vector<Point2>& pts, int bits,
                                                                        int T, int j, int dim) {
    std::vector<std::pair<Point2, Point2>> pc;
    pc.reserve(pts.size());
    int sh = bits - (j + 1) * T;
    for (const auto& p : pts) {
        Point2 c = cell_key(p, sh, dim);
        pc.emplace_back(parent_key(c, T, dim), c);
    }
    std::sort(pc.begin(), pc.end());
    pc.erase(std::unique(pc.begin(), pc.end()), pc.end());
    std::vector<std::pair<Point2, std::vector<Point2>>> out;
    for (const auto& [par, ch] : pc) {
        if (out.empty() || out.back().first != par) out.emplace_back(par, std::vector<Point2>{});
        out.back().second.push_back(ch);
    }
    return out;
}

bool regular_impl(const std::vector<Point2>& pts, const ScaleFrame& f, const Branching& br, int dim) {
    if (static_cast<int>(br.levels.size()) != f.k) return false;
    for (int j = 0; j < f.k; ++j)
        for (const auto& [par, ch] : children_by_parent(pts, f.bits(), f.T, j, dim))
            if (static_cast<int64_t>(ch.size()) != br.levels[j]) return false;
    return true;
}

int floor_log2(size_t c) {
    int z = 0;
    while ((size_t(2) << z) <= c) ++z;
    return z;
}

std::pair<std::vector<Point2>, Branching> regularize_impl(std::vector<Point2> pts, const ScaleFrame& f, int dim) {
    if (pts.empty()) throw Error(ErrorKind::EmptyInput, "Moran regularization of the empty set");
    Branching br;
    br.levels.assign(f.k, 1);
    for (int j = f.k - 1; j >= 0; --j) {
        auto groups = children_by_parent(pts, f.bits(), f.T, j, dim);
        std::map<int, size_t> bucket_cells;
        for (const auto& g : groups) ++bucket_cells[floor_log2(g.second.size())];
        int best_z = -1;
        unsigned __int128 best_score = 0;
        for (const auto& [z, cells] : bucket_cells) {
            unsigned __int128 score = static_cast<unsigned __int128>(cells) << z;
            if (best_z < 0 || score > best_score) {
                best_z = z;
                best_score = score;
            }
        }
        std::vector<Point2> kept_children;
        for (const auto& [par, ch] : groups) {
            if (floor_log2(ch.size()) != best_z) continue;
            kept_children.insert(kept_children.end(), ch.begin(), ch.begin() + (size_t(1) << best_z));
        }
        std::sort(kept_children.begin(), kept_children.end());
        int sh = f.bits() - (j + 1) * f.T;
        std::vector<Point2> next;
        next.reserve(pts.size());
        for (const auto& p : pts)
            if (std::binary_search(kept_children.begin(), kept_children.end(), cell_key(p, sh, dim))) next.push_back(p);
        pts = std::move(next);
        br.levels[j] = int64_t(1) << best_z;
    }
    return {std::move(pts), br};
}

std::vector<Point2> as_points(const GridSet1D& A) {
    std::vector<Point2> v;
    v.reserve(A.size());
    for (int64_t i : A.indices()) v.push_back({i, 0});
    return v;
}

template <class Set>
CommonBranchingResult<Set> common_impl(const std::vector<Set>& family) {
    if (family.empty()) throw Error(ErrorKind::EmptyInput, "common branching of an empty family");
    const int bits = family.front().frame().bits();
    for (const auto& s : family)
        if (s.frame().bits() != bits) throw Error(ErrorKind::InvalidArgument, "family members on different grids");
    std::vector<MoranResult<Set>> each;
    each.reserve(family.size());
    std::map<Branching, size_t> mass;
    for (const auto& s : family) {
        if (s.empty()) {
            each.push_back({s, Branching{}});
            continue;
        }
        each.push_back(moran_regularize(s));
        mass[each.back().branching] += each.back().refined.size();
    }
    if (mass.empty()) throw Error(ErrorKind::EmptyInput, "every family member is empty");
    CommonBranchingResult<Set> res;
    size_t best = 0;
    for (const auto& [br, m] : mass) {
        res.class_mass.emplace_back(br, m);
        if (m > best) {
            best = m;
            res.branching = br;
        }
    }
    for (size_t i = 0; i < family.size(); ++i)
        if (!family[i].empty() && each[i].branching == res.branching) {
            res.kept.push_back(i);
            res.refined.push_back(std::move(each[i].refined));
        }
    return res;
}

}  // namespace

bool is_moran_regular(const GridSet1D& A, const Branching& branching) {
    return regular_impl(as_points(A), A.frame(), branching, 1);
}

bool is_moran_regular(const GridSet2D& A, const Branching& branching) {
    return regular_impl(A.points(), A.frame(), branching, 2);
}

MoranResult<GridSet1D> moran_regularize(const GridSet1D& A) {
    auto [pts, br] = regularize_impl(as_points(A), A.frame(), 1);
    std::vector<int64_t> idx;
    idx.reserve(pts.size());
    for (const auto& p : pts) idx.push_back(p.x);
    return {GridSet1D(A.frame(), std::move(idx), A.domain()), br};
}

MoranResult<GridSet2D> moran_regularize(const GridSet2D& A) {
    auto [pts, br] = regularize_impl(A.points(), A.frame(), 2);
    return {GridSet2D(A.frame(), std::move(pts), A.domain()), br};
}

Rational moran_mass_factor(int k, int T, int dim) {
    Rational per_level = dim == 1 ? Rational(4 * T) : Rational(2 * (2 * T + 1));
    return pow_q(per_level, -k);
}

Rational common_branching_mass_factor(int k, int T, int dim) {
    Rational classes = dim == 1 ? Rational(T + 1) : Rational(2 * T + 1);
    return moran_mass_factor(k, T, dim) * pow_q(classes, -k);
}

CommonBranchingResult<GridSet1D> common_branching(const std::vector<GridSet1D>& family) {
    return common_impl(family);
}

CommonBranchingResult<GridSet2D> common_branching(const std::vector<GridSet2D>& family) {
    return common_impl(family);
}

}  // namespace flab

#include "flab/dyadic.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace flab {

ScaleFrame ScaleFrame::make(int k, int T, int delta_exp, Rational epsilon, Rational C) {
    ScaleFrame f;
    f.k = k;
    f.T = T;
    f.delta_exp = delta_exp;
    f.epsilon = std::move(epsilon);
    f.C = std::move(C);
    f.validate();
    return f;
}

ScaleFrame ScaleFrame::from_delta(int delta_exp, const Rational& epsilon, FrameConvention conv, Rational C) {
    if (sgn(epsilon) <= 0) throw Error(ErrorKind::InvalidFrame, "epsilon must be positive");
    if (delta_exp < 1) throw Error(ErrorKind::InvalidFrame, "delta must be below 1");
    long k = floor_q(1 / epsilon).get_si();
    if (k < 1) throw Error(ErrorKind::InvalidFrame, "epsilon must be at most 1");
    int need = delta_exp + (conv == FrameConvention::Sixth ? 3 : 0);  // 2^3 is the least power of two >= 6
    int T = static_cast<int>((need + k - 1) / k);
    return make(static_cast<int>(k), T, delta_exp, epsilon, std::move(C));
}

void ScaleFrame::validate() const {
    if (k < 1 || T < 1) throw Error(ErrorKind::InvalidFrame, "k and T must be positive");
    if (static_cast<long>(k) * T > 62) throw Error(ErrorKind::InvalidFrame, "k*T exceeds 62");
    if (delta_exp < 0 || delta_exp > k * T)
        throw Error(ErrorKind::InvalidFrame, "delta must satisfy 2^{-kT} <= delta <= 1");
    if (sgn(epsilon) <= 0) throw Error(ErrorKind::InvalidFrame, "epsilon must be positive");
    if (C < 1) throw Error(ErrorKind::InvalidFrame, "C must be at least 1");
}

std::string domain_name(Domain d) {
    switch (d) {
        case Domain::Unit: return "unit";
        case Domain::Shifted: return "shifted";
        case Domain::Free: return "free";
    }
    return "free";
}

static Domain parse_domain(const std::string& s) {
    if (s == "unit") return Domain::Unit;
    if (s == "shifted") return Domain::Shifted;
    if (s == "free") return Domain::Free;
    throw Error(ErrorKind::Parse, "unknown domain '" + s + "'");
}

static void check_in_domain(int bits, Domain d, int64_t i) {
    if (d == Domain::Free) return;
    if (d == Domain::Unit) {
        if (i < 0 || i >= (int64_t(1) << bits))
            throw Error(ErrorKind::DomainError, "index " + std::to_string(i) + " outside [0,1)");
        return;
    }
    if (bits > 61) throw Error(ErrorKind::DomainError, "shifted domain needs kT <= 61");
    if (i < (int64_t(1) << bits) || i > (int64_t(1) << (bits + 1)))
        throw Error(ErrorKind::DomainError, "index " + std::to_string(i) + " outside [1,2]");
}

GridSet1D::GridSet1D(const ScaleFrame& frame, std::vector<int64_t> indices, Domain domain)
    : frame_(frame), domain_(domain), idx_(std::move(indices)) {
    frame_.validate();
    std::sort(idx_.begin(), idx_.end());
    idx_.erase(std::unique(idx_.begin(), idx_.end()), idx_.end());
    for (int64_t i : idx_) check_in_domain(frame_.bits(), domain_, i);
}

bool GridSet1D::contains(int64_t i) const { return std::binary_search(idx_.begin(), idx_.end(), i); }

GridSet2D::GridSet2D(const ScaleFrame& frame, std::vector<Point2> points, Domain domain)
    : frame_(frame), domain_(domain), pts_(std::move(points)) {
    frame_.validate();
    std::sort(pts_.begin(), pts_.end());
    pts_.erase(std::unique(pts_.begin(), pts_.end()), pts_.end());
    for (const auto& p : pts_) {
        check_in_domain(frame_.bits(), domain_, p.x);
        check_in_domain(frame_.bits(), domain_, p.y);
    }
}

bool GridSet2D::contains(const Point2& p) const { return std::binary_search(pts_.begin(), pts_.end(), p); }

long GridSet2D::find(const Point2& p) const {
    auto it = std::lower_bound(pts_.begin(), pts_.end(), p);
    if (it == pts_.end() || *it != p) return -1;
    return static_cast<long>(it - pts_.begin());
}

DyadicCell cell_of(const ScaleFrame& f, int64_t index, int level) {
    return {level, floor_shift(index, f.bits() - level * f.T)};
}

DyadicSquare square_of(const ScaleFrame& f, const Point2& p, int level) {
    int sh = f.bits() - level * f.T;
    return {level, floor_shift(p.x, sh), floor_shift(p.y, sh)};
}

bool cell_contains(const ScaleFrame& f, const DyadicCell& outer, const DyadicCell& inner) {
    if (inner.level < outer.level) return false;
    return floor_shift(inner.index, (inner.level - outer.level) * f.T) == outer.index;
}

bool cells_disjoint(const ScaleFrame& f, const DyadicCell& a, const DyadicCell& b) {
    return !cell_contains(f, a, b) && !cell_contains(f, b, a);
}

bool square_contains(const ScaleFrame& f, const DyadicSquare& outer, const DyadicSquare& inner) {
    if (inner.level < outer.level) return false;
    int sh = (inner.level - outer.level) * f.T;
    return floor_shift(inner.ix, sh) == outer.ix && floor_shift(inner.iy, sh) == outer.iy;
}

int scale_exponent(const ScaleFrame& f, const Rational& rho) {
    long e = -log2_exact(rho);
    if (e < 0) throw Error(ErrorKind::InvalidScale, "scale above 1");
    if (e > f.bits()) throw Error(ErrorKind::InvalidScale, "scale below grid resolution");
    return static_cast<int>(e);
}

static void check_scale(const ScaleFrame& f, int e) {
    if (e < 0) throw Error(ErrorKind::InvalidScale, "scale above 1");
    if (e > f.bits()) throw Error(ErrorKind::InvalidScale, "scale below grid resolution");
}

size_t covering_number(const GridSet1D& X, int rho_exp) {
    check_scale(X.frame(), rho_exp);
    int sh = X.frame().bits() - rho_exp;
    size_t n = 0;
    int64_t last = 0;
    for (int64_t i : X.indices()) {
        int64_t c = floor_shift(i, sh);
        if (n == 0 || c != last) ++n;
        last = c;
    }
    return n;
}

size_t covering_number(const GridSet2D& X, int rho_exp) {
    check_scale(X.frame(), rho_exp);
    int sh = X.frame().bits() - rho_exp;
    std::vector<Point2> cells;
    cells.reserve(X.size());
    for (const auto& p : X.points()) cells.push_back({floor_shift(p.x, sh), floor_shift(p.y, sh)});
    std::sort(cells.begin(), cells.end());
    return static_cast<size_t>(std::unique(cells.begin(), cells.end()) - cells.begin());
}

size_t covering_number(const GridSet1D& X, const Rational& rho) {
    return covering_number(X, scale_exponent(X.frame(), rho));
}

size_t covering_number(const GridSet2D& X, const Rational& rho) {
    return covering_number(X, scale_exponent(X.frame(), rho));
}

static int64_t radius_units(const ScaleFrame& f, int r_exp) {
    if (r_exp > f.bits()) throw Error(ErrorKind::InvalidScale, "radius below grid resolution");
    int sh = f.bits() - r_exp;
    if (sh > 61) throw Error(ErrorKind::InvalidScale, "radius too large");
    return int64_t(1) << sh;
}

static std::pair<int64_t, int64_t> domain_bounds(int bits, Domain d) {
    if (d == Domain::Unit) return {0, (int64_t(1) << bits) - 1};
    if (d == Domain::Shifted) return {int64_t(1) << bits, int64_t(1) << (bits + 1)};
    return {INT64_MIN / 4, INT64_MAX / 4};
}

static std::vector<std::pair<int64_t, int64_t>> merge_intervals(std::vector<std::pair<int64_t, int64_t>> iv) {
    std::sort(iv.begin(), iv.end());
    std::vector<std::pair<int64_t, int64_t>> out;
    for (const auto& [a, b] : iv) {
        if (a > b) continue;
        if (!out.empty() && a <= out.back().second + 1)
            out.back().second = std::max(out.back().second, b);
        else
            out.emplace_back(a, b);
    }
    return out;
}

GridSet1D neighborhood(const GridSet1D& X, int r_exp) {
    int64_t w = radius_units(X.frame(), r_exp);
    auto [lo, hi] = domain_bounds(X.frame().bits(), X.domain());
    std::vector<std::pair<int64_t, int64_t>> iv;
    iv.reserve(X.size());
    for (int64_t i : X.indices()) iv.emplace_back(std::max(lo, i - w), std::min(hi, i + w));
    std::vector<int64_t> out;
    for (const auto& [a, b] : merge_intervals(std::move(iv)))
        for (int64_t j = a; j <= b; ++j) out.push_back(j);
    return GridSet1D(X.frame(), std::move(out), X.domain());
}

GridSet2D neighborhood(const GridSet2D& X, int r_exp) {
    int64_t w = radius_units(X.frame(), r_exp);
    auto [lo, hi] = domain_bounds(X.frame().bits(), X.domain());
    std::map<int64_t, std::vector<std::pair<int64_t, int64_t>>> rows;
    for (const auto& p : X.points()) {
        int64_t xa = std::max(lo, p.x - w), xb = std::min(hi, p.x + w);
        for (int64_t y = std::max(lo, p.y - w); y <= std::min(hi, p.y + w); ++y) rows[y].emplace_back(xa, xb);
    }
    std::vector<Point2> out;
    for (auto& [y, iv] : rows)
        for (const auto& [a, b] : merge_intervals(std::move(iv)))
            for (int64_t x = a; x <= b; ++x) out.push_back({x, y});
    return GridSet2D(X.frame(), std::move(out), X.domain());
}

GridSet1D neighborhood(const GridSet1D& X, const Rational& r) {
    long e = -log2_exact(r);
    return neighborhood(X, static_cast<int>(e));
}

GridSet2D neighborhood(const GridSet2D& X, const Rational& r) {
    long e = -log2_exact(r);
    return neighborhood(X, static_cast<int>(e));
}

namespace {

// counts[e] = largest number of delta-cells of X inside a single cell of side 2^{-e}, e = 0..d.
template <class Key, class Collapse>
NonconcentrationResult scan_nonconcentration(std::vector<Key> cells, int d, int dim, const Rational& alpha,
                                             const ScaleFrame& frame, Collapse collapse) {
    if (cells.empty()) throw Error(ErrorKind::EmptyInput, "non-concentration constant of the empty set");
    if (sgn(alpha) <= 0 || alpha > dim) throw Error(ErrorKind::InvalidArgument, "alpha out of range");
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    NonconcentrationResult res{ExactPower(Rational(1)), d, 1, true};
    for (int e = d; e >= 0; --e) {
        std::vector<Key> parents;
        parents.reserve(cells.size());
        for (const auto& c : cells) parents.push_back(collapse(c, d - e));
        std::sort(parents.begin(), parents.end());
        size_t best = 0;
        for (size_t i = 0; i < parents.size();) {
            size_t j = i;
            while (j < parents.size() && parents[j] == parents[i]) ++j;
            best = std::max(best, j - i);
            i = j;
        }
        ExactPower cand = ExactPower(Rational(static_cast<long>(best))) * ExactPower::pow2(-alpha * (d - e));
        if (cand > res.K) {
            res.K = cand;
            res.worst_scale_exp = e;
            res.worst_count = best;
        }
    }
    ExactPower cap = ExactPower(frame.C) * ExactPower::pow2(frame.epsilon * d);
    res.is_nset = res.K <= cap;
    return res;
}

}  // namespace

NonconcentrationResult nonconcentration(const GridSet1D& X, const Rational& alpha, const ScaleFrame& frame) {
    int d = frame.delta_exp;
    int sh = X.frame().bits() - d;
    if (sh < 0) throw Error(ErrorKind::InvalidScale, "delta below grid resolution");
    std::vector<int64_t> cells;
    for (int64_t i : X.indices()) cells.push_back(floor_shift(i, sh));
    return scan_nonconcentration(std::move(cells), d, 1, alpha, frame,
                                 [](int64_t c, int s) { return floor_shift(c, s); });
}

NonconcentrationResult nonconcentration(const GridSet2D& X, const Rational& alpha, const ScaleFrame& frame) {
    int d = frame.delta_exp;
    int sh = X.frame().bits() - d;
    if (sh < 0) throw Error(ErrorKind::InvalidScale, "delta below grid resolution");
    std::vector<Point2> cells;
    for (const auto& p : X.points()) cells.push_back({floor_shift(p.x, sh), floor_shift(p.y, sh)});
    return scan_nonconcentration(std::move(cells), d, 2, alpha, frame, [](const Point2& c, int s) {
        return Point2{floor_shift(c.x, s), floor_shift(c.y, s)};
    });
}

ExactPower nonconcentration_constant(const GridSet1D& X, const Rational& alpha, const ScaleFrame& frame) {
    return nonconcentration(X, alpha, frame).K;
}

ExactPower nonconcentration_constant(const GridSet2D& X, const Rational& alpha, const ScaleFrame& frame) {
    return nonconcentration(X, alpha, frame).K;
}

GridSet1D cantor_generator(const ScaleFrame& frame, const std::vector<std::vector<int>>& keep_pattern,
                           Domain domain) {
    frame.validate();
    if (static_cast<int>(keep_pattern.size()) != frame.k)
        throw Error(ErrorKind::InvalidArgument, "keep pattern must have exactly k levels");
    std::vector<int64_t> cur{0};
    for (int j = 0; j < frame.k; ++j) {
        std::vector<int> level = keep_pattern[j];
        if (level.empty()) throw Error(ErrorKind::EmptyInput, "empty keep pattern at level " + std::to_string(j));
        std::sort(level.begin(), level.end());
        level.erase(std::unique(level.begin(), level.end()), level.end());
        for (int c : level)
            if (c < 0 || c >= (1 << frame.T)) throw Error(ErrorKind::InvalidArgument, "child digit out of range");
        std::vector<int64_t> next;
        next.reserve(cur.size() * level.size());
        for (int64_t prefix : cur)
            for (int c : level) next.push_back((prefix << frame.T) | c);
        cur = std::move(next);
    }
    if (domain == Domain::Shifted)
        for (auto& i : cur) i += int64_t(1) << frame.bits();
    return GridSet1D(frame, std::move(cur), domain);
}

void write_gridset(std::ostream& os, const GridSet1D& X) {
    os << "GRIDSET v1 dim=1 kT=" << X.frame().bits() << " domain=" << domain_name(X.domain()) << "\n";
    for (int64_t i : X.indices()) os << i << "\n";
}

void write_gridset(std::ostream& os, const GridSet2D& X) {
    os << "GRIDSET v1 dim=2 kT=" << X.frame().bits() << " domain=" << domain_name(X.domain()) << "\n";
    for (const auto& p : X.points()) os << p.x << " " << p.y << "\n";
}

namespace {

struct Header {
    int dim;
    int kT;
    Domain domain;
    size_t count_hint;
};

Header read_header(std::istream& is) {
    std::string line;
    while (std::getline(is, line) && line.empty()) {
    }
    std::istringstream ss(line);
    std::string tag, ver, dim, kt, dom;
    ss >> tag >> ver >> dim >> kt >> dom;
    if (tag != "GRIDSET" || ver != "v1" || dim.rfind("dim=", 0) != 0 || kt.rfind("kT=", 0) != 0 ||
        dom.rfind("domain=", 0) != 0)
        throw Error(ErrorKind::Parse, "bad GRIDSET header: " + line);
    return {std::stoi(dim.substr(4)), std::stoi(kt.substr(3)), parse_domain(dom.substr(7)), 0};
}

// Reads data lines until EOF, a blank line, or a line starting with a letter (next block).
std::vector<std::string> read_block_lines(std::istream& is) {
    std::vector<std::string> out;
    while (true) {
        int c = is.peek();
        if (c == EOF) break;
        if (std::isalpha(c)) break;
        std::string line;
        std::getline(is, line);
        if (line.empty()) break;
        out.push_back(line);
    }
    return out;
}

}  // namespace

GridSet1D read_gridset1d(std::istream& is, const ScaleFrame& frame) {
    Header h = read_header(is);
    if (h.dim != 1) throw Error(ErrorKind::Parse, "expected dim=1");
    if (h.kT != frame.bits()) throw Error(ErrorKind::Parse, "kT mismatch with frame");
    std::vector<int64_t> idx;
    for (const auto& line : read_block_lines(is)) {
        std::istringstream ss(line);
        int64_t v;
        if (!(ss >> v)) throw Error(ErrorKind::Parse, "bad index line: " + line);
        if (!idx.empty() && v <= idx.back()) throw Error(ErrorKind::Parse, "indices not strictly increasing");
        idx.push_back(v);
    }
    return GridSet1D(frame, std::move(idx), h.domain);
}

GridSet2D read_gridset2d(std::istream& is, const ScaleFrame& frame) {
    Header h = read_header(is);
    if (h.dim != 2) throw Error(ErrorKind::Parse, "expected dim=2");
    if (h.kT != frame.bits()) throw Error(ErrorKind::Parse, "kT mismatch with frame");
    std::vector<Point2> pts;
    for (const auto& line : read_block_lines(is)) {
        std::istringstream ss(line);
        Point2 p;
        if (!(ss >> p.x >> p.y)) throw Error(ErrorKind::Parse, "bad point line: " + line);
        if (!pts.empty() && !(pts.back() < p)) throw Error(ErrorKind::Parse, "points not strictly increasing");
        pts.push_back(p);
    }
    return GridSet2D(frame, std::move(pts), h.domain);
}

}  // namespace flab

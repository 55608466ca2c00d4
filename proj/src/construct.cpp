#include "flab/construct.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "flab/parallel.hpp"

namespace flab {

int DigitPattern::resolution_bits() const {
    int r = 0;
    for (size_t j = 0; j < keep.size(); ++j) r += bits_at(j);
    return r;
}

std::vector<int64_t> DigitPattern::expand() const {
    if (keep.empty()) throw Error(ErrorKind::EmptyInput, "digit pattern has no levels");
    if (!level_bits.empty() && level_bits.size() != keep.size())
        throw Error(ErrorKind::InvalidArgument, "one digit width per level required");
    std::vector<int64_t> cur{0};
    for (size_t j = 0; j < keep.size(); ++j) {
        const int bits = bits_at(j);
        if (bits < 1 || bits > 20) throw Error(ErrorKind::InvalidArgument, "digit base out of range");
        std::vector<int> level = keep[j];
        if (level.empty()) throw Error(ErrorKind::EmptyInput, "empty digit list at level " + std::to_string(j));
        std::sort(level.begin(), level.end());
        level.erase(std::unique(level.begin(), level.end()), level.end());
        for (int c : level)
            if (c < 0 || c >= (1 << bits)) throw Error(ErrorKind::InvalidArgument, "digit out of range");
        std::vector<int64_t> next;
        next.reserve(cur.size() * level.size());
        for (int64_t prefix : cur)
            for (int c : level) next.push_back((prefix << bits) | c);
        cur = std::move(next);
    }
    return cur;
}

GridSet2D points_on_line(const ScaleFrame& frame, const Line& l, const std::vector<int64_t>& x_indices) {
    if (l.vertical()) throw Error(ErrorKind::InvalidArgument, "points_on_line needs a non-vertical line");
    Rational scale(pow2z(static_cast<unsigned long>(frame.bits())));
    std::vector<Point2> pts;
    pts.reserve(x_indices.size());
    for (int64_t xi : x_indices) {
        Rational x = Rational(BigInt(static_cast<long>(xi))) / scale;
        BigInt y = floor_q((l.slope() * x + l.intercept()) * scale);
        pts.push_back({xi, static_cast<int64_t>(y.get_si())});
    }
    return GridSet2D(frame, std::move(pts));
}

InstanceReport validate_instance(const FurstenbergInstance& inst) {
    const ScaleFrame& f = inst.frame;
    const int d = f.delta_exp;
    InstanceReport rep;
    rep.num_lines = inst.lines.size();
    if (inst.lines.empty()) throw Error(ErrorKind::EmptyInput, "instance has no lines");
    if (inst.point_sets.size() != inst.lines.size())
        throw Error(ErrorKind::InvalidArgument, "one point set per line required");
    rep.min_points = SIZE_MAX;
    for (const auto& P : inst.point_sets) rep.min_points = std::min(rep.min_points, P.size());
    // C #L >= delta^{eps - beta}, C #P_l >= delta^{eps - alpha}
    rep.lines_count_ok = ExactPower(f.C * Rational(static_cast<unsigned long>(rep.num_lines))) >=
                         ExactPower::pow2(Rational(d) * (inst.beta - f.epsilon));
    rep.points_count_ok = rep.min_points > 0 && ExactPower(f.C * Rational(static_cast<unsigned long>(rep.min_points))) >=
                                                     ExactPower::pow2(Rational(d) * (inst.alpha - f.epsilon));
    // delta-separation of iota(L)
    std::vector<std::pair<Rational, Rational>> iota;
    for (const Line& l : inst.lines) {
        if (l.vertical()) throw Error(ErrorKind::InvalidArgument, "instance lines must be non-vertical");
        iota.push_back(l.iota());
    }
    std::sort(iota.begin(), iota.end());
    const Rational delta = f.delta(), delta2 = delta * delta;
    for (size_t i = 0; i < iota.size() && rep.lines_separated; ++i)
        for (size_t j = i + 1; j < iota.size() && iota[j].first - iota[i].first < delta; ++j) {
            Rational dm = iota[j].first - iota[i].first, db = iota[j].second - iota[i].second;
            if (dm * dm + db * db < delta2) {
                rep.lines_separated = false;
                break;
            }
        }
    Rational scale(pow2z(static_cast<unsigned long>(f.bits())));
    std::vector<Point2> ip;
    for (const auto& [m, b] : iota)
        ip.push_back({static_cast<int64_t>(floor_q(m * scale).get_si()), static_cast<int64_t>(floor_q(b * scale).get_si())});
    auto lk = nonconcentration(GridSet2D(f, ip), inst.beta, f);
    rep.line_constant = lk.K;
    rep.lines_nonconcentrated = lk.is_nset;
    rep.points_nonconcentrated = true;
    rep.point_constant = ExactPower(Rational(1));
    for (const auto& P : inst.point_sets) {
        if (P.empty()) {
            rep.points_nonconcentrated = false;
            continue;
        }
        std::vector<int64_t> xs;
        for (const auto& p : P.points()) xs.push_back(p.x);
        auto pk = nonconcentration(GridSet1D(f, std::move(xs), Domain::Free), inst.alpha, f);
        rep.point_constant = max(rep.point_constant, pk.K);
        rep.points_nonconcentrated = rep.points_nonconcentrated && pk.is_nset;
    }
    return rep;
}

FurstenbergInstance gen_furstenberg(const ScaleFrame& frame, const Rational& alpha, const Rational& beta,
                                    const DigitPattern& slopes, const DigitPattern& intercepts,
                                    const DigitPattern& points) {
    frame.validate();
    const int d = frame.delta_exp;
    for (const DigitPattern* p : {&slopes, &intercepts, &points})
        if (p->resolution_bits() != d) throw Error(ErrorKind::InvalidArgument, "pattern resolution must equal delta");
    auto ms = slopes.expand(), bs = intercepts.expand(), xs = points.expand();
    const int up = frame.bits() - d;
    for (auto& x : xs) x <<= up;
    FurstenbergInstance inst{frame, alpha, beta, {}, {}};
    const Rational delta = frame.delta();
    const int64_t limit = int64_t(1) << frame.bits();
    for (int64_t mi : ms)
        for (int64_t bi : bs) {
            Line l = Line::slope_intercept(Rational(BigInt(static_cast<long>(mi))) * delta,
                                           Rational(BigInt(static_cast<long>(bi))) * delta);
            GridSet2D P = points_on_line(frame, l, xs);
            for (const auto& p : P.points())
                if (p.y < 0 || p.y >= limit)
                    throw Error(ErrorKind::DomainError, "points of line " + l.to_string() + " leave the unit square");
            inst.lines.push_back(l);
            inst.point_sets.push_back(std::move(P));
        }
    InstanceReport rep = validate_instance(inst);
    if (!rep.lines_separated) throw Error(ErrorKind::InvalidArgument, "lines are not delta-separated");
    if (!rep.lines_count_ok) throw Error(ErrorKind::InvalidArgument, "too few lines for the requested beta");
    if (!rep.points_count_ok) throw Error(ErrorKind::InvalidArgument, "too few points per line for the requested alpha");
    if (!rep.lines_nonconcentrated)
        throw Error(ErrorKind::InvalidArgument, "line set concentrates: constant " + rep.line_constant.to_string());
    if (!rep.points_nonconcentrated)
        throw Error(ErrorKind::InvalidArgument, "point sets concentrate: constant " + rep.point_constant.to_string());
    return inst;
}

RegularizedInstance regularize_instance(const FurstenbergInstance& inst) {
    auto cb = common_branching(inst.point_sets);
    RegularizedInstance out{inst.frame, inst.alpha, inst.beta, {}, {}, cb.branching, {}};
    for (size_t i = 0; i < cb.kept.size(); ++i) {
        out.lines.push_back(inst.lines[cb.kept[i]]);
        out.point_sets.push_back(std::move(cb.refined[i]));
        out.source.push_back(cb.kept[i]);
    }
    return out;
}

// Ledger

bool DominationLedger::contributed_in(size_t line, const DyadicSquare& s) const {
    return line < contributed.size() && contributed[line].count(s) > 0;
}

std::optional<uint32_t> DominationLedger::dominated_at(size_t line, const DyadicSquare& s) const {
    if (line >= dominated.size()) return std::nullopt;
    auto it = dominated[line].find(s);
    if (it == dominated[line].end()) return std::nullopt;
    return it->second;
}

namespace {

DyadicSquare ancestor(const ScaleFrame& f, const DyadicSquare& s, int level) {
    int sh = (s.level - level) * f.T;
    return {level, floor_shift(s.ix, sh), floor_shift(s.iy, sh)};
}

}  // namespace

std::optional<DyadicSquare> DominationLedger::dominated_ancestor(const ScaleFrame& f, size_t line,
                                                                 const DyadicSquare& s, bool strict) const {
    if (line >= dominated.size()) return std::nullopt;
    int top = strict ? s.level - 1 : s.level;
    for (int lev = 0; lev <= top; ++lev) {
        DyadicSquare a = ancestor(f, s, lev);
        if (dominated[line].count(a)) return a;
    }
    return std::nullopt;
}

// Stopping-time construction

namespace {

struct SquareBox {
    Rational x0, x1, y0, y1;
};

SquareBox box_of(const ScaleFrame& f, const DyadicSquare& s) {
    Rational w = pow2q(-static_cast<long>(s.level) * f.T);
    Rational x0 = Rational(BigInt(static_cast<long>(s.ix))) * w, y0 = Rational(BigInt(static_cast<long>(s.iy))) * w;
    return {x0, x0 + w, y0, y0 + w};
}

bool traces_close(const Line& a, const Line& b, const SquareBox& box, const Rational& limit2) {
    auto sa = clip_to_box(a, box.x0, box.x1, box.y0, box.y1);
    if (!sa) return false;
    auto sb = clip_to_box(b, box.x0, box.x1, box.y0, box.y1);
    if (!sb) return false;
    return dist2_segments(*sa, *sb) <= limit2;
}

// Points of a sorted point set inside square s.
template <class Fn>
void for_points_in(const ScaleFrame& f, const std::vector<Point2>& pts, const DyadicSquare& s, Fn fn) {
    int sh = f.bits() - s.level * f.T;
    int64_t x0 = sh >= 63 ? INT64_MIN : (s.ix << sh);
    auto it = sh >= 63 ? pts.begin() : std::lower_bound(pts.begin(), pts.end(), Point2{x0, INT64_MIN});
    for (; it != pts.end() && floor_shift(it->x, sh) == s.ix; ++it)
        if (floor_shift(it->y, sh) == s.iy) fn(*it);
}

}  // namespace

ArrangementBuild build_arrangement(const RegularizedInstance& inst, std::optional<std::vector<uint32_t>> order) {
    const ScaleFrame& f = inst.frame;
    const size_t n = inst.lines.size();
    if (n == 0) throw Error(ErrorKind::EmptyInput, "no lines to process");
    if (inst.point_sets.size() != n) throw Error(ErrorKind::InvalidArgument, "one point set per line required");
    if (static_cast<int>(inst.branching.levels.size()) != f.k)
        throw Error(ErrorKind::Precondition, "instance is not regularized");
    for (const auto& P : inst.point_sets)
        if (P.empty() || !is_moran_regular(P, inst.branching))
            throw Error(ErrorKind::Precondition, "point sets are not Moran-regular with the shared branching");
    for (const Line& l : inst.lines)
        if (l.vertical()) throw Error(ErrorKind::InvalidArgument, "vertical lines are not supported");

    ArrangementBuild out;
    if (order) {
        out.order = *order;
        std::vector<uint32_t> chk = out.order;
        std::sort(chk.begin(), chk.end());
        for (size_t i = 0; i < chk.size(); ++i)
            if (chk.size() != n || chk[i] != i) throw Error(ErrorKind::InvalidArgument, "order is not a permutation");
    } else {
        out.order.resize(n);
        std::iota(out.order.begin(), out.order.end(), 0);
        std::stable_sort(out.order.begin(), out.order.end(),
                         [&](uint32_t a, uint32_t b) { return inst.lines[a] < inst.lines[b]; });
    }
    const int k = f.k;
    DominationLedger& led = out.ledger;
    led.k = k;
    led.contributed.assign(n, {});
    led.dominated.assign(n, {});
    std::map<DyadicSquare, std::vector<uint32_t>> contributors;  // in processing order
    std::map<Point2, uint32_t> p1;                               // point -> owner
    std::vector<std::pair<Point2, uint32_t>> incid;
    const Rational u = f.resolution();
    const Rational limit2 = 2 * u * u;
    const long double pi = std::acos(-1.0L);
    std::vector<long double> phi(n);
    for (size_t i = 0; i < n; ++i) phi[i] = inst.lines[i].angle_approx();

    for (uint32_t lm : out.order) {
        const Line& line = inst.lines[lm];
        const auto& pts = inst.point_sets[lm].points();
        auto& dom = led.dominated[lm];
        for (int j = 0; j <= k; ++j) {
            std::set<DyadicSquare> squares;
            for (const auto& p : pts) squares.insert(square_of(f, p, j));
            const Rational qmag = pow2q(static_cast<long>(j - k) * f.T) / 2;
            const Angle theta = Angle::pi_times(qmag);
            const long double theta_ld = static_cast<long double>(qmag.get_d()) * pi;
            for (const auto& S : squares) {
                if (led.dominated_ancestor(f, lm, S, true)) continue;
                auto cit = contributors.find(S);
                if (cit == contributors.end()) continue;
                SquareBox box = box_of(f, S);
                for (uint32_t ln : cit->second) {
                    long double a = std::fabs(phi[lm] - phi[ln]);
                    a = std::min(a, pi - a);
                    if (a > theta_ld + 1e-10L) continue;
                    if (a > theta_ld - 1e-10L && compare_angle(line, inst.lines[ln], theta) > 0) continue;
                    if (!traces_close(line, inst.lines[ln], box, limit2)) continue;
                    dom[S] = ln;
                    for_points_in(f, inst.point_sets[ln].points(), S,
                                  [&](const Point2& p) { incid.emplace_back(p, lm); });
                    break;
                }
            }
        }
        // Squares containing a dominated square (the dominated squares included).
        std::set<DyadicSquare> covers_dominated;
        for (const auto& [D, who] : dom)
            for (int lev = 0; lev <= D.level; ++lev) covers_dominated.insert(ancestor(f, D, lev));
        for (const auto& p : pts) {
            DyadicSquare cell = square_of(f, p, k);
            bool inside = led.dominated_ancestor(f, lm, cell, false).has_value();
            if (!inside) {
                p1.emplace(p, lm);
                incid.emplace_back(p, lm);
            }
            for (int j = 0; j <= k; ++j) {
                DyadicSquare S = square_of(f, p, j);
                if (covers_dominated.count(S)) continue;
                if (led.dominated_ancestor(f, lm, S, false)) break;
                if (led.contributed[lm].insert(S).second) contributors[S].push_back(lm);
            }
        }
    }
    std::vector<Point2> pv;
    pv.reserve(p1.size());
    for (const auto& [p, who] : p1) {
        pv.push_back(p);
        led.owner.push_back(who);
    }
    GridSet2D P1(f, pv, Domain::Free);
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    edges.reserve(incid.size());
    for (const auto& [p, l] : incid) {
        long idx = P1.find(p);
        if (idx < 0) throw Error(ErrorKind::InvalidArgument, "incidence to a point outside P1");
        edges.emplace_back(static_cast<uint32_t>(idx), l);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    out.arr = Arrangement(f, std::move(P1), inst.lines, std::move(edges), 1, Rational(1));
    return out;
}

void write_ledger(std::ostream& os, const DominationLedger& ledger, const ScaleFrame& frame) {
    size_t rows = 0;
    for (size_t l = 0; l < ledger.contributed.size(); ++l) rows += ledger.contributed[l].size() + ledger.dominated[l].size();
    os << "LEDGER v1 n=" << rows << " kT=" << frame.bits() << " T=" << frame.T << "\n";
    for (size_t l = 0; l < ledger.contributed.size(); ++l) {
        for (const auto& s : ledger.contributed[l])
            os << l << " " << s.level << " " << s.ix << " " << s.iy << " contributed\n";
        for (const auto& [s, who] : ledger.dominated[l])
            os << l << " " << s.level << " " << s.ix << " " << s.iy << " dominated-by:" << who << "\n";
    }
}

PinCheck pin_check(const ArrangementBuild& b, const RegularizedInstance& inst, size_t line, const DyadicSquare& s) {
    const ScaleFrame& f = b.arr.frame();
    PinCheck c;
    auto [pb, pe] = b.arr.points_of(line);
    for (auto it = pb; it != pe; ++it)
        if (square_contains(f, s, square_of(f, b.arr.points().points()[*it], s.level))) ++c.incident_in_square;
    for_points_in(f, inst.point_sets[line].points(), s, [&](const Point2&) { ++c.own_in_square; });
    c.in_domain = !b.ledger.dominated_ancestor(f, line, s, true).has_value();
    return c;
}

ContributorCensus contributor_census(const ArrangementBuild& b) {
    const ScaleFrame& f = b.arr.frame();
    ContributorCensus c;
    std::map<DyadicSquare, size_t> per_cell;
    for (size_t p = 0; p < b.arr.num_points(); ++p) {
        const Point2& pt = b.arr.points().points()[p];
        c.max_points_per_cell = std::max(c.max_points_per_cell, ++per_cell[square_of(f, pt, f.k)]);
        auto [lb, le] = b.arr.lines_of(p);
        for (int j = 0; j <= f.k; ++j) {
            DyadicSquare S = square_of(f, pt, j);
            size_t cnt = 0;
            for (auto it = lb; it != le; ++it)
                if (b.ledger.contributed_in(*it, S)) ++cnt;
            if (cnt == 0)
                ++c.cells_zero;
            else if (cnt == 1)
                ++c.cells_one;
            else
                ++c.cells_many;
        }
    }
    return c;
}

// Slopes through a point

int64_t slope_index(const ScaleFrame& f, const Line& l) {
    Rational v = l.slope() * Rational(pow2z(static_cast<unsigned long>(f.bits())));
    if (v.get_den() != 1) throw Error(ErrorKind::DomainError, "slope is not on the frame grid");
    if (sgn(v) < 0 || v >= Rational(pow2z(static_cast<unsigned long>(f.bits()))))
        throw Error(ErrorKind::DomainError, "slope outside [0, 1)");
    return static_cast<int64_t>(v.get_num().get_si());
}

SlopeRegularization regularize_slopes(const Arrangement& arr, const Rational& alpha) {
    if (arr.num_incidences() == 0) throw Error(ErrorKind::EmptyInput, "empty arrangement");
    const ScaleFrame& f = arr.frame();
    std::vector<int64_t> sidx(arr.num_lines());
    for (size_t l = 0; l < arr.num_lines(); ++l) sidx[l] = slope_index(f, arr.lines()[l]);
    // One line per distinct slope at each point: the lowest index.
    std::vector<std::map<int64_t, uint32_t>> rep(arr.num_points());
    std::vector<GridSet1D> family;
    family.reserve(arr.num_points());
    SlopeRegularization out;
    for (size_t p = 0; p < arr.num_points(); ++p) {
        auto [b, e] = arr.lines_of(p);
        for (auto it = b; it != e; ++it) rep[p].emplace(sidx[*it], *it);
        std::vector<int64_t> s;
        for (const auto& [m, l] : rep[p]) s.push_back(m);
        out.slopes_before += s.size();
        family.emplace_back(f, std::move(s), Domain::Unit);
    }
    auto cb = common_branching(family);
    out.branching = cb.branching;
    std::vector<Point2> pts;
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    for (size_t i = 0; i < cb.kept.size(); ++i) {
        size_t p = cb.kept[i];
        out.source.push_back(p);
        pts.push_back(arr.points().points()[p]);
        for (int64_t m : cb.refined[i].indices()) edges.emplace_back(static_cast<uint32_t>(i), rep[p].at(m));
        out.slopes_after += cb.refined[i].size();
    }
    out.mass_factor = common_branching_mass_factor(f.k, f.T, 1);
    out.arr = Arrangement(f, GridSet2D(f, std::move(pts), arr.points().domain()), arr.lines(), std::move(edges),
                          arr.slack(), arr.V());
    const double d = f.delta_exp, eps = f.epsilon.get_d(), a = alpha.get_d();
    for (int j = 0; j < f.k; ++j) {
        double lp = std::log2(static_cast<double>(out.branching.product_from(j)));
        double base = (d + static_cast<double>((j - f.k) * f.T)) * a;
        out.concentration_exponent.push_back((lp - base) / (d * eps));
    }
    return out;
}

Truncation truncate_slopes(const Arrangement& arr2, const Branching& branching) {
    const ScaleFrame& f = arr2.frame();
    Truncation out;
    for (int j = 0; j < static_cast<int>(branching.levels.size()); ++j)
        if (branching.levels[j] > 100) {
            out.j0 = j;
            break;
        }
    if (out.j0 < 0) {
        out.early_exit = true;
        out.witnessed_points = arr2.num_points();
        out.witnessed_incidences = arr2.num_incidences();
        out.arr = arr2;
        return out;
    }
    const int sh = f.bits() - out.j0 * f.T;
    const int64_t width = int64_t(1) << (f.bits() - (out.j0 + 1) * f.T);
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    out.window_bound_ok = true;
    for (size_t p = 0; p < arr2.num_points(); ++p) {
        auto [b, e] = arr2.lines_of(p);
        if (b == e) continue;
        std::vector<std::pair<int64_t, uint32_t>> s;
        for (auto it = b; it != e; ++it) s.emplace_back(slope_index(f, arr2.lines()[*it]), *it);
        std::sort(s.begin(), s.end());
        int64_t J = floor_shift(s.front().first, sh);
        std::vector<int64_t> kept;
        for (const auto& [m, l] : s)
            if (floor_shift(m, sh) == J) {
                edges.emplace_back(static_cast<uint32_t>(p), l);
                kept.push_back(m);
            }
        size_t best = 0;
        for (size_t i = 0, r = 0; i < kept.size(); ++i) {
            if (r < i) r = i;
            while (r < kept.size() && kept[r] <= kept[i] + width) ++r;
            best = std::max(best, r - i);
        }
        out.max_window_count = std::max(out.max_window_count, best);
        if (20 * best > kept.size()) out.window_bound_ok = false;
    }
    out.arr = Arrangement(f, arr2.points(), arr2.lines(), std::move(edges), arr2.slack(), arr2.V());
    return out;
}

// Tubes

TubeDecomposition partition_tubes(const Arrangement& arr3, int j0) {
    const ScaleFrame& f = arr3.frame();
    if (j0 < 0 || j0 >= f.k) throw Error(ErrorKind::InvalidArgument, "j0 out of range");
    TubeDecomposition out;
    out.j0 = j0;
    out.s = pow2q(-static_cast<long>(j0) * f.T);
    const Rational half = out.s / 2;
    const Rational s2 = out.s * out.s;
    const int64_t nm = 2 * (int64_t(1) << (j0 * f.T));  // m = i * s/2, i in [0, nm]
    out.num_centers = static_cast<size_t>((nm + 1) * (2 * nm + 1));
    const int sh = f.bits() - j0 * f.T;
    const Angle half_s = Angle::radians(half);
    std::map<std::pair<int64_t, int64_t>, std::vector<size_t>> members;
    std::vector<size_t> cover(arr3.num_points(), 0);
    std::vector<std::vector<std::pair<int64_t, int64_t>>> per_point(arr3.num_points());
    parallel_for(arr3.num_points(), [&](size_t p) {
        auto [b, e] = arr3.lines_of(p);
        if (b == e) return;
        int64_t c = floor_shift(slope_index(f, arr3.lines()[*b]), sh);
        Rational mp = (Rational(BigInt(static_cast<long>(c))) + Rational(1, 2)) * out.s;
        QPoint q = arr3.point_value(p);
        long double mpd = mp.get_d();
        long double hd = half.get_d();
        int64_t ilo = std::max<int64_t>(0, static_cast<int64_t>(std::floor((mpd - 4 * hd) / hd)) - 1);
        int64_t ihi = std::min<int64_t>(nm, static_cast<int64_t>(std::ceil((mpd + 4 * hd) / hd)) + 1);
        for (int64_t im = ilo; im <= ihi; ++im) {
            Rational m = Rational(BigInt(static_cast<long>(im))) * half;
            if (compare_angle(QPoint{Rational(1), mp}, QPoint{Rational(1), m}, half_s) > 0) continue;
            Rational c0 = q.y - m * q.x;
            long double cd = c0.get_d();
            int64_t blo = std::max<int64_t>(-nm, static_cast<int64_t>(std::floor((cd - 4 * hd) / hd)) - 1);
            int64_t bhi = std::min<int64_t>(nm, static_cast<int64_t>(std::ceil((cd + 4 * hd) / hd)) + 1);
            for (int64_t ib = blo; ib <= bhi; ++ib) {
                Line lz = Line::slope_intercept(m, Rational(BigInt(static_cast<long>(ib))) * half);
                if (dist2_point_line(q, lz) <= s2) per_point[p].emplace_back(im, ib);
            }
        }
    });
    bool first = true;
    for (size_t p = 0; p < arr3.num_points(); ++p) {
        if (arr3.point_degree(p) == 0) continue;
        for (const auto& z : per_point[p]) members[z].push_back(p);
        size_t c = per_point[p].size();
        out.cover_min = first ? c : std::min(out.cover_min, c);
        out.cover_max = first ? c : std::max(out.cover_max, c);
        first = false;
    }
    struct Cand {
        std::pair<int64_t, int64_t> z;
        std::vector<size_t> pts;
        std::vector<uint32_t> lines;
        size_t mass = 0;
    };
    std::vector<Cand> cands;
    std::vector<size_t> line_mult(arr3.num_lines(), 0);
    for (auto& [z, pts] : members) {
        Cand c{z, pts, {}, 0};
        for (size_t p : pts) {
            auto [b, e] = arr3.lines_of(p);
            c.lines.insert(c.lines.end(), b, e);
            c.mass += static_cast<size_t>(e - b);
        }
        std::sort(c.lines.begin(), c.lines.end());
        c.lines.erase(std::unique(c.lines.begin(), c.lines.end()), c.lines.end());
        for (uint32_t l : c.lines) out.line_multiplicity_max = std::max(out.line_multiplicity_max, ++line_mult[l]);
        cands.push_back(std::move(c));
    }
    out.total_incidences = arr3.num_incidences();
    // Disjoint subfamily, heaviest first.
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.mass > b.mass; });
    std::vector<bool> used_p(arr3.num_points(), false), used_l(arr3.num_lines(), false);
    std::vector<const Cand*> disjoint;
    for (const auto& c : cands) {
        bool ok = std::none_of(c.pts.begin(), c.pts.end(), [&](size_t p) { return used_p[p]; }) &&
                  std::none_of(c.lines.begin(), c.lines.end(), [&](uint32_t l) { return used_l[l]; });
        if (!ok) continue;
        for (size_t p : c.pts) used_p[p] = true;
        for (uint32_t l : c.lines) used_l[l] = true;
        disjoint.push_back(&c);
    }
    // Dyadic pigeonhole on #P^z.
    std::map<int, size_t> bucket_mass;
    auto bucket = [](size_t n) {
        int z = 0;
        while ((size_t(2) << z) <= n) ++z;
        return z;
    };
    for (const Cand* c : disjoint) bucket_mass[bucket(c->pts.size())] += c->mass;
    int best_bucket = -1;
    size_t best_mass = 0;
    for (const auto& [b, m] : bucket_mass)
        if (m > best_mass) {
            best_mass = m;
            best_bucket = b;
        }
    std::vector<const Cand*> chosen;
    for (const Cand* c : disjoint)
        if (bucket(c->pts.size()) == best_bucket) chosen.push_back(c);
    std::sort(chosen.begin(), chosen.end(), [](const Cand* a, const Cand* b) { return a->z < b->z; });
    for (const Cand* c : chosen) {
        Tube t;
        t.m = Rational(BigInt(static_cast<long>(c->z.first))) * half;
        t.b = Rational(BigInt(static_cast<long>(c->z.second))) * half;
        t.points = c->pts;
        t.lines = c->lines;
        std::vector<Point2> pts;
        std::vector<std::pair<uint32_t, uint32_t>> edges;
        for (size_t i = 0; i < c->pts.size(); ++i) {
            pts.push_back(arr3.points().points()[c->pts[i]]);
            auto [b, e] = arr3.lines_of(c->pts[i]);
            for (auto it = b; it != e; ++it) edges.emplace_back(static_cast<uint32_t>(i), *it);
        }
        out.retained_incidences += edges.size();
        t.arr = Arrangement(f, GridSet2D(f, std::move(pts), arr3.points().domain()), arr3.lines(), std::move(edges),
                            arr3.slack(), arr3.V());
        out.tubes.push_back(std::move(t));
    }
    return out;
}

Representatives select_representatives(const Tube& tube, const DominationLedger& ledger, int j0) {
    const Arrangement& a = tube.arr;
    const ScaleFrame& f = a.frame();
    if (ledger.contributed.size() != a.num_lines()) throw Error(ErrorKind::Precondition, "ledger missing for this arrangement");
    Representatives out;
    out.level = std::min(f.k, f.k + 2 - j0);
    std::map<std::pair<DyadicSquare, uint32_t>, std::vector<size_t>> groups;
    for (size_t p = 0; p < a.num_points(); ++p) {
        DyadicSquare S = square_of(f, a.points().points()[p], out.level);
        auto [b, e] = a.lines_of(p);
        if (b == e) continue;
        std::vector<uint32_t> contrib;
        for (auto it = b; it != e; ++it)
            if (ledger.contributed_in(*it, S)) contrib.push_back(*it);
        if (contrib.size() != 1) ++out.claim_i_failures;
        if (contrib.empty()) continue;
        uint32_t c = contrib.front();
        for (auto it = b; it != e; ++it) {
            if (*it == c) continue;
            bool ok = false;
            for (int lev = 0; lev <= S.level && !ok; ++lev) {
                auto who = ledger.dominated_at(*it, ancestor(f, S, lev));
                ok = who && *who == c;
            }
            if (!ok) ++out.claim_ii_failures;
        }
        groups[{S, c}].push_back(p);
    }
    auto bucket = [](size_t n) {
        int z = 0;
        while ((size_t(2) << z) <= n) ++z;
        return z;
    };
    std::map<int, size_t> mass;
    for (const auto& [key, pts] : groups) mass[bucket(pts.size())] += pts.size();
    int best = 0;
    size_t best_mass = 0;
    for (const auto& [b, m] : mass)
        if (m > best_mass) {
            best_mass = m;
            best = b;
        }
    out.M = int64_t(1) << best;
    out.groups_total = groups.size();
    std::vector<size_t> chosen;
    for (const auto& [key, pts] : groups)
        if (bucket(pts.size()) == best) chosen.push_back(pts.front());
    out.groups_kept = chosen.size();
    std::sort(chosen.begin(), chosen.end());
    std::vector<Point2> qs;
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    for (size_t i = 0; i < chosen.size(); ++i) {
        qs.push_back(a.points().points()[chosen[i]]);
        auto [b, e] = a.lines_of(chosen[i]);
        for (auto it = b; it != e; ++it) edges.emplace_back(static_cast<uint32_t>(i), *it);
    }
    out.Q = GridSet2D(f, qs, a.points().domain());
    out.IQ = Arrangement(f, out.Q, a.lines(), std::move(edges), a.slack(), a.V());
    if (a.num_incidences() > 0)
        out.retained_ratio = static_cast<double>(out.M) * static_cast<double>(out.IQ.num_incidences()) /
                             static_cast<double>(a.num_incidences());
    return out;
}

}  // namespace flab

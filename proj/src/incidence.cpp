#include "flab/incidence.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "flab/parallel.hpp"

namespace flab {

namespace {

constexpr long double kAngleMargin = 1e-10L;

long double pi_ld() { return std::acos(-1.0L); }

// Undirected angle between lines with direction angles pa, pb in (-pi/2, pi/2].
long double undirected(long double pa, long double pb) {
    long double d = std::fabs(pa - pb);
    return std::min(d, pi_ld() - d);
}

// angle(a, b) <= theta, exact; approx is the floating estimate of angle(a, b).
bool angle_at_most(const Line& a, const Line& b, long double approx, const Angle& theta, long double theta_approx) {
    if (approx < theta_approx - kAngleMargin) return true;
    if (approx > theta_approx + kAngleMargin) return false;
    return compare_angle(a, b, theta) <= 0;
}

}  // namespace

Arrangement::Arrangement(ScaleFrame frame, GridSet2D points, std::vector<Line> lines,
                         std::vector<std::pair<uint32_t, uint32_t>> edges, int slack, Rational V)
    : frame_(std::move(frame)),
      points_(std::move(points)),
      lines_(std::move(lines)),
      edges_(std::move(edges)),
      slack_(slack),
      V_(std::move(V)) {
    std::sort(edges_.begin(), edges_.end());
    for (size_t i = 0; i < edges_.size(); ++i) {
        if (edges_[i].first >= points_.size() || edges_[i].second >= lines_.size())
            throw Error(ErrorKind::InvalidArgument, "incidence references a missing point or line");
        if (i > 0 && edges_[i] == edges_[i - 1]) throw Error(ErrorKind::InvalidArgument, "duplicate incidence");
    }
    point_off_.assign(points_.size() + 1, 0);
    line_off_.assign(lines_.size() + 1, 0);
    for (const auto& [p, l] : edges_) {
        ++point_off_[p + 1];
        ++line_off_[l + 1];
    }
    for (size_t i = 0; i < points_.size(); ++i) point_off_[i + 1] += point_off_[i];
    for (size_t i = 0; i < lines_.size(); ++i) line_off_[i + 1] += line_off_[i];
    line_ids_.resize(edges_.size());
    point_ids_.resize(edges_.size());
    std::vector<size_t> pf(point_off_.begin(), point_off_.end() - 1), lf(line_off_.begin(), line_off_.end() - 1);
    for (const auto& [p, l] : edges_) {
        line_ids_[pf[p]++] = l;
        point_ids_[lf[l]++] = p;
    }
}

bool Arrangement::has_edge(size_t p, size_t l) const {
    auto [b, e] = lines_of(p);
    return std::binary_search(b, e, static_cast<uint32_t>(l));
}

size_t Arrangement::count_slack_violations() const {
    Rational r = frame_.delta() * slack_;
    size_t bad = 0;
    for (const auto& [p, l] : edges_)
        if (!point_within(point_value(p), lines_[l], r)) ++bad;
    return bad;
}

Arrangement build_incidences(const GridSet2D& P, const std::vector<Line>& L, const ScaleFrame& frame, int slack,
                             Rational V) {
    if (P.frame().bits() != frame.bits()) throw Error(ErrorKind::InvalidArgument, "point set on a different grid");
    const auto& pts = P.points();
    // Columns of equal x, points sorted by (x, y).
    std::vector<size_t> col_start;
    for (size_t i = 0; i < pts.size(); ++i)
        if (i == 0 || pts[i].x != pts[i - 1].x) col_start.push_back(i);
    col_start.push_back(pts.size());
    const size_t ncols = col_start.size() - 1;
    const Rational scale = Rational(pow2z(static_cast<unsigned long>(frame.bits())));
    const Rational tol = Rational(slack) * Rational(BigInt(static_cast<long>(frame.delta_units())));
    const Rational tol2 = tol * tol;
    const long double tol_ld = static_cast<long double>(tol.get_d());

    std::vector<std::vector<uint32_t>> hits(L.size());
    parallel_for(L.size(), [&](size_t li) {
        const Line& l = L[li];
        auto& out = hits[li];
        if (l.vertical()) {
            Rational xc = l.intercept() * scale;
            long double xl = static_cast<long double>(xc.get_d());
            for (size_t c = 0; c < ncols; ++c) {
                int64_t X = pts[col_start[c]].x;
                if (std::fabs(static_cast<long double>(X) - xl) > tol_ld + 2) continue;
                Rational dx = Rational(BigInt(static_cast<long>(X))) - xc;
                if (dx * dx > tol2) continue;
                for (size_t i = col_start[c]; i < col_start[c + 1]; ++i) out.push_back(static_cast<uint32_t>(i));
            }
            return;
        }
        const Rational& m = l.slope();
        Rational B = l.intercept() * scale;
        Rational lim2 = tol2 * (1 + m * m);
        long double md = static_cast<long double>(m.get_d()), Bd = static_cast<long double>(B.get_d());
        long double w = tol_ld * std::sqrt(1 + md * md) + 2 + 1e-9L * (std::fabs(Bd) + 1);
        for (size_t c = 0; c < ncols; ++c) {
            int64_t X = pts[col_start[c]].x;
            long double yc = md * static_cast<long double>(X) + Bd;
            long double wx = w + 1e-9L * std::fabs(md * static_cast<long double>(X));
            long double lo = yc - wx, hi = yc + wx;
            if (hi < static_cast<long double>(pts[col_start[c]].y) ||
                lo > static_cast<long double>(pts[col_start[c + 1] - 1].y))
                continue;
            auto first = pts.begin() + static_cast<long>(col_start[c]);
            auto last = pts.begin() + static_cast<long>(col_start[c + 1]);
            int64_t ylo = static_cast<int64_t>(std::floor(lo));
            auto it = std::lower_bound(first, last, Point2{X, ylo});
            Rational mx = m * Rational(BigInt(static_cast<long>(X))) + B;
            for (; it != last && static_cast<long double>(it->y) <= hi; ++it) {
                Rational r = mx - Rational(BigInt(static_cast<long>(it->y)));
                if (r * r <= lim2) out.push_back(static_cast<uint32_t>(it - pts.begin()));
            }
        }
    });
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    for (size_t li = 0; li < L.size(); ++li)
        for (uint32_t p : hits[li]) edges.emplace_back(p, static_cast<uint32_t>(li));
    return Arrangement(frame, P, L, std::move(edges), slack, std::move(V));
}

void write_arrangement(std::ostream& os, const Arrangement& arr) {
    write_gridset(os, arr.points());
    os << "LINES v1 n=" << arr.num_lines() << "\n";
    for (const Line& l : arr.lines()) {
        if (l.vertical())
            os << "vertical " << l.intercept().get_num() << " " << l.intercept().get_den() << "\n";
        else
            os << l.slope().get_num() << " " << l.slope().get_den() << " " << l.intercept().get_num() << " "
               << l.intercept().get_den() << "\n";
    }
    os << "EDGES v1 n=" << arr.num_incidences() << "\n";
    for (const auto& [p, l] : arr.edges()) os << p << " " << l << "\n";
}

namespace {

size_t read_counted_header(std::istream& is, const std::string& tag) {
    std::string line;
    while (std::getline(is, line) && line.empty()) {
    }
    std::istringstream ss(line);
    std::string t, ver, n;
    ss >> t >> ver >> n;
    if (t != tag || ver != "v1" || n.rfind("n=", 0) != 0) throw Error(ErrorKind::Parse, "bad " + tag + " header: " + line);
    return std::stoul(n.substr(2));
}

BigInt read_int(std::istringstream& ss, const std::string& line) {
    std::string tok;
    if (!(ss >> tok)) throw Error(ErrorKind::Parse, "truncated row: " + line);
    BigInt v;
    if (v.set_str(tok, 10) != 0) throw Error(ErrorKind::Parse, "bad integer in row: " + line);
    return v;
}

}  // namespace

Arrangement read_arrangement(std::istream& is, const ScaleFrame& frame, int slack, Rational V) {
    GridSet2D P = read_gridset2d(is, frame);
    size_t nl = read_counted_header(is, "LINES");
    std::vector<Line> lines;
    std::string line;
    for (size_t i = 0; i < nl; ++i) {
        if (!std::getline(is, line)) throw Error(ErrorKind::Parse, "truncated LINES block");
        std::istringstream ss(line);
        if (line.rfind("vertical", 0) == 0) {
            std::string tag;
            ss >> tag;
            BigInt n = read_int(ss, line), d = read_int(ss, line);
            if (d == 0) throw Error(ErrorKind::Parse, "zero denominator: " + line);
            lines.push_back(Line::vertical_at(make_q(n, d)));
        } else {
            BigInt mn = read_int(ss, line), md = read_int(ss, line), bn = read_int(ss, line), bd = read_int(ss, line);
            if (md == 0 || bd == 0) throw Error(ErrorKind::Parse, "zero denominator: " + line);
            lines.push_back(Line::slope_intercept(make_q(mn, md), make_q(bn, bd)));
        }
    }
    size_t ne = read_counted_header(is, "EDGES");
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    edges.reserve(ne);
    for (size_t i = 0; i < ne; ++i) {
        if (!std::getline(is, line)) throw Error(ErrorKind::Parse, "truncated EDGES block");
        std::istringstream ss(line);
        uint32_t p, l;
        if (!(ss >> p >> l)) throw Error(ErrorKind::Parse, "bad edge row: " + line);
        edges.emplace_back(p, l);
    }
    return Arrangement(frame, std::move(P), std::move(lines), std::move(edges), slack, std::move(V));
}

// Properties

namespace {

// Max over e of count[e] * 2^{-(d - e) * weight}, with e ranging over [e_lo, e_hi].
Measured max_scaled(const std::vector<size_t>& counts, int e_lo, int d, const Rational& weight, const Rational& div) {
    Measured best;
    for (size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] == 0) continue;
        int e = e_lo + static_cast<int>(i);
        ExactPower v = ExactPower(Rational(static_cast<unsigned long>(counts[i])) / div) *
                       ExactPower::pow2(Rational(-(d - e)) * weight);
        Measured m = Measured::of(v);
        if (best < m) best = m;
    }
    return best;
}

}  // namespace

PropertyReport validate_properties(const Arrangement& arr, const Rational& alpha, const Rational& epsilon,
                                   const Rational& V) {
    if (arr.num_points() == 0 && arr.num_lines() == 0)
        throw Error(ErrorKind::EmptyInput, "empty arrangement");
    const ScaleFrame& f = arr.frame();
    const int d = f.delta_exp;
    const int bits = f.bits();
    const ExactPower delta_eps = ExactPower::pow2(-Rational(d) * epsilon);
    const ExactPower delta_neg_eps = ExactPower::pow2(Rational(d) * epsilon);
    const auto& pts = arr.points().points();
    PropertyReport rep;

    // A
    if (arr.num_lines() == 0) {
        rep.A.pass = true;
    } else {
        size_t mn = SIZE_MAX;
        for (size_t l = 0; l < arr.num_lines(); ++l) mn = std::min(mn, arr.line_degree(l));
        if (mn == 0) {
            rep.A = {Measured{}, false};
        } else {
            ExactPower v = ExactPower(Rational(static_cast<unsigned long>(mn)) / V) * ExactPower::pow2(-Rational(d) * alpha);
            rep.A = {Measured::of(v), v >= delta_eps};
        }
    }

    // B: squares of side 2^{-e}, e = 0..d.
    {
        std::vector<std::vector<size_t>> per_line(arr.num_lines());
        parallel_for(arr.num_lines(), [&](size_t l) {
            auto& best = per_line[l];
            best.assign(d + 1, 0);
            auto [b, e] = arr.points_of(l);
            std::vector<Point2> keys;
            for (int s = 0; s <= d; ++s) {
                keys.clear();
                for (auto it = b; it != e; ++it) {
                    const Point2& p = pts[*it];
                    keys.push_back({floor_shift(p.x, bits - s), floor_shift(p.y, bits - s)});
                }
                std::sort(keys.begin(), keys.end());
                size_t run = 0;
                for (size_t i = 0; i < keys.size(); ++i) {
                    run = (i > 0 && keys[i] == keys[i - 1]) ? run + 1 : 1;
                    best[s] = std::max(best[s], run);
                }
            }
        });
        std::vector<size_t> counts(d + 1, 0);
        for (const auto& v : per_line)
            for (int s = 0; s <= d; ++s) counts[s] = std::max(counts[s], v[s]);
        rep.B.constant = max_scaled(counts, 0, d, alpha, V);
        rep.B.pass = rep.B.constant.is_zero || rep.B.constant.value <= delta_neg_eps;
    }

    // C: cells of side 2^{-e} in (m, b) space, e = 0..d.
    {
        std::vector<size_t> counts(d + 1, 0);
        std::vector<std::pair<BigInt, BigInt>> keys;
        for (int s = 0; s <= d; ++s) {
            keys.clear();
            Rational sc = pow2q(s);
            for (const Line& l : arr.lines())
                if (!l.vertical()) keys.emplace_back(floor_q(l.slope() * sc), floor_q(l.intercept() * sc));
            std::sort(keys.begin(), keys.end());
            size_t run = 0;
            for (size_t i = 0; i < keys.size(); ++i) {
                run = (i > 0 && keys[i] == keys[i - 1]) ? run + 1 : 1;
                counts[s] = std::max(counts[s], run);
            }
        }
        rep.C.constant = max_scaled(counts, 0, d, 2 * alpha, Rational(1));
        rep.C.pass = rep.C.constant.is_zero || rep.C.constant.value <= delta_neg_eps;
    }

    // D
    if (arr.num_incidences() == 0 || arr.num_points() == 0) {
        rep.D_lower.pass = rep.D_upper.pass = true;
    } else {
        size_t mn = SIZE_MAX, mx = 0;
        for (size_t p = 0; p < arr.num_points(); ++p) {
            mn = std::min(mn, arr.point_degree(p));
            mx = std::max(mx, arr.point_degree(p));
        }
        Rational np(static_cast<unsigned long>(arr.num_points())), ni(static_cast<unsigned long>(arr.num_incidences()));
        if (mn == 0)
            rep.D_lower = {Measured{}, false};
        else {
            ExactPower lo(Rational(static_cast<unsigned long>(mn)) * np / ni);
            rep.D_lower = {Measured::of(lo), lo >= delta_eps};
        }
        ExactPower hi(Rational(static_cast<unsigned long>(mx)) * np / ni);
        rep.D_upper = {Measured::of(hi), hi <= delta_neg_eps};
    }

    // E and F over the direction net at each point.
    {
        std::vector<long double> phi(arr.num_lines());
        for (size_t l = 0; l < arr.num_lines(); ++l) phi[l] = arr.lines()[l].angle_approx();
        const Angle theta_e = Angle::radians(delta_eps);
        const long double theta_e_ld = theta_e.approx();
        const int n_scales = d + 2;  // e = -1..d
        std::vector<Angle> r_angle;
        std::vector<long double> r_ld;
        for (int e = -1; e <= d; ++e) {
            r_angle.push_back(Angle::radians(ExactPower::pow2(-e)));
            r_ld.push_back(std::exp2(static_cast<long double>(-e)));
        }
        std::vector<std::pair<size_t, size_t>> e_frac(arr.num_points(), {0, 1});
        std::vector<std::vector<size_t>> f_counts(arr.num_points());
        parallel_for(arr.num_points(), [&](size_t p) {
            auto [b, e] = arr.lines_of(p);
            size_t deg = static_cast<size_t>(e - b);
            auto& fc = f_counts[p];
            fc.assign(n_scales, 0);
            if (deg == 0) return;
            std::vector<std::pair<long double, uint32_t>> ang(deg);
            for (auto v = b; v != e; ++v) {
                const Line& lv = arr.lines()[*v];
                for (size_t i = 0; i < deg; ++i) ang[i] = {undirected(phi[*v], phi[b[i]]), b[i]};
                std::sort(ang.begin(), ang.end());
                size_t within_e = 0;
                for (const auto& [a, l] : ang)
                    if (a <= theta_e_ld + kAngleMargin && angle_at_most(lv, arr.lines()[l], a, theta_e, theta_e_ld))
                        ++within_e;
                if (within_e * e_frac[p].second > e_frac[p].first * deg) e_frac[p] = {within_e, deg};
                for (int s = 0; s < n_scales; ++s) {
                    auto lo = std::lower_bound(ang.begin(), ang.end(), std::make_pair(r_ld[s] - kAngleMargin, uint32_t(0)));
                    size_t c = static_cast<size_t>(lo - ang.begin());
                    for (auto it = lo; it != ang.end() && it->first <= r_ld[s] + kAngleMargin; ++it)
                        if (angle_at_most(lv, arr.lines()[it->second], it->first, r_angle[s], r_ld[s])) ++c;
                    fc[s] = std::max(fc[s], c);
                }
            }
        });
        Rational best(0);
        for (const auto& [c, n] : e_frac) best = std::max(best, make_q(static_cast<long>(c), static_cast<long>(n)));
        rep.E_fraction = sgn(best) == 0 ? Measured{} : Measured::of(ExactPower(best));
        rep.E_pass = best <= Rational(1, 2);
        std::vector<size_t> counts(n_scales, 0);
        for (const auto& fc : f_counts)
            for (int s = 0; s < n_scales && s < static_cast<int>(fc.size()); ++s) counts[s] = std::max(counts[s], fc[s]);
        rep.F.constant = max_scaled(counts, -1, d, alpha, Rational(1));
        rep.F.pass = rep.F.constant.is_zero || rep.F.constant.value <= delta_neg_eps;
    }
    return rep;
}

// Two ends

namespace {

// Sign of pi^{-eps} * n - x.
int compare_pi_value(size_t n, const ExactPower& x, const Rational& epsilon) {
    if (sgn(epsilon) == 0) return ExactPower::compare(ExactPower(Rational(static_cast<unsigned long>(n))), x);
    ExactPower ratio = ExactPower(Rational(static_cast<unsigned long>(n))) / x;  // compare with pi^eps
    if (ratio < ExactPower::power(pi_lower(), epsilon)) return -1;
    if (ratio > ExactPower::power(pi_upper(), epsilon)) return 1;
    throw Error(ErrorKind::InvalidArgument, "two-ends comparison against pi undecided");
}

}  // namespace

size_t two_ends_count(const std::vector<Line>& Lq, size_t v_index, const Angle& r) {
    size_t c = 0;
    for (const Line& l : Lq)
        if (compare_angle(l, Lq[v_index], r) <= 0) ++c;
    return c;
}

TwoEndsResult two_ends(const std::vector<Line>& Lq, const Rational& epsilon, int delta_exp) {
    if (Lq.empty()) throw Error(ErrorKind::EmptyInput, "two-ends reduction of an empty line set");
    if (delta_exp < 0) throw Error(ErrorKind::InvalidScale, "delta must be at most 1");
    const size_t n = Lq.size();
    std::vector<long double> phi(n);
    for (size_t i = 0; i < n; ++i) phi[i] = Lq[i].angle_approx();
    const int n_scales = delta_exp + 1;  // e = 0..delta_exp, r = 2^{-e}
    // best[e] = (count, lowest v attaining it)
    std::vector<std::vector<size_t>> cnt(n, std::vector<size_t>(n_scales, 0));
    parallel_for(n, [&](size_t v) {
        std::vector<std::pair<long double, uint32_t>> ang(n);
        for (size_t i = 0; i < n; ++i) ang[i] = {undirected(phi[v], phi[i]), static_cast<uint32_t>(i)};
        std::sort(ang.begin(), ang.end());
        for (int e = 0; e < n_scales; ++e) {
            long double r = std::exp2(static_cast<long double>(-e));
            Angle ra = Angle::radians(ExactPower::pow2(-e));
            auto lo = std::lower_bound(ang.begin(), ang.end(), std::make_pair(r - kAngleMargin, uint32_t(0)));
            size_t c = static_cast<size_t>(lo - ang.begin());
            for (auto it = lo; it != ang.end() && it->first <= r + kAngleMargin; ++it)
                if (angle_at_most(Lq[v], Lq[it->second], it->first, ra, r)) ++c;
            cnt[v][e] = c;
        }
    });
    TwoEndsResult res;
    bool have = false;
    for (int e = delta_exp; e >= 0; --e) {
        size_t bc = 0, bv = 0;
        for (size_t v = 0; v < n; ++v)
            if (cnt[v][e] > bc) {
                bc = cnt[v][e];
                bv = v;
            }
        ExactPower fv = ExactPower(Rational(static_cast<unsigned long>(bc))) * ExactPower::pow2(Rational(e) * epsilon);
        if (!have || fv > res.f_value) {
            have = true;
            res.r_exp = e;
            res.v_index = bv;
            res.f_value = fv;
        }
    }
    if (compare_pi_value(n, res.f_value, epsilon) > 0) {
        res.r_is_pi = true;
        res.r_exp = 0;
        res.v_index = 0;
        res.f_value = ExactPower(Rational(static_cast<unsigned long>(n))) * ExactPower::power(pi_lower(), -epsilon);
        for (size_t i = 0; i < n; ++i) res.kept.push_back(i);
        return res;
    }
    Angle ra = res.r_angle();
    for (size_t i = 0; i < n; ++i)
        if (compare_angle(Lq[i], Lq[res.v_index], ra) < 0) res.kept.push_back(i);
    return res;
}

// Graph refinement

BipartiteRefinement refine_bipartite(size_t na, size_t nb, const std::vector<std::pair<uint32_t, uint32_t>>& edges) {
    if (edges.empty()) throw Error(ErrorKind::EmptyInput, "graph refinement of an empty edge set");
    const size_t ne = edges.size();
    std::vector<std::vector<uint32_t>> adj(na + nb);  // edge ids
    for (size_t i = 0; i < ne; ++i) {
        if (edges[i].first >= na || edges[i].second >= nb) throw Error(ErrorKind::InvalidArgument, "edge out of range");
        adj[edges[i].first].push_back(static_cast<uint32_t>(i));
        adj[na + edges[i].second].push_back(static_cast<uint32_t>(i));
    }
    std::vector<size_t> deg(na + nb);
    for (size_t v = 0; v < na + nb; ++v) deg[v] = adj[v].size();
    // Vertex v survives iff 4 * side_size * deg >= #E.
    auto below = [&](size_t v) {
        unsigned __int128 side = v < na ? na : nb;
        return 4 * side * deg[v] < static_cast<unsigned __int128>(ne);
    };
    std::vector<bool> alive(na + nb, true), edge_alive(ne, true), queued(na + nb, false);
    std::vector<size_t> queue;
    for (size_t v = 0; v < na + nb; ++v)
        if (below(v)) {
            queue.push_back(v);
            queued[v] = true;
        }
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        size_t v = queue[qi];
        alive[v] = false;
        for (uint32_t ei : adj[v]) {
            if (!edge_alive[ei]) continue;
            edge_alive[ei] = false;
            size_t u = v < na ? na + edges[ei].second : edges[ei].first;
            --deg[u];
            if (!queued[u] && below(u)) {
                queued[u] = true;
                queue.push_back(u);
            }
        }
    }
    BipartiteRefinement out;
    out.keep_a.assign(alive.begin(), alive.begin() + static_cast<long>(na));
    out.keep_b.assign(alive.begin() + static_cast<long>(na), alive.end());
    for (size_t i = 0; i < ne; ++i)
        if (edge_alive[i]) out.edges.push_back(edges[i]);
    return out;
}

RefinedArrangement refine_graph(const Arrangement& arr) {
    BipartiteRefinement r = refine_bipartite(arr.num_points(), arr.num_lines(), arr.edges());
    RefinedArrangement out;
    std::vector<long> pnew(arr.num_points(), -1), lnew(arr.num_lines(), -1);
    std::vector<Point2> pts;
    for (size_t p = 0; p < arr.num_points(); ++p)
        if (r.keep_a[p]) {
            pnew[p] = static_cast<long>(out.point_map.size());
            out.point_map.push_back(p);
            pts.push_back(arr.points().points()[p]);
        }
    std::vector<Line> lines;
    for (size_t l = 0; l < arr.num_lines(); ++l)
        if (r.keep_b[l]) {
            lnew[l] = static_cast<long>(out.line_map.size());
            out.line_map.push_back(l);
            lines.push_back(arr.lines()[l]);
        }
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    edges.reserve(r.edges.size());
    for (const auto& [p, l] : r.edges) edges.emplace_back(static_cast<uint32_t>(pnew[p]), static_cast<uint32_t>(lnew[l]));
    out.arr = Arrangement(arr.frame(), GridSet2D(arr.frame(), std::move(pts), arr.points().domain()), std::move(lines),
                          std::move(edges), arr.slack(), arr.V());
    return out;
}

// Triple census

Rational projection_parameter(const Line& l, const QPoint& p) {
    if (l.vertical()) return p.y;
    return p.x + l.slope() * p.y;
}

uint64_t census_triples(const Arrangement& arr, size_t l0, const TripleParams& params) {
    if (l0 >= arr.num_lines()) throw Error(ErrorKind::Precondition, "l0 is not a line of the arrangement");
    const Line& base = arr.lines()[l0];
    const Rational min_d2 = params.min_distance * params.min_distance;
    std::vector<QPoint> qp(arr.num_points());
    for (size_t p = 0; p < arr.num_points(); ++p) qp[p] = arr.point_value(p);
    // Per line: angle test against l0, and sorted projections of its points.
    std::vector<int> angle_ok(arr.num_lines(), -1);
    std::map<size_t, std::vector<Rational>> sorted_proj;
    auto line_proj = [&](size_t l) -> const std::vector<Rational>& {
        auto it = sorted_proj.find(l);
        if (it != sorted_proj.end()) return it->second;
        std::vector<Rational> ts;
        auto [b, e] = arr.points_of(l);
        for (auto q = b; q != e; ++q) ts.push_back(projection_parameter(arr.lines()[l], qp[*q]));
        std::sort(ts.begin(), ts.end());
        return sorted_proj.emplace(l, std::move(ts)).first->second;
    };
    uint64_t total = 0;
    auto [pb, pe] = arr.points_of(l0);
    for (auto pit = pb; pit != pe; ++pit) {
        size_t p = *pit;
        auto [lb, le] = arr.lines_of(p);
        for (auto lit = lb; lit != le; ++lit) {
            size_t l = *lit;
            if (angle_ok[l] < 0) angle_ok[l] = compare_angle(base, arr.lines()[l], params.min_angle) >= 0 ? 1 : 0;
            if (!angle_ok[l]) continue;
            const Line& line = arr.lines()[l];
            const auto& ts = line_proj(l);
            Rational tp = projection_parameter(line, qp[p]);
            auto [qb, qe] = arr.points_of(l);
            for (auto qit = qb; qit != qe; ++qit) {
                size_t q = *qit;
                if (q == p) continue;
                if (dist2(qp[p], qp[q]) < min_d2) continue;
                if (params.min_between > 0) {
                    Rational tq = projection_parameter(line, qp[q]);
                    const Rational& lo = tp < tq ? tp : tq;
                    const Rational& hi = tp < tq ? tq : tp;
                    size_t between = 0;
                    if (lo < hi) {
                        auto a = std::upper_bound(ts.begin(), ts.end(), lo);
                        auto b2 = std::lower_bound(ts.begin(), ts.end(), hi);
                        if (a < b2) between = static_cast<size_t>(b2 - a);
                    }
                    if (between < params.min_between) continue;
                }
                ++total;
            }
        }
    }
    return total;
}

}  // namespace flab

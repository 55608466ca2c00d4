#include "flab/transform.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace flab {

namespace {

using Matrix = PlaneMap::Matrix;

Rational det3(const Matrix& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Matrix mul(const Matrix& a, const Matrix& b) {
    Matrix r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            r[i][j] = 0;
            for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
        }
    return r;
}

Matrix make(std::initializer_list<Rational> v) {
    Matrix m;
    auto it = v.begin();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = *it++;
    return m;
}

Rational q_of(int64_t i) { return Rational(BigInt(static_cast<long>(i))); }

int64_t to_i64(const BigInt& z) {
    if (!z.fits_slong_p()) throw Error(ErrorKind::DomainError, "grid index exceeds 64 bits");
    return static_cast<int64_t>(z.get_si());
}

// Nearest integer to q, ties upward.
BigInt round_q(const Rational& q) { return floor_q(q + Rational(1, 2)); }

// Largest e <= cap with 2^{-2e} >= d2, i.e. the smallest power of two bounding sqrt(d2) (never finer than 2^{-cap}).
int dagger_exponent(const Rational& d2, int cap) {
    int e = cap;
    while (pow2q(-2L * e) < d2) --e;
    return e;
}

long floor_log2_q(const Rational& q) {
    long e = static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 2)) - static_cast<long>(mpz_sizeinbase(q.get_den_mpz_t(), 2));
    while (pow2q(e) > q) --e;
    while (pow2q(e + 1) <= q) ++e;
    return e;
}

}  // namespace

PlaneMap::PlaneMap(const Matrix& H) : H_(H) {
    det_ = det3(H_);
    if (sgn(det_) == 0) throw Error(ErrorKind::Singularity, "plane map is not invertible");
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
            inv_[i][j] = (H_[r0][c0] * H_[r1][c1] - H_[r0][c1] * H_[r1][c0]) / det_;
        }
    kind_ = (sgn(H_[2][0]) == 0 && sgn(H_[2][1]) == 0) ? Kind::Affine : Kind::Projective;
}

PlaneMap PlaneMap::identity() { return PlaneMap(make({1, 0, 0, 0, 1, 0, 0, 0, 1})); }

PlaneMap PlaneMap::translation(const Rational& dx, const Rational& dy) {
    return PlaneMap(make({1, 0, dx, 0, 1, dy, 0, 0, 1}));
}

PlaneMap PlaneMap::scaling(const Rational& sx, const Rational& sy) {
    return PlaneMap(make({sx, 0, 0, 0, sy, 0, 0, 0, 1}));
}

PlaneMap PlaneMap::to_unit_segment(const QPoint& a, const QPoint& b) {
    // Multiply by 1 / w with w = b - a, then subtract a / w.
    Rational wx = b.x - a.x, wy = b.y - a.y, n = wx * wx + wy * wy;
    if (sgn(n) == 0) throw Error(ErrorKind::DegenerateInput, "anchor points coincide");
    Rational cr = wx / n, ci = -wy / n;  // 1 / w
    Rational tx = -(a.x * cr - a.y * ci), ty = -(a.x * ci + a.y * cr);
    return PlaneMap(make({cr, -ci, tx, ci, cr, ty, 0, 0, 1}));
}

PlaneMap PlaneMap::projective_dual() { return PlaneMap(make({1, 0, 0, 1, 0, -1, 0, 1, 0})); }

PlaneMap PlaneMap::tube_normalization(const Rational& m, const Rational& b, const Rational& s) {
    if (sgn(s) <= 0) throw Error(ErrorKind::InvalidArgument, "tube width must be positive");
    return PlaneMap(make({1, 0, 0, -m / s, 1 / s, -b / s, 0, 0, 1}));
}

PlaneMap PlaneMap::inverse() const { return PlaneMap(inv_); }

PlaneMap PlaneMap::then(const PlaneMap& next) const { return PlaneMap(mul(next.H_, H_)); }

namespace {

QPoint apply_matrix(const Matrix& H, const QPoint& p) {
    Rational X = H[0][0] * p.x + H[0][1] * p.y + H[0][2];
    Rational Y = H[1][0] * p.x + H[1][1] * p.y + H[1][2];
    Rational W = H[2][0] * p.x + H[2][1] * p.y + H[2][2];
    if (sgn(W) == 0)
        throw Error(ErrorKind::Singularity,
                    "point (" + to_string_q(p.x) + ", " + to_string_q(p.y) + ") maps to infinity");
    return {X / W, Y / W};
}

}  // namespace

QPoint PlaneMap::apply(const QPoint& p) const { return apply_matrix(H_, p); }

QPoint PlaneMap::apply_inverse(const QPoint& p) const { return apply_matrix(inv_, p); }

Line PlaneMap::apply(const Line& l) const {
    Rational c[3];
    l.coefficients(c[0], c[1], c[2]);
    Rational out[3];
    for (int j = 0; j < 3; ++j) {
        out[j] = 0;
        for (int i = 0; i < 3; ++i) out[j] += c[i] * inv_[i][j];
    }
    if (sgn(out[0]) == 0 && sgn(out[1]) == 0) throw Error(ErrorKind::Singularity, "line maps to the line at infinity");
    return Line::from_coefficients(out[0], out[1], out[2]);
}

bool PlaneMap::line_image_consistent(const Line& l) const {
    Line img = apply(l);
    int found = 0;
    for (int t = 0; t < 6 && found < 2; ++t) {
        QPoint p = l.vertical() ? QPoint{l.intercept(), Rational(t)}
                                : QPoint{Rational(t), l.slope() * t + l.intercept()};
        try {
            if (!img.contains(apply(p))) return false;
            ++found;
        } catch (const Error&) {
        }
    }
    return found == 2;
}

// Tube rescaling

RescaledTube rescale_tube(const Arrangement& tube, const Rational& m, const Rational& b, int s_exp) {
    const ScaleFrame& f = tube.frame();
    if (s_exp < 0 || s_exp > f.delta_exp) throw Error(ErrorKind::InvalidScale, "tube width out of range");
    const Rational s = pow2q(-s_exp);
    const Line lz = Line::slope_intercept(m, b);
    const Rational lim2 = 9 * s * s;
    const PlaneMap map = PlaneMap::tube_normalization(m, b, s);
    const int bits = f.bits() + 1;
    const ScaleFrame g = ScaleFrame::make(1, bits, f.delta_exp - s_exp, f.epsilon, f.C);
    const Rational scale(pow2z(static_cast<unsigned long>(bits)));
    RescaledTube out;
    out.points_before = tube.num_points();
    std::map<Point2, std::pair<Point2, size_t>> best;  // delta~ cell -> (lowest image point, source index)
    const int cell_shift = bits - g.delta_exp;
    std::vector<Point2> img(tube.num_points());
    for (size_t p = 0; p < tube.num_points(); ++p) {
        QPoint q = tube.point_value(p);
        if (dist2_point_line(q, lz) > lim2)
            throw Error(ErrorKind::Precondition, "tube point outside N_{3s}(l_z)");
        QPoint w = map.apply(q);
        Rational X = w.x * scale, Y = w.y * scale;
        if (X.get_den() != 1 || Y.get_den() != 1) throw Error(ErrorKind::DomainError, "image off the output grid");
        img[p] = {to_i64(X.get_num()), to_i64(Y.get_num())};
        out.max_radius2 = std::max(out.max_radius2, Rational(w.x * w.x + w.y * w.y));
        Point2 cell{floor_shift(img[p].x, cell_shift), floor_shift(img[p].y, cell_shift)};
        auto it = best.find(cell);
        if (it == best.end() || img[p] < it->second.first) best[cell] = {img[p], p};
    }
    std::vector<Point2> pts;
    std::vector<long> src_to_new(tube.num_points(), -1);
    std::vector<std::pair<Point2, size_t>> kept;
    for (const auto& [cell, v] : best) kept.push_back(v);
    std::sort(kept.begin(), kept.end());
    for (size_t i = 0; i < kept.size(); ++i) {
        pts.push_back(kept[i].first);
        src_to_new[kept[i].second] = static_cast<long>(i);
    }
    out.points_after = pts.size();
    std::vector<Line> lines;
    lines.reserve(tube.num_lines());
    for (const Line& l : tube.lines()) lines.push_back(map.apply(l));
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    for (const auto& [p, l] : tube.edges())
        if (src_to_new[p] >= 0) edges.emplace_back(static_cast<uint32_t>(src_to_new[p]), l);
    out.arr = Arrangement(g, GridSet2D(g, std::move(pts), Domain::Free), std::move(lines), std::move(edges), 2,
                          tube.V());
    out.slack_violations = out.arr.count_slack_violations();
    return out;
}

// Projective step

bool check_pencil_image(const Line& l, const Rational& t) {
    if (!l.contains({t, Rational(0)})) return false;
    if (!l.vertical() && sgn(l.slope()) == 0) return false;  // the x-axis itself goes to infinity
    const PlaneMap T = PlaneMap::projective_dual();
    Line img = T.apply(l);
    // Three image points on the predicted line.
    for (int y = 1; y <= 3; ++y) {
        QPoint p = l.vertical() ? QPoint{l.intercept(), Rational(y)} : QPoint{(Rational(y) - l.intercept()) / l.slope(), Rational(y)};
        if (!img.contains(T.apply(p))) return false;
    }
    Rational a, b, c;
    img.coefficients(a, b, c);
    if (t == 0) return img.vertical();
    if (t == 1) return !img.vertical() && sgn(img.slope()) == 0;
    return a * t == b * (1 - t);
}

Dualized projective_dualize(const Arrangement& arr) {
    const ScaleFrame& f = arr.frame();
    const int d = f.delta_exp;
    Dualized out;
    out.map = PlaneMap::projective_dual();
    out.guard = pow2q(-static_cast<long>((d + 1) / 2));
    const int bits = d + 5;
    const Rational scale(pow2z(static_cast<unsigned long>(bits)));
    std::vector<QPoint> exact(arr.num_points());
    std::vector<Point2> snapped(arr.num_points());
    for (size_t p = 0; p < arr.num_points(); ++p) {
        QPoint q = arr.point_value(p);
        if (abs(q.y) < out.guard)
            throw Error(ErrorKind::Singularity,
                        "point (" + to_string_q(q.x) + ", " + to_string_q(q.y) + ") is too close to the x-axis");
        exact[p] = out.map.apply(q);
        snapped[p] = {to_i64(round_q(exact[p].x * scale)), to_i64(round_q(exact[p].y * scale))};
    }
    std::vector<Line> lines;
    lines.reserve(arr.num_lines());
    for (const Line& l : arr.lines()) lines.push_back(out.map.apply(l));
    const Rational delta2 = f.delta() * f.delta();
    Rational worst_exact(0), worst_snapped(0);
    for (const auto& [p, l] : arr.edges()) {
        worst_exact = std::max(worst_exact, dist2_point_line(exact[p], lines[l]));
        QPoint s{q_of(snapped[p].x) / scale, q_of(snapped[p].y) / scale};
        worst_snapped = std::max(worst_snapped, dist2_point_line(s, lines[l]));
    }
    out.preservation2 = worst_exact / delta2;
    out.preservation = std::sqrt(out.preservation2.get_d());
    out.dagger_exp = dagger_exponent(worst_snapped, bits);
    if (out.dagger_exp < 0) throw Error(ErrorKind::InvalidScale, "image incidences wider than 1");
    // Distinct snapped points; merged points keep the union of their incidences.
    std::vector<Point2> uniq = snapped;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    const ScaleFrame g = ScaleFrame::make(1, bits, out.dagger_exp, f.epsilon, f.C);
    GridSet2D P(g, uniq, Domain::Free);
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    for (const auto& [p, l] : arr.edges()) edges.emplace_back(static_cast<uint32_t>(P.find(snapped[p])), l);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    out.arr = Arrangement(g, std::move(P), std::move(lines), std::move(edges), 1, arr.V());
    return out;
}

QuadrantNormalization anisotropic_normalize(const Arrangement& arr) {
    const ScaleFrame& f = arr.frame();
    QuadrantNormalization out;
    out.points_before = arr.num_points();
    const auto& pts = arr.points().points();
    size_t q[2][2] = {{0, 0}, {0, 0}};
    for (const auto& p : pts)
        if (p.x != 0 && p.y != 0) ++q[p.x > 0][p.y > 0];
    int bx = 1, by = 1;
    size_t bestq = 0;
    for (int sx = 0; sx < 2; ++sx)
        for (int sy = 0; sy < 2; ++sy)
            if (q[sx][sy] > bestq || (q[sx][sy] == bestq && sx == 1 && sy == 1)) {
                bestq = q[sx][sy];
                bx = sx;
                by = sy;
            }
    out.flip_x = bx ? 1 : -1;
    out.flip_y = by ? 1 : -1;
    const Rational res = f.resolution();
    std::map<std::pair<long, long>, size_t> boxes;
    std::vector<std::pair<long, long>> key(pts.size(), {LONG_MIN, LONG_MIN});
    for (size_t i = 0; i < pts.size(); ++i) {
        int64_t x = pts[i].x * out.flip_x, y = pts[i].y * out.flip_y;
        if (x <= 0 || y <= 0) continue;
        key[i] = {floor_log2_q(q_of(x) * res), floor_log2_q(q_of(y) * res)};
        ++boxes[key[i]];
    }
    if (boxes.empty()) throw Error(ErrorKind::EmptyInput, "no point off the axes");
    std::pair<long, long> best{0, 0};
    size_t bc = 0;
    for (const auto& [k, c] : boxes)
        if (c > bc) {
            bc = c;
            best = k;
        }
    out.Mx = pow2q(best.first);
    out.My = pow2q(best.second);
    const long extra = std::max(0L, std::max(best.first, best.second));
    const int bits = f.bits() + static_cast<int>(extra);
    const PlaneMap S = PlaneMap::scaling(Rational(out.flip_x) / out.Mx, Rational(out.flip_y) / out.My);
    const Rational scale(pow2z(static_cast<unsigned long>(bits)));
    std::vector<Point2> kept;
    std::vector<long> newidx(pts.size(), -1);
    for (size_t i = 0; i < pts.size(); ++i) {
        if (key[i] != best) continue;
        QPoint w = S.apply(arr.point_value(i));
        if (w.x < 1 || w.x > 2 || w.y < 1 || w.y > 2) out.inside_unit_box = false;
        Rational X = w.x * scale, Y = w.y * scale;
        if (X.get_den() != 1 || Y.get_den() != 1) throw Error(ErrorKind::DomainError, "scaled point off the grid");
        newidx[i] = static_cast<long>(kept.size());
        kept.push_back({to_i64(X.get_num()), to_i64(Y.get_num())});
    }
    out.points_after = kept.size();
    std::vector<Line> lines;
    for (const Line& l : arr.lines()) lines.push_back(S.apply(l));
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    Rational worst(0);
    for (const auto& [p, l] : arr.edges()) {
        if (newidx[p] < 0) continue;
        edges.emplace_back(static_cast<uint32_t>(newidx[p]), l);
        QPoint w{q_of(kept[newidx[p]].x) / scale, q_of(kept[newidx[p]].y) / scale};
        worst = std::max(worst, dist2_point_line(w, lines[l]));
    }
    int e = dagger_exponent(worst, bits);
    if (e < 0) throw Error(ErrorKind::InvalidScale, "scaled incidences wider than 1");
    const ScaleFrame g = ScaleFrame::make(1, bits, e, f.epsilon, f.C);
    // Kept points are increasing in the original order only up to the flips; GridSet2D re-sorts.
    std::vector<Point2> sorted = kept;
    GridSet2D P(g, sorted, Domain::Free);
    for (auto& [p, l] : edges) p = static_cast<uint32_t>(P.find(kept[p]));
    out.arr = Arrangement(g, std::move(P), std::move(lines), std::move(edges), 1, arr.V());
    return out;
}

// Intercepts

namespace {

Rational min_gap(const GridSet1D& s) {
    Rational g(0);
    const auto& v = s.indices();
    for (size_t i = 1; i < v.size(); ++i) {
        Rational d = q_of(v[i] - v[i - 1]) * s.frame().resolution();
        if (i == 1 || d < g) g = d;
    }
    return g;
}

}  // namespace

InterceptFamilies extract_intercepts(const Arrangement& arr, const std::vector<PencilTag>& tags) {
    if (tags.size() != arr.num_lines()) throw Error(ErrorKind::InvalidArgument, "one tag per line required");
    const ScaleFrame& f = arr.frame();
    const Rational scale(pow2z(static_cast<unsigned long>(f.bits())));
    InterceptFamilies out;
    out.dagger_exp = f.delta_exp;
    bool have_slope = false;
    for (size_t i = 0; i < tags.size(); ++i) {
        const Line& l = arr.lines()[i];
        bool ok = true;
        switch (tags[i]) {
            case PencilTag::None: break;
            case PencilTag::Vertical: ok = l.vertical(); break;
            case PencilTag::Horizontal: ok = !l.vertical() && sgn(l.slope()) == 0; break;
            case PencilTag::Parallel:
                ok = !l.vertical() && (!have_slope || l.slope() == out.parallel_slope);
                if (ok && !have_slope) {
                    have_slope = true;
                    out.parallel_slope = l.slope();
                }
                break;
            case PencilTag::ThroughOrigin: ok = !l.vertical() && sgn(l.intercept()) == 0; break;
        }
        if (!ok) throw Error(ErrorKind::PencilMismatch, "line " + std::to_string(i) + " (" + l.to_string() + ") does not fit its pencil tag");
    }
    auto idx = [&](const Rational& v) { return to_i64(round_q(v * scale)); };
    std::vector<int64_t> xs, ys, zs, ws;
    std::vector<long> line_x(arr.num_lines(), -1), line_y(arr.num_lines(), -1);
    for (size_t i = 0; i < tags.size(); ++i) {
        const Line& l = arr.lines()[i];
        switch (tags[i]) {
            case PencilTag::Vertical:
            case PencilTag::Horizontal: {
                const Rational& v = l.intercept();
                if (v < 1 || v > 2) {
                    if (arr.line_degree(i) > 0) ++out.clipped_incident;
                    break;
                }
                (tags[i] == PencilTag::Vertical ? xs : ys).push_back(idx(v));
                break;
            }
            case PencilTag::Parallel: zs.push_back(idx(l.intercept())); break;
            case PencilTag::ThroughOrigin: ws.push_back(idx(l.slope())); break;
            case PencilTag::None: break;
        }
    }
    out.X = GridSet1D(f, xs, Domain::Free);
    out.Y = GridSet1D(f, ys, Domain::Free);
    out.Z = GridSet1D(f, zs, Domain::Free);
    out.W = GridSet1D(f, ws, Domain::Free);
    auto pos = [](const GridSet1D& s, int64_t v) {
        return static_cast<long>(std::lower_bound(s.indices().begin(), s.indices().end(), v) - s.indices().begin());
    };
    for (size_t i = 0; i < tags.size(); ++i) {
        const Line& l = arr.lines()[i];
        if (tags[i] == PencilTag::Vertical && l.intercept() >= 1 && l.intercept() <= 2) line_x[i] = pos(out.X, idx(l.intercept()));
        if (tags[i] == PencilTag::Horizontal && l.intercept() >= 1 && l.intercept() <= 2) line_y[i] = pos(out.Y, idx(l.intercept()));
    }
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    for (size_t p = 0; p < arr.num_points(); ++p) {
        auto [b, e] = arr.lines_of(p);
        for (auto a = b; a != e; ++a) {
            if (line_x[*a] < 0) continue;
            for (auto c = b; c != e; ++c)
                if (line_y[*c] >= 0) edges.emplace_back(static_cast<uint32_t>(line_x[*a]), static_cast<uint32_t>(line_y[*c]));
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    // y - slope * x within 4 delta_dagger of Z
    const Rational lim = 4 * f.delta();
    const Rational res = f.resolution();
    for (const auto& [xi, yi] : edges) {
        Rational v = q_of(out.Y.indices()[yi]) * res - out.parallel_slope * q_of(out.X.indices()[xi]) * res;
        const auto& z = out.Z.indices();
        int64_t vi = to_i64(floor_q(v * scale));
        auto it = std::lower_bound(z.begin(), z.end(), vi);
        bool ok = false;
        for (auto c : {it, it == z.begin() ? it : it - 1})
            if (c != z.end() && abs(Rational(q_of(*c) * res - v)) <= lim) ok = true;
        if (it != z.end() && it + 1 != z.end() && abs(Rational(q_of(*(it + 1)) * res - v)) <= lim) ok = true;
        if (!ok) ++out.containment_failures;
    }
    out.E = EdgeSet(out.X.size(), out.Y.size(), std::move(edges));
    out.min_gap_X = min_gap(out.X);
    out.min_gap_Y = min_gap(out.Y);
    out.min_gap_Z = min_gap(out.Z);
    out.min_gap_W = min_gap(out.W);
    return out;
}

void write_intercepts(std::ostream& os, const InterceptFamilies& f) {
    os << "INTERCEPTS v1 dagger=" << f.dagger_exp << " slope=" << to_string_q(f.parallel_slope) << "\n";
    write_gridset(os, f.X);
    write_gridset(os, f.Y);
    write_gridset(os, f.Z);
    write_gridset(os, f.W);
    write_edgeset(os, f.E);
}

InterceptFamilies read_intercepts(std::istream& is, const ScaleFrame& frame) {
    std::string line;
    while (std::getline(is, line) && line.empty()) {
    }
    std::istringstream ss(line);
    std::string tag, ver, dg, sl;
    ss >> tag >> ver >> dg >> sl;
    if (tag != "INTERCEPTS" || ver != "v1" || dg.rfind("dagger=", 0) != 0 || sl.rfind("slope=", 0) != 0)
        throw Error(ErrorKind::Parse, "bad INTERCEPTS header: " + line);
    InterceptFamilies f;
    f.dagger_exp = std::stoi(dg.substr(7));
    f.parallel_slope = parse_q(sl.substr(6));
    f.X = read_gridset1d(is, frame);
    f.Y = read_gridset1d(is, frame);
    f.Z = read_gridset1d(is, frame);
    f.W = read_gridset1d(is, frame);
    f.E = read_edgeset(is);
    f.min_gap_X = min_gap(f.X);
    f.min_gap_Y = min_gap(f.Y);
    f.min_gap_Z = min_gap(f.Z);
    f.min_gap_W = min_gap(f.W);
    return f;
}

}  // namespace flab

#include "flab/geometry.hpp"

#include <cmath>
#include <sstream>

namespace flab {

QPoint to_qpoint(const Point2& p, int bits) {
    Rational u = pow2q(-bits);
    return {Rational(BigInt(static_cast<long>(p.x))) * u, Rational(BigInt(static_cast<long>(p.y))) * u};
}

Line Line::slope_intercept(Rational m, Rational b) {
    Line l;
    l.m_ = std::move(m);
    l.b_ = std::move(b);
    return l;
}

Line Line::vertical_at(Rational x) {
    Line l;
    l.vertical_ = true;
    l.b_ = std::move(x);
    return l;
}

Line Line::through(const QPoint& p, const QPoint& q) {
    if (p == q) throw Error(ErrorKind::InvalidArgument, "line through a single point");
    if (p.x == q.x) return vertical_at(p.x);
    Rational m = (q.y - p.y) / (q.x - p.x);
    return slope_intercept(m, p.y - m * p.x);
}

Line Line::from_coefficients(const Rational& a, const Rational& b, const Rational& c) {
    if (a == 0 && b == 0) throw Error(ErrorKind::InvalidArgument, "degenerate line coefficients");
    if (b == 0) return vertical_at(-c / a);
    return slope_intercept(-a / b, -c / b);
}

const Rational& Line::slope() const {
    if (vertical_) throw Error(ErrorKind::InvalidArgument, "vertical line has no slope");
    return m_;
}

std::pair<Rational, Rational> Line::iota() const { return {slope(), b_}; }

QPoint Line::direction() const {
    if (vertical_) return {Rational(0), Rational(1)};
    return {Rational(1), m_};
}

void Line::coefficients(Rational& a, Rational& b, Rational& c) const {
    if (vertical_) {
        a = 1;
        b = 0;
        c = -b_;
    } else {
        a = m_;
        b = -1;
        c = b_;
    }
}

bool Line::contains(const QPoint& p) const {
    if (vertical_) return p.x == b_;
    return p.y == m_ * p.x + b_;
}

long double Line::angle_approx() const {
    if (vertical_) return std::acos(-1.0L) / 2;
    return std::atan(static_cast<long double>(m_.get_d()));
}

bool Line::operator<(const Line& o) const {
    if (vertical_ != o.vertical_) return !vertical_;
    if (m_ != o.m_) return m_ < o.m_;
    return b_ < o.b_;
}

std::string Line::to_string() const {
    if (vertical_) return "x=" + to_string_q(b_);
    return "y=" + to_string_q(m_) + "*x+" + to_string_q(b_);
}

Rational dist2_point_line(const QPoint& p, const Line& l) {
    if (l.vertical()) {
        Rational d = p.x - l.intercept();
        return d * d;
    }
    const Rational& m = l.slope();
    Rational r = m * p.x - p.y + l.intercept();
    return r * r / (1 + m * m);
}

bool point_within(const QPoint& p, const Line& l, const Rational& r) { return dist2_point_line(p, l) <= r * r; }

Rational dist2(const QPoint& p, const QPoint& q) {
    Rational dx = p.x - q.x, dy = p.y - q.y;
    return dx * dx + dy * dy;
}

// Angle

Angle Angle::radians(const Rational& r) {
    if (sgn(r) < 0) throw Error(ErrorKind::InvalidArgument, "negative angle");
    if (sgn(r) == 0) return zero();
    return Angle{ExactPower(r), false, false};
}

Angle Angle::radians(const ExactPower& r) { return Angle{r, false, false}; }

Angle Angle::pi_times(const Rational& q) {
    if (sgn(q) < 0) throw Error(ErrorKind::InvalidArgument, "negative angle");
    if (sgn(q) == 0) return zero();
    return Angle{ExactPower(q), true, false};
}

Angle Angle::zero() { return Angle{ExactPower(Rational(1)), false, true}; }

long double Angle::approx() const {
    if (is_zero) return 0;
    long double v = std::exp2(static_cast<long double>(magnitude.log2()));
    return pi_multiple ? v * std::acos(-1.0L) : v;
}

std::string Angle::to_string() const {
    if (is_zero) return "0";
    return magnitude.to_string() + (pi_multiple ? "*pi" : "");
}

Rational pi_lower() {
    static const Rational v = parse_q("3.141592653589793238462643383279502884197169399375105820974944");
    return v;
}

Rational pi_upper() {
    static const Rational v = parse_q("3.141592653589793238462643383279502884197169399375105820974945");
    return v;
}

namespace {

// Rational enclosure of a positive ExactPower: lo <= v <= hi with hi - lo = 2^{-bits}.
std::pair<Rational, Rational> enclose(const ExactPower& v, int bits) {
    if (v.is_rational()) {
        Rational r = v.to_rational();
        return {r, r};
    }
    long double approx = std::exp2(static_cast<long double>(v.log2()));
    BigInt scale = pow2z(static_cast<unsigned long>(bits));
    Rational guess(static_cast<double>(approx));
    BigInt lo = floor_q(guess * Rational(scale)) - 1024, hi = lo + 2048;
    if (lo < 0) lo = 0;
    auto below = [&](const BigInt& n) { return ExactPower::compare(ExactPower(make_q(n, scale) + Rational(0)), v) < 0; };
    // Widen until the bracket holds, then bisect.
    while (lo > 0 && !below(lo)) lo /= 2;
    while (below(hi)) hi *= 2;
    while (hi - lo > 1) {
        BigInt mid = (lo + hi) / 2;
        if (mid == 0 || below(mid))
            lo = mid;
        else
            hi = mid;
    }
    return {make_q(lo, scale), make_q(hi, scale)};
}

Rational round_dyadic(const Rational& y, int bits, bool up) {
    BigInt s = pow2z(static_cast<unsigned long>(bits));
    BigInt n = up ? ceil_q(y * Rational(s)) : floor_q(y * Rational(s));
    return make_q(n, s);
}

// sin and cos of rational y in [0, 1.6] with a rigorous error bound.
void sincos_enclosure(const Rational& y, Rational& s, Rational& c, Rational& err) {
    const int terms = 40;
    s = 0;
    c = 0;
    Rational term = 1;  // y^n / n!
    for (int n = 0; n <= 2 * terms + 1; ++n) {
        if (n > 0) term = term * y / n;
        if (n <= 2 * terms - 1) {
            if (n % 2 == 0)
                c += (n / 2) % 2 == 0 ? term : Rational(-term);
            else
                s += ((n - 1) / 2) % 2 == 0 ? term : Rational(-term);
        }
    }
    err = term;  // y^{2 terms + 1} / (2 terms + 1)!, bounds both tails for y <= 2
}

std::pair<Rational, Rational> tan_enclosure(const Rational& lo, const Rational& hi) {
    Rational ylo = round_dyadic(lo, 220, false), yhi = round_dyadic(hi, 220, true);
    Rational s, c, e;
    sincos_enclosure(ylo, s, c, e);
    Rational tlo = (s - e) / (c + e);
    sincos_enclosure(yhi, s, c, e);
    if (sgn(Rational(c - e)) <= 0) throw Error(ErrorKind::InvalidArgument, "angle too close to pi/2");
    Rational thi = (s + e) / (c - e);
    return {tlo, thi};
}

// Sign of theta - pi/2, exact.
int compare_with_right_angle(const Angle& theta) {
    if (theta.is_zero) return -1;
    if (theta.pi_multiple) return ExactPower::compare(theta.magnitude, ExactPower(Rational(1, 2)));
    if (theta.magnitude < ExactPower(pi_lower() / 2)) return -1;
    if (theta.magnitude > ExactPower(pi_upper() / 2)) return 1;
    throw Error(ErrorKind::InvalidArgument, "cannot separate angle from pi/2");
}

}  // namespace

int compare_with_tan(const Rational& t, const Angle& theta) {
    if (theta.is_zero) return sgn(t);
    if (compare_with_right_angle(theta) >= 0) return -1;
    if (theta.pi_multiple && theta.magnitude == ExactPower(Rational(1, 4))) return cmp(t, Rational(1)) > 0 ? 1 : (t == 1 ? 0 : -1);
    long double th = theta.approx();
    long double tt = std::tan(th);
    long double tv = static_cast<long double>(t.get_d());
    if (std::fabs(tv - tt) > 1e-9L * (1 + std::fabs(tt))) return tv > tt ? 1 : -1;
    Rational lo, hi;
    if (theta.pi_multiple) {
        auto [a, b] = enclose(theta.magnitude, 230);
        lo = a * pi_lower();
        hi = b * pi_upper();
    } else {
        auto [a, b] = enclose(theta.magnitude, 230);
        lo = a;
        hi = b;
    }
    auto [tlo, thi] = tan_enclosure(lo, hi);
    if (t < tlo) return -1;
    if (t > thi) return 1;
    throw Error(ErrorKind::InvalidArgument, "angle comparison undecided at 1e-60 precision");
}

int compare_angle(const QPoint& u, const QPoint& v, const Angle& theta) {
    Rational cross = u.x * v.y - u.y * v.x;
    Rational dot = u.x * v.x + u.y * v.y;
    if (sgn(cross) == 0) return theta.is_zero ? 0 : -1;
    if (sgn(dot) == 0) {
        int c = compare_with_right_angle(theta);
        return -c;
    }
    Rational t = abs(cross) / abs(dot);
    return compare_with_tan(t, theta);
}

int compare_angle(const Line& a, const Line& b, const Angle& theta) {
    return compare_angle(a.direction(), b.direction(), theta);
}

long double angle_between_approx(const Line& a, const Line& b) {
    long double d = std::fabs(a.angle_approx() - b.angle_approx());
    long double pi = std::acos(-1.0L);
    return std::min(d, pi - d);
}

std::optional<Segment> clip_to_box(const Line& l, const Rational& x0, const Rational& x1, const Rational& y0,
                                   const Rational& y1) {
    if (l.vertical()) {
        const Rational& c = l.intercept();
        if (c < x0 || c > x1) return std::nullopt;
        return Segment{{c, y0}, {c, y1}};
    }
    const Rational& m = l.slope();
    const Rational& b = l.intercept();
    Rational lo = x0, hi = x1;
    if (sgn(m) == 0) {
        if (b < y0 || b > y1) return std::nullopt;
    } else {
        Rational xa = (y0 - b) / m, xb = (y1 - b) / m;
        if (xa > xb) std::swap(xa, xb);
        if (xa > lo) lo = xa;
        if (xb < hi) hi = xb;
        if (lo > hi) return std::nullopt;
    }
    return Segment{{lo, m * lo + b}, {hi, m * hi + b}};
}

Rational dist2_point_segment(const QPoint& p, const Segment& s) {
    Rational dx = s.b.x - s.a.x, dy = s.b.y - s.a.y;
    Rational len2 = dx * dx + dy * dy;
    if (sgn(len2) == 0) return dist2(p, s.a);
    Rational t = ((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / len2;
    if (sgn(t) <= 0) return dist2(p, s.a);
    if (t >= 1) return dist2(p, s.b);
    QPoint f{s.a.x + t * dx, s.a.y + t * dy};
    return dist2(p, f);
}

namespace {

int orient(const QPoint& a, const QPoint& b, const QPoint& c) {
    return sgn(Rational((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)));
}

bool on_segment(const QPoint& a, const QPoint& b, const QPoint& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

bool segments_intersect(const Segment& s, const Segment& t) {
    int o1 = orient(s.a, s.b, t.a), o2 = orient(s.a, s.b, t.b);
    int o3 = orient(t.a, t.b, s.a), o4 = orient(t.a, t.b, s.b);
    if (o1 != o2 && o3 != o4 && o1 * o2 <= 0 && o3 * o4 <= 0) return true;
    if (o1 == 0 && on_segment(s.a, s.b, t.a)) return true;
    if (o2 == 0 && on_segment(s.a, s.b, t.b)) return true;
    if (o3 == 0 && on_segment(t.a, t.b, s.a)) return true;
    if (o4 == 0 && on_segment(t.a, t.b, s.b)) return true;
    return false;
}

}  // namespace

Rational dist2_segments(const Segment& s, const Segment& t) {
    if (segments_intersect(s, t)) return 0;
    Rational d = dist2_point_segment(s.a, t);
    for (const Rational& c : {dist2_point_segment(s.b, t), dist2_point_segment(t.a, s), dist2_point_segment(t.b, s)})
        if (c < d) d = c;
    return d;
}

}  // namespace flab

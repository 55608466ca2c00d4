#pragma once

#include <optional>
#include <string>

#include "flab/dyadic.hpp"
#include "flab/rational.hpp"

namespace flab {

struct QPoint {
    Rational x;
    Rational y;
    bool operator==(const QPoint& o) const { return x == o.x && y == o.y; }
};

QPoint to_qpoint(const Point2& p, int bits);

/**
 * A line in the plane with exact rational data: y = m x + b, or x = b when vertical.
 * Lines compare by (vertical, m, b).
 */
class Line {
public:
    Line() = default;
    static Line slope_intercept(Rational m, Rational b);
    static Line vertical_at(Rational x);
    static Line through(const QPoint& p, const QPoint& q);
    // a x + b y + c = 0
    static Line from_coefficients(const Rational& a, const Rational& b, const Rational& c);

    bool vertical() const { return vertical_; }
    const Rational& slope() const;  // throws for vertical lines
    const Rational& intercept() const { return b_; }  // y-intercept, or x-position if vertical
    // iota(l) = (m, b); throws for vertical lines.
    std::pair<Rational, Rational> iota() const;
    // Direction vector (1, m), or (0, 1).
    QPoint direction() const;
    // (a, b, c) with a x + b y + c = 0.
    void coefficients(Rational& a, Rational& b, Rational& c) const;
    bool contains(const QPoint& p) const;
    // Approximate direction angle in (-pi/2, pi/2].
    long double angle_approx() const;

    bool operator==(const Line& o) const { return vertical_ == o.vertical_ && m_ == o.m_ && b_ == o.b_; }
    bool operator<(const Line& o) const;
    std::string to_string() const;

private:
    bool vertical_ = false;
    Rational m_ = 0;
    Rational b_ = 0;
};

Rational dist2_point_line(const QPoint& p, const Line& l);
// dist(p, l) <= r
bool point_within(const QPoint& p, const Line& l, const Rational& r);
Rational dist2(const QPoint& p, const QPoint& q);

/** An angle given exactly as magnitude (times pi when pi_multiple). */
struct Angle {
    ExactPower magnitude = ExactPower(Rational(1));
    bool pi_multiple = false;
    bool is_zero = false;

    static Angle radians(const Rational& r);
    static Angle radians(const ExactPower& r);
    static Angle pi_times(const Rational& q);
    static Angle zero();
    long double approx() const;
    std::string to_string() const;
};

// Sign of (undirected angle between the direction vectors u and v) - theta. Exact.
int compare_angle(const QPoint& u, const QPoint& v, const Angle& theta);
int compare_angle(const Line& a, const Line& b, const Angle& theta);
inline bool angle_le(const Line& a, const Line& b, const Angle& theta) { return compare_angle(a, b, theta) <= 0; }
// Sign of t - tan(theta) for theta in [0, pi/2]; tan(pi/2) is +infinity.
int compare_with_tan(const Rational& t, const Angle& theta);
// Approximate undirected angle between two lines in [0, pi/2].
long double angle_between_approx(const Line& a, const Line& b);

struct Segment {
    QPoint a;
    QPoint b;
};

// Intersection of l with the closed box [x0,x1] x [y0,y1]; empty if they miss.
std::optional<Segment> clip_to_box(const Line& l, const Rational& x0, const Rational& x1, const Rational& y0,
                                   const Rational& y1);
Rational dist2_point_segment(const QPoint& p, const Segment& s);
Rational dist2_segments(const Segment& s, const Segment& t);

// Certified rational bounds for pi, accurate to 1e-60.
Rational pi_lower();
Rational pi_upper();

}  // namespace flab

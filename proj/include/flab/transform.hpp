#pragma once

#include <array>
#include <iosfwd>
#include <optional>

#include "flab/addcomb.hpp"
#include "flab/construct.hpp"
#include "flab/incidence.hpp"

namespace flab {

/**
 * Exact homogeneous map [X; Y; W] = H [x; y; 1]. Lines a x + b y + c = 0 are row vectors and map by
 * l' = l H^{-1}.
 */
class PlaneMap {
public:
    using Matrix = std::array<std::array<Rational, 3>, 3>;
    enum class Kind { Affine, Projective };

    explicit PlaneMap(const Matrix& H);
    static PlaneMap identity();
    static PlaneMap translation(const Rational& dx, const Rational& dy);
    static PlaneMap scaling(const Rational& sx, const Rational& sy);
    // Similarity z -> (z - a) / (b - a) in complex notation: a -> (0,0), b -> (1,0).
    static PlaneMap to_unit_segment(const QPoint& a, const QPoint& b);
    // (x, y) -> (x / y, (x - 1) / y).
    static PlaneMap projective_dual();
    // (x, y) -> (x, (y - m x - b) / s).
    static PlaneMap tube_normalization(const Rational& m, const Rational& b, const Rational& s);

    Kind kind() const { return kind_; }
    const Matrix& matrix() const { return H_; }
    const Rational& determinant() const { return det_; }
    PlaneMap inverse() const;
    PlaneMap then(const PlaneMap& next) const;  // next after this

    // Throws Singularity when the point maps to infinity.
    QPoint apply(const QPoint& p) const;
    QPoint apply_inverse(const QPoint& p) const;
    Line apply(const Line& l) const;
    // The image line contains the images of two finite points of l.
    bool line_image_consistent(const Line& l) const;

private:
    Matrix H_, inv_;
    Rational det_;
    Kind kind_;
};

struct RescaledTube {
    Arrangement arr;             // slack 2 at delta / s
    Rational max_radius2;        // max |image point|^2
    size_t points_before = 0;    // before keeping one point per delta~ cell
    size_t points_after = 0;
    size_t slack_violations = 0;
};

/**
 * Sends l_z to the x-axis and dilates by 1/s across it: (x, y) -> (x, (y - m x - b) / s). Vertical offsets
 * scale by 1/s, so a delta-incidence becomes a (sqrt 2 delta/s)-incidence; the output uses slack 2.
 * Keeps the lowest point of each delta~-cell. Throws Precondition if a point leaves N_{3s}(l_z).
 */
RescaledTube rescale_tube(const Arrangement& tube, const Rational& m, const Rational& b, int s_exp);

struct Dualized {
    Arrangement arr;                // points snapped to 2^{-(d+5)}, delta = delta_dagger
    PlaneMap map = PlaneMap::identity();
    Rational preservation2;         // max over incidences of dist(T q, T l)^2 / delta^2, before snapping
    double preservation = 0;        // square root of the above
    int dagger_exp = 0;             // delta_dagger = 2^{-dagger_exp}
    Rational guard;                 // minimal |y| accepted
};

/**
 * Applies (x, y) -> (x / y, (x - 1) / y). Points need |y| >= 2^{-ceil(d/2)}; otherwise Singularity naming
 * the point. delta_dagger is the smallest power of two bounding every image incidence distance after snapping.
 */
Dualized projective_dualize(const Arrangement& arr);

// Image of a line through (t, 0): vertical for t = 0, horizontal for t = 1, else normal parallel to (1 - t, t).
// Verified against three mapped points of the line.
bool check_pencil_image(const Line& l, const Rational& t);

struct QuadrantNormalization {
    Arrangement arr;
    Rational Mx, My;
    int flip_x = 1, flip_y = 1;
    size_t points_before = 0, points_after = 0;
    bool inside_unit_box = true;  // every kept point in [1,2]^2
};

// Reflects into the dominant quadrant, keeps the most populated dyadic box [Mx,2Mx] x [My,2My] and scales it
// onto [1,2]^2. delta_dagger is recomputed from the actual incidence distances.
QuadrantNormalization anisotropic_normalize(const Arrangement& arr);

enum class PencilTag { None, Vertical, Horizontal, Parallel, ThroughOrigin };

struct InterceptFamilies {
    GridSet1D X, Y, Z, W;
    EdgeSet E;
    int dagger_exp = 0;
    Rational parallel_slope;       // common slope of the parallel family; Z holds v - slope * u
    size_t clipped_incident = 0;   // incident vertical or horizontal lines dropped by the [1,2] clip
    size_t containment_failures = 0;  // E-edges with y - slope * x farther than 4 delta_dagger from Z
    Rational min_gap_X, min_gap_Y, min_gap_Z, min_gap_W;  // zero when fewer than two elements
};

InterceptFamilies extract_intercepts(const Arrangement& arr, const std::vector<PencilTag>& tags);

void write_intercepts(std::ostream& os, const InterceptFamilies& f);
InterceptFamilies read_intercepts(std::istream& is, const ScaleFrame& frame);

}  // namespace flab

#pragma once

#include <optional>
#include <string>

#include "flab/addcomb.hpp"
#include "flab/dyadic.hpp"

namespace flab {

/** Measured constants K1..K4 of a set A in [1,2], clamped to >= 1; raw values kept alongside. */
struct KProfile {
    ExactPower K1, K2, K3, K4;
    ExactPower raw_K1, raw_K2, raw_K3, raw_K4;
    Rational alpha, delta, epsilon;
    // Scan that produced each value.
    std::string source_K1, source_K2, source_K3, source_K4;
    int K3_worst_scale_exp = 0;
    size_t size = 0;
    size_t covering = 0;               // E_delta(A)
    uint64_t multiplicative_energy = 0;
};

// Requires a nonempty A; delta and epsilon are taken from the frame.
KProfile measure_K(const GridSet1D& A, const Rational& alpha, const ScaleFrame& frame);

struct GkzCertificate {
    ExactPower lhs;  // K1^6 K2^{6+a} K3^{2(9+4a)} K4^{4(2+a)}
    ExactPower rhs;  // delta^{-a(1-a)+eps}
    bool satisfied = false;
    ExactPower margin;  // lhs / rhs
    double margin_log2 = 0;
};

GkzCertificate gkz_certificate(const KProfile& profile);

// Common value K of K3 = K4 at which the certificate becomes an equality when K1 = K2 = 1.
ExactPower gkz_threshold(const Rational& alpha, const Rational& delta, const Rational& epsilon);

// alpha (1 - alpha) / (6 (155 + 68 alpha)); alpha in (0, 1].
Rational c_alpha(const Rational& alpha);

struct SGamma {
    ExactPower s;
    ExactPower delta_gamma;            // delta^gamma
    std::optional<Rational> gamma;     // exact when delta^gamma is a rational power of two
    double gamma_approx = 0;
    bool degenerate = false;           // s >= 1 or delta^gamma >= 1
    std::string strong_bound;          // inequality implied on the degenerate branch
};

SGamma s_gamma(const KProfile& profile);

enum class DichotomyCase { Gap, Dense };

struct DichotomyOutcome {
    DichotomyCase kind = DichotomyCase::Dense;
    Rational witness;                  // gap case: b in [0,1]
    size_t covering = 0;               // dense case: aligned s-cells meeting B cap [0,1]
    size_t quotient_size = 0;          // #(B cap [0,1])
    std::vector<Rational> quotients;   // B cap [0,1], sorted
    Rational s;
    Rational gamma;
};

/**
 * B = {(a1 - a2) / (a3 - a4) : |a3 - a4| > delta^gamma}. Gap case: some b in [0,1] with b/2 and (b+1)/2 both at
 * distance >= s from B; the smallest such b is returned. Otherwise dense, with the exact covering count.
 */
DichotomyOutcome quotient_dichotomy(const GridSet1D& A1, const Rational& gamma, const Rational& s,
                                    const ScaleFrame& frame);

// Distance from x to the sorted list.
Rational distance_to(const std::vector<Rational>& sorted, const Rational& x);

struct DilatedCovering {
    size_t count = 0;        // aligned rho-cells meeting d1 A + d2 A + ... + d2 A
    size_t sumset_size = 0;
};

// reps copies of d2 A.
DilatedCovering dilated_sumset_covering(const GridSet1D& A, const Rational& d1, const Rational& d2, int reps,
                                        const Rational& rho);

// K1 K2 K3^8 K4^4 level^4 max(|d1|,|d2|)^alpha #A
ExactPower dilated_sumset_bound(const KProfile& profile, const Rational& level, const Rational& d1,
                                const Rational& d2);

struct ExponentCheck {
    Rational e1, e2, c_over_alpha;
    bool ok = false;  // e1 <= 1 and e2 >= c(alpha)/alpha
};

ExponentCheck final_exponent_check(const Rational& alpha);

}  // namespace flab

#include "flab/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace flab {

namespace {

Rational q_of(int64_t i) { return Rational(BigInt(static_cast<long>(i))); }
Rational q_of(size_t n) { return Rational(BigInt(static_cast<unsigned long>(n))); }

ExactPower clamp1(const ExactPower& x) { return max(x, ExactPower(Rational(1))); }

// log2 of x when every base is a power of two.
std::optional<Rational> exact_log2(const ExactPower& x) {
    Rational acc(0);
    for (const auto& [base, e] : x.factors()) {
        if (!is_pow2(base)) return std::nullopt;
        acc += Rational(log2_exact(base)) * e;
    }
    return acc;
}

}  // namespace

KProfile measure_K(const GridSet1D& A, const Rational& alpha, const ScaleFrame& frame) {
    if (A.empty()) throw Error(ErrorKind::EmptyInput, "measure_K needs a nonempty set");
    const auto& idx = A.indices();
    const int64_t unit = frame.delta_units();
    for (size_t i = 1; i < idx.size(); ++i)
        if (idx[i] - idx[i - 1] < unit) throw Error(ErrorKind::Precondition, "set is not delta-separated");
    KProfile p;
    p.alpha = alpha;
    p.delta = frame.delta();
    p.epsilon = frame.epsilon;
    p.size = A.size();
    const int d = frame.delta_exp;

    p.raw_K1 = ExactPower::pow2(Rational(d) * alpha) / ExactPower(q_of(A.size()));
    p.source_K1 = "delta^-alpha / #A";

    p.raw_K2 = nonconcentration_constant(A, alpha, frame);
    p.source_K2 = "max over dyadic J of #(A cap J) / (|J|/delta)^alpha, scales 2^0..2^-" + std::to_string(d);

    GridSet1D diff = full_sum(A, A, SumOp::Minus);
    Rational k3(0);
    for (int e = 0; e <= d; ++e) {
        Rational r = q_of(covering_number(diff, e)) / q_of(covering_number(A, e));
        if (r > k3) {
            k3 = r;
            p.K3_worst_scale_exp = e;
        }
    }
    p.raw_K3 = ExactPower(k3);
    p.source_K3 = "max over rho = 2^0..2^-" + std::to_string(d) + " of E_rho(A-A) / E_rho(A)";

    p.covering = covering_number(A, d);
    p.multiplicative_energy = discretized_energy(A, A, frame, LatticeMode::Multiplicative);
    const Rational cov(q_of(p.covering));
    p.raw_K4 = ExactPower(cov * cov * cov / Rational(BigInt(static_cast<unsigned long>(p.multiplicative_energy))));
    p.source_K4 = "E_delta(A)^3 / multiplicative delta-energy";

    p.K1 = clamp1(p.raw_K1);
    p.K2 = clamp1(p.raw_K2);
    p.K3 = clamp1(p.raw_K3);
    p.K4 = clamp1(p.raw_K4);
    return p;
}

GkzCertificate gkz_certificate(const KProfile& pr) {
    const Rational& a = pr.alpha;
    GkzCertificate c;
    c.lhs = pr.K1.pow(Rational(6)) * pr.K2.pow(6 + a) * pr.K3.pow(2 * (9 + 4 * a)) * pr.K4.pow(4 * (2 + a));
    c.rhs = ExactPower::power(pr.delta, -a * (1 - a) + pr.epsilon);
    c.satisfied = c.lhs >= c.rhs;
    c.margin = c.lhs / c.rhs;
    c.margin_log2 = c.margin.log2();
    return c;
}

ExactPower gkz_threshold(const Rational& alpha, const Rational& delta, const Rational& epsilon) {
    // K^{2(9+4a) + 4(2+a)} = delta^{-a(1-a)+eps}
    Rational total = 2 * (9 + 4 * alpha) + 4 * (2 + alpha);
    return ExactPower::power(delta, (-alpha * (1 - alpha) + epsilon) / total);
}

Rational c_alpha(const Rational& alpha) {
    if (sgn(alpha) <= 0 || alpha > 1) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1]");
    Rational r = alpha * (1 - alpha) / (6 * (155 + 68 * alpha));
    r.canonicalize();
    return r;
}

SGamma s_gamma(const KProfile& pr) {
    const Rational& a = pr.alpha;
    SGamma out;
    ExactPower base = pr.K1.pow(Rational(3)) * pr.K2.pow(Rational(2)) * pr.K3 * ExactPower::power(pr.delta, 3 * a / 2);
    out.s = base.pow(Rational(2) / (a + 2));
    out.delta_gamma = pr.K3.pow(1 / a) * ExactPower::power(pr.delta, Rational(1, 2)) * out.s.pow(Rational(-1, 2));
    const ExactPower one(Rational(1));
    const double ld = std::log2(pr.delta.get_d());
    out.gamma_approx = out.delta_gamma.log2() / ld;
    auto lg = exact_log2(out.delta_gamma);
    auto ldelta = exact_log2(ExactPower(pr.delta));
    if (lg && ldelta && sgn(*ldelta) != 0) out.gamma = *lg / *ldelta;
    if (out.s >= one) {
        out.degenerate = true;
        out.strong_bound = "K1^3 K2^2 K3 >= delta^{-3 alpha/2}";
    } else if (out.delta_gamma >= one) {
        out.degenerate = true;
        out.strong_bound = "K3^{1/alpha} >= delta^{-1/2} s^{1/2}";
    }
    return out;
}

Rational distance_to(const std::vector<Rational>& sorted, const Rational& x) {
    if (sorted.empty()) throw Error(ErrorKind::EmptyInput, "distance to an empty set");
    auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
    Rational best = -1;
    if (it != sorted.end()) best = *it - x;
    if (it != sorted.begin()) {
        Rational d = x - *(it - 1);
        if (best < 0 || d < best) best = d;
    }
    return best;
}

DichotomyOutcome quotient_dichotomy(const GridSet1D& A1, const Rational& gamma, const Rational& s,
                                    const ScaleFrame& frame) {
    if (A1.size() < 2) throw Error(ErrorKind::DegenerateInput, "quotient set needs at least two points");
    if (sgn(s) <= 0) throw Error(ErrorKind::InvalidArgument, "s must be positive");
    const auto& a = A1.indices();
    std::vector<int64_t> diffs;
    diffs.reserve(a.size() * (a.size() - 1) / 2 + 1);
    diffs.push_back(0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = i + 1; j < a.size(); ++j) diffs.push_back(a[j] - a[i]);
    std::sort(diffs.begin(), diffs.end());
    diffs.erase(std::unique(diffs.begin(), diffs.end()), diffs.end());
    // |a3 - a4| * resolution > delta^gamma
    const ExactPower thr = ExactPower::power(frame.delta(), gamma);
    const Rational res = A1.frame().resolution();
    auto first = std::find_if(diffs.begin(), diffs.end(),
                              [&](int64_t v) { return v > 0 && ExactPower(q_of(v) * res) > thr; });
    if (first == diffs.end()) throw Error(ErrorKind::DegenerateInput, "no admissible denominator");
    // Quotients in [0,1]: 0 <= num <= den with num, den nonnegative differences.
    std::vector<std::pair<int64_t, int64_t>> q;
    for (auto den = first; den != diffs.end(); ++den)
        for (int64_t num : diffs) {
            if (num > *den) break;
            int64_t g = std::gcd(num, *den);
            q.emplace_back(num / g, *den / g);
        }
    auto less = [](const std::pair<int64_t, int64_t>& x, const std::pair<int64_t, int64_t>& y) {
        return static_cast<__int128>(x.first) * y.second < static_cast<__int128>(y.first) * x.second;
    };
    std::sort(q.begin(), q.end(), less);
    q.erase(std::unique(q.begin(), q.end()), q.end());
    DichotomyOutcome out;
    out.s = s;
    out.gamma = gamma;
    out.quotients.reserve(q.size());
    for (const auto& [n, d] : q) out.quotients.push_back(make_q(BigInt(static_cast<long>(n)), BigInt(static_cast<long>(d))));
    for (auto& x : out.quotients) x.canonicalize();
    out.quotient_size = out.quotients.size();
    const auto& B = out.quotients;

    // u = b/2 in [0,1/2] must avoid the s-neighbourhoods of B and of B - 1/2.
    std::vector<Rational> forbid = B;
    for (const auto& x : B) forbid.push_back(x - Rational(1, 2));
    std::sort(forbid.begin(), forbid.end());
    std::vector<Rational> cand{Rational(0)};
    for (const auto& c : forbid) {
        Rational u = c + s;
        if (sgn(u) >= 0 && u <= Rational(1, 2)) cand.push_back(u);
    }
    std::sort(cand.begin(), cand.end());
    for (const auto& u : cand)
        if (distance_to(forbid, u) >= s) {
            out.kind = DichotomyCase::Gap;
            out.witness = 2 * u;
            return out;
        }
    out.kind = DichotomyCase::Dense;
    std::vector<BigInt> cells;
    cells.reserve(B.size());
    for (const auto& x : B) cells.push_back(floor_q(x / s));
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    out.covering = cells.size();
    return out;
}

DilatedCovering dilated_sumset_covering(const GridSet1D& A, const Rational& d1, const Rational& d2, int reps,
                                        const Rational& rho) {
    if (reps < 1) throw Error(ErrorKind::InvalidArgument, "reps must be at least 1");
    if (sgn(rho) <= 0) throw Error(ErrorKind::InvalidArgument, "rho must be positive");
    if (A.empty()) throw Error(ErrorKind::EmptyInput, "dilated sumset of an empty set");
    // Work in units of resolution / D with D the common denominator of the dilates.
    BigInt D;
    mpz_lcm(D.get_mpz_t(), d1.get_den_mpz_t(), d2.get_den_mpz_t());
    const BigInt m1 = d1.get_num() * (D / d1.get_den()), m2 = d2.get_num() * (D / d2.get_den());
    auto scaled = [&](const BigInt& m) {
        std::vector<BigInt> v;
        for (int64_t i : A.indices()) v.push_back(m * BigInt(static_cast<long>(i)));
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    std::vector<BigInt> S = scaled(m1);
    const std::vector<BigInt> T = scaled(m2);
    for (int r = 0; r < reps; ++r) {
        std::vector<BigInt> next;
        next.reserve(S.size() * T.size());
        for (const auto& x : S)
            for (const auto& y : T) next.push_back(x + y);
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        S = std::move(next);
    }
    DilatedCovering out;
    out.sumset_size = S.size();
    // value = n * resolution / D; cell = floor(value / rho)
    const Rational w = rho * Rational(D) / A.frame().resolution();
    std::vector<BigInt> cells;
    cells.reserve(S.size());
    for (const auto& n : S) cells.push_back(floor_q(Rational(n) / w));
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    out.count = cells.size();
    return out;
}

ExactPower dilated_sumset_bound(const KProfile& p, const Rational& level, const Rational& d1, const Rational& d2) {
    Rational m = std::max(Rational(abs(d1)), Rational(abs(d2)));
    if (sgn(m) == 0 || sgn(level) <= 0) throw Error(ErrorKind::InvalidArgument, "dilates and level must be nonzero");
    return p.K1 * p.K2 * p.K3.pow(Rational(8)) * p.K4.pow(Rational(4)) * ExactPower(pow_q(level, 4)) *
           ExactPower::power(m, p.alpha) * ExactPower(q_of(p.size));
}

ExponentCheck final_exponent_check(const Rational& alpha) {
    if (sgn(alpha) <= 0 || alpha >= 1) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
    ExponentCheck c;
    c.e1 = (157 + 68 * alpha) / (3 * (155 + 68 * alpha));
    c.e2 = 2 * (39 + 17 * alpha) / (155 + 68 * alpha);
    c.c_over_alpha = c_alpha(alpha) / alpha;
    c.e1.canonicalize();
    c.e2.canonicalize();
    c.c_over_alpha.canonicalize();
    c.ok = c.e1 <= 1 && c.e2 >= c.c_over_alpha;
    return c;
}

}  // namespace flab

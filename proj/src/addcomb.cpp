#include "flab/addcomb.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>

namespace flab {

EdgeSet::EdgeSet(size_t a_size, size_t b_size, std::vector<std::pair<uint32_t, uint32_t>> edges)
    : a_size_(a_size), b_size_(b_size), edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
        throw Error(ErrorKind::InvalidArgument, "duplicate edge");
    for (const auto& [i, j] : edges_)
        if (i >= a_size_ || j >= b_size_) throw Error(ErrorKind::InvalidArgument, "edge index out of range");
}

EdgeSet EdgeSet::complete(size_t a_size, size_t b_size) {
    std::vector<std::pair<uint32_t, uint32_t>> e;
    e.reserve(a_size * b_size);
    for (uint32_t i = 0; i < a_size; ++i)
        for (uint32_t j = 0; j < b_size; ++j) e.emplace_back(i, j);
    return EdgeSet(a_size, b_size, std::move(e));
}

void write_edgeset(std::ostream& os, const EdgeSet& E) {
    os << "EDGESET v1 a=" << E.a_size() << " b=" << E.b_size() << "\n";
    for (const auto& [i, j] : E.edges()) os << i << " " << j << "\n";
}

EdgeSet read_edgeset(std::istream& is) {
    std::string line;
    while (std::getline(is, line) && line.empty()) {
    }
    std::istringstream hs(line);
    std::string tag, ver, a, b;
    hs >> tag >> ver >> a >> b;
    if (tag != "EDGESET" || ver != "v1" || a.rfind("a=", 0) != 0 || b.rfind("b=", 0) != 0)
        throw Error(ErrorKind::Parse, "bad EDGESET header: " + line);
    size_t na = std::stoul(a.substr(2)), nb = std::stoul(b.substr(2));
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    while (true) {
        int c = is.peek();
        if (c == EOF || std::isalpha(c)) break;
        if (!std::getline(is, line) || line.empty()) break;
        std::istringstream ss(line);
        uint32_t i, j;
        if (!(ss >> i >> j)) throw Error(ErrorKind::Parse, "bad edge line: " + line);
        edges.emplace_back(i, j);
    }
    return EdgeSet(na, nb, std::move(edges));
}

LatticePoints LatticePoints::make(LatticeMode mode, std::vector<int64_t> elements) {
    std::sort(elements.begin(), elements.end());
    elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
    return LatticePoints{mode, std::move(elements)};
}

GridSet1D partial_sum(const GridSet1D& A, const GridSet1D& B, const EdgeSet& E, SumOp op) {
    if (A.frame().bits() != B.frame().bits()) throw Error(ErrorKind::InvalidArgument, "operands on different grids");
    if (E.a_size() != A.size() || E.b_size() != B.size())
        throw Error(ErrorKind::InvalidArgument, "edge set does not match operand sizes");
    std::vector<int64_t> out;
    out.reserve(E.size());
    const auto& a = A.indices();
    const auto& b = B.indices();
    for (const auto& [i, j] : E.edges()) out.push_back(op == SumOp::Plus ? a[i] + b[j] : a[i] - b[j]);
    return GridSet1D(A.frame(), std::move(out), Domain::Free);
}

GridSet1D full_sum(const GridSet1D& A, const GridSet1D& B, SumOp op) {
    if (A.frame().bits() != B.frame().bits()) throw Error(ErrorKind::InvalidArgument, "operands on different grids");
    std::vector<int64_t> out;
    out.reserve(A.size() * B.size());
    for (int64_t a : A.indices())
        for (int64_t b : B.indices()) out.push_back(op == SumOp::Plus ? a + b : a - b);
    return GridSet1D(A.frame(), std::move(out), Domain::Free);
}

static void check_group(const LatticePoints& A, const LatticePoints& B) {
    if (A.mode != B.mode) throw Error(ErrorKind::GroupMismatch, "energy of lattice points in different groups");
}

std::vector<std::pair<int64_t, uint64_t>> representation_function(const LatticePoints& A, const LatticePoints& B) {
    check_group(A, B);
    std::vector<std::pair<int64_t, uint64_t>> out;
    if (A.elements.empty() || B.elements.empty()) return out;
    int64_t lo = A.elements.front() + B.elements.front();
    int64_t hi = A.elements.back() + B.elements.back();
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    uint64_t pairs = static_cast<uint64_t>(A.size()) * B.size();
    if (span <= std::max<uint64_t>(1u << 20, 4 * pairs)) {
        std::vector<uint64_t> hist(span, 0);
        for (int64_t a : A.elements)
            for (int64_t b : B.elements) ++hist[static_cast<size_t>(a + b - lo)];
        for (uint64_t s = 0; s < span; ++s)
            if (hist[s]) out.emplace_back(lo + static_cast<int64_t>(s), hist[s]);
        return out;
    }
    std::vector<int64_t> sums;
    sums.reserve(pairs);
    for (int64_t a : A.elements)
        for (int64_t b : B.elements) sums.push_back(a + b);
    std::sort(sums.begin(), sums.end());
    for (size_t i = 0; i < sums.size();) {
        size_t j = i;
        while (j < sums.size() && sums[j] == sums[i]) ++j;
        out.emplace_back(sums[i], j - i);
        i = j;
    }
    return out;
}

uint64_t additive_energy(const LatticePoints& A, const LatticePoints& B) {
    unsigned __int128 total = 0;
    for (const auto& [s, r] : representation_function(A, B)) total += static_cast<unsigned __int128>(r) * r;
    if (total > UINT64_MAX) throw Error(ErrorKind::InvalidArgument, "energy overflows 64 bits");
    return static_cast<uint64_t>(total);
}

uint64_t additive_energy_bruteforce(const LatticePoints& A, const LatticePoints& B) {
    check_group(A, B);
    uint64_t n = 0;
    for (int64_t a : A.elements)
        for (int64_t a2 : A.elements)
            for (int64_t b : B.elements)
                for (int64_t b2 : B.elements)
                    if (a + b == a2 + b2) ++n;
    return n;
}

bool multiplicative_point_within(int64_t e, int delta_exp, const Rational& x, const Rational& bound) {
    // |2^{e/N} - x| <= bound  <=>  x - bound <= 2^{e/N} <= x + bound, with N = 2^delta_exp.
    auto pow_le = [&](const Rational& y) {  // 2^{e/N} <= y
        if (sgn(y) <= 0) return false;
        unsigned long N = 1ul << delta_exp;
        BigInt lhs, pn, qn;
        mpz_pow_ui(pn.get_mpz_t(), y.get_num_mpz_t(), N);
        mpz_pow_ui(qn.get_mpz_t(), y.get_den_mpz_t(), N);
        if (e >= 0) {
            lhs = qn;
            mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), static_cast<unsigned long>(e));
            return lhs <= pn;
        }
        BigInt rhs = pn;
        mpz_mul_2exp(rhs.get_mpz_t(), rhs.get_mpz_t(), static_cast<unsigned long>(-e));
        return qn <= rhs;
    };
    auto pow_ge = [&](const Rational& y) {  // 2^{e/N} >= y
        if (sgn(y) <= 0) return true;
        unsigned long N = 1ul << delta_exp;
        BigInt pn, qn;
        mpz_pow_ui(pn.get_mpz_t(), y.get_num_mpz_t(), N);
        mpz_pow_ui(qn.get_mpz_t(), y.get_den_mpz_t(), N);
        if (e >= 0) {
            BigInt lhs = qn;
            mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), static_cast<unsigned long>(e));
            return lhs >= pn;
        }
        BigInt rhs = pn;
        mpz_mul_2exp(rhs.get_mpz_t(), rhs.get_mpz_t(), static_cast<unsigned long>(-e));
        return qn >= rhs;
    };
    return pow_ge(Rational(x - bound)) && pow_le(Rational(x + bound));
}

namespace {

// Exact ceil/floor of N*log2(y) for y > 0, N = 2^d. Uses long double, falling back to
// big-integer powers when the value sits too close to an integer.
int64_t scaled_log2_bound(const Rational& y, int d, bool want_ceil) {
    long double v = std::ldexp(static_cast<long double>(log2_approx(BigInt(y.get_num()))) -
                                   static_cast<long double>(log2_approx(BigInt(y.get_den()))),
                               d);
    long double nearest = std::nearbyint(v);
    long double slack = 1e-8L * (1.0L + std::fabs(v) / 1024);
    if (std::fabs(v - nearest) > slack) return static_cast<int64_t>(want_ceil ? std::ceil(v) : std::floor(v));
    int64_t e = static_cast<int64_t>(nearest);
    unsigned long N = 1ul << d;
    BigInt pn, qn;
    mpz_pow_ui(pn.get_mpz_t(), y.get_num_mpz_t(), N);
    mpz_pow_ui(qn.get_mpz_t(), y.get_den_mpz_t(), N);
    // sign of 2^e * q^N - p^N
    auto cmp_at = [&](int64_t ee) {
        BigInt l = qn, r = pn;
        if (ee >= 0)
            mpz_mul_2exp(l.get_mpz_t(), l.get_mpz_t(), static_cast<unsigned long>(ee));
        else
            mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), static_cast<unsigned long>(-ee));
        return cmp(l, r);
    };
    int c = cmp_at(e);
    if (c == 0) return e;
    if (want_ceil) return c > 0 ? e : e + 1;
    return c < 0 ? e : e - 1;
}

}  // namespace

std::vector<int64_t> embed_element(const Rational& x, const ScaleFrame& frame, LatticeMode mode) {
    const int d = frame.delta_exp;
    const Rational delta = frame.delta();
    std::vector<int64_t> out;
    if (mode == LatticeMode::Additive) {
        // t with |x - t delta| <= delta
        BigInt lo = ceil_q(x / delta - 1), hi = floor_q(x / delta + 1);
        for (BigInt t = lo; t <= hi; ++t) out.push_back(t.get_si());
        return out;
    }
    if (sgn(x) <= 0) throw Error(ErrorKind::DomainError, "multiplicative embedding of a non-positive value");
    Rational lo_v = x - 2 * delta, hi_v = x + 2 * delta;
    int64_t clamp = static_cast<int64_t>(4) << d;  // ceil(4/delta)
    int64_t lo = sgn(lo_v) > 0 ? scaled_log2_bound(lo_v, d, true) : -clamp;
    int64_t hi = scaled_log2_bound(hi_v, d, false);
    lo = std::max(lo, -clamp);
    hi = std::min(hi, clamp);
    for (int64_t e = lo; e <= hi; ++e) out.push_back(e);
    return out;
}

LatticePoints embed(const GridSet1D& A, const ScaleFrame& frame, LatticeMode mode) {
    if (mode == LatticeMode::Multiplicative && A.domain() != Domain::Shifted) {
        for (int64_t i : A.indices())
            if (i <= 0) throw Error(ErrorKind::DomainError, "multiplicative embedding needs positive values");
        if (A.domain() != Domain::Free)
            throw Error(ErrorKind::DomainError, "multiplicative embedding needs the [1,2] domain");
    }
    if (A.frame().bits() < frame.delta_exp) throw Error(ErrorKind::InvalidScale, "delta below grid resolution");
    std::vector<int64_t> all;
    for (size_t i = 0; i < A.size(); ++i) {
        auto pts = embed_element(A.value(i), frame, mode);
        if (pts.empty()) throw Error(ErrorKind::DomainError, "element without a lattice point in range");
        all.insert(all.end(), pts.begin(), pts.end());
    }
    return LatticePoints::make(mode, std::move(all));
}

uint64_t discretized_energy(const GridSet1D& A, const GridSet1D& B, const ScaleFrame& frame, LatticeMode mode) {
    return additive_energy(embed(A, frame, mode), embed(B, frame, mode));
}

CauchySchwarzCheck energy_cauchy_schwarz_check(const LatticePoints& A, const LatticePoints& B) {
    check_group(A, B);
    BigInt eab = static_cast<unsigned long>(additive_energy(A, B));
    BigInt eaa = static_cast<unsigned long>(additive_energy(A, A));
    BigInt ebb = static_cast<unsigned long>(additive_energy(B, B));
    CauchySchwarzCheck c{eab * eab, eaa * ebb, false};
    c.holds = c.lhs <= c.rhs;
    return c;
}

Rational bsg_c1() { return Rational(1, 2); }
Rational bsg_c2() { return Rational(2897); }

BsgResult bsg_extract(const GridSet1D& A, const GridSet1D& B, const EdgeSet& E) {
    if (E.empty()) throw Error(ErrorKind::EmptyInput, "BSG needs a nonempty edge set");
    if (E.a_size() != A.size() || E.b_size() != B.size())
        throw Error(ErrorKind::InvalidArgument, "edge set does not match operand sizes");
    const size_t na = A.size(), nb = B.size(), ne = E.size();
    const size_t wa = (na + 63) / 64, wb = (nb + 63) / 64;

    std::vector<uint64_t> nbrA(na * wb, 0), nbrB(nb * wa, 0);  // B-neighbours of a, A-neighbours of b
    for (const auto& [i, j] : E.edges()) {
        nbrA[i * wb + j / 64] |= uint64_t(1) << (j % 64);
        nbrB[j * wa + i / 64] |= uint64_t(1) << (i % 64);
    }
    // bad(a,a') <=> codeg < lambda = |E|^2 / (32 na^2 nb)  <=>  32 codeg na^2 nb < |E|^2
    const BigInt lam_num = BigInt(static_cast<unsigned long>(ne)) * static_cast<unsigned long>(ne);
    const BigInt lam_den = BigInt(32) * static_cast<unsigned long>(na) * static_cast<unsigned long>(na) *
                           static_cast<unsigned long>(nb);
    std::vector<uint64_t> bad(na * wa, 0);
    for (size_t a = 0; a < na; ++a)
        for (size_t a2 = a; a2 < na; ++a2) {
            unsigned long codeg = 0;
            for (size_t w = 0; w < wb; ++w) codeg += std::popcount(nbrA[a * wb + w] & nbrA[a2 * wb + w]);
            if (lam_den * codeg < lam_num) {
                bad[a * wa + a2 / 64] |= uint64_t(1) << (a2 % 64);
                bad[a2 * wa + a / 64] |= uint64_t(1) << (a % 64);
            }
        }
    auto bad_partners = [&](size_t a, const uint64_t* within) {
        size_t n = 0;
        for (size_t w = 0; w < wa; ++w) n += std::popcount(bad[a * wa + w] & within[w]);
        return n;
    };

    size_t best_b = 0;
    bool have = false;
    BigInt best_exact;
    for (size_t b = 0; b < nb; ++b) {
        const uint64_t* nb_bits = &nbrB[b * wa];
        size_t deg = 0, badpairs = 0;
        for (size_t a = 0; a < na; ++a)
            if (nb_bits[a / 64] >> (a % 64) & 1) {
                ++deg;
                badpairs += bad_partners(a, nb_bits);
            }
        BigInt score = BigInt(static_cast<unsigned long>(deg)) * static_cast<unsigned long>(deg) -
                       BigInt(16) * static_cast<unsigned long>(badpairs);
        if (!have || score > best_exact) {
            have = true;
            best_exact = score;
            best_b = b;
        }
    }

    const uint64_t* pivot = &nbrB[best_b * wa];
    size_t deg = 0;
    for (size_t a = 0; a < na; ++a) deg += pivot[a / 64] >> (a % 64) & 1;
    std::vector<size_t> keep;
    std::vector<int64_t> keep_idx;
    for (size_t a = 0; a < na; ++a) {
        if (!(pivot[a / 64] >> (a % 64) & 1)) continue;
        if (4 * bad_partners(a, pivot) <= deg) {
            keep.push_back(a);
            keep_idx.push_back(A.indices()[a]);
        }
    }

    BsgResult res;
    res.a_prime = GridSet1D(A.frame(), keep_idx, A.domain());
    res.a_prime_positions = keep;
    BsgReport& r = res.report;
    r.pivot = best_b;
    r.pivot_degree = deg;
    r.codegree_threshold = make_q(lam_num, lam_den);
    r.a_prime_size = keep.size();
    r.difference_size = full_sum(res.a_prime, res.a_prime, SumOp::Minus).size();
    r.partial_difference_size = partial_sum(A, B, E, SumOp::Minus).size();
    const Rational nA(static_cast<unsigned long>(na)), nB(static_cast<unsigned long>(nb)),
        nE(static_cast<unsigned long>(ne)), X(static_cast<unsigned long>(r.partial_difference_size));
    r.size_lower_bound = bsg_c1() * nE / nB;
    r.difference_upper_bound = bsg_c2() * pow_q(nA, 4) * pow_q(nB, 3) * pow_q(X, 4) / pow_q(nE, 5);
    r.size_ok = Rational(static_cast<unsigned long>(r.a_prime_size)) >= r.size_lower_bound;
    r.difference_ok = Rational(static_cast<unsigned long>(r.difference_size)) <= r.difference_upper_bound;
    return res;
}

}  // namespace flab

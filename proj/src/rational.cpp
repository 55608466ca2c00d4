#include "flab/rational.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace flab {

Rational make_q(long num, long den) {
    if (den == 0) throw Error(ErrorKind::InvalidArgument, "zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

Rational make_q(const BigInt& num, const BigInt& den) {
    if (den == 0) throw Error(ErrorKind::InvalidArgument, "zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

BigInt pow2z(unsigned long e) {
    BigInt z = 1;
    mpz_mul_2exp(z.get_mpz_t(), z.get_mpz_t(), e);
    return z;
}

Rational pow2q(long e) {
    if (e >= 0) return Rational(pow2z(static_cast<unsigned long>(e)));
    return make_q(BigInt(1), pow2z(static_cast<unsigned long>(-e)));
}

Rational pow_q(const Rational& base, long e) {
    BigInt n, d;
    unsigned long ae = static_cast<unsigned long>(e < 0 ? -e : e);
    mpz_pow_ui(n.get_mpz_t(), base.get_num_mpz_t(), ae);
    mpz_pow_ui(d.get_mpz_t(), base.get_den_mpz_t(), ae);
    if (e < 0) {
        if (n == 0) throw Error(ErrorKind::InvalidArgument, "zero to a negative power");
        return make_q(d, n);
    }
    return make_q(n, d);
}

static std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    size_t b = s.find_last_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

Rational parse_q(const std::string& raw) {
    std::string s = trim(raw);
    if (s.empty()) throw Error(ErrorKind::Parse, "empty rational");
    try {
        auto caret = s.find('^');
        if (caret != std::string::npos) {
            Rational base = parse_q(s.substr(0, caret));
            long e = std::stol(s.substr(caret + 1));
            return pow_q(base, e);
        }
        auto dot = s.find('.');
        if (dot != std::string::npos) {
            bool neg = s[0] == '-';
            std::string ip = s.substr(neg ? 1 : 0, dot - (neg ? 1 : 0));
            std::string fp = s.substr(dot + 1);
            if (ip.empty()) ip = "0";
            BigInt whole(ip + fp, 10);
            BigInt den = 1;
            for (size_t i = 0; i < fp.size(); ++i) den *= 10;
            Rational q = make_q(whole, den);
            return neg ? Rational(-q) : q;
        }
        Rational q(s, 10);
        if (q.get_den() == 0) throw Error(ErrorKind::Parse, "zero denominator in '" + s + "'");
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw Error(ErrorKind::Parse, "cannot parse rational '" + s + "'");
    } catch (const std::out_of_range&) {
        throw Error(ErrorKind::Parse, "rational out of range '" + s + "'");
    }
}

std::string to_string_q(const Rational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

bool is_pow2(const Rational& q) {
    if (sgn(q) <= 0) return false;
    const BigInt& n = q.get_num();
    const BigInt& d = q.get_den();
    if (n == 1) return mpz_popcount(d.get_mpz_t()) == 1;
    if (d == 1) return mpz_popcount(n.get_mpz_t()) == 1;
    return false;
}

long log2_exact(const Rational& q) {
    if (!is_pow2(q)) throw Error(ErrorKind::InvalidScale, "not a power of two: " + to_string_q(q));
    if (q.get_num() == 1) return -static_cast<long>(mpz_sizeinbase(q.get_den_mpz_t(), 2) - 1);
    return static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 2) - 1);
}

double log2_approx(const BigInt& z) {
    if (z <= 0) return -INFINITY;
    long exp = 0;
    double m = mpz_get_d_2exp(&exp, z.get_mpz_t());
    return std::log2(m) + static_cast<double>(exp);
}

double log2_approx(const Rational& q) {
    return log2_approx(BigInt(q.get_num())) - log2_approx(BigInt(q.get_den()));
}

BigInt floor_q(const Rational& q) {
    BigInt r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

BigInt ceil_q(const Rational& q) {
    BigInt r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

// ExactPower

ExactPower::ExactPower() = default;

ExactPower::ExactPower(const Rational& value) {
    if (sgn(value) <= 0) throw Error(ErrorKind::InvalidArgument, "ExactPower needs a positive value");
    factors_.emplace_back(value, Rational(1));
    normalize();
}

ExactPower ExactPower::pow2(const Rational& e) {
    ExactPower p;
    p.factors_.emplace_back(Rational(2), e);
    p.normalize();
    return p;
}

ExactPower ExactPower::power(const Rational& base, const Rational& e) {
    if (sgn(base) <= 0) throw Error(ErrorKind::InvalidArgument, "ExactPower needs a positive base");
    ExactPower p;
    p.factors_.emplace_back(base, e);
    p.normalize();
    return p;
}

void ExactPower::normalize() {
    // Pull powers of two out of every base so that equal values share a representation.
    Rational two_exp = 0;
    std::vector<std::pair<Rational, Rational>> odd;
    for (auto& [base, e] : factors_) {
        if (e == 0 || base == 1) continue;
        if (base == 2) {
            two_exp += e;
            continue;
        }
        BigInt n = base.get_num();
        BigInt d = base.get_den();
        unsigned long tn = mpz_scan1(n.get_mpz_t(), 0);
        unsigned long td = mpz_scan1(d.get_mpz_t(), 0);
        mpz_tdiv_q_2exp(n.get_mpz_t(), n.get_mpz_t(), tn);
        mpz_tdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), td);
        two_exp += e * (Rational(static_cast<long>(tn)) - Rational(static_cast<long>(td)));
        Rational ob = make_q(n, d);
        if (ob == 1) continue;
        Rational inv = 1 / ob;
        bool merged = false;
        for (auto& [b2, e2] : odd) {
            if (b2 == ob) {
                e2 += e;
                merged = true;
                break;
            }
            if (b2 == inv) {
                e2 -= e;
                merged = true;
                break;
            }
        }
        if (!merged) odd.emplace_back(ob, e);
    }
    factors_.clear();
    if (two_exp != 0) factors_.emplace_back(Rational(2), two_exp);
    for (auto& f : odd)
        if (f.second != 0) factors_.push_back(f);
}

ExactPower ExactPower::operator*(const ExactPower& o) const {
    ExactPower p;
    p.factors_ = factors_;
    p.factors_.insert(p.factors_.end(), o.factors_.begin(), o.factors_.end());
    p.normalize();
    return p;
}

ExactPower ExactPower::operator/(const ExactPower& o) const { return *this * o.pow(Rational(-1)); }

ExactPower ExactPower::pow(const Rational& e) const {
    ExactPower p;
    p.factors_ = factors_;
    for (auto& f : p.factors_) f.second *= e;
    p.normalize();
    return p;
}

double ExactPower::log2() const {
    double s = 0;
    for (const auto& [b, e] : factors_) s += e.get_d() * log2_approx(b);
    return s;
}

double ExactPower::to_double() const { return std::exp2(log2()); }

int ExactPower::compare(const ExactPower& a, const ExactPower& b) {
    ExactPower r = a / b;
    if (r.factors_.empty()) return 0;
    double approx = 0, scale = 1;
    for (const auto& [base, e] : r.factors_) {
        double t = e.get_d() * log2_approx(base);
        approx += t;
        scale += std::fabs(t);
    }
    if (approx > 1e-9 * scale) return 1;
    if (approx < -1e-9 * scale) return -1;
    BigInt L = 1;
    for (const auto& f : r.factors_) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), f.second.get_den_mpz_t());
    BigInt num = 1, den = 1;
    for (const auto& [base, e] : r.factors_) {
        BigInt n = e.get_num() * (L / e.get_den());
        if (!n.fits_slong_p()) throw Error(ErrorKind::InvalidArgument, "exponent too large for exact comparison");
        long nl = n.get_si();
        BigInt p = base.get_num(), q = base.get_den();
        BigInt pp, qq;
        unsigned long an = static_cast<unsigned long>(nl < 0 ? -nl : nl);
        mpz_pow_ui(pp.get_mpz_t(), p.get_mpz_t(), an);
        mpz_pow_ui(qq.get_mpz_t(), q.get_mpz_t(), an);
        if (nl >= 0) {
            num *= pp;
            den *= qq;
        } else {
            num *= qq;
            den *= pp;
        }
    }
    int c = cmp(num, den);
    return c > 0 ? 1 : (c < 0 ? -1 : 0);
}

bool ExactPower::is_rational() const {
    for (const auto& f : factors_)
        if (f.second.get_den() != 1) return false;
    return true;
}

Rational ExactPower::to_rational() const {
    if (!is_rational()) throw Error(ErrorKind::InvalidArgument, "value is irrational: " + to_string());
    Rational r = 1;
    for (const auto& [b, e] : factors_) r *= pow_q(b, e.get_num().get_si());
    return r;
}

std::string ExactPower::to_string() const {
    if (is_rational()) return to_string_q(to_rational());
    std::ostringstream os;
    bool first = true;
    for (const auto& [b, e] : factors_) {
        if (!first) os << "*";
        first = false;
        os << "(" << to_string_q(b) << ")^(" << to_string_q(e) << ")";
    }
    return os.str();
}

ExactPower max(const ExactPower& a, const ExactPower& b) { return a >= b ? a : b; }

}  // namespace flab

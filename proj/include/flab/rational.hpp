#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace flab {

using Rational = mpq_class;
using BigInt = mpz_class;

enum class ErrorKind {
    InvalidScale,
    InvalidFrame,
    EmptyInput,
    DomainError,
    GroupMismatch,
    InvalidArgument,
    Precondition,
    Singularity,
    PencilMismatch,
    DegenerateInput,
    Parse,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

Rational make_q(long num, long den = 1);
Rational make_q(const BigInt& num, const BigInt& den);
Rational pow2q(long e);
BigInt pow2z(unsigned long e);
Rational pow_q(const Rational& base, long e);

// Parses "p", "p/q", "2^-10" or a finite decimal like "0.125".
Rational parse_q(const std::string& s);
// Always "num/den", also for integers.
std::string to_string_q(const Rational& q);

// Exponent e with q == 2^e, or throws InvalidScale.
long log2_exact(const Rational& q);
bool is_pow2(const Rational& q);

double log2_approx(const BigInt& z);
double log2_approx(const Rational& q);

BigInt floor_q(const Rational& q);
BigInt ceil_q(const Rational& q);

/**
 * Exact positive real of the form prod_i base_i^{exp_i} with rational bases and
 * rational exponents. Comparison clears exponent denominators and compares
 * integers, so values like K^{6+alpha} stay exact.
 */
class ExactPower {
public:
    ExactPower();
    explicit ExactPower(const Rational& value);
    static ExactPower pow2(const Rational& e);
    static ExactPower power(const Rational& base, const Rational& e);

    ExactPower operator*(const ExactPower& o) const;
    ExactPower operator/(const ExactPower& o) const;
    ExactPower pow(const Rational& e) const;

    // -1, 0, +1
    static int compare(const ExactPower& a, const ExactPower& b);
    bool operator<(const ExactPower& o) const { return compare(*this, o) < 0; }
    bool operator<=(const ExactPower& o) const { return compare(*this, o) <= 0; }
    bool operator>(const ExactPower& o) const { return compare(*this, o) > 0; }
    bool operator>=(const ExactPower& o) const { return compare(*this, o) >= 0; }
    bool operator==(const ExactPower& o) const { return compare(*this, o) == 0; }

    bool is_rational() const;
    Rational to_rational() const;  // throws unless is_rational()
    double log2() const;
    double to_double() const;
    std::string to_string() const;
    const std::vector<std::pair<Rational, Rational>>& factors() const { return factors_; }

private:
    void normalize();
    std::vector<std::pair<Rational, Rational>> factors_;
};

ExactPower max(const ExactPower& a, const ExactPower& b);

}  // namespace flab

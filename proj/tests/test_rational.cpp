#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flab/rational.hpp"

using namespace flab;

TEST_CASE("parse and print rationals") {
    CHECK(parse_q("3/4") == make_q(3, 4));
    CHECK(parse_q("2^-10") == make_q(1, 1024));
    CHECK(parse_q("0.125") == make_q(1, 8));
    CHECK(parse_q("-5") == make_q(-5));
    CHECK(to_string_q(make_q(6, 4)) == "3/2");
    CHECK(to_string_q(make_q(7)) == "7/1");
    CHECK_THROWS_AS(parse_q("abc"), Error);
    CHECK_THROWS_AS(parse_q("1/0"), Error);
}

TEST_CASE("powers of two") {
    CHECK(pow2q(-3) == make_q(1, 8));
    CHECK(pow2q(5) == make_q(32));
    CHECK(log2_exact(make_q(1, 64)) == -6);
    CHECK(is_pow2(make_q(1024)));
    CHECK_FALSE(is_pow2(make_q(3, 4)));
    CHECK_THROWS_AS(log2_exact(make_q(3)), Error);
    CHECK(floor_q(make_q(-7, 2)) == -4);
    CHECK(ceil_q(make_q(-7, 2)) == -3);
    CHECK(pow_q(make_q(2, 3), -2) == make_q(9, 4));
}

TEST_CASE("ExactPower compares irrational powers exactly") {
    // 2^{1/2} < 3/2 < 2^{3/5}
    ExactPower r2 = ExactPower::pow2(make_q(1, 2));
    ExactPower a = ExactPower(make_q(3, 2));
    ExactPower b = ExactPower::pow2(make_q(3, 5));
    CHECK(r2 < a);
    CHECK(a < b);
    CHECK(r2.pow(make_q(2)) == ExactPower(make_q(2)));
    CHECK((r2 * r2).is_rational());
    CHECK((r2 * r2).to_rational() == 2);
    // 3^{1/3} 9^{1/3} = 3
    ExactPower c = ExactPower::power(make_q(3), make_q(1, 3)) * ExactPower::power(make_q(9), make_q(1, 3));
    CHECK(c == ExactPower(make_q(3)));
    CHECK((ExactPower(make_q(5)) / ExactPower(make_q(5))) == ExactPower());
    CHECK(max(r2, a) == a);
    CHECK(doctest::Approx(b.log2()) == 0.6);
}

TEST_CASE("ExactPower with many factors stays exact") {
    // (2/3)^{1/2} * (3/2)^{1/2} = 1
    ExactPower x = ExactPower::power(make_q(2, 3), make_q(1, 2)) * ExactPower::power(make_q(3, 2), make_q(1, 2));
    CHECK(x == ExactPower());
    // 6^{1/4} > 2^{1/2} since 6 > 4
    CHECK(ExactPower::power(make_q(6), make_q(1, 4)) > ExactPower::pow2(make_q(1, 2)));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "flab/certificates.hpp"

using namespace flab;

static KProfile unit_profile(const Rational& alpha, int delta_exp, const Rational& eps) {
    KProfile p;
    p.alpha = alpha;
    p.delta = pow2q(-delta_exp);
    p.epsilon = eps;
    return p;
}

TEST_CASE("c(alpha)") {
    CHECK(c_alpha(make_q(1, 2)) == make_q(1, 4536));
    CHECK(c_alpha(make_q(1)) == 0);
    Rational tiny = make_q(1, 1000000);
    Rational ratio = c_alpha(tiny) / tiny;
    CHECK(std::fabs(ratio.get_d() - 1.0 / 930) < 1e-7);
    CHECK_THROWS_AS(c_alpha(make_q(0)), Error);
    CHECK_THROWS_AS(c_alpha(make_q(3, 2)), Error);
    // concave: second differences on a uniform grid are nonpositive
    const Rational h = make_q(1, 1001);
    for (long i = 2; i < 1000; ++i) {
        Rational x = make_q(i, 1001);
        CHECK(c_alpha(x) > 0);
        CHECK(c_alpha(x + h) - 2 * c_alpha(x) + c_alpha(x - h) <= 0);
    }
}

TEST_CASE("exponent check") {
    ExponentCheck e = final_exponent_check(make_q(1, 2));
    CHECK(e.e1 == make_q(191, 567));
    CHECK(e.e2 == make_q(95, 189));
    CHECK(e.c_over_alpha == make_q(1, 2268));
    CHECK(e.ok);
    ExponentCheck hi = final_exponent_check(make_q(999999, 1000000));
    CHECK(std::fabs(hi.e1.get_d() - 225.0 / 669) < 1e-6);
    ExponentCheck lo = final_exponent_check(make_q(1, 1000000));
    CHECK(std::fabs(lo.e1.get_d() - 157.0 / 465) < 1e-6);
    CHECK_THROWS_AS(final_exponent_check(make_q(1)), Error);
}

TEST_CASE("certificate threshold") {
    for (int d : {12, 20, 64}) {
        Rational delta = pow2q(-d);
        ExactPower K = gkz_threshold(make_q(1, 2), delta, 0);
        CHECK(K == ExactPower::power(delta, make_q(-1, 128)));
        KProfile p = unit_profile(make_q(1, 2), d, 0);
        p.K3 = K;
        p.K4 = K;
        GkzCertificate c = gkz_certificate(p);
        CHECK(c.lhs == c.rhs);
        CHECK(c.satisfied);
    }
    KProfile ones = unit_profile(make_q(1, 2), 20, make_q(1, 100));
    CHECK_FALSE(gkz_certificate(ones).satisfied);
}

TEST_CASE("certificate is monotone in every constant") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 300; ++t) {
        KProfile p = unit_profile(make_q(1, 2), 16, make_q(1, 20));
        ExactPower* ks[4] = {&p.K1, &p.K2, &p.K3, &p.K4};
        for (auto* k : ks) *k = ExactPower(make_q(long(1 + rng() % 4), 1));
        bool before = gkz_certificate(p).satisfied;
        *ks[rng() % 4] = *ks[rng() % 4] * ExactPower(make_q(long(2 + rng() % 3)));
        if (before) CHECK(gkz_certificate(p).satisfied);
    }
}

TEST_CASE("s and gamma") {
    SGamma a = s_gamma(unit_profile(make_q(1, 2), 20, make_q(1, 10)));
    CHECK_FALSE(a.degenerate);
    CHECK(a.s == ExactPower(pow2q(-12)));
    REQUIRE(a.gamma.has_value());
    CHECK(*a.gamma == make_q(1, 5));
    SGamma b = s_gamma(unit_profile(make_q(1, 2), 40, make_q(1, 10)));
    CHECK(b.s == ExactPower(pow2q(-24)));
    REQUIRE(b.gamma.has_value());
    CHECK(*b.gamma == make_q(1, 5));
    KProfile huge = unit_profile(make_q(1, 2), 20, make_q(1, 10));
    huge.K3 = ExactPower(pow2q(40));
    SGamma c = s_gamma(huge);
    CHECK(c.degenerate);
    CHECK_FALSE(c.strong_bound.empty());
}

TEST_CASE("quotient dichotomy") {
    ScaleFrame f = ScaleFrame::make(1, 4, 4);
    GridSet1D grid(f, {0, 1, 2, 3});
    DichotomyOutcome d = quotient_dichotomy(grid, make_q(2), make_q(1, 4), f);
    CHECK(d.kind == DichotomyCase::Dense);
    CHECK(d.covering == 4);
    for (Rational q : {make_q(0), make_q(1, 3), make_q(1, 2), make_q(2, 3), make_q(1)})
        CHECK(std::find(d.quotients.begin(), d.quotients.end(), q) != d.quotients.end());

    // one admissible difference 2 delta^gamma = 1/2: B cap [0,1] = {0, 1}
    GridSet1D pair(f, {0, 8});
    DichotomyOutcome g = quotient_dichotomy(pair, make_q(1, 2), make_q(1, 8), f);
    CHECK(g.kind == DichotomyCase::Gap);
    CHECK(g.quotients == std::vector<Rational>{0, 1});
    CHECK(g.witness == make_q(1, 4));
    CHECK(distance_to(g.quotients, g.witness / 2) >= g.s);
    CHECK(distance_to(g.quotients, (g.witness + 1) / 2) >= g.s);

    CHECK_THROWS_AS(quotient_dichotomy(GridSet1D(f, {3}), make_q(1, 2), make_q(1, 8), f), Error);
    // differences never exceed delta^gamma
    CHECK_THROWS_AS(quotient_dichotomy(GridSet1D(f, {0, 1}), make_q(1, 2), make_q(1, 8), f), Error);
}

TEST_CASE("gap witnesses pass the re-check on random sets") {
    std::mt19937_64 rng(12);
    ScaleFrame f = ScaleFrame::make(1, 6, 6);
    for (int t = 0; t < 40; ++t) {
        std::vector<int64_t> v;
        for (int i = 0; i < 5; ++i) v.push_back(int64_t(rng() % 64));
        GridSet1D A(f, v);
        if (A.size() < 2 || A.indices().back() - A.indices().front() <= 8) continue;
        Rational s = make_q(1, long(4 + rng() % 60));
        DichotomyOutcome o = quotient_dichotomy(A, make_q(1, 2), s, f);
        if (o.kind == DichotomyCase::Gap) {
            CHECK(distance_to(o.quotients, o.witness / 2) >= s);
            CHECK(distance_to(o.quotients, (o.witness + 1) / 2) >= s);
        } else {
            CHECK(o.covering >= 1);
        }
    }
}

TEST_CASE("dilated sumsets") {
    ScaleFrame f = ScaleFrame::make(1, 4, 4);
    GridSet1D A(f, {0, 1});
    CHECK(dilated_sumset_covering(A, 1, 1, 2, f.resolution()).count == 4);
    GridSet1D B(f, {0, 3, 9});
    CHECK(dilated_sumset_covering(B, 1, 0, 1, f.resolution()).count == 3);
    CHECK(dilated_sumset_covering(B, 1, 0, 1, make_q(1, 2)).count == covering_number(B, 1));
    CHECK_THROWS_AS(dilated_sumset_covering(B, 1, 1, 0, f.resolution()), Error);
}

TEST_CASE("measured profiles") {
    ScaleFrame f = ScaleFrame::make(5, 2, 10);
    std::vector<int64_t> all;
    for (int64_t i = 1024; i < 2048; ++i) all.push_back(i);
    KProfile full = measure_K(GridSet1D(f, all, Domain::Shifted), make_q(1, 2), f);
    CHECK(full.K1 == ExactPower());
    CHECK(full.raw_K1 == ExactPower(make_q(32, 1024)));
    CHECK(full.K2 == ExactPower(make_q(32)));

    KProfile one = measure_K(GridSet1D(f, {1500}, Domain::Shifted), make_q(1, 2), f);
    CHECK(one.K1 == ExactPower(make_q(32)));
    CHECK(one.K2 == ExactPower());
    CHECK(one.K3 == ExactPower());

    ScaleFrame g = ScaleFrame::make(6, 2, 12);
    std::vector<std::vector<int>> keep{{0, 3}, {1, 2}, {0, 2}, {1, 3}, {0, 3}, {0, 1}};
    GridSet1D C = cantor_generator(g, keep);
    std::vector<int64_t> shifted;
    for (int64_t i : C.indices()) shifted.push_back(i + 4096);
    KProfile cp = measure_K(GridSet1D(g, shifted, Domain::Shifted), make_q(1, 2), g);
    CHECK(cp.size == 64);
    CHECK(gkz_certificate(cp).satisfied);
    CHECK(cp.K1 >= ExactPower());

    CHECK_THROWS_AS(measure_K(GridSet1D(g, {}, Domain::Shifted), make_q(1, 2), g), Error);
}

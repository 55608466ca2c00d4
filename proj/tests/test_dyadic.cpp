#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "flab/dyadic.hpp"

using namespace flab;

static std::vector<int64_t> range(int64_t lo, int64_t hi) {
    std::vector<int64_t> v;
    for (int64_t i = lo; i < hi; ++i) v.push_back(i);
    return v;
}

TEST_CASE("frame conventions") {
    for (int d = 4; d <= 30; ++d) {
        ScaleFrame p = ScaleFrame::from_delta(d, make_q(1, 4), FrameConvention::Plain);
        CHECK(p.k == 4);
        CHECK(p.bits() >= d);
        CHECK(p.k * (p.T - 1) < d);
        ScaleFrame s = ScaleFrame::from_delta(d, make_q(1, 4), FrameConvention::Sixth);
        // 2^{-kT} <= delta / 6 < 2^{-k(T-1)}
        CHECK(pow2q(-s.bits()) <= s.delta() / 6);
        CHECK(s.delta() / 6 < pow2q(-s.k * (s.T - 1)));
    }
    CHECK_THROWS_AS(ScaleFrame::from_delta(0, make_q(1, 4)), Error);
    CHECK_THROWS_AS(ScaleFrame::make(2, 2, 5), Error);
}

TEST_CASE("covering numbers") {
    ScaleFrame f = ScaleFrame::make(5, 2, 10);
    // {0, 0.5, 0.9} at rho = 1/2
    GridSet1D X(f, {0, 512, 921});
    CHECK(covering_number(X, 1) == 2);
    CHECK(covering_number(X, make_q(1, 2)) == 2);
    CHECK(covering_number(GridSet1D(f, {}), 1) == 0);
    CHECK(covering_number(X, 10) == 3);
    CHECK(covering_number(X, 0) == 1);

    // Stage-3 Cantor set with digits {0, 3} of 4 at rho = 2^-2
    ScaleFrame c3 = ScaleFrame::make(3, 2, 6);
    GridSet1D C = cantor_generator(c3, {{0, 3}, {0, 3}, {0, 3}});
    CHECK(C.size() == 8);
    CHECK(covering_number(C, 2) == 2);
    CHECK(covering_number(C, 4) == 4);

    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        std::vector<int64_t> v;
        for (int i = 0; i < 40; ++i) v.push_back(int64_t(rng() % 1024));
        GridSet1D Y(f, v);
        size_t prev = 0;
        for (int e = 0; e <= 10; ++e) {
            size_t n = covering_number(Y, e);
            CHECK(n >= prev);
            prev = n;
        }
        CHECK(prev == Y.size());
    }
}

TEST_CASE("covering numbers in the plane") {
    ScaleFrame f = ScaleFrame::make(2, 2, 4);
    GridSet2D P(f, {{0, 0}, {1, 1}, {8, 0}, {15, 15}});
    CHECK(covering_number(P, 1) == 3);
    CHECK(covering_number(P, 4) == 4);
    CHECK(covering_number(P, 0) == 1);
}

TEST_CASE("neighborhoods") {
    ScaleFrame f = ScaleFrame::make(5, 2, 10);
    GridSet1D X(f, {512});
    GridSet1D N = neighborhood(X, 10);
    CHECK(N.indices() == std::vector<int64_t>{511, 512, 513});
    CHECK(neighborhood(GridSet1D(f, {}), 10).empty());
    GridSet1D ends(f, {0, 1023});
    CHECK(neighborhood(ends, 0).size() == 1024);
    // clipped at the boundary of [0,1)
    CHECK(neighborhood(GridSet1D(f, {0}), 10).indices() == std::vector<int64_t>{0, 1});

    GridSet2D P(f, {{5, 5}});
    CHECK(neighborhood(P, 10).size() == 9);
}

TEST_CASE("nonconcentration constants") {
    ScaleFrame f = ScaleFrame::make(5, 2, 10);
    GridSet1D full(f, range(0, 1024));
    CHECK(nonconcentration_constant(full, make_q(1, 2), f) == ExactPower(make_q(32)));
    CHECK(nonconcentration_constant(GridSet1D(f, {300}), make_q(1, 2), f) == ExactPower(make_q(1)));
    std::vector<std::vector<int>> keep(5, {0, 2});
    GridSet1D C = cantor_generator(f, keep);
    CHECK(C.size() == 32);
    CHECK(nonconcentration_constant(C, make_q(1, 2), f) <= ExactPower(make_q(2)));
    // Rescaling by 2^-kT at alpha = 1 of the full grid: K = 1.
    CHECK(nonconcentration_constant(full, make_q(1), f) == ExactPower(make_q(1)));
    CHECK_THROWS_AS(nonconcentration_constant(GridSet1D(f, {}), make_q(1, 2), f), Error);
}

TEST_CASE("Cantor generator") {
    ScaleFrame f = ScaleFrame::make(2, 2, 4);
    CHECK(cantor_generator(f, {{0, 3}, {0, 3}}).indices() == std::vector<int64_t>{0, 3, 12, 15});
    CHECK(cantor_generator(f, {{0}, {0}}).indices() == std::vector<int64_t>{0});
    CHECK(cantor_generator(f, {{0, 1, 2, 3}, {0, 1, 2, 3}}).size() == 16);
    CHECK_THROWS_AS(cantor_generator(f, {{0, 3}}), Error);
    CHECK_THROWS_AS(cantor_generator(f, {{0, 4}, {0}}), Error);
}

TEST_CASE("dyadic cells are nested or disjoint") {
    ScaleFrame f = ScaleFrame::make(4, 3, 12);
    std::mt19937_64 rng(11);
    for (int t = 0; t < 2000; ++t) {
        DyadicCell a = cell_of(f, int64_t(rng() % 4096), int(rng() % 5));
        DyadicCell b = cell_of(f, int64_t(rng() % 4096), int(rng() % 5));
        bool nested = cell_contains(f, a, b) || cell_contains(f, b, a);
        CHECK(nested != cells_disjoint(f, a, b));
    }
}

TEST_CASE("GRIDSET round trip") {
    ScaleFrame f = ScaleFrame::make(3, 3, 9);
    GridSet1D X(f, {1, 7, 100, 511}, Domain::Unit);
    std::stringstream ss;
    write_gridset(ss, X);
    CHECK(read_gridset1d(ss, f) == X);

    GridSet2D P(f, {{1, 2}, {-3, 4}, {100, 0}}, Domain::Free);
    std::stringstream s2;
    write_gridset(s2, P);
    CHECK(read_gridset2d(s2, f) == P);

    std::stringstream bad("GRIDSET nonsense");
    CHECK_THROWS_AS(read_gridset1d(bad, f), Error);
}

TEST_CASE("domain checks") {
    ScaleFrame f = ScaleFrame::make(2, 2, 4);
    CHECK_THROWS_AS(GridSet1D(f, {16}), Error);
    CHECK_NOTHROW(GridSet1D(f, {16, 31}, Domain::Shifted));
    CHECK_THROWS_AS(GridSet1D(f, {15}, Domain::Shifted), Error);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "flab/moran.hpp"

using namespace flab;

TEST_CASE("regularity of simple sets") {
    ScaleFrame f = ScaleFrame::make(2, 2, 4);
    std::vector<int64_t> all;
    for (int i = 0; i < 16; ++i) all.push_back(i);
    CHECK(is_moran_regular(GridSet1D(f, all), Branching{{4, 4}}));
    CHECK_FALSE(is_moran_regular(GridSet1D(f, all), Branching{{2, 4}}));
    GridSet1D C = cantor_generator(f, {{0, 3}, {1, 2}});
    CHECK(is_moran_regular(C, Branching{{2, 2}}));
    // {0, 1/16, 2/16, 3/16, 4/16}: four children in one cell, one in another
    GridSet1D X(f, {0, 1, 2, 3, 4});
    for (int64_t a : {1, 2, 4})
        for (int64_t b : {1, 2, 4}) CHECK_FALSE(is_moran_regular(X, Branching{{a, b}}));
}

TEST_CASE("regularization") {
    ScaleFrame f = ScaleFrame::make(2, 2, 4);
    GridSet1D X(f, {0, 1, 2, 3, 4});
    MoranResult<GridSet1D> r = moran_regularize(X);
    CHECK(r.refined.size() == 4);
    CHECK(r.branching == Branching{{1, 4}});
    CHECK(r.refined.indices() == std::vector<int64_t>{0, 1, 2, 3});

    MoranResult<GridSet1D> s = moran_regularize(GridSet1D(f, {9}));
    CHECK(s.refined.indices() == std::vector<int64_t>{9});
    CHECK(s.branching == Branching{{1, 1}});

    GridSet1D C = cantor_generator(f, {{0, 3}, {1, 2}});
    MoranResult<GridSet1D> c = moran_regularize(C);
    CHECK(c.refined == C);
    CHECK(c.branching == Branching{{2, 2}});

    CHECK_THROWS_AS(moran_regularize(GridSet1D(f, {})), Error);
}

TEST_CASE("regularization is idempotent and keeps its mass bound") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 200; ++t) {
        int k = 1 + int(rng() % 3), T = 1 + int(rng() % 4);
        ScaleFrame f = ScaleFrame::make(k, T, k * T);
        int64_t n = int64_t(1) << f.bits();
        std::vector<int64_t> v;
        size_t cnt = 1 + rng() % size_t(std::min<int64_t>(n, 80));
        for (size_t i = 0; i < cnt; ++i) v.push_back(int64_t(rng() % uint64_t(n)));
        GridSet1D A(f, v);
        MoranResult<GridSet1D> r = moran_regularize(A);
        CHECK(is_moran_regular(r.refined, r.branching));
        CHECK(Rational(long(r.refined.size())) >= moran_mass_factor(k, T, 1) * long(A.size()));
        MoranResult<GridSet1D> again = moran_regularize(r.refined);
        CHECK(again.refined == r.refined);
        CHECK(again.branching == r.branching);
        for (int64_t i : r.refined.indices()) CHECK(A.contains(i));
    }
    CHECK(moran_mass_factor(2, 3, 1) == make_q(1, 144));
}

TEST_CASE("planar regularization") {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 100; ++t) {
        int k = 1 + int(rng() % 3), T = 1 + int(rng() % 3);
        ScaleFrame f = ScaleFrame::make(k, T, k * T);
        int64_t n = int64_t(1) << f.bits();
        std::vector<Point2> v;
        for (int i = 0; i < 40; ++i) v.push_back({int64_t(rng() % uint64_t(n)), int64_t(rng() % uint64_t(n))});
        GridSet2D P(f, v);
        MoranResult<GridSet2D> r = moran_regularize(P);
        CHECK(is_moran_regular(r.refined, r.branching));
        CHECK(Rational(long(r.refined.size())) >= moran_mass_factor(k, T, 2) * long(P.size()));
    }
}

TEST_CASE("common branching") {
    ScaleFrame f = ScaleFrame::make(2, 2, 4);
    GridSet1D X(f, {0, 1, 2, 3, 4});
    CommonBranchingResult<GridSet1D> one = common_branching(std::vector<GridSet1D>{X});
    MoranResult<GridSet1D> single = moran_regularize(X);
    REQUIRE(one.kept.size() == 1);
    CHECK(one.refined[0] == single.refined);
    CHECK(one.branching == single.branching);

    GridSet1D C = cantor_generator(f, {{0, 3}, {1, 2}});
    CommonBranchingResult<GridSet1D> two = common_branching(std::vector<GridSet1D>{C, C});
    CHECK(two.kept.size() == 2);
    CHECK(two.refined[0] == C);
    CHECK(two.refined[1] == C);

    std::mt19937_64 rng(23);
    ScaleFrame g = ScaleFrame::make(2, 3, 6);
    std::vector<GridSet1D> fam;
    size_t total = 0;
    for (int i = 0; i < 10; ++i) {
        std::vector<int64_t> v;
        for (int j = 0; j < 20; ++j) v.push_back(int64_t(rng() % 64));
        fam.emplace_back(g, v);
        total += fam.back().size();
    }
    CommonBranchingResult<GridSet1D> r = common_branching(fam);
    size_t kept = 0;
    for (const auto& s : r.refined) {
        CHECK(is_moran_regular(s, r.branching));
        kept += s.size();
    }
    CHECK(Rational(long(kept)) >= common_branching_mass_factor(2, 3, 1) * long(total));
}

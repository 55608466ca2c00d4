#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "flab/experiment.hpp"

using namespace flab;

static std::vector<SeriesPoint> series(const std::vector<int>& exps, double (*value)(double)) {
    std::vector<SeriesPoint> s;
    for (int e : exps) s.push_back({pow2q(-e), value(std::ldexp(1.0, -e))});
    return s;
}

TEST_CASE("exponent fits") {
    Fit a = fit_exponent(series({4, 6, 8, 10}, [](double d) { return 1 / d; }));
    CHECK(a.slope == doctest::Approx(1));
    CHECK(a.residual == doctest::Approx(0).epsilon(1e-12));
    Fit b = fit_exponent(series({4, 6, 8}, [](double) { return 7.0; }));
    CHECK(b.slope == doctest::Approx(0).epsilon(1e-12));
    Fit c = fit_exponent(series({2, 4, 6, 8, 10}, [](double d) { return 4 / std::sqrt(d); }));
    CHECK(c.slope == doctest::Approx(0.5));
    CHECK(c.intercept == doctest::Approx(2));
    CHECK(c.residual == doctest::Approx(0).epsilon(1e-12));
    CHECK_THROWS_AS(fit_exponent(series({4}, [](double d) { return d; })), Error);
    CHECK_THROWS_AS(fit_exponent(series({4, 5}, [](double) { return 0.0; })), Error);
}

TEST_CASE("delta lists and configs") {
    CHECK(parse_delta_list("2^-10,2^-12") == std::vector<int>{10, 12});
    CHECK(parse_delta_list("8,9") == std::vector<int>{8, 9});
    CHECK(parse_delta_list("1/1024") == std::vector<int>{10});
    CHECK_THROWS_AS(parse_delta_list("1/3"), Error);

    Json j = Json::parse(R"({"experiment":"sumproduct","alpha":"1/2","delta_list":["2^-10",11],
                             "generator":{"name":"grid","seed":9},"output":"x"})");
    ExperimentConfig c = config_from_json(j);
    CHECK(c.alpha == make_q(1, 2));
    CHECK(c.delta_exps == std::vector<int>{10, 11});
    CHECK(c.generator == "grid");
    CHECK(c.seed == 9);
    CHECK_NOTHROW(validate_config(c));
    ExperimentConfig back = config_from_json(config_to_json(c));
    CHECK(back.delta_exps == c.delta_exps);
    CHECK(back.alpha == c.alpha);
    CHECK(back.seed == c.seed);

    ExperimentConfig bad = c;
    bad.delta_exps = {12, 10};
    CHECK_THROWS_AS(validate_config(bad), Error);
    bad = c;
    bad.alpha = 1;
    CHECK_THROWS_AS(validate_config(bad), Error);
    bad = c;
    bad.experiment = "nope";
    CHECK_THROWS_AS(validate_config(bad), Error);

    ExperimentConfig d;
    d.experiment = "furstenberg";
    d.delta_exps = {8};
    validate_config(d);
    CHECK(d.generator == "half");
}

TEST_CASE("counter-based random numbers") {
    CHECK(counter_random(1, 2, 3) == counter_random(1, 2, 3));
    std::set<uint64_t> seen;
    for (uint64_t i = 0; i < 1000; ++i) seen.insert(counter_random(7, 0, i));
    CHECK(seen.size() == 1000);
    CHECK(counter_random(1, 0, 0) != counter_random(2, 0, 0));
    CHECK(counter_random(1, 0, 0) != counter_random(1, 1, 0));
}

TEST_CASE("set generators") {
    ScaleFrame f = ScaleFrame::from_delta(10, make_q(1, 4));
    GridSet1D g = generate_set("grid", f, 1);
    CHECK(g.domain() == Domain::Shifted);
    CHECK(g.size() == 1025);
    for (int d = 10; d <= 15; ++d) {
        ScaleFrame fd = ScaleFrame::from_delta(d, make_q(1, 4));
        GridSet1D c = generate_set("cantor", fd, 3);
        double want = std::ldexp(1.0, d / 2) * (d % 2 ? 1.5 : 1.0);
        CHECK(double(c.size()) == want);
        CHECK(nonconcentration_constant(c, make_q(1, 2), fd) <= ExactPower(make_q(2)));
    }
    CHECK(generate_set("cantor", f, 3) == generate_set("cantor", f, 3));
    CHECK_THROWS_AS(generate_set("unknown", f, 1), Error);
}

TEST_CASE("sum-product measurements") {
    ScaleFrame f = ScaleFrame::from_delta(10, make_q(1, 4));
    SumProductRow grid = measure_sumproduct(generate_set("grid", f, 1), f);
    CHECK(grid.cov_A == 1025);
    CHECK(grid.cov_sum <= 2 * grid.cov_A + 1);
    // independent count: centre of the exponent window [N log2(a - 2 delta), N log2(a + 2 delta)] per element
    {
        const long double N = 1024, dl = 1.0L / 1024;
        std::set<long long> reps, sums;
        for (int i = 0; i <= 1024; ++i) {
            long double a = 1 + i * dl;
            long long lo = (long long)std::ceil(N * std::log2(a - 2 * dl));
            long long hi = (long long)std::floor(N * std::log2(a + 2 * dl));
            reps.insert(lo + (hi - lo + 1) / 2);
        }
        for (long long x : reps)
            for (long long y : reps) sums.insert(x + y);
        CHECK(grid.cov_prod == sums.size());
    }
    CHECK(grid.cov_sum == 2049);

    SumProductRow geo = measure_sumproduct(generate_set("geometric", f, 1), f);
    CHECK(geo.cov_sum > geo.cov_prod);

    CHECK(sumset({0, 1, 5}, {0, 2}) == std::vector<int64_t>{0, 1, 2, 3, 5, 7});
}

TEST_CASE("generated planar instance is valid") {
    ScaleFrame f = ScaleFrame::from_delta(8, make_q(1, 4), FrameConvention::Sixth);
    FurstenbergInstance inst = generate_instance("half", f, make_q(1, 2), make_q(1), 1);
    CHECK(validate_instance(inst).valid());
    CHECK(inst.lines.size() == 256);
}

TEST_CASE("reports are reproducible and well formed") {
    ExperimentConfig c;
    c.experiment = "sumproduct";
    c.delta_exps = {10, 11, 12};
    c.seed = 4;
    ExperimentReport a = run_experiment(c), b = run_experiment(c);
    CHECK(report_to_json(a).dump() == report_to_json(b).dump());
    CHECK(a.failures.empty());
    REQUIRE(a.rows.size() == 3);
    for (size_t i = 0; i < 3; ++i) CHECK(a.rows[i]["delta_exp"].get<int>() == 10 + int(i));
    std::stringstream csv;
    write_csv(csv, a);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "delta_exp,generator,seed,size,cov_A,cov_sum,cov_prod,ratio,log2_ratio,status");
    size_t lines = 0;
    for (std::string line; std::getline(csv, line);) ++lines;
    CHECK(lines == 3);

    ExperimentConfig big = c;
    big.delta_exps = {17};
    CHECK_THROWS_AS(run_experiment(big), Error);
}

TEST_CASE("certificate JSON carries exact values") {
    ScaleFrame f = ScaleFrame::from_delta(12, make_q(1, 4));
    GridSet1D A = generate_set("cantor", f, 1);
    KProfile p = measure_K(A, make_q(1, 2), f);
    Json j = certificate_json(p, gkz_certificate(p));
    CHECK(j.is_object());
    for (const auto& [k, v] : j.items()) CHECK_FALSE(v.is_object());
    CHECK(j["satisfied"].get<bool>());
}

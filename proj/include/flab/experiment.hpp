#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "flab/addcomb.hpp"
#include "flab/certificates.hpp"
#include "flab/construct.hpp"
#include "flab/transform.hpp"

namespace flab {

using Json = nlohmann::ordered_json;

struct ExperimentConfig {
    std::string experiment;        // sumproduct | furstenberg | certificate | projective
    Rational alpha = Rational(1, 2);
    Rational beta = Rational(1);
    Rational epsilon = Rational(1, 4);
    std::vector<int> delta_exps;   // delta = 2^{-e}; strictly increasing exponents
    std::string generator;         // empty selects the experiment default
    uint64_t seed = 1;
    std::string output = "flab_out";
    size_t quartic_cap = 256;      // largest set fed to quartic enumerations
    size_t pencil_points = 160;    // projective experiment: points of the synthetic arrangement
};

// Missing keys keep their defaults; throws InvalidArgument on bad values.
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::string& path);
Json config_to_json(const ExperimentConfig& c);
void validate_config(ExperimentConfig& c);
// Parses "2^-10,2^-12" or "10,12" into exponents.
std::vector<int> parse_delta_list(const std::string& s);

// Counter-based generator: a pure function of (seed, stream, counter).
uint64_t counter_random(uint64_t seed, uint64_t stream, uint64_t counter);

struct SeriesPoint {
    Rational delta;
    double value = 0;
};

struct Fit {
    std::string series;
    double slope = 0;
    double intercept = 0;
    double residual = 0;  // root mean square, log2 scale
    size_t points = 0;
};

// Least-squares slope of log2(value) against log2(1/delta).
Fit fit_exponent(const std::vector<SeriesPoint>& series, const std::string& name = "");

struct ExperimentReport {
    std::string experiment;
    Json config;
    std::vector<std::string> columns;
    std::vector<Json> rows;  // one object per delta, keys = columns
    std::vector<Fit> fits;
    std::vector<std::string> failures;
    Json extra = Json::object();
};

void write_csv(std::ostream& os, const ExperimentReport& r);
Json report_to_json(const ExperimentReport& r);
void write_outputs(const ExperimentReport& r, const std::string& prefix);

// Generators of sets in [1,2] on the frame grid: "cantor", "grid", "geometric".
GridSet1D generate_set(const std::string& generator, const ScaleFrame& frame, uint64_t seed);
// Cantor pattern at resolution 2^{-delta_exp}: base-4 levels keeping two seeded digits, and for odd exponents a
// final base-8 level keeping three, so the size stays close to 2^{delta_exp / 2}.
DigitPattern cantor_pattern(int delta_exp, uint64_t seed);
// (1/2, 1) instance: base-4 slope digits {0,1}, intercept digits {0,2}, x from cantor_pattern.
FurstenbergInstance generate_instance(const std::string& generator, const ScaleFrame& frame, const Rational& alpha,
                                      const Rational& beta, uint64_t seed);

// Sorted distinct a + b.
std::vector<int64_t> sumset(const std::vector<int64_t>& a, const std::vector<int64_t>& b);

struct SumProductRow {
    size_t size = 0, cov_A = 0, cov_sum = 0, cov_prod = 0;
    Rational ratio;  // max(cov_sum, cov_prod) / cov_A
};

SumProductRow measure_sumproduct(const GridSet1D& A, const ScaleFrame& frame);

// Lines through four pencil centres: (0,0), (1,0), (1/2,0) and the vertical direction.
struct PencilArrangement {
    Arrangement arr;
    std::vector<PencilTag> dual_tags;  // family of each line's image under the projective map
};

PencilArrangement pencil_arrangement(int delta_exp, const Rational& epsilon, size_t num_points, uint64_t seed);

struct ProjectiveRun {
    PencilArrangement source;
    Dualized dual;
    QuadrantNormalization norm;
    InterceptFamilies families;
    std::optional<BsgResult> bsg;
    std::optional<KProfile> profile;
    std::optional<GkzCertificate> certificate;
};

ProjectiveRun projective_pipeline(int delta_exp, const Rational& epsilon, size_t num_points, uint64_t seed);

// Greedy subset with consecutive gaps >= delta.
GridSet1D separated_subset(const GridSet1D& A, const ScaleFrame& frame);

// Flat object, exact values as "num/den" strings.
Json certificate_json(const KProfile& p, const GkzCertificate& c);

ExperimentReport run_sumproduct(const ExperimentConfig& c);
ExperimentReport run_furstenberg(const ExperimentConfig& c);
ExperimentReport run_certificate(const ExperimentConfig& c);
ExperimentReport run_projective(const ExperimentConfig& c);
ExperimentReport run_experiment(const ExperimentConfig& c);

}  // namespace flab

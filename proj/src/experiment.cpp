#include "flab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>

#include "flab/parallel.hpp"

namespace flab {

namespace {

std::string qs(const Rational& q) { return to_string_q(q); }

Rational json_rational(const Json& v) {
    if (v.is_string()) return parse_q(v.get<std::string>());
    if (v.is_number_integer()) return Rational(BigInt(static_cast<long>(v.get<int64_t>())));
    if (v.is_number()) return parse_q(v.dump());
    throw Error(ErrorKind::InvalidArgument, "expected a rational, got " + v.dump());
}

}  // namespace

// Configuration

std::vector<int> parse_delta_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item.rfind("2^-", 0) == 0) {
            out.push_back(std::stoi(item.substr(3)));
        } else if (item.find('/') != std::string::npos || item.find('.') != std::string::npos) {
            out.push_back(static_cast<int>(-log2_exact(parse_q(item))));
        } else {
            out.push_back(std::stoi(item));
        }
    }
    return out;
}

void validate_config(ExperimentConfig& c) {
    static const std::vector<std::string> kinds{"sumproduct", "furstenberg", "certificate", "projective"};
    if (std::find(kinds.begin(), kinds.end(), c.experiment) == kinds.end())
        throw Error(ErrorKind::InvalidArgument, "unknown experiment '" + c.experiment + "'");
    if (sgn(c.alpha) <= 0 || c.alpha >= 1) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
    if (sgn(c.epsilon) <= 0) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
    if (c.delta_exps.empty()) throw Error(ErrorKind::InvalidArgument, "delta list is empty");
    for (size_t i = 0; i < c.delta_exps.size(); ++i) {
        if (c.delta_exps[i] < 1) throw Error(ErrorKind::InvalidArgument, "delta must be below 1");
        if (i > 0 && c.delta_exps[i] <= c.delta_exps[i - 1])
            throw Error(ErrorKind::InvalidArgument, "delta list must be strictly decreasing");
    }
    if (c.generator.empty()) {
        if (c.experiment == "furstenberg") c.generator = "half";
        else if (c.experiment == "projective") c.generator = "pencils";
        else c.generator = "cantor";
    }
}

ExperimentConfig config_from_json(const Json& j) {
    ExperimentConfig c;
    if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "config must be a JSON object");
    if (j.contains("experiment")) c.experiment = j["experiment"].get<std::string>();
    if (j.contains("alpha")) c.alpha = json_rational(j["alpha"]);
    if (j.contains("beta")) c.beta = json_rational(j["beta"]);
    if (j.contains("epsilon")) c.epsilon = json_rational(j["epsilon"]);
    if (j.contains("delta_list")) {
        for (const auto& v : j["delta_list"]) {
            if (v.is_number_integer()) c.delta_exps.push_back(v.get<int>());
            else {
                auto e = parse_delta_list(v.get<std::string>());
                c.delta_exps.insert(c.delta_exps.end(), e.begin(), e.end());
            }
        }
    }
    if (j.contains("generator")) {
        const auto& g = j["generator"];
        if (g.is_string()) {
            c.generator = g.get<std::string>();
        } else {
            if (g.contains("name")) c.generator = g["name"].get<std::string>();
            if (g.contains("seed")) c.seed = g["seed"].get<uint64_t>();
        }
    }
    if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
    if (j.contains("output")) c.output = j["output"].get<std::string>();
    if (j.contains("quartic_cap")) c.quartic_cap = j["quartic_cap"].get<size_t>();
    if (j.contains("pencil_points")) c.pencil_points = j["pencil_points"].get<size_t>();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open config " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Parse, path + ": " + e.what());
    }
    return config_from_json(j);
}

Json config_to_json(const ExperimentConfig& c) {
    Json j;
    j["experiment"] = c.experiment;
    j["alpha"] = qs(c.alpha);
    j["beta"] = qs(c.beta);
    j["epsilon"] = qs(c.epsilon);
    Json dl = Json::array();
    for (int e : c.delta_exps) dl.push_back("2^-" + std::to_string(e));
    j["delta_list"] = dl;
    j["generator"] = {{"name", c.generator}, {"seed", c.seed}};
    j["output"] = c.output;
    j["quartic_cap"] = c.quartic_cap;
    j["pencil_points"] = c.pencil_points;
    return j;
}

uint64_t counter_random(uint64_t seed, uint64_t stream, uint64_t counter) {
    // splitmix64 finalizer over a combined key
    uint64_t z = seed * 0x9E3779B97F4A7C15ULL ^ (stream + 0x632BE59BD9B4E019ULL) * 0xBF58476D1CE4E5B9ULL ^
                 (counter + 1) * 0x94D049BB133111EBULL;
    for (int i = 0; i < 2; ++i) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z ^= z >> 31;
    }
    return z;
}

// Fitting

Fit fit_exponent(const std::vector<SeriesPoint>& series, const std::string& name) {
    if (series.size() < 2) throw Error(ErrorKind::InvalidArgument, "fit needs at least two rows");
    std::vector<double> xs, ys;
    for (const auto& p : series) {
        if (!(p.value > 0)) throw Error(ErrorKind::InvalidArgument, "fit needs positive values");
        if (sgn(p.delta) <= 0) throw Error(ErrorKind::InvalidArgument, "fit needs positive delta");
        xs.push_back(-log2_approx(p.delta));
        ys.push_back(std::log2(p.value));
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0) throw Error(ErrorKind::InvalidArgument, "fit needs two distinct scales");
    Fit f;
    f.series = name;
    f.points = xs.size();
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - (f.intercept + f.slope * xs[i]);
        ss += r * r;
    }
    f.residual = std::sqrt(ss / n);
    if (f.residual < 1e-12) f.residual = 0;
    return f;
}

// Output

namespace {

std::string csv_cell(const Json& v) {
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") != std::string::npos) {
        std::string q = "\"";
        for (char ch : s) {
            if (ch == '"') q += '"';
            q += ch;
        }
        return q + "\"";
    }
    return s;
}

}  // namespace

void write_csv(std::ostream& os, const ExperimentReport& r) {
    for (size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
    os << "\n";
    for (const auto& row : r.rows) {
        for (size_t i = 0; i < r.columns.size(); ++i) {
            if (i) os << ",";
            if (row.contains(r.columns[i])) os << csv_cell(row[r.columns[i]]);
        }
        os << "\n";
    }
}

Json report_to_json(const ExperimentReport& r) {
    Json j;
    j["experiment"] = r.experiment;
    j["config"] = r.config;
    j["columns"] = r.columns;
    j["rows"] = r.rows;
    Json fits = Json::array();
    for (const auto& f : r.fits)
        fits.push_back({{"series", f.series}, {"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual},
                        {"points", f.points}});
    j["fits"] = fits;
    j["failures"] = r.failures;
    j["extra"] = r.extra;
    return j;
}

void write_outputs(const ExperimentReport& r, const std::string& prefix) {
    std::ofstream csv(prefix + ".csv");
    if (!csv) throw Error(ErrorKind::InvalidArgument, "cannot write " + prefix + ".csv");
    write_csv(csv, r);
    std::ofstream js(prefix + ".report.json");
    if (!js) throw Error(ErrorKind::InvalidArgument, "cannot write " + prefix + ".report.json");
    js << report_to_json(r).dump(2) << "\n";
}

// Generators

DigitPattern cantor_pattern(int delta_exp, uint64_t seed) {
    if (delta_exp < 2) throw Error(ErrorKind::InvalidArgument, "Cantor sets need delta <= 1/4");
    static const int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    DigitPattern p;
    const int quads = delta_exp % 2 ? (delta_exp - 3) / 2 : delta_exp / 2;
    for (int j = 0; j < quads; ++j) {
        const auto& pr = pairs[counter_random(seed, 1, static_cast<uint64_t>(j)) % 6];
        p.keep.push_back({pr[0], pr[1]});
        p.level_bits.push_back(2);
    }
    if (delta_exp % 2) {
        const int s = static_cast<int>(counter_random(seed, 5, static_cast<uint64_t>(delta_exp)) % 8);
        p.keep.push_back({s, (s + 3) % 8, (s + 6) % 8});
        p.level_bits.push_back(3);
    }
    return p;
}

GridSet1D generate_set(const std::string& generator, const ScaleFrame& frame, uint64_t seed) {
    const int d = frame.delta_exp, bits = frame.bits();
    const int64_t one = int64_t(1) << bits;
    std::vector<int64_t> idx;
    if (generator == "cantor") {
        for (int64_t v : cantor_pattern(d, seed).expand()) idx.push_back(one + (v << (bits - d)));
    } else if (generator == "grid") {
        const int64_t unit = frame.delta_units();
        for (int64_t v = one; v <= 2 * one; v += unit) idx.push_back(v);
    } else if (generator == "geometric") {
        const int64_t n = int64_t(1) << ((d + 1) / 2);
        for (int64_t i = 0; i < n; ++i) {
            long double x = std::exp2(static_cast<long double>(i) / static_cast<long double>(n));
            idx.push_back(static_cast<int64_t>(std::floor(std::ldexp(x, d))) << (bits - d));
        }
    } else {
        throw Error(ErrorKind::InvalidArgument, "unknown set generator '" + generator + "'");
    }
    return GridSet1D(frame, std::move(idx), Domain::Shifted);
}

FurstenbergInstance generate_instance(const std::string& generator, const ScaleFrame& frame, const Rational& alpha,
                                      const Rational& beta, uint64_t seed) {
    if (generator != "half") throw Error(ErrorKind::InvalidArgument, "unknown instance generator '" + generator + "'");
    const int d = frame.delta_exp;
    if (d < 2) throw Error(ErrorKind::InvalidArgument, "instances need delta <= 1/4");
    DigitPattern slopes, intercepts;
    const DigitPattern xs = cantor_pattern(d, seed);
    const int quads = d % 2 ? (d - 3) / 2 : d / 2;
    for (int j = 0; j < quads; ++j) {
        slopes.keep.push_back({0, 1});
        intercepts.keep.push_back({0, 2});
    }
    slopes.level_bits = intercepts.level_bits = std::vector<int>(static_cast<size_t>(quads), 2);
    if (d % 2) {
        // m + b + x stays below 1 with these last digits.
        slopes.keep.push_back({0, 1, 2});
        intercepts.keep.push_back({0, 2, 4});
        slopes.level_bits.push_back(3);
        intercepts.level_bits.push_back(3);
    }
    return gen_furstenberg(frame, alpha, beta, slopes, intercepts, xs);
}

std::vector<int64_t> sumset(const std::vector<int64_t>& a, const std::vector<int64_t>& b) {
    std::vector<int64_t> out;
    if (a.empty() || b.empty()) return out;
    const int64_t alo = a.front(), blo = b.front();
    const uint64_t aspan = static_cast<uint64_t>(a.back() - alo) + 1, bspan = static_cast<uint64_t>(b.back() - blo) + 1;
    const uint64_t span = aspan + bspan;
    if (span <= (uint64_t(1) << 30) && static_cast<double>(a.size()) * static_cast<double>(span) / 64 < 4e9) {
        // Bitset: OR shifted copies of b.
        const size_t words = (span + 63) / 64;
        std::vector<uint64_t> bb((bspan + 63) / 64 + 1, 0), acc(words + 1, 0);
        for (int64_t v : b) bb[static_cast<size_t>(v - blo) >> 6] |= uint64_t(1) << ((v - blo) & 63);
        for (int64_t v : a) {
            const uint64_t sh = static_cast<uint64_t>(v - alo);
            const size_t w = sh >> 6, r = sh & 63;
            for (size_t i = 0; i + 1 < bb.size(); ++i) {
                if (!bb[i]) continue;
                acc[w + i] |= bb[i] << r;
                if (r) acc[w + i + 1] |= bb[i] >> (64 - r);
            }
        }
        for (size_t w = 0; w < acc.size(); ++w)
            for (uint64_t m = acc[w]; m; m &= m - 1)
                out.push_back(alo + blo + static_cast<int64_t>(w * 64 + static_cast<size_t>(__builtin_ctzll(m))));
        return out;
    }
    out.reserve(a.size() * b.size());
    for (int64_t x : a)
        for (int64_t y : b) out.push_back(x + y);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

SumProductRow measure_sumproduct(const GridSet1D& A, const ScaleFrame& frame) {
    SumProductRow r;
    r.size = A.size();
    const int shift = frame.bits() - frame.delta_exp;
    r.cov_A = covering_number(A, frame.delta_exp);
    std::vector<int64_t> cells;
    for (int64_t s : sumset(A.indices(), A.indices())) cells.push_back(floor_shift(s, shift));
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    r.cov_sum = cells.size();
    // one lattice exponent per element, the centre of its neighbourhood
    std::vector<int64_t> reps;
    reps.reserve(A.size());
    for (size_t i = 0; i < A.size(); ++i) {
        std::vector<int64_t> nb = embed_element(A.value(i), frame, LatticeMode::Multiplicative);
        reps.push_back(nb[nb.size() / 2]);
    }
    std::sort(reps.begin(), reps.end());
    reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
    r.cov_prod = sumset(reps, reps).size();
    r.ratio = Rational(BigInt(static_cast<unsigned long>(std::max(r.cov_sum, r.cov_prod))),
                       BigInt(static_cast<unsigned long>(r.cov_A)));
    r.ratio.canonicalize();
    return r;
}

// Projective pipeline

PencilArrangement pencil_arrangement(int delta_exp, const Rational& epsilon, size_t num_points, uint64_t seed) {
    const ScaleFrame f = ScaleFrame::from_delta(delta_exp, epsilon, FrameConvention::Plain);
    const int bits = f.bits();
    const int64_t unit = int64_t(1) << bits;
    std::vector<Point2> pts;
    for (uint64_t c = 0; pts.size() < num_points && c < 64 * num_points; ++c) {
        // x in [1/4, 3/4], y in [1/2, 1]
        int64_t x = unit / 4 + static_cast<int64_t>(counter_random(seed, 3, 2 * c) % static_cast<uint64_t>(unit / 2 + 1));
        int64_t y = unit / 2 + static_cast<int64_t>(counter_random(seed, 3, 2 * c + 1) % static_cast<uint64_t>(unit / 2 + 1));
        pts.push_back({x, y});
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    }
    GridSet2D P(f, pts, Domain::Free);
    const QPoint centres[3] = {{Rational(0), Rational(0)}, {Rational(1), Rational(0)}, {Rational(1, 2), Rational(0)}};
    std::vector<Line> lines;
    for (const auto& p : P.points()) {
        QPoint q = to_qpoint(p, bits);
        for (const auto& c : centres) lines.push_back(Line::through(c, q));
        lines.push_back(Line::vertical_at(q.x));
    }
    std::sort(lines.begin(), lines.end());
    lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
    PencilArrangement out;
    for (const Line& l : lines) {
        if (l.vertical()) out.dual_tags.push_back(PencilTag::ThroughOrigin);
        else if (l.contains(centres[0])) out.dual_tags.push_back(PencilTag::Vertical);
        else if (l.contains(centres[1])) out.dual_tags.push_back(PencilTag::Horizontal);
        else out.dual_tags.push_back(PencilTag::Parallel);
    }
    out.arr = build_incidences(P, lines, f);
    return out;
}

GridSet1D separated_subset(const GridSet1D& A, const ScaleFrame& frame) {
    const int64_t unit = int64_t(1) << (A.frame().bits() - frame.delta_exp);
    std::vector<int64_t> keep;
    for (int64_t v : A.indices())
        if (keep.empty() || v - keep.back() >= unit) keep.push_back(v);
    return GridSet1D(A.frame(), std::move(keep), A.domain());
}

ProjectiveRun projective_pipeline(int delta_exp, const Rational& epsilon, size_t num_points, uint64_t seed) {
    ProjectiveRun run;
    run.source = pencil_arrangement(delta_exp, epsilon, num_points, seed);
    run.dual = projective_dualize(run.source.arr);
    run.norm = anisotropic_normalize(run.dual.arr);
    run.families = extract_intercepts(run.norm.arr, run.source.dual_tags);
    const auto& fam = run.families;
    if (!fam.E.empty()) run.bsg = bsg_extract(fam.X, fam.Y, fam.E);
    const ScaleFrame& g = run.norm.arr.frame();
    GridSet1D X = separated_subset(fam.X, g);
    if (!X.empty() && g.delta_exp >= 1) {
        run.profile = measure_K(X, Rational(1, 2), g);
        run.certificate = gkz_certificate(*run.profile);
    }
    return run;
}

Json certificate_json(const KProfile& p, const GkzCertificate& c) {
    auto ep = [](const ExactPower& x) { return x.is_rational() ? qs(x.to_rational()) : x.to_string(); };
    Json j;
    j["alpha"] = qs(p.alpha);
    j["delta"] = qs(p.delta);
    j["epsilon"] = qs(p.epsilon);
    j["size"] = p.size;
    j["K1"] = ep(p.K1);
    j["K2"] = ep(p.K2);
    j["K3"] = ep(p.K3);
    j["K4"] = ep(p.K4);
    j["raw_K1"] = ep(p.raw_K1);
    j["raw_K2"] = ep(p.raw_K2);
    j["raw_K3"] = ep(p.raw_K3);
    j["raw_K4"] = ep(p.raw_K4);
    j["source_K1"] = p.source_K1;
    j["source_K2"] = p.source_K2;
    j["source_K3"] = p.source_K3;
    j["source_K4"] = p.source_K4;
    j["lhs"] = ep(c.lhs);
    j["rhs"] = ep(c.rhs);
    j["satisfied"] = c.satisfied;
    j["margin_log2"] = c.margin_log2;
    return j;
}

// Experiments

namespace {

ExperimentReport make_report(const ExperimentConfig& c, std::vector<std::string> columns) {
    ExperimentReport r;
    r.experiment = c.experiment;
    r.config = config_to_json(c);
    r.columns = std::move(columns);
    r.rows.resize(c.delta_exps.size());
    return r;
}

// Evaluates one row per delta concurrently; failures are recorded per row in delta order.
void run_rows(const ExperimentConfig& c, ExperimentReport& r, const std::function<Json(int)>& row) {
    std::vector<std::string> errors(c.delta_exps.size());
    parallel_for(c.delta_exps.size(), [&](size_t i) {
        try {
            r.rows[i] = row(c.delta_exps[i]);
        } catch (const std::exception& e) {
            errors[i] = e.what();
            r.rows[i] = Json{{"delta_exp", c.delta_exps[i]}, {"seed", c.seed}, {"status", std::string("error: ") + e.what()}};
        }
    });
    for (size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty()) r.failures.push_back("delta=2^-" + std::to_string(c.delta_exps[i]) + ": " + errors[i]);
}

void add_fit(ExperimentReport& r, const ExperimentConfig& c, const std::string& name, const std::string& column) {
    std::vector<SeriesPoint> s;
    for (size_t i = 0; i < r.rows.size(); ++i) {
        const auto& row = r.rows[i];
        if (!row.contains(column)) continue;
        const auto& v = row[column];
        double x = v.is_string() ? parse_q(v.get<std::string>()).get_d() : v.get<double>();
        if (x > 0) s.push_back({pow2q(-c.delta_exps[i]), x});
    }
    if (s.size() >= 2) r.fits.push_back(fit_exponent(s, name));
}

}  // namespace

ExperimentReport run_sumproduct(const ExperimentConfig& c0) {
    ExperimentConfig c = c0;
    validate_config(c);
    for (int e : c.delta_exps)
        if (e > 16) throw Error(ErrorKind::InvalidArgument, "1D experiments are limited to delta >= 2^-16");
    ExperimentReport r = make_report(
        c, {"delta_exp", "generator", "seed", "size", "cov_A", "cov_sum", "cov_prod", "ratio", "log2_ratio", "status"});
    run_rows(c, r, [&](int d) {
        ScaleFrame f = ScaleFrame::from_delta(d, c.epsilon);
        GridSet1D A = generate_set(c.generator, f, c.seed);
        SumProductRow m = measure_sumproduct(A, f);
        Json row;
        row["delta_exp"] = d;
        row["generator"] = c.generator;
        row["seed"] = c.seed;
        row["size"] = m.size;
        row["cov_A"] = m.cov_A;
        row["cov_sum"] = m.cov_sum;
        row["cov_prod"] = m.cov_prod;
        row["ratio"] = qs(m.ratio);
        row["log2_ratio"] = log2_approx(m.ratio);
        row["status"] = "ok";
        return row;
    });
    add_fit(r, c, "expansion", "ratio");
    add_fit(r, c, "cov_A", "cov_A");
    add_fit(r, c, "cov_sum", "cov_sum");
    add_fit(r, c, "cov_prod", "cov_prod");
    return r;
}

ExperimentReport run_furstenberg(const ExperimentConfig& c0) {
    ExperimentConfig c = c0;
    validate_config(c);
    for (int e : c.delta_exps)
        if (e > 12) throw Error(ErrorKind::InvalidArgument, "the planar pipeline is limited to delta >= 2^-12");
    ExperimentReport r = make_report(
        c, {"delta_exp", "generator", "seed", "lines", "points_per_line", "union_points", "union_cov", "regular_lines",
            "P1", "I1", "slack_violations", "cells_many", "max_points_per_cell", "pin_samples", "P2", "slope_branching", "early_exit",
            "witnessed_points", "j0", "tubes", "Q", "IQ", "rescaled_points", "preservation", "dagger_exp",
            "normalized_points", "stage_failures", "status"});
    std::mutex mu;
    run_rows(c, r, [&](int d) {
        ScaleFrame f = ScaleFrame::from_delta(d, c.epsilon, FrameConvention::Sixth);
        FurstenbergInstance inst = generate_instance(c.generator, f, c.alpha, c.beta, c.seed);
        Json row;
        std::vector<std::string> fails;
        row["delta_exp"] = d;
        row["generator"] = c.generator;
        row["seed"] = c.seed;
        row["lines"] = inst.lines.size();
        row["points_per_line"] = inst.point_sets.front().size();
        std::vector<Point2> all;
        for (const auto& P : inst.point_sets) all.insert(all.end(), P.points().begin(), P.points().end());
        GridSet2D U(f, std::move(all));
        row["union_points"] = U.size();
        row["union_cov"] = covering_number(U, d);

        RegularizedInstance reg = regularize_instance(inst);
        row["regular_lines"] = reg.lines.size();
        ArrangementBuild b = build_arrangement(reg);
        row["P1"] = b.arr.num_points();
        row["I1"] = b.arr.num_incidences();
        size_t slack = b.arr.count_slack_violations();
        row["slack_violations"] = slack;
        if (slack) fails.push_back("incidences outside N_delta");
        ContributorCensus cen = contributor_census(b);
        row["cells_many"] = cen.cells_many;
        row["max_points_per_cell"] = cen.max_points_per_cell;
        if (cen.max_points_per_cell > 1) fails.push_back("more than one point per cell");
        {
            // 100 sampled (line, cell) pairs inside the checked scope
            size_t sampled = 0, pin_fail = 0;
            for (uint64_t t = 0; sampled < 100 && t < 10000; t += 3) {
                size_t l = counter_random(c.seed, uint64_t(d), t) % reg.lines.size();
                const auto& own = reg.point_sets[l].points();
                if (own.empty()) continue;
                Point2 p = own[counter_random(c.seed, uint64_t(d), t + 1) % own.size()];
                int j = static_cast<int>(counter_random(c.seed, uint64_t(d), t + 2) % uint64_t(f.k + 1));
                PinCheck pc = pin_check(b, reg, l, square_of(f, p, j));
                if (!pc.in_domain) continue;
                ++sampled;
                if (!pc.holds()) ++pin_fail;
            }
            row["pin_samples"] = sampled;
            if (pin_fail) fails.push_back("pinned point sets differ");
        }
        SlopeRegularization sr = regularize_slopes(b.arr, c.alpha);
        row["P2"] = sr.arr.num_points();
        std::string br;
        for (auto m : sr.branching.levels) br += (br.empty() ? "" : " ") + std::to_string(m);
        row["slope_branching"] = br;
        Truncation tr = truncate_slopes(sr.arr, sr.branching);
        row["early_exit"] = tr.early_exit;
        std::string status = "ok";
        if (tr.early_exit) {
            row["witnessed_points"] = tr.witnessed_points;
            status = "early_exit";
        } else {
            row["j0"] = tr.j0;
            if (!tr.window_bound_ok) fails.push_back("window bound");
            TubeDecomposition td = partition_tubes(tr.arr, tr.j0);
            row["tubes"] = td.tubes.size();
            if (!td.tubes.empty()) {
                const Tube& t = td.tubes.front();
                Representatives rep = select_representatives(t, b.ledger, tr.j0);
                row["Q"] = rep.Q.size();
                row["IQ"] = rep.IQ.num_incidences();
                RescaledTube rt = rescale_tube(t.arr, t.m, t.b, tr.j0 * f.T);
                row["rescaled_points"] = rt.points_after;
                if (rt.slack_violations) fails.push_back("rescaled incidences outside slack");
                try {
                    Dualized du = projective_dualize(rt.arr);
                    row["preservation"] = du.preservation;
                    row["dagger_exp"] = du.dagger_exp;
                    QuadrantNormalization qn = anisotropic_normalize(du.arr);
                    row["normalized_points"] = qn.points_after;
                } catch (const Error& e) {
                    status = std::string("terminal: ") + e.what();
                }
            }
        }
        std::string fs;
        for (const auto& x : fails) fs += (fs.empty() ? "" : "; ") + x;
        row["stage_failures"] = fs;
        row["status"] = status;
        if (!fails.empty()) {
            std::lock_guard<std::mutex> lock(mu);
            r.failures.push_back("delta=2^-" + std::to_string(d) + ": " + fs);
        }
        return row;
    });
    add_fit(r, c, "union_cov", "union_cov");
    return r;
}

ExperimentReport run_certificate(const ExperimentConfig& c0) {
    ExperimentConfig c = c0;
    validate_config(c);
    for (int e : c.delta_exps)
        if (e > 16) throw Error(ErrorKind::InvalidArgument, "1D experiments are limited to delta >= 2^-16");
    ExperimentReport r = make_report(
        c, {"delta_exp", "generator", "seed", "size", "K1", "K2", "K3", "K4", "lhs_log2", "rhs_log2", "satisfied",
            "s", "gamma", "degenerate", "dichotomy", "witness", "dense_covering", "quotients", "sampled",
            "dilated_covering", "dilated_bound_log2", "e1", "e2", "exponents_ok", "status"});
    std::vector<Json> certs(c.delta_exps.size());
    run_rows(c, r, [&](int d) {
        ScaleFrame f = ScaleFrame::from_delta(d, c.epsilon);
        GridSet1D A = separated_subset(generate_set(c.generator, f, c.seed), f);
        KProfile p = measure_K(A, c.alpha, f);
        GkzCertificate cert = gkz_certificate(p);
        auto ep = [](const ExactPower& x) { return x.is_rational() ? qs(x.to_rational()) : x.to_string(); };
        Json row;
        row["delta_exp"] = d;
        row["generator"] = c.generator;
        row["seed"] = c.seed;
        row["size"] = A.size();
        row["K1"] = ep(p.K1);
        row["K2"] = ep(p.K2);
        row["K3"] = ep(p.K3);
        row["K4"] = ep(p.K4);
        row["lhs_log2"] = cert.lhs.log2();
        row["rhs_log2"] = cert.rhs.log2();
        row["satisfied"] = cert.satisfied;
        SGamma sg = s_gamma(p);
        row["s"] = ep(sg.s);
        row["gamma"] = sg.gamma ? qs(*sg.gamma) : std::to_string(sg.gamma_approx);
        row["degenerate"] = sg.degenerate;
        if (sg.degenerate) {
            row["dichotomy"] = "degenerate: " + sg.strong_bound;
        } else {
            Rational s = sg.s.is_rational() ? sg.s.to_rational() : Rational(sg.s.to_double());
            Rational gamma = sg.gamma ? *sg.gamma : Rational(sg.gamma_approx);
            GridSet1D A1 = A;
            bool sampled = false;
            if (A1.size() > c.quartic_cap) {
                std::vector<int64_t> pick;
                for (size_t i = 0; i < A.size(); ++i)
                    if (counter_random(c.seed, 4, i) % A.size() < c.quartic_cap) pick.push_back(A.indices()[i]);
                A1 = GridSet1D(A.frame(), std::move(pick), A.domain());
                sampled = true;
            }
            row["sampled"] = sampled;
            try {
                DichotomyOutcome o = quotient_dichotomy(A1, gamma, s, f);
                row["quotients"] = o.quotient_size;
                if (o.kind == DichotomyCase::Gap) {
                    row["dichotomy"] = "gap";
                    row["witness"] = qs(o.witness);
                } else {
                    row["dichotomy"] = "dense";
                    row["dense_covering"] = o.covering;
                }
            } catch (const Error& e) {
                row["dichotomy"] = std::string("error: ") + e.what();
            }
        }
        DilatedCovering dc = dilated_sumset_covering(A, Rational(1), Rational(1, 2), 1, f.delta());
        row["dilated_covering"] = dc.count;
        row["dilated_bound_log2"] = dilated_sumset_bound(p, Rational(1), Rational(1), Rational(1, 2)).log2();
        ExponentCheck ex = final_exponent_check(c.alpha);
        row["e1"] = qs(ex.e1);
        row["e2"] = qs(ex.e2);
        row["exponents_ok"] = ex.ok;
        row["status"] = "ok";
        size_t i = static_cast<size_t>(std::find(c.delta_exps.begin(), c.delta_exps.end(), d) - c.delta_exps.begin());
        certs[i] = certificate_json(p, cert);
        return row;
    });
    r.extra["certificates"] = certs;
    for (size_t i = 0; i < r.rows.size(); ++i)
        if (r.rows[i].contains("satisfied") && !r.rows[i]["satisfied"].get<bool>())
            r.failures.push_back("delta=2^-" + std::to_string(c.delta_exps[i]) + ": certificate not satisfied");
    return r;
}

ExperimentReport run_projective(const ExperimentConfig& c0) {
    ExperimentConfig c = c0;
    validate_config(c);
    for (int e : c.delta_exps)
        if (e > 12) throw Error(ErrorKind::InvalidArgument, "the planar pipeline is limited to delta >= 2^-12");
    ExperimentReport r = make_report(
        c, {"delta_exp", "seed", "points", "lines", "incidences", "preservation2", "preservation", "dagger_exp",
            "normalized_points", "X", "Y", "Z", "W", "E", "containment_failures", "clipped_incident", "bsg_size",
            "bsg_size_ok", "bsg_difference_ok", "gkz_satisfied", "status"});
    run_rows(c, r, [&](int d) {
        ProjectiveRun run = projective_pipeline(d, c.epsilon, c.pencil_points, c.seed);
        Json row;
        row["delta_exp"] = d;
        row["seed"] = c.seed;
        row["points"] = run.source.arr.num_points();
        row["lines"] = run.source.arr.num_lines();
        row["incidences"] = run.source.arr.num_incidences();
        row["preservation2"] = qs(run.dual.preservation2);
        row["preservation"] = run.dual.preservation;
        row["dagger_exp"] = run.dual.dagger_exp;
        row["normalized_points"] = run.norm.points_after;
        const auto& fam = run.families;
        row["X"] = fam.X.size();
        row["Y"] = fam.Y.size();
        row["Z"] = fam.Z.size();
        row["W"] = fam.W.size();
        row["E"] = fam.E.size();
        row["containment_failures"] = fam.containment_failures;
        row["clipped_incident"] = fam.clipped_incident;
        if (run.bsg) {
            row["bsg_size"] = run.bsg->report.a_prime_size;
            row["bsg_size_ok"] = run.bsg->report.size_ok;
            row["bsg_difference_ok"] = run.bsg->report.difference_ok;
        }
        if (run.certificate) row["gkz_satisfied"] = run.certificate->satisfied;
        row["status"] = run.dual.preservation2 <= 64 ? "ok" : "preservation above 8";
        return row;
    });
    return r;
}

ExperimentReport run_experiment(const ExperimentConfig& c) {
    if (c.experiment == "sumproduct") return run_sumproduct(c);
    if (c.experiment == "furstenberg") return run_furstenberg(c);
    if (c.experiment == "certificate") return run_certificate(c);
    if (c.experiment == "projective") return run_projective(c);
    throw Error(ErrorKind::InvalidArgument, "unknown experiment '" + c.experiment + "'");
}

}  // namespace flab

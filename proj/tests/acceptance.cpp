// Acceptance criteria: `flab_acceptance N` checks criterion N and prints one [PASS] or [FAIL] line.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "flab/experiment.hpp"

using namespace flab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int report(int n, const std::string& title, bool ok, const std::string& detail) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << n << ". " << title << ": " << detail << std::endl;
    return ok ? 0 : 1;
}

std::string num(double x) {
    std::ostringstream os;
    os.precision(4);
    os << x;
    return os.str();
}

// 1. Exact exponent arithmetic.
int criterion1() {
    auto t0 = Clock::now();
    bool ok = c_alpha(make_q(1, 2)) == make_q(1, 4536);
    for (int d : {8, 12, 20, 40}) {
        Rational delta = pow2q(-d);
        ExactPower K = gkz_threshold(make_q(1, 2), delta, 0);
        ok = ok && K == ExactPower::power(delta, make_q(-1, 128));
        KProfile p;
        p.alpha = make_q(1, 2);
        p.delta = delta;
        p.epsilon = 0;
        p.K3 = K;
        p.K4 = K;
        GkzCertificate c = gkz_certificate(p);
        ok = ok && c.lhs == c.rhs;
    }
    ExponentCheck e = final_exponent_check(make_q(1, 2));
    ok = ok && e.e1 == make_q(191, 567) && e.e2 == make_q(95, 189);
    double secs = seconds_since(t0);
    ok = ok && secs < 1.0;
    return report(1, "exact exponent arithmetic", ok,
                  "c(1/2)=" + to_string_q(c_alpha(make_q(1, 2))) + " e1=" + to_string_q(e.e1) +
                      " e2=" + to_string_q(e.e2) + " threshold=delta^(-1/128) time=" + num(secs) + "s");
}

// Independent regularity check: every nonempty level-j cell has exactly N_j nonempty children.
bool regular_1d(const GridSet1D& A, const Branching& br) {
    const ScaleFrame& f = A.frame();
    if ((int)br.levels.size() != f.k) return false;
    for (int j = 0; j < f.k; ++j) {
        std::map<int64_t, std::set<int64_t>> children;
        for (int64_t i : A.indices()) {
            int64_t child = floor_shift(i, f.bits() - (j + 1) * f.T);
            children[floor_shift(child, f.T)].insert(child);
        }
        for (const auto& [cell, ch] : children)
            if ((int64_t)ch.size() != br.levels[j]) return false;
    }
    return true;
}

uint64_t energy_loop(const std::vector<int64_t>& A, const std::vector<int64_t>& B) {
    uint64_t n = 0;
    for (int64_t a : A)
        for (int64_t b : B)
            for (int64_t c : A)
                for (int64_t d : B)
                    if (a + b == c + d) ++n;
    return n;
}

// 2. Lemma-level properties on 500 random instances each.
int criterion2() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(20260101);
    size_t fail_a = 0, fail_b = 0, fail_c = 0, fail_d = 0;

    for (int t = 0; t < 500; ++t) {
        int k = 1 + int(rng() % 3), T = 1 + int(rng() % 4);
        ScaleFrame f = ScaleFrame::make(k, T, k * T);
        uint64_t n = uint64_t(1) << f.bits();
        std::vector<int64_t> v;
        size_t cnt = 1 + rng() % std::min<uint64_t>(n, 200);
        for (size_t i = 0; i < cnt; ++i) v.push_back(int64_t(rng() % n));
        GridSet1D A(f, v);
        MoranResult<GridSet1D> r = moran_regularize(A);
        // #A' (4T)^k >= #A
        BigInt lhs = BigInt(static_cast<unsigned long>(r.refined.size()));
        for (int i = 0; i < k; ++i) lhs *= 4 * T;
        bool subset = true;
        for (int64_t i : r.refined.indices()) subset = subset && A.contains(i);
        if (!(lhs >= BigInt(static_cast<unsigned long>(A.size()))) || !regular_1d(r.refined, r.branching) || !subset)
            ++fail_a;
    }

    for (int t = 0; t < 500; ++t) {
        size_t na = 1 + rng() % 40, nb = 1 + rng() % 40;
        std::vector<std::pair<uint32_t, uint32_t>> edges;
        uint64_t density = 1 + rng() % 6;
        for (uint32_t a = 0; a < na; ++a)
            for (uint32_t b = 0; b < nb; ++b)
                if (rng() % 8 < density * (1 + (a % 3 == 0))) edges.push_back({a, b});
        if (edges.empty()) edges.push_back({0, 0});
        BipartiteRefinement r = refine_bipartite(na, nb, edges);
        std::vector<size_t> da(na, 0), db(nb, 0);
        for (auto [a, b] : r.edges) {
            if (!r.keep_a[a] || !r.keep_b[b]) ++fail_b;
            ++da[a];
            ++db[b];
        }
        bool ok = 2 * r.edges.size() >= edges.size();
        for (size_t a = 0; a < na; ++a)
            if (r.keep_a[a] && 4 * na * da[a] < edges.size()) ok = false;
        for (size_t b = 0; b < nb; ++b)
            if (r.keep_b[b] && 4 * nb * db[b] < edges.size()) ok = false;
        if (!ok) ++fail_b;
    }

    for (int t = 0; t < 500; ++t) {
        std::vector<int64_t> a, b;
        size_t na = 1 + rng() % 30, nb = 1 + rng() % 30;
        int64_t span = 1 + int64_t(rng() % 100);
        for (size_t i = 0; i < na; ++i) a.push_back(int64_t(rng() % uint64_t(span)));
        for (size_t i = 0; i < nb; ++i) b.push_back(int64_t(rng() % uint64_t(3 * span)));
        LatticePoints A = LatticePoints::make(LatticeMode::Additive, a);
        LatticePoints B = LatticePoints::make(LatticeMode::Additive, b);
        BigInt eab(static_cast<unsigned long>(additive_energy(A, B)));
        BigInt eaa(static_cast<unsigned long>(additive_energy(A, A)));
        BigInt ebb(static_cast<unsigned long>(additive_energy(B, B)));
        CauchySchwarzCheck c = energy_cauchy_schwarz_check(A, B);
        if (!(eab * eab <= eaa * ebb) || c.lhs != eab * eab || c.rhs != eaa * ebb || !c.holds) ++fail_c;
    }

    for (int t = 0; t < 500; ++t) {
        int d = 4 + int(rng() % 9);
        Rational eps = make_q(long(1 + rng() % 9), 10);
        std::vector<Line> L;
        size_t n = 1 + rng() % 40;
        int mode = int(rng() % 3);
        for (size_t i = 0; i < n; ++i) {
            if (mode == 0) {
                L.push_back(Line::slope_intercept(make_q(long(rng() % 2001) - 1000, 64), Rational(long(i))));
            } else if (mode == 1) {
                L.push_back(Line::slope_intercept(make_q(long(rng() % 9), 1 << d), Rational(long(i))));
            } else if (rng() % 5 == 0) {
                L.push_back(Line::vertical_at(Rational(long(i))));
            } else {
                L.push_back(Line::slope_intercept(make_q(long(rng() % 2001) - 1000, long(1 + rng() % 50)),
                                                  Rational(long(i))));
            }
        }
        TwoEndsResult r = two_ends(L, eps, d);
        // (delta/pi)^eps #Lq <= #L'q, with the lower bound for pi making the left side larger
        ExactPower bound = ExactPower::power(pow2q(-d) / pi_lower(), eps) * ExactPower(Rational(long(n)));
        if (!(bound <= ExactPower(Rational(long(r.kept.size()))))) ++fail_d;
    }

    double secs = seconds_since(t0);
    bool ok = fail_a == 0 && fail_b == 0 && fail_c == 0 && fail_d == 0 && secs < 120;
    return report(2, "lemma-level properties, 500 instances each", ok,
                  "moran=" + std::to_string(fail_a) + " refine=" + std::to_string(fail_b) +
                      " cauchy_schwarz=" + std::to_string(fail_c) + " two_ends=" + std::to_string(fail_d) +
                      " failures, time=" + num(secs) + "s");
}

// Triple loop with min_angle = pi/4 decided by |cross| >= |dot|.
uint64_t census_loop(const Arrangement& arr, size_t l0, const Rational& min_d, size_t min_between) {
    uint64_t total = 0;
    QPoint u = arr.lines()[l0].direction();
    for (size_t p = 0; p < arr.num_points(); ++p) {
        if (!arr.has_edge(p, l0)) continue;
        QPoint pv = arr.point_value(p);
        for (size_t l = 0; l < arr.num_lines(); ++l) {
            if (!arr.has_edge(p, l)) continue;
            QPoint v = arr.lines()[l].direction();
            Rational cross = u.x * v.y - u.y * v.x, dot = u.x * v.x + u.y * v.y;
            if (abs(cross) < abs(dot)) continue;
            for (size_t q = 0; q < arr.num_points(); ++q) {
                if (q == p || !arr.has_edge(q, l)) continue;
                QPoint qv = arr.point_value(q);
                Rational dx = pv.x - qv.x, dy = pv.y - qv.y;
                if (dx * dx + dy * dy < min_d * min_d) continue;
                Rational tp = projection_parameter(arr.lines()[l], pv), tq = projection_parameter(arr.lines()[l], qv);
                size_t between = 0;
                for (size_t x = 0; x < arr.num_points(); ++x) {
                    if (!arr.has_edge(x, l)) continue;
                    Rational tx = projection_parameter(arr.lines()[l], arr.point_value(x));
                    if ((tp < tx && tx < tq) || (tq < tx && tx < tp)) ++between;
                }
                if (between >= min_between) ++total;
            }
        }
    }
    return total;
}

// 3. Oracle equivalence.
int criterion3() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(33);
    size_t fail_e = 0, fail_s = 0, fail_i = 0, fail_t = 0;
    size_t cases_e = 0, cases_s = 0, cases_i = 0, cases_t = 0;

    for (int t = 0; t < 60; ++t, ++cases_e) {
        std::vector<int64_t> a, b;
        size_t na = 1 + rng() % 64, nb = 1 + rng() % 64;
        for (size_t i = 0; i < na; ++i) a.push_back(int64_t(rng() % 200) - 50);
        for (size_t i = 0; i < nb; ++i) b.push_back(int64_t(rng() % 200));
        LatticePoints A = LatticePoints::make(LatticeMode::Additive, a);
        LatticePoints B = LatticePoints::make(LatticeMode::Additive, b);
        if (additive_energy(A, B) != energy_loop(A.elements, B.elements)) ++fail_e;
    }

    ScaleFrame g = ScaleFrame::make(1, 10, 10);
    for (int t = 0; t < 60; ++t, ++cases_s) {
        std::vector<int64_t> a, b;
        for (int i = 0; i < 30; ++i) a.push_back(int64_t(rng() % 1024));
        for (int i = 0; i < 30; ++i) b.push_back(int64_t(rng() % 1024));
        GridSet1D A(g, a, Domain::Free), B(g, b, Domain::Free);
        std::vector<std::pair<uint32_t, uint32_t>> e;
        for (uint32_t i = 0; i < A.size(); ++i)
            for (uint32_t j = 0; j < B.size(); ++j)
                if (rng() % 4 == 0) e.push_back({i, j});
        SumOp op = t % 2 ? SumOp::Plus : SumOp::Minus;
        std::set<int64_t> want;
        for (auto [i, j] : e) want.insert(op == SumOp::Plus ? A.indices()[i] + B.indices()[j]
                                                             : A.indices()[i] - B.indices()[j]);
        GridSet1D got = partial_sum(A, B, EdgeSet(A.size(), B.size(), e), op);
        if (std::vector<int64_t>(want.begin(), want.end()) != got.indices()) ++fail_s;
    }

    for (int t = 0; t < 40; ++t, ++cases_i) {
        int k = 1 + int(rng() % 3), T = 2 + int(rng() % 3);
        ScaleFrame f = ScaleFrame::make(k, T, k * T - int(rng() % 2));
        int64_t n = int64_t(1) << f.bits();
        std::vector<Point2> pts;
        for (int i = 0; i < 25; ++i) pts.push_back({int64_t(rng() % uint64_t(n)), int64_t(rng() % uint64_t(n))});
        GridSet2D P(f, pts);
        std::vector<Line> L;
        for (int i = 0; i < 40; ++i) {
            if (rng() % 8 == 0)
                L.push_back(Line::vertical_at(make_q(long(rng() % uint64_t(n)), n)));
            else
                L.push_back(Line::slope_intercept(make_q(long(rng() % 257) - 128, 64), make_q(long(rng() % uint64_t(n)), n)));
        }
        std::sort(L.begin(), L.end());
        L.erase(std::unique(L.begin(), L.end()), L.end());
        int slack = 1 + int(rng() % 2);
        Arrangement arr = build_incidences(P, L, f, slack);
        Rational r = slack * f.delta();
        std::vector<std::pair<uint32_t, uint32_t>> want;
        for (uint32_t p = 0; p < P.size(); ++p) {
            QPoint q = to_qpoint(P.points()[p], f.bits());
            for (uint32_t l = 0; l < L.size(); ++l) {
                Rational a, b, c;
                L[l].coefficients(a, b, c);
                Rational s = a * q.x + b * q.y + c;
                if (s * s <= r * r * (a * a + b * b)) want.push_back({p, l});
            }
        }
        if (arr.edges() != want) ++fail_i;
    }

    ScaleFrame h = ScaleFrame::make(2, 2, 4);
    for (int t = 0; t < 20; ++t) {
        std::vector<Point2> pts;
        for (int i = 0; i < 30; ++i) pts.push_back({int64_t(rng() % 16), int64_t(rng() % 16)});
        std::vector<Line> L;
        for (int i = 0; i < 12; ++i)
            L.push_back(Line::slope_intercept(make_q(long(rng() % 9) - 4, 2), make_q(long(rng() % 16), 16)));
        L.push_back(Line::vertical_at(make_q(long(rng() % 16), 16)));
        std::sort(L.begin(), L.end());
        L.erase(std::unique(L.begin(), L.end()), L.end());
        Arrangement arr = build_incidences(GridSet2D(h, pts), L, h, 2);
        for (size_t l0 = 0; l0 < arr.num_lines(); ++l0, ++cases_t) {
            Rational md = make_q(long(rng() % 4), 16);
            size_t mb = rng() % 3;
            TripleParams tp{md, Angle::pi_times(make_q(1, 4)), mb};
            if (census_triples(arr, l0, tp) != census_loop(arr, l0, md, mb)) ++fail_t;
        }
    }

    double secs = seconds_since(t0);
    bool ok = fail_e + fail_s + fail_i + fail_t == 0 && secs < 120;
    return report(3, "oracle equivalence", ok,
                  "energy " + std::to_string(cases_e - fail_e) + "/" + std::to_string(cases_e) + ", partial_sum " +
                      std::to_string(cases_s - fail_s) + "/" + std::to_string(cases_s) + ", incidences " +
                      std::to_string(cases_i - fail_i) + "/" + std::to_string(cases_i) + ", census " +
                      std::to_string(cases_t - fail_t) + "/" + std::to_string(cases_t) + " agree, time=" +
                      num(secs) + "s");
}

// 4. Stopping-time construction invariants at delta = 2^-8.
int criterion4() {
    auto t0 = Clock::now();
    ScaleFrame f = ScaleFrame::from_delta(8, make_q(1, 4), FrameConvention::Sixth);
    FurstenbergInstance inst = generate_instance("half", f, make_q(1, 2), Rational(1), 1);
    RegularizedInstance reg = regularize_instance(inst);
    ArrangementBuild b = build_arrangement(reg);
    const Arrangement& arr = b.arr;

    // at most one point of P1 in every 2^{-kT} square
    std::map<DyadicSquare, size_t> per_cell;
    size_t max_cell = 0;
    for (const auto& p : arr.points().points()) max_cell = std::max(max_cell, ++per_cell[square_of(f, p, f.k)]);
    ContributorCensus census = contributor_census(b);
    bool unique = max_cell == 1 && census.max_points_per_cell == 1;

    // pin equation on 1000 sampled (line, cell) pairs in its scope
    std::mt19937_64 rng(44);
    size_t sampled = 0, pin_fail = 0, outside_scope = 0, outside_mismatch = 0;
    while (sampled < 1000) {
        size_t l = rng() % reg.lines.size();
        Point2 p;
        if (rng() % 2 == 0 || arr.line_degree(l) == 0) {
            const auto& own = reg.point_sets[l].points();
            p = own[rng() % own.size()];
        } else {
            auto [pb, pe] = arr.points_of(l);
            p = arr.points().points()[pb[rng() % size_t(pe - pb)]];
        }
        DyadicSquare s = square_of(f, p, int(rng() % size_t(f.k + 1)));
        PinCheck c = pin_check(b, reg, l, s);
        if (!c.in_domain) {
            ++outside_scope;
            if (!c.holds()) ++outside_mismatch;
            continue;
        }
        ++sampled;
        if (!c.holds()) ++pin_fail;
    }

    // every incidence within N_delta
    size_t far = 0;
    for (auto [p, l] : arr.edges())
        if (!point_within(arr.point_value(p), arr.lines()[l], f.delta())) ++far;
    far += arr.count_slack_violations();

    double secs = seconds_since(t0);
    bool ok = unique && pin_fail == 0 && far == 0 && secs < 300;
    return report(4, "stopping-time construction invariants at delta=2^-8", ok,
                  "lines=" + std::to_string(reg.lines.size()) + " P1=" + std::to_string(arr.num_points()) +
                      " I1=" + std::to_string(arr.num_incidences()) + " max_points_per_cell=" +
                      std::to_string(max_cell) + " pin_failures=" + std::to_string(pin_fail) + "/" +
                      std::to_string(sampled) + " (skipped " + std::to_string(outside_scope) +
                      " pairs strictly inside a dominated square, " + std::to_string(outside_mismatch) +
                      " of them unequal) far_incidences=" + std::to_string(far) + " time=" + num(secs) + "s");
}

// 5. Pencil images and incidence preservation.
int criterion5() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(55);
    size_t bad = 0;
    for (int i = 0; i < 1000; ++i) {
        Rational t;
        switch (i % 10) {
            case 0: t = 0; break;
            case 1: t = 1; break;
            default: t = make_q(long(rng() % 4001) - 2000, long(1 + rng() % 97));
        }
        Line l;
        if (rng() % 10 == 0) {
            l = Line::vertical_at(t);
        } else {
            Rational m = make_q(long(rng() % 4001) - 2000, long(1 + rng() % 61));
            if (m == 0) m = 1;
            l = Line::slope_intercept(m, -m * t);
        }
        if (!check_pencil_image(l, t)) ++bad;
    }
    ProjectiveRun run = projective_pipeline(10, make_q(1, 4), 160, 1);
    bool within = run.dual.preservation2 <= 64;
    double secs = seconds_since(t0);
    bool ok = bad == 0 && within && secs < 120;
    return report(5, "projective pencils and incidence preservation", ok,
                  "pencil_failures=" + std::to_string(bad) + "/1000 preservation=" + num(run.dual.preservation) +
                      " (squared " + to_string_q(run.dual.preservation2) + ", bound 8) time=" + num(secs) + "s");
}

const Fit* find_fit(const ExperimentReport& r, const std::string& name) {
    for (const auto& f : r.fits)
        if (f.series == name) return &f;
    return nullptr;
}

// 6. Sum-product expansion sweep.
int criterion6() {
    auto t0 = Clock::now();
    ExperimentConfig c;
    c.experiment = "sumproduct";
    c.generator = "cantor";
    c.delta_exps = {10, 11, 12, 13, 14, 15, 16};
    c.seed = 1;
    ExperimentReport r = run_experiment(c);
    const Fit* fit = find_fit(r, "expansion");
    bool monotone = true;
    double prev = -1e300;
    std::string trace;
    for (const auto& row : r.rows) {
        double v = row["log2_ratio"].get<double>();
        monotone = monotone && v >= prev;
        prev = v;
        trace += (trace.empty() ? "" : ",") + num(v);
    }
    double secs = seconds_since(t0);
    bool ok = fit && r.failures.empty() && fit->slope >= 0.05 && fit->residual < 0.2 && monotone && secs < 600;
    return report(6, "sum-product expansion sweep delta=2^-10..2^-16", ok,
                  "slope=" + num(fit ? fit->slope : 0) + " residual=" + num(fit ? fit->residual : 0) +
                      " log2_ratio=[" + trace + "] time=" + num(secs) + "s");
}

// 7. Covering exponent of the union of point sets.
int criterion7() {
    auto t0 = Clock::now();
    ExperimentConfig c;
    c.experiment = "furstenberg";
    c.generator = "half";
    c.delta_exps = {8, 9, 10, 11, 12};
    c.seed = 1;
    ExperimentReport r = run_experiment(c);
    const Fit* fit = find_fit(r, "union_cov");
    double secs = seconds_since(t0);
    bool ok = fit && r.failures.empty() && fit->slope >= 0.9 && secs < 900;
    std::string fails;
    for (const auto& f : r.failures) fails += " " + f;
    return report(7, "Furstenberg covering exponent delta=2^-8..2^-12", ok,
                  "slope=" + num(fit ? fit->slope : 0) + " residual=" + num(fit ? fit->residual : 0) +
                      " stage_failures=" + std::to_string(r.failures.size()) + fails + " time=" + num(secs) + "s");
}

// 8. Certificate round trip on generated Cantor sets.
int criterion8() {
    auto t0 = Clock::now();
    size_t total = 0, satisfied = 0;
    double worst = 1e300;
    for (int d = 12; d <= 16; ++d)
        for (uint64_t seed = 1; seed <= 4; ++seed) {
            ScaleFrame f = ScaleFrame::from_delta(d, make_q(1, 4));
            GridSet1D A = generate_set("cantor", f, seed);
            KProfile p = measure_K(A, make_q(1, 2), f);
            GkzCertificate c = gkz_certificate(p);
            ++total;
            if (c.satisfied) ++satisfied;
            worst = std::min(worst, c.margin_log2);
        }
    double secs = seconds_since(t0);
    bool ok = satisfied == total && secs < 300;
    return report(8, "certificate round trip on Cantor sets delta=2^-12..2^-16", ok,
                  std::to_string(satisfied) + "/" + std::to_string(total) +
                      " satisfied, smallest log2 margin=" + num(worst) + " time=" + num(secs) + "s");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: flab_acceptance <1-8>\n";
        return 2;
    }
    int n = std::atoi(argv[1]);
    try {
        switch (n) {
            case 1: return criterion1();
            case 2: return criterion2();
            case 3: return criterion3();
            case 4: return criterion4();
            case 5: return criterion5();
            case 6: return criterion6();
            case 7: return criterion7();
            case 8: return criterion8();
            default: std::cerr << "unknown criterion " << n << "\n"; return 2;
        }
    } catch (const std::exception& e) {
        return report(n, "criterion", false, std::string("exception: ") + e.what());
    }
}

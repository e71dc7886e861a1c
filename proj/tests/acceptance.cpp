// Acceptance run: one PASS/FAIL line per criterion, each with its runtime budget.
// Usage: acceptance [criterion numbers...]  (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "driftsim/checks.hpp"
#include "driftsim/diffusion.hpp"
#include "driftsim/probes.hpp"
#include "driftsim/stats.hpp"

using namespace driftsim;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
    bool ok = false;
    std::string detail;
};

// Hard rows of a report, condensed to one line.
Outcome from_report(const ExperimentReport& rep) {
    Outcome o{!rep.hard_failure(), {}};
    std::ostringstream os;
    bool first = true;
    for (const auto& s : rep.statistics) {
        if (s.verdict == Verdict::informational) continue;
        os << (first ? "" : "; ") << s.label << " = " << format_number(s.value);
        if (s.verdict == Verdict::fail) os << " (fail)";
        first = false;
    }
    o.detail = os.str();
    return o;
}

Outcome merge(std::vector<Outcome> parts) {
    Outcome o{true, {}};
    for (std::size_t i = 0; i < parts.size(); ++i) {
        o.ok = o.ok && parts[i].ok;
        o.detail += (i ? " | " : "") + parts[i].detail;
    }
    return o;
}

std::string num(double v) { return format_number(v); }

Outcome c1_zero_noise() {
    BatchConfig c;
    c.kappa = 2.0;
    c.levels = {10.0};
    c.trials = 10000;
    c.method = Method::euler;
    c.dt = 1e-3;
    c.step = 0.01;
    c.seed = 1001;
    c.suppress_noise = true;
    const auto v = run_hitting_batch(c).values(0);
    const double m = mean(v);
    return {std::abs(m / 20.0 - 1.0) <= 0.03, "mean H = " + num(m) + " (target 20, 3%)"};
}

Outcome c2_dufresne() {
    ExperimentReport rep;
    for (double k : {0.5, 1.0, 2.0}) dufresne_check(rep, k, 5000, 1002);
    return from_report(rep);
}

Outcome c3_kappa3() {
    SimulationOptions o;
    o.step = 0.01;
    o.horizon = kInf;
    const auto res = regime_verifier(3.0, {200.0}, 1000, 1003, o);
    return from_report(res.report);
}

Outcome c4_kappa1() {
    SimulationOptions o;
    o.horizon = kInf;
    const auto res = regime_verifier(1.0, {100.0, 1000.0}, 500, 1004, o);
    return from_report(res.report);
}

Outcome c5_kappa_half() {
    SimulationOptions o;
    o.horizon = kInf;
    const auto res = regime_verifier(0.5, {50.0}, 10000, 1005, o);
    return from_report(res.report);
}

Outcome c6_methods() {
    std::vector<Outcome> parts;
    Seed seed = 1006;
    for (double kappa : {0.5, 1.0}) {
        for (double r : {20.0, 50.0}) {
            // Coarse grid for a single core; both samplers censor at the same horizon,
            // so the comparison is between laws of min(H, horizon).
            BatchConfig c;
            c.kappa = kappa;
            c.levels = {r};
            c.trials = 10000;
            c.step = 0.25;
            c.dt = 0.005;
            c.node_step = 0.025;
            c.horizon = 1e4;
            c.method = Method::euler;
            c.seed = seed++;
            const BatchResult e = run_hitting_batch(c);
            c.method = Method::ray_knight;
            c.seed = seed++;
            const BatchResult k = run_hitting_batch(c);
            const KsResult ks = ks_two_sample(e.values(0), k.values(0));
            parts.push_back({ks.passes_01(), "kappa=" + num(kappa) + " r=" + num(r) + ": D = " + num(ks.statistic) +
                                                 " < " + num(ks.critical_01) + " (censored " +
                                                 std::to_string(e.censored) + "/" + std::to_string(k.censored) + ")"});
        }
    }
    return merge(parts);
}

Outcome c7_stable_functional() {
    ExperimentReport rep;
    stable_functional_check(rep, 0.5, 10000, 1007);
    return from_report(rep);
}

Outcome c8_cauchy_functional() {
    ExperimentReport rep;
    cauchy_functional_check(rep, 10000, 1008);
    return from_report(rep);
}

Outcome c9_inverse_square() {
    ExperimentReport rep;
    inverse_square_check(rep, 6.0, 1e4, 500, 1009);
    inverse_square_check(rep, 8.0, 1e4, 500, 1010);
    return from_report(rep);
}

Outcome c10_exp_moment() {
    ExperimentReport rep;
    exp_moment_check(rep, 100000, 1011);
    return from_report(rep);
}

Outcome c11_small_deviation() {
    ExperimentReport rep;
    small_deviation_check(rep, 0.5, 1000000, 1012);
    return from_report(rep);
}

Outcome c12_properties() {
    ExperimentReport rep;
    occupation_check(rep, 200, 1013);
    besq_martingale_check(rep, 6.0, 20000, 1014);
    besq_martingale_check(rep, 8.0, 20000, 1015);
    jacobi_clamp_check(rep, 0.5, 1016);
    jacobi_clamp_check(rep, 1.0, 1017);
    reproducibility_check(rep, 1018);
    return from_report(rep);
}

Outcome c13_informational() {
    SimulationOptions o;
    o.step = 0.1;
    o.horizon = kInf;
    const auto levy = levy_class_probe(0.5, {make_growth("log"), make_growth("log_squared")}, 12, 200, 1019, o);
    SimulationOptions l;
    l.horizon = kInf;
    const auto lil = lil_probe(1.0, {10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0}, 200, 1020, std::nullopt, l);
    std::ostringstream os;
    bool executed = !levy.report.statistics.empty() && !lil.statistics.empty();
    for (const auto* rep : {&levy.report, &lil})
        for (const auto& s : rep->statistics) {
            executed = executed && s.verdict == Verdict::informational;
            os << "\n      " << s.label << " = " << num(s.value);
        }
    return {executed, "informational rows reported:" + os.str()};
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "zero-noise oracle", 60, c1_zero_noise},
        {2, "Dufresne identity", 120, c2_dufresne},
        {3, "kappa=3 median H(r)/r", 300, c3_kappa3},
        {4, "kappa=1 median H(r)/(r log r)", 600, c4_kappa1},
        {5, "kappa=0.5 Hill index of H(50)", 600, c5_kappa_half},
        {6, "Euler against Ray-Knight", 600, c6_methods},
        {7, "stable functional, kappa=0.5", 180, c7_stable_functional},
        {8, "Cauchy functional, kappa=1", 180, c8_cauchy_functional},
        {9, "Bessel inverse-square clock", 180, c9_inverse_square},
        {10, "exponential moment of Cauchy(8)", 60, c10_exp_moment},
        {11, "small-deviation exponent", 120, c11_small_deviation},
        {12, "property suites", kInf, c12_properties},
        {13, "upper-class and lower-envelope probes", 900, c13_informational},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_budget = secs <= c.budget_s;
        const bool ok = o.ok && in_budget;
        failed += !ok;
        std::printf("%s criterion %d (%s): %s [%.1f s", ok ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
        if (std::isfinite(c.budget_s)) std::printf(" of %.0f s budget%s", c.budget_s, in_budget ? "" : ", over budget");
        std::printf("]\n");
        std::fflush(stdout);
    }
    std::printf("%d criteria failed\n", failed);
    return failed ? 1 : 0;
}

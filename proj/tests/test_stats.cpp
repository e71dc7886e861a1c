#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <random>

#include "driftsim/errors.hpp"
#include "driftsim/probes.hpp"
#include "driftsim/stable.hpp"
#include "driftsim/stats.hpp"

using namespace driftsim;

namespace {

std::vector<double> uniform(std::size_t n, double lo, double hi, Seed seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

}  // namespace

TEST_CASE("two-sample KS on identical samples is zero") {
    const auto a = uniform(1000, 0.0, 1.0, 1);
    const auto ks = ks_two_sample(a, a);
    CHECK(ks.statistic == 0.0);
    CHECK(ks.passes_01());
}

TEST_CASE("two-sample KS of shifted uniforms is one half") {
    const auto ks = ks_two_sample(uniform(10000, 0.0, 1.0, 2), uniform(10000, 0.5, 1.5, 3));
    CHECK(std::abs(ks.statistic - 0.5) < 0.02);
    CHECK_FALSE(ks.passes_01());
}

TEST_CASE("two-sample KS handles ties and small cases exactly") {
    CHECK(ks_two_sample({1, 2, 3}, {1, 2, 3, 4}).statistic == doctest::Approx(0.25));
    CHECK(ks_two_sample({1, 1, 1}, {2, 2}).statistic == doctest::Approx(1.0));
    CHECK(ks_two_sample({0, 1}, {1, 2}).statistic == doctest::Approx(0.5));
    CHECK_THROWS_AS(ks_two_sample({}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ks_two_sample({1.0}, {}), std::invalid_argument);
}

TEST_CASE("KS rejection rate on same-law pairs is calibrated") {
    int rejected01 = 0, rejected05 = 0;
    const int reps = 1000;
    for (int i = 0; i < reps; ++i) {
        const auto ks = ks_two_sample(uniform(10000, 0.0, 1.0, split_seed(7, 2 * i)),
                                      uniform(10000, 0.0, 1.0, split_seed(7, 2 * i + 1)));
        rejected01 += !ks.passes_01();
        rejected05 += !ks.passes_05();
    }
    // binomial(1000, p) within 3 standard errors
    CHECK(rejected01 <= 10 + 3 * std::sqrt(1000 * 0.01 * 0.99));
    CHECK(std::abs(rejected05 - 50) <= 3 * std::sqrt(1000 * 0.05 * 0.95));
}

TEST_CASE("Kolmogorov survival hits the tabulated quantiles") {
    CHECK(kolmogorov_survival(kKsC01) == doctest::Approx(0.01).epsilon(0.01));
    CHECK(kolmogorov_survival(kKsC05) == doctest::Approx(0.05).epsilon(0.01));
    CHECK(kolmogorov_survival(0.0) == 1.0);
    CHECK(kolmogorov_survival(5.0) < 1e-20);
}

TEST_CASE("one-sample KS against the exact CDF") {
    const auto a = uniform(5000, 0.0, 1.0, 4);
    auto cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
    CHECK(ks_one_sample(a, cdf).passes_01());
    auto shifted = [](double x) { return std::clamp(x - 0.1, 0.0, 1.0); };
    CHECK_FALSE(ks_one_sample(a, shifted).passes_01());
    // D of a single point at 0.5 is 0.5
    CHECK(ks_one_sample({0.5}, cdf).statistic == doctest::Approx(0.5));
}

TEST_CASE("order statistics") {
    const std::vector<double> v{3, 1, 4, 1, 5, 9, 2, 6};
    CHECK(median(v) == doctest::Approx(3.5));
    CHECK(quantile(v, 0.0) == 1.0);
    CHECK(quantile(v, 1.0) == 9.0);
    CHECK(quantile(v, 0.25) == doctest::Approx(1.75));
    CHECK(mean(v) == doctest::Approx(31.0 / 8.0));
    CHECK(variance({1.0, 2.0, 3.0, 4.0}) == doctest::Approx(5.0 / 3.0));
    const Ecdf e = make_ecdf(v);
    CHECK(e(0.0) == 0.0);
    CHECK(e(1.0) == doctest::Approx(0.25));
    CHECK(e(9.0) == 1.0);
    // Property: the ECDF is nondecreasing on random probes.
    Rng rng(3);
    std::uniform_real_distribution<double> u(-1.0, 10.0);
    double prev = -1.0, x = -1.0;
    std::vector<double> probes(200);
    for (auto& p : probes) p = u(rng);
    std::sort(probes.begin(), probes.end());
    for (double p : probes) {
        CHECK(e(p) >= prev);
        prev = e(p);
        x = p;
    }
    CHECK(x <= 10.0);
}

TEST_CASE("Hill estimator on exact Pareto and light-tailed input") {
    Rng rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double alpha : {0.5, 1.0, 2.0}) {
        std::vector<double> v(100000);
        for (auto& x : v) x = std::pow(1.0 - u(rng), -1.0 / alpha);
        const HillResult h = hill_estimator(v);
        CHECK(h.estimate == doctest::Approx(alpha).epsilon(0.05));
        CHECK(h.lower <= h.estimate);
        CHECK(h.estimate <= h.upper);
        CHECK_FALSE(h.unstable);
        CHECK(h.k == 2000);
    }
    std::exponential_distribution<double> e(1.0);
    std::vector<double> light(100000);
    for (auto& x : light) x = e(rng);
    CHECK(hill_estimator(light).estimate > 3.0);
    std::vector<double> few(1000);
    for (auto& x : few) x = 1.0 / u(rng);
    CHECK(hill_estimator(few).unstable);
    CHECK_THROWS_AS(hill_estimator({1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("reports carry verdicts and a versioned schema") {
    ExperimentReport r;
    r.name = "unit";
    r.seed = 42;
    r.parameters["kappa"] = "1";
    r.check("good", 1.0, 1.0, 0.1, true);
    r.inform("info", std::nan(""));
    CHECK_FALSE(r.hard_failure());
    r.check("bad", 5.0, 1.0, 0.1, false, "too far");
    CHECK(r.hard_failure());
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["schema_version"] == 1);
    CHECK(j["name"] == "unit");
    CHECK(j["seed"] == 42);
    CHECK(j["statistics"].size() == 3);
    CHECK(j["statistics"][1]["value"].is_null());
    CHECK(j["statistics"][2]["verdict"] == "fail");
    CHECK(j["verdicts"]["pass"] == 1);
    CHECK(j["verdicts"]["fail"] == 1);
    CHECK(j["verdicts"]["informational"] == 1);
    for (const auto& s : j["statistics"]) CHECK(s.contains("verdict"));
    const std::string text = r.to_text();
    CHECK(text.find("[fail] bad") != std::string::npos);
    CHECK(text.find("too far") != std::string::npos);
}

TEST_CASE("regime verifier at kappa = 3 reports the 4/(kappa-1) target") {
    SimulationOptions o;
    o.step = 0.05;
    const RegimeResult res = regime_verifier(3.0, {20.0, 40.0}, 200, 5, o);
    REQUIRE(res.samples.size() == 2);
    CHECK(res.samples[0].size() == 200);
    bool found = false;
    for (const auto& s : res.report.statistics)
        if (s.label.find("4/(kappa-1)") != std::string::npos) {
            CHECK(s.target == 2.0);
            found = true;
        }
    CHECK(found);
    CHECK(res.report.statistics[1].verdict != Verdict::informational);
    CHECK_THROWS_AS(regime_verifier(3.0, {20.0}, 50, 5, o), std::invalid_argument);
    CHECK_THROWS_AS(regime_verifier(3.0, {40.0, 20.0}, 200, 5, o), std::invalid_argument);
}

TEST_CASE("regime verifier at kappa = 1 checks the trend") {
    SimulationOptions o;
    o.step = 0.05;
    const RegimeResult res = regime_verifier(1.0, {10.0, 30.0}, 100, 6, o);
    int hard = 0;
    for (const auto& s : res.report.statistics) hard += s.verdict != Verdict::informational;
    CHECK(hard == 2);
}

TEST_CASE("growth functions") {
    CHECK(make_growth("constant")(1e6) == 1.0);
    CHECK(make_growth("log")(0.0) == doctest::Approx(1.0));
    CHECK(make_growth("log_squared")(1e3) == doctest::Approx(std::pow(std::log(1e3 + std::exp(1.0)), 2)));
    CHECK_FALSE(make_growth("constant").convergent_sum());
    CHECK_FALSE(make_growth("log").convergent_sum());
    CHECK_FALSE(make_growth("loglog_variant").convergent_sum());
    CHECK(make_growth("log_squared").convergent_sum());
    CHECK(make_growth("log_power", 1.5).convergent_sum());
    CHECK_FALSE(make_growth("log_power", 0.5).convergent_sum());
    CHECK_THROWS_AS(make_growth("log_power", -1.0), ConfigError);
    CHECK_THROWS_AS(make_growth("sqrt"), ConfigError);
    // Property: every choice is positive and nondecreasing.
    Rng rng(1);
    std::uniform_real_distribution<double> u(0.0, 1e6);
    for (const auto& a : {make_growth("constant"), make_growth("log"), make_growth("log_squared"),
                          make_growth("loglog_variant"), make_growth("log_power", 3.0)}) {
        for (int i = 0; i < 200; ++i) {
            const double x = u(rng), y = x + u(rng);
            CHECK(a(x) > 0.0);
            CHECK(a(x) <= a(y));
        }
    }
}

TEST_CASE("upper-class probe: running max is nondecreasing") {
    SimulationOptions o;
    o.step = 0.2;
    const auto res = levy_class_probe(0.5, {make_growth("log"), make_growth("log_squared")}, 10, 10, 3, o);
    REQUIRE(res.levels.size() == 10);
    CHECK(res.levels[4] == doctest::Approx(std::exp(5.0)));
    for (const auto& rm : res.running_max) {
        REQUIRE(rm.size() == 100);
        for (std::size_t t = 0; t < 10; ++t)
            for (std::size_t n = 1; n < 10; ++n) CHECK(rm[t * 10 + n] >= rm[t * 10 + n - 1]);
    }
    for (std::size_t t = 0; t < 100; ++t) CHECK(res.running_max[1][t] <= res.running_max[0][t]);
    for (const auto& s : res.report.statistics) CHECK(s.verdict == Verdict::informational);
    CHECK_THROWS_AS(levy_class_probe(0.5, {make_growth("log")}, 9, 10, 3, o), std::invalid_argument);
    CHECK_THROWS_AS(levy_class_probe(1.5, {make_growth("log")}, 10, 10, 3, o), std::invalid_argument);
}

TEST_CASE("lower-envelope probe") {
    SimulationOptions o;
    o.step = 0.05;
    const auto rep = lil_probe(1.0, {10.0, 20.0, 50.0}, 30, 4, std::nullopt, o);
    bool monotone = false;
    for (const auto& s : rep.statistics) {
        CHECK(s.verdict == Verdict::informational);
        if (s.label.find("nonincreasing") != std::string::npos) monotone = s.value == 1.0;
    }
    CHECK(monotone);
    const auto rep2 = lil_probe(0.5, {10.0, 20.0}, 20, 4, 0.5, o);
    CHECK(rep2.statistics[0].target == doctest::Approx(c1_constant(0.5, 0.5)));
    CHECK_THROWS_AS(lil_probe(1.0, {2.0, 20.0}, 30, 4, std::nullopt, o), std::invalid_argument);
}

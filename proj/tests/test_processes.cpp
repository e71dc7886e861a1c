#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "driftsim/checks.hpp"
#include "driftsim/errors.hpp"
#include "driftsim/processes.hpp"
#include "driftsim/stats.hpp"

using namespace driftsim;

namespace {

std::vector<double> besq_draws(double delta, double z0, double dt, std::size_t n, Seed seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = besq_transition(delta, z0, dt, rng);
    return v;
}

double standard_error(const std::vector<double>& v) { return std::sqrt(variance(v) / static_cast<double>(v.size())); }

}  // namespace

TEST_CASE("BESQ(2) from 0 is exponential with mean 2t") {
    for (double t : {0.5, 1.0, 3.0}) {
        const auto v = besq_draws(2.0, 0.0, t, 100000, 31);
        CHECK(std::abs(mean(v) - 2.0 * t) < 3.0 * standard_error(v));
        CHECK(ks_one_sample(v, [t](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x / (2.0 * t)); }).passes_01());
    }
}

TEST_CASE("BESQ(0) is a martingale and absorbs at 0") {
    for (double t : {0.5, 2.0, 10.0}) {
        const auto v = besq_draws(0.0, 8.0, t, 100000, 32);
        CHECK(std::abs(mean(v) - 8.0) < 3.0 * standard_error(v));
    }
    // P(absorbed by time x) = exp(-z0 / (2x)); z0 = 2 lambda gives exp(-lambda / x).
    const double lambda = 3.0;
    for (double x : {0.5, 2.0, 8.0}) {
        const auto v = besq_draws(0.0, 2.0 * lambda, x, 100000, 33);
        const double zeros = static_cast<double>(std::count(v.begin(), v.end(), 0.0)) / 1e5;
        const double p = std::exp(-lambda / x);
        CHECK(std::abs(zeros - p) < 3.0 * std::sqrt(p * (1.0 - p) / 1e5));
    }
    CHECK(besq_transition(0.0, 0.0, 1.0, Seed{1}) == 0.0);
    CHECK_THROWS_AS(besq_transition(-1.0, 1.0, 1.0, Seed{1}), std::invalid_argument);
}

TEST_CASE("BESQ additivity in dimension and start") {
    struct Triple {
        double d1, d2, t;
    };
    int i = 0;
    for (const Triple tr : {Triple{0.0, 2.0, 1.0}, Triple{1.0, 3.0, 0.5}, Triple{0.5, 4.0, 2.0}}) {
        const double z1 = 1.0, z2 = 2.5;
        const auto a = besq_draws(tr.d1, z1, tr.t, 20000, split_seed(40, 3 * i));
        const auto b = besq_draws(tr.d2, z2, tr.t, 20000, split_seed(40, 3 * i + 1));
        const auto c = besq_draws(tr.d1 + tr.d2, z1 + z2, tr.t, 20000, split_seed(40, 3 * i + 2));
        std::vector<double> sum(a.size());
        for (std::size_t k = 0; k < a.size(); ++k) sum[k] = a[k] + b[k];
        CHECK(ks_two_sample(sum, c).passes_01());
        ++i;
    }
}

TEST_CASE("property: E Z(t) = z0 + delta t") {
    Rng gen(41);
    std::uniform_real_distribution<double> ud(0.0, 6.0), uz(0.0, 10.0), ut(0.05, 5.0);
    for (int k = 0; k < 10; ++k) {
        const double delta = ud(gen), z0 = uz(gen), t = ut(gen);
        const auto v = besq_draws(delta, z0, t, 20000, split_seed(42, k));
        // Ten simultaneous comparisons, so a Bonferroni z of 3.5.
        CHECK(std::abs(mean(v) - (z0 + delta * t)) < 3.5 * standard_error(v));
        CHECK(*std::min_element(v.begin(), v.end()) >= 0.0);
    }
}

TEST_CASE("BESQ path observes the requested times") {
    Eigen::ArrayXd times(4);
    times << 0.0, 0.5, 1.0, 4.0;
    const ProcessPath p = besq_path(2.0, 1.0, times, 5);
    REQUIRE(p.size() == 4);
    CHECK(p.states[0] == 1.0);
    CHECK((p.states >= 0.0).all());
    CHECK(p.kind == ProcessKind::besq);
    const ProcessPath q = besq_path(2.0, 1.0, times, 5);
    CHECK((p.states == q.states).all());
}

TEST_CASE("inverse-square clock") {
    const ProcessPath c = inverse_square_clock(6.0, {}, 100.0, 1e-3, 7);
    CHECK(c.states[0] == 0.0);
    for (Eigen::Index k = 1; k < c.size(); ++k) CHECK(c.states[k] >= c.states[k - 1]);
    CHECK_THROWS_AS(bessel_inverse_square(4.0, {}, 1.0, 1e-3, 1), std::invalid_argument);
    CHECK_THROWS_AS(bessel_inverse_square(6.0, {}, 0.0, 1e-3, 1), std::invalid_argument);

    // theta(t) / log t -> 1 / (d - 2) in mean with shrinking spread.
    for (double d : {6.0, 8.0}) {
        ExperimentReport rep;
        inverse_square_check(rep, d, 1e4, 500, d == 6.0 ? 8 : 9);
        for (const auto& s : rep.statistics)
            if (s.verdict != Verdict::informational) CHECK_MESSAGE(s.verdict == Verdict::pass, s.label);
    }
    std::vector<double> short_run, long_run;
    for (int k = 0; k < 200; ++k) {
        short_run.push_back(bessel_inverse_square(6.0, {}, 1e2, 1e-3, split_seed(10, k)).theta / std::log(1e2));
        long_run.push_back(bessel_inverse_square(6.0, {}, 1e4, 1e-3, split_seed(11, k)).theta / std::log(1e4));
    }
    CHECK(std::sqrt(variance(long_run)) < std::sqrt(variance(short_run)));
}

TEST_CASE("Jacobi process enters from 0 and stays in [0, 1]") {
    const ProcessPath p = jacobi_simulate(1.0, 0.0, 10.0, 1e-3, 12);
    CHECK(p.states[0] == 0.0);
    CHECK((p.states >= 0.0).all());
    CHECK((p.states <= 1.0).all());
    CHECK(p.states.tail(p.size() - 1).maxCoeff() > 0.0);
    int left_zero = 0;
    for (int k = 0; k < 200; ++k) {
        Rng rng(split_seed(13, k));
        left_zero += jacobi_value_at(1.0, 0.0, 0.1, 1e-3, rng) > 0.0;
    }
    CHECK(left_zero == 200);
    CHECK_THROWS_AS(jacobi_simulate(1.0, 1.5, 1.0, 1e-3, 1), std::invalid_argument);
    CHECK_THROWS_AS(jacobi_simulate(0.0, 0.5, 1.0, 1e-3, 1), std::invalid_argument);

    ExperimentReport rep;
    jacobi_clamp_check(rep, 1.0, 14);
    for (const auto& s : rep.statistics)
        if (s.verdict != Verdict::informational) CHECK_MESSAGE(s.verdict == Verdict::pass, s.label);
}

TEST_CASE("Jacobi stationary law is Beta(1, 1 + kappa)") {
    for (double kappa : {0.5, 1.0}) {
        // One value per independent path at a time in [50, 500], so the sample is i.i.d.
        std::vector<double> v, fine;
        for (int k = 0; k < 1000; ++k) {
            Rng rng(split_seed(15, k));
            const double t = 50.0 + 450.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            v.push_back(jacobi_value_at(kappa, 0.0, t, 5e-3, rng));
        }
        auto cdf = [kappa](double y) { return y <= 0.0 ? 0.0 : y >= 1.0 ? 1.0 : 1.0 - std::pow(1.0 - y, 1.0 + kappa); };
        CHECK(ks_one_sample(v, cdf).passes_01());
        // Fine-step reference run
        for (int k = 0; k < 500; ++k) {
            Rng rng(split_seed(16, k));
            fine.push_back(jacobi_value_at(kappa, 0.0, 50.0, 2.5e-4, rng));
        }
        CHECK(ks_two_sample(v, fine).passes_01());
    }
}

TEST_CASE("Jacobi reaches alpha quickly") {
    const double alpha = alpha_kappa(1.0);
    for (double t : {32.0, 64.0}) {
        int late = 0;
        for (int k = 0; k < 500; ++k) late += !jacobi_first_passage(1.0, 0.0, alpha, 1e-3, t, split_seed(17, k)).has_value();
        CHECK(late / 500.0 <= 2.0 * std::exp(-t / 32.0));
    }
    const auto hit = jacobi_first_passage(1.0, 0.0, alpha, 1e-3, 100.0, 18);
    REQUIRE(hit.has_value());
    CHECK(*hit > 0.0);
}

TEST_CASE("Jacobi scale function") {
    for (double kappa : {0.5, 1.0, 2.0}) {
        const JacobiScale s(kappa, 4000);
        CHECK(std::abs(s.S(s.alpha())) < 1e-12);
        // S(y) ~ (1-y)^{-kappa} / kappa as y -> 1
        const double e = 1e-4;
        CHECK(s.S(1.0 - e) * kappa * std::pow(e, kappa) == doctest::Approx(1.0).epsilon(0.05));
        double prev = -INFINITY;
        for (double y = 0.01; y < 0.99; y += 0.01) {
            const double v = s.S(y);
            CHECK(v > prev);
            prev = v;
            CHECK(std::abs(s.S_inverse(v) - y) < 1e-8);
        }
        CHECK_THROWS_AS(s.S(0.0), BoundaryError);
        CHECK_THROWS_AS(s.S(1.0), BoundaryError);
    }
    // Closed form at kappa = 1: S(y) = log(y/(1-y)) + 1/(1-y) minus its value at alpha.
    const JacobiScale s1(1.0, 4000);
    auto closed = [](double y) { return std::log(y / (1.0 - y)) + 1.0 / (1.0 - y); };
    for (double y : {0.05, 0.3, 0.7, 0.95}) CHECK(s1.S(y) == doctest::Approx(closed(y) - closed(s1.alpha())).epsilon(1e-9));
    CHECK_THROWS_AS(JacobiScale(1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(JacobiScale(0.0, 4000), std::invalid_argument);
}

TEST_CASE("Jacobi clock") {
    const ProcessPath p = jacobi_simulate(1.0, 0.0, 20.0, 1e-3, 19);
    const ProcessPath u = jacobi_clock(p, 1.0);
    REQUIRE(u.size() > 1);
    CHECK(u.states[0] == 0.0);
    for (Eigen::Index k = 1; k < u.size(); ++k) CHECK(u.states[k] >= u.states[k - 1]);
    ExperimentReport rep;
    jacobi_time_change_rows(rep, 1.0, 100, 20);
    REQUIRE(rep.statistics.size() == 4);
    for (const auto& s : rep.statistics) CHECK(s.verdict == Verdict::informational);
    CHECK_THROWS_AS(jacobi_time_change_rows(rep, 1.0, 0, 20), std::invalid_argument);
}

TEST_CASE("skew product of Bessel squares against a time-changed Jacobi process") {
    const auto s = skew_product_check(1.0, 5.0, 1e-3, 2000, 17);
    CHECK(s.ratio_at_zero == 0.0);
    CHECK(s.ratio_inside_unit);
    CHECK(s.clock_increasing);
    CHECK(s.ks_statistic < s.ks_critical_05);
    CHECK_THROWS_AS(skew_product_check(1.0, 5.0, 1e-3, 999, 17), std::invalid_argument);
}

TEST_CASE("process CSV") {
    const ProcessPath p = brownian_path(1.0, 0.25, 3);
    REQUIRE(p.size() == 5);
    CHECK(p.states[0] == 0.0);
    std::ostringstream os;
    write_process_csv(p, os);
    const std::string out = os.str();
    CHECK(out.rfind("t,state\n", 0) == 0);
    CHECK(std::count(out.begin(), out.end(), '\n') == 6);
}

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "driftsim/diffusion.hpp"
#include "driftsim/errors.hpp"
#include "driftsim/stats.hpp"

using namespace driftsim;

namespace {

BatchConfig config(double kappa, std::vector<double> levels, std::size_t trials, Method m, Seed seed,
                   double step = 0.05) {
    BatchConfig c;
    c.kappa = kappa;
    c.levels = std::move(levels);
    c.trials = trials;
    c.method = m;
    c.step = step;
    c.seed = seed;
    c.threads = 1;
    c.horizon = 1e6;
    return c;
}

double standard_error(const std::vector<double>& v) { return std::sqrt(variance(v) / static_cast<double>(v.size())); }

}  // namespace

TEST_CASE("H(0) = 0 for both methods") {
    const PotentialPath p = sample_potential(1.0, -20.0, 20.0, 0.05, 1);
    CHECK(euler_hitting_time(p, 0.0, 1e-3, 2).h_value == 0.0);
    CHECK(ray_knight_hitting_time(p, 0.0, 2).h_value == 0.0);
    CHECK(ray_knight_hitting_time(p, 1.0, 2).h_value > 0.0);
    CHECK(euler_hitting_time(p, 1.0, 1e-3, 2).h_value > 0.0);
    CHECK_THROWS_AS(euler_hitting_time(p, -1.0, 1e-3, 2), std::invalid_argument);
    CHECK_THROWS_AS(ray_knight_hitting_time(p, 50.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(euler_hitting_time(p, 1.0, 0.0, 2), std::invalid_argument);
}

TEST_CASE("zero-noise potential: E H(r) = 4r/kappa") {
    for (Method m : {Method::ray_knight, Method::euler}) {
        BatchConfig c = config(2.0, {10.0}, 2000, m, 3);
        c.suppress_noise = true;
        const auto v = run_hitting_batch(c).values(0);
        CHECK_MESSAGE(std::abs(mean(v) - 20.0) < 3.0 * standard_error(v), to_string(m));
    }
}

TEST_CASE("hitting times are nondecreasing in r along a path") {
    for (Method m : {Method::ray_knight, Method::euler}) {
        const BatchResult b = run_hitting_batch(config(1.0, {2.0, 4.0, 7.0, 10.0}, 60, m, 4));
        for (const auto& t : b.trials) {
            REQUIRE(t.size() == 4);
            for (std::size_t k = 1; k < t.size(); ++k) {
                CHECK(t[k].h_value >= t[k - 1].h_value);
                CHECK(t[k].h_minus >= t[k - 1].h_minus);
                CHECK(t[k].h_value == doctest::Approx(t[k].h_minus + t[k].h_plus));
            }
        }
    }
}

TEST_CASE("annealed kappa = 3: median H(r)/r near 2") {
    const auto v = run_hitting_batch(config(3.0, {200.0}, 1000, Method::ray_knight, 5, 0.02)).values(0);
    const double m = median(v) / 200.0;
    CHECK(m >= 1.7);
    CHECK(m <= 2.3);
}

TEST_CASE("Euler and Ray-Knight samples agree in law") {
    const auto e = run_hitting_batch(config(1.0, {10.0}, 1500, Method::euler, 6)).values(0);
    const auto r = run_hitting_batch(config(1.0, {10.0}, 1500, Method::ray_knight, 7)).values(0);
    CHECK(ks_two_sample(e, r).passes_01());
}

TEST_CASE("Euler censoring at the horizon") {
    const PotentialPath p = sample_potential(1.0, -20.0, 60.0, 0.05, 8);
    const auto s = euler_hitting_times(p, {1.0, 50.0}, 1e-3, 9, 5.0);
    REQUIRE(s.size() == 2);
    CHECK(s[1].censored());
    CHECK(s[1].h_value == 5.0);
    CHECK_THROWS_AS(euler_hitting_time(p, 50.0, 1e-3, 9, 5.0), HorizonExceededError);
}

TEST_CASE("negative-side tail") {
    const TailProbeResult t = negative_tail_probe(1.0, {}, 10000, 10);
    REQUIRE(t.samples.size() == 10000);
    for (std::size_t i = 1; i < t.survival.size(); ++i) CHECK(t.survival[i] <= t.survival[i - 1]);
    CHECK(t.z.back() / t.z.front() == doctest::Approx(1000.0));
    CHECK(t.slope <= -1.0 / 3.0 + 0.15);
    const double lo = *std::min_element(t.samples.begin(), t.samples.end());
    const TailProbeResult below = negative_tail_probe(1.0, {lo / 2.0, lo}, 10000, 10);
    CHECK(below.survival[0] == 1.0);
    CHECK_THROWS_AS(negative_tail_probe(1.0, {}, 50, 10), std::invalid_argument);

    // H_-(r) <= H_-(inf): finite-r samples are stochastically smaller.
    const BatchResult b = run_hitting_batch(config(1.0, {5.0}, 2000, Method::ray_knight, 11, 0.02));
    std::vector<double> hm;
    for (const auto& tr : b.trials) hm.push_back(tr[0].h_minus);
    const double m = median(t.samples);
    const double above = static_cast<double>(std::count_if(hm.begin(), hm.end(), [m](double x) { return x > m; })) / 2000.0;
    CHECK(above <= 0.5 + 3.0 * std::sqrt(0.25 / 2000.0));
}

TEST_CASE("sample CSV round trip") {
    const BatchResult b = run_hitting_batch(config(1.0, {2.0, 4.0}, 5, Method::ray_knight, 12));
    const auto flat = b.flat();
    std::stringstream ss;
    write_samples_csv(flat, ss);
    CHECK(ss.str().rfind("method,kappa,r,env_seed,noise_seed,h_value,h_minus,h_plus,flags\n", 0) == 0);
    const auto back = read_samples_csv(ss);
    REQUIRE(back.size() == flat.size());
    for (std::size_t i = 0; i < flat.size(); ++i) {
        CHECK(back[i].r == flat[i].r);
        CHECK(back[i].h_value == doctest::Approx(flat[i].h_value).epsilon(1e-12));
        CHECK(back[i].env_seed == flat[i].env_seed);
        CHECK(back[i].method == flat[i].method);
    }
    std::istringstream bad("method,kappa,r,env_seed,noise_seed,h_value,h_minus,h_plus,flags\neuler,1,x\n");
    CHECK_THROWS_AS(read_samples_csv(bad), std::runtime_error);
    std::istringstream wrong("a,b\n");
    CHECK_THROWS_AS(read_samples_csv(wrong), std::runtime_error);
}

TEST_CASE("batches are reproducible across thread counts") {
    BatchConfig c = config(1.0, {5.0}, 40, Method::euler, 13);
    const auto a = run_hitting_batch(c).values(0);
    c.threads = 3;
    CHECK(run_hitting_batch(c).values(0) == a);
    c.method = Method::ray_knight;
    c.threads = 1;
    const auto r1 = run_hitting_batch(c).values(0);
    c.threads = 4;
    CHECK(run_hitting_batch(c).values(0) == r1);
}

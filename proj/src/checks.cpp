#include "driftsim/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "driftsim/diffusion.hpp"
#include "driftsim/environment.hpp"
#include "driftsim/errors.hpp"
#include "driftsim/functionals.hpp"
#include "driftsim/processes.hpp"
#include "driftsim/stable.hpp"

namespace driftsim {

namespace {

std::string ks_note(const KsResult& ks) {
    return "KS " + format_number(ks.statistic) + ", p " + format_number(ks.p_value) + ", n " + std::to_string(ks.n) +
           (ks.m ? ", m " + std::to_string(ks.m) : "");
}

void ks_row(ExperimentReport& report, const std::string& label, const KsResult& ks) {
    report.check(label, ks.statistic, 0.0, ks.critical_01, ks.passes_01(), ks_note(ks));
}

std::string k_tag(double kappa) { return " (kappa=" + format_number(kappa) + ")"; }

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

void dufresne_check(ExperimentReport& report, double kappa, std::size_t n, Seed seed, double step) {
    std::vector<double> a;
    a.reserve(n);
    const double x_max = 40.0 / kappa;
    for (std::size_t i = 0; i < n; ++i) {
        const PotentialPath p = sample_potential(kappa, 0.0, x_max, step, split_seed(seed, i));
        a.push_back(scale_function(p).a_infinity());
    }
    const auto ks = ks_one_sample(a, [kappa](double x) { return x <= 0.0 ? 0.0 : boost::math::gamma_q(kappa, 2.0 / x); });
    ks_row(report, "A_inf against 2/gamma" + k_tag(kappa), ks);
}

void stable_functional_check(ExperimentReport& report, double kappa, std::size_t n, Seed seed) {
    const double lam = lambda_of(kappa);
    const double scale = 4.0 * std::pow(kappa, 1.0 / kappa - 2.0);
    Rng rng(split_seed(seed, 0));
    std::vector<double> k;
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const FunctionalValue v = K_functional(kappa, ray_knight_field(lam, rng));
        flagged += v.flagged;
        k.push_back(scale * v.value);
    }
    std::vector<double> ref = sample_stable_n(StableSpec::stable(kappa), n, split_seed(seed, 1));
    const double c4 = c4_constant(kappa);
    for (double& v : ref) v *= c4;
    ks_row(report, "4 kappa^(1/kappa-2) K against c4 S_kappa" + k_tag(kappa), ks_two_sample(k, ref));
    report.inform("c4" + k_tag(kappa), c4);
    report.inform("fields with cutoff share above 1% (K)", static_cast<double>(flagged));
}

void cauchy_functional_check(ExperimentReport& report, std::size_t n, Seed seed) {
    Rng rng(split_seed(seed, 0));
    std::vector<double> c;
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const FunctionalValue v = C_functional(ray_knight_field(8.0, rng));
        flagged += v.flagged;
        c.push_back(v.value);
    }
    std::vector<double> ref = sample_cauchy8_n(n, split_seed(seed, 1));
    for (double& v : ref) v *= std::numbers::pi / 2.0;
    const double mc = median(c), mr = median(ref);
    for (double& v : c) v -= mc;
    for (double& v : ref) v -= mr;
    ks_row(report, "median-centered C against median-centered (pi/2) C8", ks_two_sample(c, ref));
    report.inform("median C", mc);
    report.inform("median (pi/2) C8", mr);
    report.inform("median offset", mc - mr);
    report.inform("fields with cutoff share above 1% (C)", static_cast<double>(flagged));
}

void exp_moment_check(ExperimentReport& report, std::size_t n, Seed seed) {
    const TruncatedMean m = truncated_exp_moment(sample_cauchy8_n(n, seed));
    report.check("truncated mean of exp(-C8)", m.estimate, 1.0, 3.0 * m.standard_error,
                 std::abs(m.estimate - 1.0) <= 3.0 * m.standard_error,
                 "s.e. " + format_number(m.standard_error) + ", dropped " + std::to_string(m.dropped));
}

void small_deviation_check(ExperimentReport& report, double kappa, std::size_t n, Seed seed) {
    const SmallDeviationResult r = small_deviation_probe(kappa, {}, n, seed);
    const double target = kappa / (1.0 - kappa);
    const double exponent = -r.slope;
    report.check("small-deviation exponent" + k_tag(kappa), exponent, target, 0.2 * target,
                 std::abs(exponent - target) <= 0.2 * target, std::to_string(r.x.size()) + " grid points");
    report.inform("c15 estimate, free slope", r.c15_free);
    report.inform("c15 estimate, slope pinned at the target", r.c15_pinned);
}

void stable_tail_check(ExperimentReport& report, double index, std::size_t n, Seed seed) {
    const HillResult h = tail_exponent_check(StableSpec::stable(index), n, seed);
    report.check("Hill index of stable draws (index=" + format_number(index) + ")", h.estimate, index, 0.1,
                 std::abs(h.estimate - index) <= 0.1,
                 "k=" + std::to_string(h.k) + ", [" + format_number(h.lower) + ", " + format_number(h.upper) + "]");
}

void inverse_square_check(ExperimentReport& report, double d, double t, std::size_t trials, Seed seed, double dt) {
    std::vector<double> v;
    std::size_t faults = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        const InverseSquareResult r = bessel_inverse_square(d, BesselStart{}, t, dt, split_seed(seed, i));
        faults += r.discretization_fault;
        v.push_back(r.theta / std::log(t));
    }
    const double m = mean(v), target = 1.0 / (d - 2.0);
    report.check("mean theta(t)/log t (d=" + format_number(d) + ")", m, target, 0.04, std::abs(m - target) <= 0.04,
                 "s.e. " + format_number(std::sqrt(variance(v) / static_cast<double>(trials))) + ", faults " +
                     std::to_string(faults));
}

void occupation_check(ExperimentReport& report, std::size_t trials, Seed seed) {
    double worst = 0.0;
    std::size_t fields = 0, exhausted = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        const ProcessPath p = brownian_path(10.0, 1e-3, split_seed(seed, 2 * i));
        for (double t : {1.0, 5.0, 10.0}) {
            const LocalTimeField f = local_time_field(p, t, 0.05);
            worst = std::max(worst, std::abs(occupation_integral(f) / t - 1.0));
            ++fields;
        }
        try {
            const LocalTimeField f = field_at_inverse_local_time(0.2, 1e-3, 0.05, 200.0, split_seed(seed, 2 * i + 1));
            worst = std::max(worst, std::abs(occupation_integral(f) / f.t_final - 1.0));
            ++fields;
        } catch (const PathExhaustedError&) {
            ++exhausted;
        }
    }
    report.check("occupation identity, worst relative error over " + std::to_string(fields) + " fields", worst, 0.0,
                 0.01, worst <= 0.01, std::to_string(exhausted) + " inverse-local-time runs passed the time cap");
}

void besq_martingale_check(ExperimentReport& report, double lambda, std::size_t trials, Seed seed) {
    Eigen::ArrayXd levels = Eigen::ArrayXd::LinSpaced(9, 0.0, 4.0);
    Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(levels.size()), sum2 = sum;
    for (std::size_t i = 0; i < trials; ++i) {
        const ProcessPath p = besq_path(0.0, lambda, levels, split_seed(seed, i));
        sum += p.states;
        sum2 += p.states.square();
    }
    const double n = static_cast<double>(trials);
    double worst = 0.0;
    bool ok = true;
    for (Eigen::Index k = 1; k < levels.size(); ++k) {
        const double m = sum[k] / n;
        const double se = std::sqrt(std::max(sum2[k] / n - m * m, 0.0) / (n - 1.0));
        const double z = std::abs(m - lambda) / se;
        worst = std::max(worst, z);
        ok = ok && z <= 3.0;
    }
    report.check("BESQ(0) mean from " + format_number(lambda) + ", worst level deviation in s.e.", worst, 0.0, 3.0, ok);
}

void jacobi_clamp_check(ExperimentReport& report, double kappa, Seed seed) {
    bool confined = true, decreasing = true;
    double prev = 1.0;
    std::string rates;
    for (double dt : {1e-2, 5e-3, 2.5e-3, 1.25e-3}) {
        const ProcessPath p = jacobi_simulate(kappa, 0.0, 100.0, dt, seed);
        confined = confined && p.states.minCoeff() >= 0.0 && p.states.maxCoeff() <= 1.0;
        const double rate = p.clamp_rate();
        decreasing = decreasing && rate < prev;
        prev = rate;
        rates += (rates.empty() ? "" : ", ") + format_number(rate);
    }
    report.check("Jacobi paths confined to [0,1]" + k_tag(kappa), confined ? 1.0 : 0.0, 1.0, 0.0, confined);
    report.check("Jacobi clamp rate decreasing as dt halves" + k_tag(kappa), prev, 0.0, 0.0, decreasing,
                 "rates " + rates);
}

void skew_product_rows(ExperimentReport& report, double kappa, std::size_t trials, Seed seed) {
    const SkewProductStats s = skew_product_check(kappa, 5.0, 1e-3, trials, seed);
    const double n = static_cast<double>(trials);
    const double crit01 = kKsC01 * std::sqrt(2.0 / n);
    report.check("skew product: ratio against Jacobi at the clock" + k_tag(kappa), s.ks_statistic, 0.0, crit01,
                 s.ks_statistic < crit01, "5% critical " + format_number(s.ks_critical_05));
    report.check("skew product: ratio starts at 0", s.ratio_at_zero, 0.0, 0.0, s.ratio_at_zero == 0.0);
    report.check("skew product: ratio inside (0,1)", s.ratio_inside_unit ? 1.0 : 0.0, 1.0, 0.0, s.ratio_inside_unit);
    report.check("skew product: clock increasing", s.clock_increasing ? 1.0 : 0.0, 1.0, 0.0, s.clock_increasing);
}

void jacobi_time_change_rows(ExperimentReport& report, double kappa, std::size_t trials, Seed seed, double u) {
    if (trials == 0 || !(u > 0.0)) throw std::invalid_argument("jacobi_time_change_rows: need trials > 0 and u > 0");
    const JacobiScale scale(kappa, 4000);
    const double dt = 1e-3, t_max = 20.0;
    std::vector<double> z;
    std::size_t unreached = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        const ProcessPath path = jacobi_simulate(kappa, 0.0, t_max, dt, split_seed(seed, i));
        const ProcessPath clock = jacobi_clock(path, kappa);
        const Eigen::Index start = path.size() - clock.size();
        Eigen::Index k = 1;
        while (k < clock.size() && clock.states[k] < u) ++k;
        const double y = k < clock.size() ? path.states[start + k] : 0.0;
        if (k >= clock.size() || !(y > 0.0 && y < 1.0)) {
            ++unreached;
            continue;
        }
        // The clock starts at the first grid point at or above alpha, so the increment of S is used.
        z.push_back((scale.S(y) - scale.S(path.states[start])) / std::sqrt(u));
    }
    const std::string tag = k_tag(kappa) + " at U=" + format_number(u);
    if (z.size() < 2) {
        report.inform("time change: too few paths reached the clock level" + tag, static_cast<double>(z.size()));
        return;
    }
    auto normal_cdf = [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); };
    const KsResult ks = ks_one_sample(z, normal_cdf);
    report.inform("time change: S(Y) increment / sqrt(U) against N(0,1)" + tag, ks.statistic,
                  ks_note(ks) + ", 1% critical " + format_number(ks.critical_01));
    report.inform("time change: mean of S(Y) increment / sqrt(U)" + tag, mean(z));
    report.inform("time change: variance of S(Y) increment / sqrt(U)" + tag, variance(z));
    report.inform("time change: paths without a valid reading" + tag, static_cast<double>(unreached));
}

void reproducibility_check(ExperimentReport& report, Seed seed) {
    bool same = true;
    for (Method m : {Method::ray_knight, Method::euler}) {
        BatchConfig c;
        c.kappa = 1.0;
        c.levels = {5.0, 10.0};
        c.trials = 12;
        c.method = m;
        c.step = 0.05;
        c.horizon = 1e5;
        c.seed = seed;
        c.threads = 1;
        const BatchResult a = run_hitting_batch(c);
        const BatchResult b = run_hitting_batch(c);
        c.threads = 3;
        const BatchResult t = run_hitting_batch(c);
        for (std::size_t i = 0; i < c.trials; ++i)
            for (std::size_t j = 0; j < c.levels.size(); ++j) {
                const double v = a.trials[i][j].h_value;
                same = same && same_bits(v, b.trials[i][j].h_value) && same_bits(v, t.trials[i][j].h_value) &&
                       same_bits(a.trials[i][j].h_minus, t.trials[i][j].h_minus);
            }
    }
    const LocalTimeField f1 = ray_knight_field(8.0, split_seed(seed, 1));
    const LocalTimeField f2 = ray_knight_field(8.0, split_seed(seed, 1));
    same = same && f1.size() == f2.size() && (f1.values == f2.values).all();
    same = same && sample_cauchy8_n(100, seed) == sample_cauchy8_n(100, seed);
    const ProcessPath j1 = jacobi_simulate(1.0, 0.3, 1.0, 1e-3, seed), j2 = jacobi_simulate(1.0, 0.3, 1.0, 1e-3, seed);
    same = same && (j1.states == j2.states).all();
    report.check("bit-identical reruns (batches across thread counts, fields, draws, paths)", same ? 1.0 : 0.0, 1.0, 0.0,
                 same);
}

}  // namespace driftsim

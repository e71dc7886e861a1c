#include "driftsim/stable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "driftsim/numeric.hpp"

namespace driftsim {

using std::numbers::pi;

StableSpec StableSpec::stable(double kappa) {
    if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("StableSpec: index must lie in (0, 1)");
    return {kappa, StableFamily::stable_kappa};
}

StableSpec StableSpec::cauchy8() { return {1.0, StableFamily::cauchy8}; }

double StableSpec::lambda() const noexcept { return lambda_of(index); }
double StableSpec::psi() const { return psi_kappa(index); }
double StableSpec::c4() const { return c4_constant(index); }

double lambda_of(double kappa) noexcept { return 4.0 * (1.0 + kappa); }

double psi_kappa(double kappa) {
    if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("psi_kappa: kappa must lie in (0, 1]");
    const double g = std::tgamma(kappa);
    return std::pow(pi * kappa / (4.0 * g * g * std::sin(pi * kappa / 2.0)), 1.0 / kappa);
}

double c4_constant(double kappa) {
    return 8.0 * psi_kappa(kappa) * std::pow(lambda_of(kappa), 1.0 / kappa) * std::pow(kappa, -1.0 / kappa);
}

double c2_constant(double kappa, double delta1) { return 2.0 * std::pow(lambda_of(kappa) / kappa, delta1); }

double psi_pm(double kappa, double r, double delta1, int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("psi_pm: sign must be +1 or -1");
    return 1.0 + sign * c2_constant(kappa, delta1) * std::pow(r, -delta1);
}

double t_pm(double kappa, double r, double delta1, int sign) {
    return kappa * psi_pm(kappa, r, delta1, sign) * r / lambda_of(kappa);
}

double c1_constant(double kappa, double c15) { return 8.0 * psi_kappa(kappa) * std::pow(c15, 1.0 / kappa - 1.0); }

// -- Samplers ------------------------------------------------------------------

namespace {

struct AngleAndExp {
    double v;  ///< uniform on (-pi/2, pi/2)
    double w;  ///< standard exponential
};

AngleAndExp draw_inputs(Rng& rng) {
    std::uniform_real_distribution<double> u(-pi / 2.0, pi / 2.0);
    std::exponential_distribution<double> e(1.0);
    double v;
    do v = u(rng);
    while (v <= -pi / 2.0);
    double w;
    do w = e(rng);
    while (w <= 0.0);
    return {v, w};
}

}  // namespace

double sample_stable(const StableSpec& spec, Rng& rng) {
    if (spec.family == StableFamily::cauchy8) return sample_cauchy8(rng);
    const double a = spec.index;
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("sample_stable: index must lie in (0, 1)");
    const auto [v, w] = draw_inputs(rng);
    // beta = 1: B = arctan(tan(pi a / 2)) / a = pi / 2, S = cos(pi a / 2)^{-1/a}.
    const double b = pi / 2.0;
    const double s = std::pow(std::cos(pi * a / 2.0), -1.0 / a);
    const double num = std::sin(a * (v + b));
    const double den = std::pow(std::cos(v), 1.0 / a);
    return s * num / den * std::pow(std::cos(v - a * (v + b)) / w, (1.0 - a) / a);
}

double sample_stable(const StableSpec& spec, Seed seed) {
    Rng rng(seed);
    return sample_stable(spec, rng);
}

std::vector<double> sample_stable_n(const StableSpec& spec, std::size_t n, Seed seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = sample_stable(spec, rng);
    return out;
}

double sample_cauchy8(Rng& rng) {
    const auto [v, w] = draw_inputs(rng);
    const double h = pi / 2.0 + v;
    const double x = (2.0 / pi) * (h * std::tan(v) - std::log((pi / 2.0) * w * std::cos(v) / h));
    return 8.0 * x + (16.0 / pi) * std::log(8.0);
}

double sample_cauchy8(Seed seed) {
    Rng rng(seed);
    return sample_cauchy8(rng);
}

std::vector<double> sample_cauchy8_n(std::size_t n, Seed seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = sample_cauchy8(rng);
    return out;
}

std::complex<double> stable_cf(double kappa, double t) {
    if (t == 0.0) return 1.0;
    const double sgn = t > 0.0 ? 1.0 : -1.0;
    const double m = std::pow(std::abs(t), kappa);
    return std::exp(std::complex<double>(-m, m * sgn * std::tan(pi * kappa / 2.0)));
}

std::complex<double> cauchy8_cf(double t) {
    if (t == 0.0) return 1.0;
    return std::exp(std::complex<double>(-8.0 * std::abs(t), -8.0 * t * (2.0 / pi) * std::log(std::abs(t))));
}

double levy_half_cdf(double x) { return x <= 0.0 ? 0.0 : std::erfc(1.0 / std::sqrt(2.0 * x)); }

// -- Tail and small-deviation fits ----------------------------------------------

HillResult tail_exponent_check(const StableSpec& spec, std::size_t n, Seed seed) {
    if (n < 10000) throw std::invalid_argument("tail_exponent_check: need n >= 1e4");
    const auto draws = spec.family == StableFamily::cauchy8 ? sample_cauchy8_n(n, seed) : sample_stable_n(spec, n, seed);
    HillOptions opt;
    opt.seed = split_seed(seed, 1);
    return hill_estimator(draws, opt);
}

SmallDeviationResult small_deviation_probe(double kappa, const std::vector<double>& x_grid, std::size_t n, Seed seed,
                                           std::size_t min_hits) {
    if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("small_deviation_probe: kappa must lie in (0, 1)");
    if (n < 1000) throw std::invalid_argument("small_deviation_probe: need n >= 1000");
    std::vector<double> draws = sample_stable_n(StableSpec::stable(kappa), n, seed);
    std::sort(draws.begin(), draws.end());

    std::vector<double> grid = x_grid;
    if (grid.empty()) {
        const double lo = draws[std::min(n - 1, min_hits)];
        const double hi = draws[static_cast<std::size_t>(0.01 * static_cast<double>(n))];
        for (int k = 0; k < 10; ++k) grid.push_back(hi * std::pow(lo / hi, k / 9.0));
    }

    SmallDeviationResult r;
    std::vector<double> lx, ly;
    for (double x : grid) {
        const auto hits = static_cast<std::size_t>(std::lower_bound(draws.begin(), draws.end(), x) - draws.begin());
        if (hits < min_hits || hits == n) {
            ++r.dropped;
            continue;
        }
        const double p = static_cast<double>(hits) / static_cast<double>(n);
        r.x.push_back(x);
        r.prob.push_back(p);
        r.hits.push_back(hits);
        lx.push_back(std::log(x));
        ly.push_back(std::log(-std::log(p)));
    }
    if (lx.size() < 2) throw std::runtime_error("small_deviation_probe: fewer than two usable grid points");
    const LineFit fit = fit_line(lx, ly);
    r.slope = fit.slope;
    r.intercept = fit.intercept;
    r.c15_free = std::exp(fit.intercept);
    const double target = -kappa / (1.0 - kappa);
    double s = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) s += ly[i] - target * lx[i];
    r.c15_pinned = std::exp(s / static_cast<double>(lx.size()));
    return r;
}

TruncatedMean truncated_exp_moment(std::vector<double> c, double fraction) {
    if (c.empty()) throw std::invalid_argument("truncated_exp_moment: empty sample");
    TruncatedMean r;
    r.dropped = static_cast<std::size_t>(std::floor(static_cast<double>(c.size()) * fraction));
    if (r.dropped > 0) {
        std::nth_element(c.begin(), c.begin() + (r.dropped - 1), c.end());
        c.erase(c.begin(), c.begin() + r.dropped);
    }
    const auto n = static_cast<double>(c.size());
    double s = 0.0, s2 = 0.0;
    for (double v : c) {
        const double e = std::exp(-v);
        s += e;
        s2 += e * e;
    }
    r.estimate = s / n;
    const double var = n > 1 ? (s2 - n * r.estimate * r.estimate) / (n - 1.0) : 0.0;
    r.standard_error = std::sqrt(std::max(var, 0.0) / n);
    return r;
}

}  // namespace driftsim

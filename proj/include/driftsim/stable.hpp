#ifndef DRIFTSIM_STABLE_HPP
#define DRIFTSIM_STABLE_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "driftsim/rng.hpp"
#include "driftsim/stats.hpp"

namespace driftsim {

// Laws used here:
//   S_kappa:  E exp(itS) = exp(-|t|^kappa (1 - i sgn(t) tan(pi kappa / 2))),  0 < kappa < 1,
//   C_8:      E exp(itC) = exp(-8 (|t| + i t (2/pi) log|t|)).
// S_kappa is S_alpha(sigma = 1, beta = 1, mu = 0) in the Samorodnitsky-Taqqu
// parametrization; C_8 = 8 X + (16/pi) log 8 with X ~ S_1(1, 1, 0), the shift
// compensating the log term of the alpha = 1 scaling rule.

enum class StableFamily { stable_kappa, cauchy8 };

struct StableSpec {
    double index = 0.5;
    StableFamily family = StableFamily::stable_kappa;

    static StableSpec stable(double kappa);  ///< throws unless 0 < kappa < 1
    static StableSpec cauchy8();

    double lambda() const noexcept;  ///< 4 (1 + kappa)
    double psi() const;              ///< psi(kappa)
    double c4() const;               ///< 8 psi(kappa) lambda^{1/kappa} kappa^{-1/kappa}
};

/// lambda = 4 (1 + kappa).
double lambda_of(double kappa) noexcept;
/// psi(kappa) = (pi kappa / (4 Gamma(kappa)^2 sin(pi kappa / 2)))^{1/kappa}.
double psi_kappa(double kappa);
/// c4 = 8 psi(kappa) lambda^{1/kappa} kappa^{-1/kappa}.
double c4_constant(double kappa);
/// c2 = 2 (lambda / kappa)^{delta1}.
double c2_constant(double kappa, double delta1);
/// psi_+-(r) = 1 +- c2 r^{-delta1}; sign is +1 or -1.
double psi_pm(double kappa, double r, double delta1, int sign);
/// t_+-(r) = kappa psi_+-(r) r / lambda.
double t_pm(double kappa, double r, double delta1, int sign);
/// c1(kappa) = 8 psi(kappa) c15^{1/kappa - 1}.
double c1_constant(double kappa, double c15);

/// One draw by the Chambers-Mallows-Stuck transform (B = pi/2 for beta = 1).
double sample_stable(const StableSpec& spec, Rng& rng);
double sample_stable(const StableSpec& spec, Seed seed);
std::vector<double> sample_stable_n(const StableSpec& spec, std::size_t n, Seed seed);

double sample_cauchy8(Rng& rng);
double sample_cauchy8(Seed seed);
std::vector<double> sample_cauchy8_n(std::size_t n, Seed seed);

std::complex<double> stable_cf(double kappa, double t);
std::complex<double> cauchy8_cf(double t);

/// CDF of S_{1/2}, which is the Levy law with scale 1: erfc(1 / sqrt(2x)).
double levy_half_cdf(double x);

/// Hill fit of the upper tail of n exact draws. n >= 1e4.
HillResult tail_exponent_check(const StableSpec& spec, std::size_t n, Seed seed);

struct SmallDeviationResult {
    std::vector<double> x;          ///< grid points kept
    std::vector<double> prob;       ///< empirical P(S < x) on the kept points
    std::vector<std::size_t> hits;
    double slope = 0.0;             ///< of log(-log P(S < x)) against log x
    double intercept = 0.0;
    double c15_free = 0.0;          ///< exp(intercept)
    double c15_pinned = 0.0;        ///< intercept refit with the slope fixed at -kappa/(1-kappa)
    std::size_t dropped = 0;        ///< grid points with fewer than min_hits hits
};

/// Regression of log(-log P(S < x)) on log x. An empty grid selects a log-spaced
/// one between the empirical quantiles of order 50/n and 1e-2.
SmallDeviationResult small_deviation_probe(double kappa, const std::vector<double>& x_grid, std::size_t n, Seed seed,
                                           std::size_t min_hits = 50);

struct TruncatedMean {
    double estimate = 0.0;
    double standard_error = 0.0;
    std::size_t dropped = 0;
};

/// Mean of exp(-c) after dropping the floor(n * fraction) smallest values of c,
/// the side where exp(-c) blows up.
TruncatedMean truncated_exp_moment(std::vector<double> c, double fraction = 1e-6);

}  // namespace driftsim

#endif  // DRIFTSIM_STABLE_HPP

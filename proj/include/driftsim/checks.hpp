#ifndef DRIFTSIM_CHECKS_HPP
#define DRIFTSIM_CHECKS_HPP

#include <vector>

#include "driftsim/rng.hpp"
#include "driftsim/stats.hpp"

namespace driftsim {

// Distributional identities and property suites. Each check appends its rows to
// `report`; hard rows carry the stated tolerance.

/// A_inf of `n` environments against 2 / gamma(kappa): one-sample KS at 1%.
void dufresne_check(ExperimentReport& report, double kappa, std::size_t n, Seed seed, double step = 0.01);

/// 4 kappa^{1/kappa-2} K over exact fields at tau(lambda(kappa)) against c4 S_kappa
/// (CMS draws): two-sample KS at 1%.
void stable_functional_check(ExperimentReport& report, double kappa, std::size_t n, Seed seed);

/// Median-centered C over exact fields at tau(8) against median-centered
/// (pi/2) C8: two-sample KS at 1%.
void cauchy_functional_check(ExperimentReport& report, std::size_t n, Seed seed);

/// Truncated mean of exp(-C8) equals 1 within 3 standard errors.
void exp_moment_check(ExperimentReport& report, std::size_t n, Seed seed);

/// Fitted exponent of -log P(S < x) against kappa / (1 - kappa), 20%.
void small_deviation_check(ExperimentReport& report, double kappa, std::size_t n, Seed seed);

/// Hill index of exact stable draws within 0.1 of the index.
void stable_tail_check(ExperimentReport& report, double index, std::size_t n, Seed seed);

/// Mean theta(t) / log t against 1 / (d - 2), absolute 0.04.
void inverse_square_check(ExperimentReport& report, double d, double t, std::size_t trials, Seed seed, double dt = 1e-3);

/// Occupation identity int L = t on estimated fields of Brownian paths (fields at
/// fixed times and at inverse local times), relative 1%.
void occupation_check(ExperimentReport& report, std::size_t trials, Seed seed);

/// BESQ(0) from lambda: level-wise sample mean equals lambda within 3 s.e.
void besq_martingale_check(ExperimentReport& report, double lambda, std::size_t trials, Seed seed);

/// Jacobi paths stay in [0, 1] and the clamp rate per step decreases as dt halves.
void jacobi_clamp_check(ExperimentReport& report, double kappa, Seed seed);

/// ratio = Z_a / (Z_a + Z_b) against the Jacobi process read at the clock: KS at 1%,
/// plus the structural checks of the skew product.
void skew_product_rows(ExperimentReport& report, double kappa, std::size_t trials, Seed seed);

/// Time change after the first passage of alpha_kappa: S(Y) is a Brownian motion
/// run at the clock U, so the increment of S(Y) when U first reaches u is N(0, u).
/// Informational rows only.
void jacobi_time_change_rows(ExperimentReport& report, double kappa, std::size_t trials, Seed seed, double u = 1.0);

/// Reruns of a batch, a field and a stable sample with the same seed, and a batch
/// with a different thread count, are bit-identical.
void reproducibility_check(ExperimentReport& report, Seed seed);

}  // namespace driftsim

#endif  // DRIFTSIM_CHECKS_HPP

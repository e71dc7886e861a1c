#ifndef DRIFTSIM_PROBES_HPP
#define DRIFTSIM_PROBES_HPP

#include <optional>
#include <string>
#include <vector>

#include "driftsim/diffusion.hpp"
#include "driftsim/stats.hpp"

namespace driftsim {

/// Numerical settings shared by the hitting-time experiments.
struct SimulationOptions {
    Method method = Method::ray_knight;
    double step = 0.02;
    double dt = 0.0;        ///< Euler only; 0 selects default_dt(step)
    double node_step = 0.0; ///< Ray-Knight only
    double horizon = kDefaultHorizon;
    unsigned threads = 0;
};

struct RegimeResult {
    ExperimentReport report;
    std::vector<std::vector<HittingSample>> samples;  ///< [r index][trial]
};

/// Annealed H(r) for every r of the grid (independent batches). Reports the
/// ratio that the limit law normalizes: median H/r against 4/(kappa-1) for
/// kappa > 1 (hard at the largest r, 15%), median H/(r log r) against 4 for
/// kappa = 1 (hard: within 25% at the largest r and closer than at the smallest),
/// and the Hill index of H at the largest r against kappa for kappa < 1 (hard, 0.1).
RegimeResult regime_verifier(double kappa, const std::vector<double>& r_grid, std::size_t trials, Seed seed,
                             SimulationOptions options = {});

/// Growth functions a(.) for the upper-class probe; all are evaluated at x + e
/// so that they stay positive and nondecreasing on [0, inf).
enum class AChoice { constant, log, log_squared, loglog_variant, log_power };

struct GrowthFunction {
    AChoice choice = AChoice::log;
    double power = 1.0;  ///< exponent for log_power; must be >= 0

    double operator()(double x) const;
    std::string name() const;
    /// True when sum 1 / (n a(n)) converges.
    bool convergent_sum() const;
};

/// Throws ConfigError for a decreasing choice (log_power with negative power).
GrowthFunction make_growth(const std::string& name, double power = 1.0);

struct LevyClassResult {
    ExperimentReport report;
    std::vector<double> levels;                          ///< r_n = e^n
    std::vector<std::vector<double>> running_max;        ///< [choice][trial * n_max + (n - 1)]
};

/// Along r_n = e^n, n = 1..n_max, computes M_N = max_{n <= N} H(r_n) / [r_n a(r_n)]^{1/kappa}
/// per trial with one monotone coupling per trial and reports, for each a, the
/// median M_N at N = 5 and N = n_max and the share of trials whose running max
/// stays unchanged over [5, n_max]. Informational only.
LevyClassResult levy_class_probe(double kappa, const std::vector<GrowthFunction>& choices, int n_max, std::size_t trials,
                                 Seed seed, SimulationOptions options = {});

/// Running minimum over the grid of H(r) / (r log r) for kappa = 1, or of
/// H(r) / (r^{1/kappa} / (log log r)^{1/kappa - 1}) for kappa < 1, compared with
/// 4 (kappa = 1) or c1(kappa) built from `c15` (kappa < 1). Informational only.
ExperimentReport lil_probe(double kappa, const std::vector<double>& r_grid, std::size_t trials, Seed seed,
                           std::optional<double> c15 = std::nullopt, SimulationOptions options = {});

}  // namespace driftsim

#endif  // DRIFTSIM_PROBES_HPP

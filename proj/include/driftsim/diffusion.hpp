#ifndef DRIFTSIM_DIFFUSION_HPP
#define DRIFTSIM_DIFFUSION_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "driftsim/environment.hpp"
#include "driftsim/rng.hpp"

namespace driftsim {

enum class Method { euler, ray_knight };

const char* to_string(Method m) noexcept;
/// Accepts "euler", "ray-knight" and "ray_knight".
std::optional<Method> parse_method(const std::string& s);

/// Bits of HittingSample::flags.
namespace sample_flag {
inline constexpr unsigned truncated = 1u;         ///< negative-side cutoff carried too much mass
inline constexpr unsigned horizon_exceeded = 2u;  ///< censored: h_value is the horizon
}  // namespace sample_flag

/// One draw of H(r) = inf{t : X(t) > r}, split into the time spent below 0
/// (h_minus) and above it (h_plus).
struct HittingSample {
    double kappa = 0.0;
    double r = 0.0;
    double h_value = 0.0;
    double h_minus = 0.0;
    double h_plus = 0.0;
    Method method = Method::euler;
    Seed env_seed = 0;
    Seed noise_seed = 0;
    unsigned flags = 0;

    bool censored() const noexcept { return flags & sample_flag::horizon_exceeded; }
    bool truncated() const noexcept { return flags & sample_flag::truncated; }
};

inline constexpr double kDefaultHorizon = 1e7;

/// min(step^2 / 4, 1e-3).
double default_dt(double step);

// -- Euler ---------------------------------------------------------------------

/// X_{n+1} = X_n + sqrt(dt) xi_n - slope(X_n) dt / 2 from X_0 = 0, where slope is
/// the cell derivative of the gridded potential. Records, for every level of the
/// increasing list, the first n dt with X_n > level. Levels not reached by
/// `horizon` come back censored (h_value = horizon, horizon_exceeded flag).
std::vector<HittingSample> euler_hitting_times(const PotentialPath& path, const std::vector<double>& levels,
                                               double dt, Seed noise_seed, double horizon = kDefaultHorizon);

/// Single level; throws HorizonExceededError instead of returning a censored value.
HittingSample euler_hitting_time(const PotentialPath& path, double r, double dt, Seed noise_seed,
                                 double horizon = kDefaultHorizon);

// -- Ray-Knight -------------------------------------------------------------------

struct RayKnightOptions {
    /// Spacing of the local-time nodes; each potential cell is split evenly (the
    /// potential is linear inside a cell). 0 keeps the potential grid.
    double node_step = 0.0;
    /// Flag a sample when the estimated mass below the grid exceeds this share of H.
    double truncation_fraction = 1e-3;
};

/// H(r) = int_{-inf}^r e^{-W_kappa(x)} L(A(x)) dx with L the local-time field of an
/// independent Brownian motion at its first passage of A(r): a BESQ(2) from 0 run
/// down from A(r) to A(0) = 0 and a BESQ(0) below. Exact transitions between nodes,
/// trapezoid rule for the integral. Several levels share one monotone coupling:
/// H(r_k) - H(r_{k-1}) uses a fresh field started at r_k with the BESQ(2) part on
/// [r_{k-1}, r_k], as the strong Markov property prescribes.
std::vector<HittingSample> ray_knight_hitting_times(const PotentialPath& path, const std::vector<double>& levels,
                                                    Seed noise_seed, RayKnightOptions options = {});

HittingSample ray_knight_hitting_time(const PotentialPath& path, double r, Seed noise_seed,
                                      RayKnightOptions options = {});

// -- Batches -------------------------------------------------------------------

struct BatchConfig {
    double kappa = 1.0;
    std::vector<double> levels;  ///< increasing, positive
    std::size_t trials = 0;
    Method method = Method::ray_knight;
    double step = 0.01;
    double dt = 0.0;             ///< Euler step; 0 selects default_dt(step)
    double horizon = kDefaultHorizon;  ///< censoring time, applied to both methods
    Seed seed = 0;
    unsigned threads = 0;        ///< 0 selects the hardware concurrency
    bool annealed = true;        ///< false: one environment (env_seed) for every trial
    Seed env_seed = 0;
    std::optional<double> x_min; ///< default_x_min(kappa, max level) when unset
    double node_step = 0.0;      ///< RayKnightOptions::node_step
    bool suppress_noise = false;
};

struct BatchResult {
    std::vector<std::vector<HittingSample>> trials;  ///< [trial][level]
    std::size_t censored = 0;
    std::size_t truncated = 0;

    /// h_value of every trial at one level index, in trial order.
    std::vector<double> values(std::size_t level_index) const;
    std::vector<HittingSample> flat() const;
};

/// Trial i uses trial_seeds(seed, i); the quenched mode replaces env with env_seed.
BatchResult run_hitting_batch(const BatchConfig& config);

/// CSV with columns method,kappa,r,env_seed,noise_seed,h_value,h_minus,h_plus,flags.
void write_samples_csv(const std::vector<HittingSample>& samples, std::ostream& out);
/// Inverse of write_samples_csv. Throws std::runtime_error on a malformed row.
std::vector<HittingSample> read_samples_csv(std::istream& in);

// -- Negative-side tail ----------------------------------------------------------

struct TailProbeResult {
    std::vector<double> z;
    std::vector<double> survival;  ///< empirical P(H_-(+inf) > z)
    double slope = 0.0;            ///< log-log regression over points with survival > 0
    double intercept = 0.0;
    std::vector<double> samples;
    std::size_t truncated = 0;
};

/// H_-(+inf) drawn exactly in law: L(0) is a BESQ(2) from 0 at A-time A_inf
/// (i.e. 2 A_inf times an exponential), continued below 0 as a BESQ(0).
/// An empty z_grid selects 13 log-spaced points over three decades above the
/// sample median.
TailProbeResult negative_tail_probe(double kappa, const std::vector<double>& z_grid, std::size_t trials, Seed seed,
                                    double step = 0.02, unsigned threads = 0);

}  // namespace driftsim

#endif  // DRIFTSIM_DIFFUSION_HPP

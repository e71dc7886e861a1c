#ifndef DRIFTSIM_FUNCTIONALS_HPP
#define DRIFTSIM_FUNCTIONALS_HPP

#include <Eigen/Core>

#include "driftsim/processes.hpp"
#include "driftsim/rng.hpp"

namespace driftsim {

enum class FieldOrigin { path_estimate, ray_knight_exact };

/// Local time profile x -> L(t_final, x) on sorted levels.
struct LocalTimeField {
    Eigen::ArrayXd levels;
    Eigen::ArrayXd values;
    double t_final = 0.0;
    double bandwidth = 0.0;  ///< bin width of a path estimate; 0 for exact fields
    FieldOrigin origin = FieldOrigin::ray_knight_exact;
    bool undersmoothed = false;

    Eigen::Index size() const noexcept { return levels.size(); }
    /// Linear interpolation between levels, 0 outside.
    double value_at(double x) const noexcept;
};

/// int L(x) dx: bin sums for path estimates, the trapezoid rule for exact fields.
/// Equals t_final by the occupation identity.
double occupation_integral(const LocalTimeField& field);

/// Box-kernel estimate from a Brownian path: time spent in [x - b/2, x + b/2)
/// up to t, divided by b, on bins centered at multiples of b (left-point rule).
LocalTimeField local_time_field(const ProcessPath& path, double t, double bandwidth);

/// First time the running estimate of L(., 0) (bin centered at 0) reaches x.
/// Throws PathExhaustedError if the path ends first.
double inverse_local_time(const ProcessPath& path, double x, double bandwidth);

/// Simulates a Brownian motion on the fly until the bin estimate of L(., 0)
/// reaches lambda and returns the estimated field at that time. Throws
/// PathExhaustedError past max_time.
LocalTimeField field_at_inverse_local_time(double lambda, double dt, double bandwidth, double max_time, Seed seed);

/// beta_v(s) = beta(v^2 s) / v.
ProcessPath rescale_brownian(const ProcessPath& path, double v);
/// The field of beta_v deduced from that of beta: L_{beta_v}(t / v^2, x / v) = L_beta(t, x) / v.
LocalTimeField rescale_field(const LocalTimeField& field, double v);

/// Level grid of exact fields: 0, then x0 growing by `growth` until the spacing
/// reaches max_step, uniform after. The level 1 is always a node.
struct ExactFieldGrid {
    double x0 = 1e-6;
    double growth = 1.02;
    double max_step = 0.02;
};

/// L(tau(lambda), .) by the second Ray-Knight theorem: independent BESQ(0) processes
/// from lambda in x >= 0 and in -x >= 0, with exact transitions, stopped at absorption.
LocalTimeField ray_knight_field(double lambda, Rng& rng, const ExactFieldGrid& grid = {});
LocalTimeField ray_knight_field(double lambda, Seed seed, const ExactFieldGrid& grid = {});

struct FunctionalValue {
    double value = 0.0;
    double cutoff_share = 0.0;  ///< extrapolated part near 0 relative to |value|
    bool flagged = false;
};

/// K = int_0^inf x^{1/kappa - 2} L(x) dx. Trapezoid on the field from its first
/// positive level x0; [0, x0) is extrapolated with L = L(0). Flagged when that
/// share exceeds 1%.
FunctionalValue K_functional(double kappa, const LocalTimeField& field);

/// C = int_0^1 (L - 8) / x dx + int_1^inf L / x dx. Needs a level at exactly 1.
/// [0, x0) contributes L(x0) - 8 (linear L); flagged when that exceeds 1% of max(|C|, 1).
FunctionalValue C_functional(const LocalTimeField& field);

/// J = int_0^1 y (1-y)^{kappa-2} L(S(y) / t) dy, evaluated in the level variable
/// x = S(y) / t as int t y^2 (1-y)^{2 kappa - 1} L(x) dx over the field levels.
FunctionalValue J_functional(double kappa, double t, const LocalTimeField& field, const JacobiScale& scale);

}  // namespace driftsim

#endif  // DRIFTSIM_FUNCTIONALS_HPP

#ifndef DRIFTSIM_PROCESSES_HPP
#define DRIFTSIM_PROCESSES_HPP

#include <Eigen/Core>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "driftsim/rng.hpp"

namespace driftsim {

enum class ProcessKind { besq, bessel, jacobi, brownian };

const char* to_string(ProcessKind kind) noexcept;

/// Dimension delta for besq/bessel, (d1, d2) for jacobi.
struct ProcessParams {
    double dimension = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

/// A discretized trajectory on an increasing time grid.
struct ProcessPath {
    Eigen::ArrayXd times;
    Eigen::ArrayXd states;
    ProcessKind kind = ProcessKind::brownian;
    ProcessParams params;
    Seed seed = 0;
    std::size_t steps = 0;         ///< scheme steps taken (may exceed the stored points)
    std::size_t clamp_events = 0;  ///< jacobi only: steps that left [0, 1]

    Eigen::Index size() const noexcept { return times.size(); }
    double clamp_rate() const noexcept {
        return steps ? static_cast<double>(clamp_events) / static_cast<double>(steps) : 0.0;
    }
};

/// One exact draw of BESQ(delta) at time dt from z0, using the Poisson mixture
/// of gamma laws: Z = 2 dt * Gamma(delta/2 + N), N ~ Poisson(z0 / (2 dt)).
/// delta = 0 with N = 0 gives the absorbed value 0.
double besq_transition(double delta, double z0, double dt, Rng& rng);
double besq_transition(double delta, double z0, double dt, Seed seed);

/// BESQ(delta) from z0 observed at the given increasing times (times[0] is the start).
ProcessPath besq_path(double delta, double z0, const Eigen::ArrayXd& times, Seed seed);

/// Standard Brownian motion from 0 on a uniform grid of [0, t_max].
ProcessPath brownian_path(double t_max, double dt, Seed seed);

// -- Bessel inverse-square clock --------------------------------------------

enum class BesselStartMode {
    reduced_dimension,  ///< R_0^2 drawn as a (d-2)-dimensional BESQ from 0 at time 1
    fixed       ///< R_0 = fixed_start
};

struct BesselStart {
    BesselStartMode mode = BesselStartMode::reduced_dimension;
    double fixed_start = 1.0;
};

struct InverseSquareResult {
    double theta = 0.0;             ///< int_0^t ds / R^2(s)
    bool discretization_fault = false;  ///< R^2 hit numerical zero
};

/// theta(t) = int_0^t ds / R^2(s) for a d-dimensional Bessel process, d > 4.
/// Nodes are spaced dt * max(1, s): uniform up to s = 1, geometric after.
InverseSquareResult bessel_inverse_square(double d, BesselStart start, double t, double dt, Seed seed);

/// The running clock theta on the same node grid (states[k] = theta(times[k])).
ProcessPath inverse_square_clock(double d, BesselStart start, double t, double dt, Seed seed);

// -- Jacobi process ----------------------------------------------------------

/// Euler scheme for dY = 2 sqrt(Y(1-Y)) dB + [d1 - (d1 + d2) Y] dt, clamped into
/// [0, 1] after each step. Every `record_stride`-th step is stored.
ProcessPath jacobi_simulate_dims(double d1, double d2, double y0, double t_max, double dt, Seed seed,
                                 std::size_t record_stride = 1);

/// The Jacobi process of dimension (2, 2 + 2 kappa).
ProcessPath jacobi_simulate(double kappa, double y0, double t_max, double dt, Seed seed,
                            std::size_t record_stride = 1);

/// Y at time `t` (thin wrapper that does not store the path).
double jacobi_value_at(double kappa, double y0, double t, double dt, Rng& rng);

/// First time the Jacobi process from y0 reaches `level`; nullopt if not before `t_cap`.
std::optional<double> jacobi_first_passage(double kappa, double y0, double level, double dt, double t_cap,
                                           Seed seed);

/// U(t) = 4 int_0^t ds / (Y(1-Y)^{1+2 kappa}) along a stored path, started at the
/// first passage of alpha_kappa. Returns an empty path if alpha_kappa is never reached.
ProcessPath jacobi_clock(const ProcessPath& path, double kappa);

inline double alpha_kappa(double kappa) noexcept { return 1.0 / (4.0 + 2.0 * kappa); }

/// Scale function S(y) = int_{alpha_kappa}^y dx / (x (1-x)^{1+kappa}) of the
/// (2, 2 + 2 kappa) Jacobi process. Tabulated in the logit coordinate
/// u = log(y / (1-y)), where dS/du = (1 + e^u)^kappa is smooth.
class JacobiScale {
public:
    JacobiScale(double kappa, int resolution);

    double kappa() const noexcept { return kappa_; }
    double alpha() const noexcept { return alpha_; }

    /// S(y) for y in (0, 1); BoundaryError at or beyond the endpoints.
    double S(double y) const;
    /// S^{-1}(s), always in (0, 1).
    double S_inverse(double s) const;

    /// S as a function of the logit coordinate, defined on the whole line.
    double S_logit(double u) const;
    /// Inverse of S_logit.
    double logit_of_S(double s) const;

    const Eigen::ArrayXd& table_u() const noexcept { return u_; }
    const Eigen::ArrayXd& table_s() const noexcept { return s_; }

private:
    double panel_integral(double a, double b) const;

    double kappa_;
    double alpha_;
    Eigen::ArrayXd u_;
    Eigen::ArrayXd s_;
};

JacobiScale jacobi_scale(double kappa, int resolution);

// -- Skew product ------------------------------------------------------------

/// Cross-simulation of ratio(u) = R2^2(u) / (R2^2(u) + R_{2+2k}^2(u+1)) against a
/// Jacobi process run for the independently simulated clock Lambda_Y(u).
struct SkewProductStats {
    std::vector<double> ratio;           ///< ratio(u_max), one per trial
    std::vector<double> clock;           ///< Lambda_Y(u_max), one per trial
    std::vector<double> jacobi_at_clock; ///< Y(Lambda) from independent Jacobi runs
    double ratio_at_zero = 0.0;          ///< max over trials of ratio(0) (must be 0)
    bool ratio_inside_unit = true;       ///< every ratio(u) in (0, 1) for u > 0
    bool clock_increasing = true;        ///< Lambda strictly increasing on every path
    double ks_statistic = 0.0;
    double ks_critical_05 = 0.0;
};

SkewProductStats skew_product_check(double kappa, double u_max, double dt, std::size_t trials, Seed seed);

/// CSV dump with columns t,state.
void write_process_csv(const ProcessPath& path, std::ostream& out);

}  // namespace driftsim

#endif  // DRIFTSIM_PROCESSES_HPP

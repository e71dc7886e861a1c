#ifndef DRIFTSIM_ENVIRONMENT_HPP
#define DRIFTSIM_ENVIRONMENT_HPP

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "driftsim/rng.hpp"

namespace driftsim {

/// A sampled two-sided trajectory of the drifted potential
/// W_kappa(x) = W(x) - kappa x / 2 on a uniform grid that contains x = 0.
struct PotentialPath {
    double kappa = 0.0;
    double step = 0.0;
    double x_min = 0.0;
    double x_max = 0.0;
    Eigen::Index origin = 0;  ///< index of the node x = 0
    Eigen::ArrayXd values;    ///< values[i] = W_kappa(x_min + i * step)
    Seed seed = 0;

    Eigen::Index size() const noexcept { return values.size(); }
    double x(Eigen::Index i) const noexcept { return x_min + static_cast<double>(i) * step; }

    /// Piecewise-linear interpolation; beyond the grid the potential continues
    /// with its mean slope -kappa/2.
    double value_at(double x) const noexcept;
};

struct PotentialOptions {
    /// Test hook: force W == 0 so only the drift -kappa x / 2 remains.
    bool suppress_noise = false;
};

/// Sample W_kappa on [x_min, x_max]. The range is widened outward to whole
/// multiples of `step`. Each side is drawn outward from 0 from its own stream, so
/// extending a range never changes the values already inside it.
PotentialPath sample_potential(double kappa, double x_min, double x_max, double step, Seed seed,
                               PotentialOptions options = {});

/// Grid extents targeted at level r.
double default_x_max(double kappa, double r);
double default_x_min(double kappa, double r);

/// Scale function A(x) = int_0^x exp(W_kappa) by the trapezoid rule.
struct ScaleData {
    double kappa = 0.0;
    double step = 0.0;
    Eigen::ArrayXd a_values;      ///< A(i * step), i = 0..n_pos
    Eigen::ArrayXd a_neg_values;  ///< A(x_min + j * step), j = 0..n_neg (last entry is 0)
    /// log(A_inf - A(i * step)), accumulated from the right end so that the tail
    /// mass stays accurate long after A itself has converged in double precision.
    Eigen::ArrayXd log_tail;
    double tail_estimate = 0.0;  ///< (2/kappa) exp(W_kappa(x_max))
    double tail_bound = 0.0;     ///< safety * tail_estimate

    /// A_inf = A(x_max) + tail_estimate. Throws DivergentScaleError for kappa <= 0.
    double a_infinity() const;
    bool has_a_infinity() const noexcept { return a_inf_.has_value(); }

    std::optional<double> a_inf_;
};

inline constexpr double kDefaultTailSafety = 4.0;

ScaleData scale_function(const PotentialPath& path, double tail_safety = kDefaultTailSafety);

/// The unique F with A_inf - A(F) = exp(-kappa r / 2), by binary search over the
/// tail masses and linear interpolation inside the bracketing cell.
/// Throws std::invalid_argument when delta(r) >= A_inf and InsufficientRangeError
/// when delta(r) is not above the tail bound.
double find_F(const ScaleData& scale, double r);

/// One gamma(kappa, 1) draw.
double sample_gamma(double kappa, Rng& rng);
double sample_gamma(double kappa, Seed seed);

/// CSV dump with columns x,W_kappa.
void write_potential_csv(const PotentialPath& path, std::ostream& out);

}  // namespace driftsim

#endif  // DRIFTSIM_ENVIRONMENT_HPP

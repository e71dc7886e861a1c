#include "driftsim/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "driftsim/errors.hpp"
#include "driftsim/numeric.hpp"

namespace driftsim {

double PotentialPath::value_at(double x) const noexcept {
    if (x <= x_min) return values[0] - 0.5 * kappa * (x - x_min);
    if (x >= x_max) return values[size() - 1] - 0.5 * kappa * (x - x_max);
    const double s = (x - x_min) / step;
    auto i = static_cast<Eigen::Index>(s);
    if (i >= size() - 1) i = size() - 2;
    const double frac = s - static_cast<double>(i);
    return values[i] + frac * (values[i + 1] - values[i]);
}

PotentialPath sample_potential(double kappa, double x_min, double x_max, double step, Seed seed,
                               PotentialOptions options) {
    if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("sample_potential: step must be positive");
    if (!(x_min <= 0.0 && 0.0 <= x_max)) throw std::invalid_argument("sample_potential: need x_min <= 0 <= x_max");

    // Snap the extents outward; the tiny slack keeps exact multiples exact.
    const auto n_neg = static_cast<Eigen::Index>(std::ceil(-x_min / step - 1e-9));
    const auto n_pos = static_cast<Eigen::Index>(std::ceil(x_max / step - 1e-9));
    if (n_neg + n_pos < 1) throw std::invalid_argument("sample_potential: empty grid");

    PotentialPath path;
    path.kappa = kappa;
    path.step = step;
    path.seed = seed;
    path.origin = n_neg;
    path.x_min = -static_cast<double>(n_neg) * step;
    path.x_max = static_cast<double>(n_pos) * step;
    path.values.resize(n_neg + n_pos + 1);

    Eigen::ArrayXd& w = path.values;
    w[n_neg] = 0.0;
    if (options.suppress_noise) {
        for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = 0.0;
    } else {
        const double sd = std::sqrt(step);
        std::normal_distribution<double> normal(0.0, sd);
        Rng pos(split_seed(seed, stream::env_positive));
        for (Eigen::Index i = n_neg + 1; i < w.size(); ++i) w[i] = w[i - 1] + normal(pos);
        normal.reset();
        Rng neg(split_seed(seed, stream::env_negative));
        for (Eigen::Index i = n_neg - 1; i >= 0; --i) w[i] = w[i + 1] + normal(neg);
    }
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] -= 0.5 * kappa * path.x(i);
    w[n_neg] = 0.0;
    return path;
}

double default_x_max(double kappa, double r) { return r + (20.0 / kappa) * std::log(r + std::numbers::e); }

double default_x_min(double kappa, double r) { return -(40.0 / kappa) * std::log(r + std::numbers::e); }

double ScaleData::a_infinity() const {
    if (!a_inf_) throw DivergentScaleError("A_inf diverges for kappa <= 0");
    return *a_inf_;
}

ScaleData scale_function(const PotentialPath& path, double tail_safety) {
    const Eigen::Index n_neg = path.origin;
    const Eigen::Index n_pos = path.size() - 1 - n_neg;
    const double h = path.step;
    const Eigen::ArrayXd& w = path.values;

    ScaleData s;
    s.kappa = path.kappa;
    s.step = h;
    s.a_values.resize(n_pos + 1);
    s.a_neg_values.resize(n_neg + 1);

    s.a_values[0] = 0.0;
    for (Eigen::Index i = 1; i <= n_pos; ++i) {
        const Eigen::Index j = n_neg + i;
        s.a_values[i] = s.a_values[i - 1] + 0.5 * h * (std::exp(w[j - 1]) + std::exp(w[j]));
    }
    s.a_neg_values[n_neg] = 0.0;
    for (Eigen::Index j = n_neg - 1; j >= 0; --j) {
        s.a_neg_values[j] = s.a_neg_values[j + 1] - 0.5 * h * (std::exp(w[j]) + std::exp(w[j + 1]));
    }

    s.log_tail.resize(n_pos + 1);
    if (path.kappa > 0.0) {
        const double w_end = w[path.size() - 1];
        s.tail_estimate = (2.0 / path.kappa) * std::exp(w_end);
        s.tail_bound = tail_safety * s.tail_estimate;
        s.log_tail[n_pos] = std::log(2.0 / path.kappa) + w_end;
        const double log_half_h = std::log(0.5 * h);
        for (Eigen::Index i = n_pos - 1; i >= 0; --i) {
            const Eigen::Index j = n_neg + i;
            s.log_tail[i] = log_add_exp(s.log_tail[i + 1], log_half_h + log_add_exp(w[j], w[j + 1]));
        }
        s.a_inf_ = s.a_values[n_pos] + s.tail_estimate;
    } else {
        s.tail_estimate = s.tail_bound = std::numeric_limits<double>::infinity();
        s.log_tail.setConstant(std::numeric_limits<double>::infinity());
    }
    return s;
}

double find_F(const ScaleData& scale, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("find_F: r must be positive");
    const double a_inf = scale.a_infinity();
    const double log_delta = -0.5 * scale.kappa * r;
    if (std::exp(log_delta) >= a_inf) throw std::invalid_argument("find_F: delta(r) >= A_inf");

    const Eigen::ArrayXd& lt = scale.log_tail;
    const Eigen::Index n = lt.size();
    if (log_delta <= std::log(scale.tail_bound) || log_delta <= lt[n - 1]) {
        throw InsufficientRangeError("find_F: delta(r) = exp(" + std::to_string(log_delta) +
                                     ") is below the tail bound; extend x_max");
    }

    // lt is strictly decreasing: find the cell [i, i+1] with lt[i] >= log_delta > lt[i+1].
    Eigen::Index lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        const Eigen::Index mid = lo + (hi - lo) / 2;
        if (lt[mid] >= log_delta) lo = mid; else hi = mid;
    }
    // Inside the cell A is linear, so the tail mass is T(theta) = T_hi + c (1 - theta)
    // with c the cell mass; solve relative to T_hi to stay in range.
    const double cell_rel = std::expm1(lt[lo] - lt[hi]);          // c / T_hi
    const double target_rel = std::expm1(log_delta - lt[hi]);     // (delta - T_hi) / T_hi
    const double theta = std::clamp(1.0 - target_rel / cell_rel, 0.0, 1.0);
    return (static_cast<double>(lo) + theta) * scale.step;
}

double sample_gamma(double kappa, Rng& rng) {
    if (!(kappa > 0.0)) throw std::invalid_argument("sample_gamma: kappa must be positive");
    return std::gamma_distribution<double>(kappa, 1.0)(rng);
}

double sample_gamma(double kappa, Seed seed) {
    Rng rng(seed);
    return sample_gamma(kappa, rng);
}

void write_potential_csv(const PotentialPath& path, std::ostream& out) {
    const auto old = out.precision(17);
    out << "x,W_kappa\n";
    for (Eigen::Index i = 0; i < path.size(); ++i) out << path.x(i) << ',' << path.values[i] << '\n';
    out.precision(old);
}

}  // namespace driftsim

#include "driftsim/processes.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "driftsim/errors.hpp"
#include "driftsim/numeric.hpp"
#include "driftsim/stats.hpp"

namespace driftsim {

const char* to_string(ProcessKind kind) noexcept {
    switch (kind) {
        case ProcessKind::besq: return "besq";
        case ProcessKind::bessel: return "bessel";
        case ProcessKind::jacobi: return "jacobi";
        case ProcessKind::brownian: return "brownian";
    }
    return "unknown";
}

namespace {

// Above this Poisson mean the mixture is replaced by its Gaussian limit
// N(z0 + delta dt, 4 z0 dt); relative error is O(mean^{-1/2}) ~ 1e-7.
constexpr double kGaussianMixtureMean = 1e14;

}  // namespace

double besq_transition(double delta, double z0, double dt, Rng& rng) {
    if (!(delta >= 0.0) || !(z0 >= 0.0) || !(dt > 0.0))
        throw std::invalid_argument("besq_transition: need delta >= 0, z0 >= 0 and dt > 0");
    if (z0 <= 0.0 && delta == 0.0) return 0.0;
    const double mean = z0 / (2.0 * dt);
    if (mean > kGaussianMixtureMean) {
        const double z = z0 + delta * dt + std::sqrt(4.0 * z0 * dt) * std::normal_distribution<double>()(rng);
        return std::max(z, 0.0);
    }
    double shape = 0.5 * delta;
    if (mean > 0.0) shape += static_cast<double>(std::poisson_distribution<long long>(mean)(rng));
    if (shape <= 0.0) return 0.0;
    return 2.0 * dt * std::gamma_distribution<double>(shape, 1.0)(rng);
}

double besq_transition(double delta, double z0, double dt, Seed seed) {
    Rng rng(seed);
    return besq_transition(delta, z0, dt, rng);
}

ProcessPath besq_path(double delta, double z0, const Eigen::ArrayXd& times, Seed seed) {
    if (delta < 0.0 || z0 < 0.0) throw std::invalid_argument("besq_path: need delta >= 0 and z0 >= 0");
    Rng rng(seed);
    ProcessPath path;
    path.kind = ProcessKind::besq;
    path.params.dimension = delta;
    path.seed = seed;
    path.times = times;
    path.states.resize(times.size());
    if (times.size() == 0) return path;
    path.states[0] = z0;
    for (Eigen::Index k = 1; k < times.size(); ++k) {
        path.states[k] = besq_transition(delta, path.states[k - 1], times[k] - times[k - 1], rng);
    }
    path.steps = static_cast<std::size_t>(std::max<Eigen::Index>(times.size() - 1, 0));
    return path;
}

ProcessPath brownian_path(double t_max, double dt, Seed seed) {
    if (!(t_max > 0.0) || !(dt > 0.0)) throw std::invalid_argument("brownian_path: need t_max > 0 and dt > 0");
    const auto n = static_cast<Eigen::Index>(std::ceil(t_max / dt - 1e-9));
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(dt));
    ProcessPath path;
    path.kind = ProcessKind::brownian;
    path.seed = seed;
    path.times = Eigen::ArrayXd::LinSpaced(n + 1, 0.0, static_cast<double>(n) * dt);
    path.states.resize(n + 1);
    path.states[0] = 0.0;
    for (Eigen::Index k = 1; k <= n; ++k) path.states[k] = path.states[k - 1] + normal(rng);
    path.steps = static_cast<std::size_t>(n);
    return path;
}

// -- Bessel inverse-square clock ---------------------------------------------

namespace {

template <class Visit>
InverseSquareResult run_inverse_square(double d, BesselStart start, double t, double dt, Seed seed,
                                       Visit&& visit) {
    if (!(d > 4.0)) throw std::invalid_argument("bessel_inverse_square: need d > 4");
    if (!(t > 0.0) || !(dt > 0.0)) throw std::invalid_argument("bessel_inverse_square: need t > 0 and dt > 0");
    Rng rng(seed);
    double z = start.mode == BesselStartMode::reduced_dimension ? besq_transition(d - 2.0, 0.0, 1.0, rng)
                                                        : start.fixed_start * start.fixed_start;
    InverseSquareResult out;
    double s = 0.0;
    visit(s, out.theta);
    while (s < t) {
        const double h = std::min(dt * std::max(1.0, s), t - s);
        const double z_next = besq_transition(d, z, h, rng);
        if (!(z > 0.0) || !(z_next > 0.0)) {
            out.discretization_fault = true;
            z = std::max(z_next, std::numeric_limits<double>::min());
            s += h;
            continue;
        }
        out.theta += 0.5 * h * (1.0 / z + 1.0 / z_next);
        z = z_next;
        s += h;
        visit(s, out.theta);
    }
    return out;
}

}  // namespace

InverseSquareResult bessel_inverse_square(double d, BesselStart start, double t, double dt, Seed seed) {
    return run_inverse_square(d, start, t, dt, seed, [](double, double) {});
}

ProcessPath inverse_square_clock(double d, BesselStart start, double t, double dt, Seed seed) {
    std::vector<double> ts, th;
    run_inverse_square(d, start, t, dt, seed, [&](double s, double theta) {
        ts.push_back(s);
        th.push_back(theta);
    });
    ProcessPath path;
    path.kind = ProcessKind::bessel;
    path.params.dimension = d;
    path.seed = seed;
    path.times = Eigen::Map<const Eigen::ArrayXd>(ts.data(), static_cast<Eigen::Index>(ts.size()));
    path.states = Eigen::Map<const Eigen::ArrayXd>(th.data(), static_cast<Eigen::Index>(th.size()));
    path.steps = ts.empty() ? 0 : ts.size() - 1;
    return path;
}

// -- Jacobi --------------------------------------------------------------------

namespace {

struct JacobiStepper {
    double d1, d2, dt, sqrt_dt;
    std::normal_distribution<double> normal{0.0, 1.0};
    std::size_t clamps = 0;

    double step(double y, double h, Rng& rng) {
        const double diff = 2.0 * std::sqrt(std::max(y * (1.0 - y), 0.0));
        double next = y + diff * std::sqrt(h) * normal(rng) + (d1 - (d1 + d2) * y) * h;
        if (next < 0.0) {
            next = 0.0;
            ++clamps;
        } else if (next > 1.0) {
            next = 1.0;
            ++clamps;
        }
        return next;
    }
};

void check_jacobi_args(double y0, double t_max, double dt) {
    if (!(y0 >= 0.0 && y0 <= 1.0)) throw std::invalid_argument("jacobi: y0 must lie in [0, 1]");
    if (!(t_max >= 0.0) || !(dt > 0.0)) throw std::invalid_argument("jacobi: need t_max >= 0 and dt > 0");
}

}  // namespace

ProcessPath jacobi_simulate_dims(double d1, double d2, double y0, double t_max, double dt, Seed seed,
                                 std::size_t record_stride) {
    check_jacobi_args(y0, t_max, dt);
    record_stride = std::max<std::size_t>(record_stride, 1);
    const auto n = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
    Rng rng(seed);
    JacobiStepper stepper{d1, d2, dt, std::sqrt(dt)};

    std::vector<double> ts{0.0}, ys{y0};
    ts.reserve(n / record_stride + 2);
    ys.reserve(n / record_stride + 2);
    double y = y0;
    for (std::size_t k = 1; k <= n; ++k) {
        y = stepper.step(y, dt, rng);
        if (k % record_stride == 0 || k == n) {
            ts.push_back(static_cast<double>(k) * dt);
            ys.push_back(y);
        }
    }
    ProcessPath path;
    path.kind = ProcessKind::jacobi;
    path.params.d1 = d1;
    path.params.d2 = d2;
    path.seed = seed;
    path.times = Eigen::Map<const Eigen::ArrayXd>(ts.data(), static_cast<Eigen::Index>(ts.size()));
    path.states = Eigen::Map<const Eigen::ArrayXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
    path.steps = n;
    path.clamp_events = stepper.clamps;
    return path;
}

ProcessPath jacobi_simulate(double kappa, double y0, double t_max, double dt, Seed seed,
                            std::size_t record_stride) {
    if (!(kappa > 0.0)) throw std::invalid_argument("jacobi_simulate: kappa must be positive");
    return jacobi_simulate_dims(2.0, 2.0 + 2.0 * kappa, y0, t_max, dt, seed, record_stride);
}

double jacobi_value_at(double kappa, double y0, double t, double dt, Rng& rng) {
    check_jacobi_args(y0, t, dt);
    JacobiStepper stepper{2.0, 2.0 + 2.0 * kappa, dt, std::sqrt(dt)};
    double y = y0, s = 0.0;
    while (s < t) {
        const double h = std::min(dt, t - s);
        y = stepper.step(y, h, rng);
        s += h;
    }
    return y;
}

std::optional<double> jacobi_first_passage(double kappa, double y0, double level, double dt, double t_cap,
                                           Seed seed) {
    check_jacobi_args(y0, t_cap, dt);
    Rng rng(seed);
    JacobiStepper stepper{2.0, 2.0 + 2.0 * kappa, dt, std::sqrt(dt)};
    const bool upward = y0 < level;
    double y = y0;
    for (std::size_t k = 1; static_cast<double>(k) * dt <= t_cap; ++k) {
        y = stepper.step(y, dt, rng);
        if (upward ? y >= level : y <= level) return static_cast<double>(k) * dt;
    }
    return std::nullopt;
}

ProcessPath jacobi_clock(const ProcessPath& path, double kappa) {
    const double alpha = alpha_kappa(kappa);
    ProcessPath clock;
    clock.kind = ProcessKind::jacobi;
    clock.seed = path.seed;
    Eigen::Index start = -1;
    for (Eigen::Index k = 0; k < path.size(); ++k) {
        if (path.states[k] >= alpha) {
            start = k;
            break;
        }
    }
    if (start < 0) return clock;
    const Eigen::Index m = path.size() - start;
    clock.times.resize(m);
    clock.states.resize(m);
    const double floor = path.size() > 1 ? path.times[1] - path.times[0] : 1e-12;
    auto integrand = [&](double y) {
        const double q = std::max(y, floor) * std::pow(std::max(1.0 - y, floor), 1.0 + 2.0 * kappa);
        return 4.0 / q;
    };
    clock.times[0] = 0.0;
    clock.states[0] = 0.0;
    for (Eigen::Index k = 1; k < m; ++k) {
        const Eigen::Index j = start + k;
        const double h = path.times[j] - path.times[j - 1];
        clock.times[k] = path.times[j] - path.times[start];
        clock.states[k] = clock.states[k - 1] + 0.5 * h * (integrand(path.states[j - 1]) + integrand(path.states[j]));
    }
    clock.steps = static_cast<std::size_t>(m - 1);
    return clock;
}

// -- Jacobi scale function -----------------------------------------------------

namespace {

constexpr double kLogitLo = -40.0;
constexpr double kLogitHi = 40.0;

double softplus(double v) noexcept { return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); }

const GaussLegendre& panel_rule() {
    static const GaussLegendre rule(8);
    return rule;
}

}  // namespace

JacobiScale::JacobiScale(double kappa, int resolution) : kappa_(kappa), alpha_(alpha_kappa(kappa)) {
    if (!(kappa > 0.0)) throw std::invalid_argument("jacobi_scale: kappa must be positive");
    if (resolution < 1000) throw std::invalid_argument("jacobi_scale: resolution must be >= 1000");
    u_ = Eigen::ArrayXd::LinSpaced(resolution, kLogitLo, kLogitHi);
    s_.resize(resolution);
    s_[0] = 0.0;
    for (Eigen::Index i = 1; i < u_.size(); ++i) s_[i] = s_[i - 1] + panel_integral(u_[i - 1], u_[i]);
    // Anchor S(alpha_kappa) = 0.
    const double u_alpha = std::log(alpha_) - std::log1p(-alpha_);
    const double du = u_[1] - u_[0];
    const auto i = static_cast<Eigen::Index>(std::floor((u_alpha - kLogitLo) / du));
    const double s_alpha = s_[i] + panel_integral(u_[i], u_alpha);
    s_ -= s_alpha;
}

double JacobiScale::panel_integral(double a, double b) const {
    const double k = kappa_;
    return panel_rule().integrate([k](double v) { return std::exp(k * softplus(v)); }, a, b);
}

double JacobiScale::S_logit(double u) const {
    const Eigen::Index n = u_.size();
    if (u <= u_[0]) {
        // (1 + e^v)^kappa = 1 + kappa e^v + O(e^{2v}) far left.
        return s_[0] + (u - u_[0]) + kappa_ * (std::exp(u) - std::exp(u_[0]));
    }
    if (u >= u_[n - 1]) {
        // Beyond the table S grows like (1-y)^{-kappa} / kappa = (1 + e^u)^kappa / kappa.
        return s_[n - 1] + (std::exp(kappa_ * softplus(u)) - std::exp(kappa_ * softplus(u_[n - 1]))) / kappa_;
    }
    const double du = u_[1] - u_[0];
    auto i = static_cast<Eigen::Index>((u - u_[0]) / du);
    i = std::min(i, n - 2);
    return s_[i] + panel_integral(u_[i], u);
}

double JacobiScale::logit_of_S(double s) const {
    const Eigen::Index n = u_.size();
    if (std::isnan(s)) return s;
    if (s >= s_[n - 1]) {
        const double x = kappa_ * (s - s_[n - 1]) + std::exp(kappa_ * softplus(u_[n - 1]));
        // (1 + e^u)^kappa = x  =>  u = log(expm1(log(x) / kappa)).
        return std::log(std::expm1(std::log(x) / kappa_));
    }
    double u;
    if (s <= s_[0]) {
        u = u_[0] + (s - s_[0]);
    } else {
        const auto it = std::upper_bound(s_.data(), s_.data() + n, s);
        const Eigen::Index i = (it - s_.data()) - 1;
        const double w = (s - s_[i]) / (s_[i + 1] - s_[i]);
        u = u_[i] + w * (u_[i + 1] - u_[i]);
    }
    for (int iter = 0; iter < 60; ++iter) {
        const double f = S_logit(u) - s;
        const double step = f / std::exp(kappa_ * softplus(u));
        u -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(u))) break;
    }
    return u;
}

double JacobiScale::S(double y) const {
    if (!(y > 0.0 && y < 1.0)) throw BoundaryError("JacobiScale::S: y must lie strictly inside (0, 1)");
    return S_logit(std::log(y) - std::log1p(-y));
}

double JacobiScale::S_inverse(double s) const { return logistic(logit_of_S(s)); }

JacobiScale jacobi_scale(double kappa, int resolution) { return JacobiScale(kappa, resolution); }

// -- Skew product --------------------------------------------------------------

SkewProductStats skew_product_check(double kappa, double u_max, double dt, std::size_t trials, Seed seed) {
    if (trials < 1000) throw std::invalid_argument("skew_product_check: need trials >= 1000");
    if (!(u_max > 0.0) || !(dt > 0.0)) throw std::invalid_argument("skew_product_check: need u_max > 0 and dt > 0");
    const double d_big = 2.0 + 2.0 * kappa;
    const auto n = static_cast<std::size_t>(std::ceil(u_max / dt - 1e-9));

    SkewProductStats out;
    out.ratio.reserve(trials);
    out.clock.reserve(trials);
    out.jacobi_at_clock.reserve(trials);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Rng rng(split_seed(seed, 2 * trial));
        double z2 = 0.0;                                      // R2^2(0)
        double zb = besq_transition(d_big, 0.0, 1.0, rng);    // R_{2+2k}^2(1)
        out.ratio_at_zero = std::max(out.ratio_at_zero, z2 / (z2 + zb));
        double clock = 0.0, s = 0.0;
        double inv_prev = 1.0 / (z2 + zb);
        for (std::size_t k = 1; k <= n; ++k) {
            const double h = std::min(dt, u_max - s);
            z2 = besq_transition(2.0, z2, h, rng);
            zb = besq_transition(d_big, zb, h, rng);
            s += h;
            const double inv = 1.0 / (z2 + zb);
            const double inc = 0.5 * h * (inv_prev + inv);
            if (!(inc > 0.0)) out.clock_increasing = false;
            clock += inc;
            inv_prev = inv;
            const double ratio = z2 / (z2 + zb);
            if (!(ratio > 0.0 && ratio < 1.0)) out.ratio_inside_unit = false;
        }
        out.ratio.push_back(z2 / (z2 + zb));
        out.clock.push_back(clock);

        Rng jac(split_seed(seed, 2 * trial + 1));
        out.jacobi_at_clock.push_back(jacobi_value_at(kappa, 0.0, clock, std::min(dt, 1e-3), jac));
    }
    const KsResult ks = ks_two_sample(out.ratio, out.jacobi_at_clock);
    out.ks_statistic = ks.statistic;
    out.ks_critical_05 = ks.critical_05;
    return out;
}

void write_process_csv(const ProcessPath& path, std::ostream& out) {
    const auto old = out.precision(17);
    out << "t,state\n";
    for (Eigen::Index i = 0; i < path.size(); ++i) out << path.times[i] << ',' << path.states[i] << '\n';
    out.precision(old);
}

}  // namespace driftsim

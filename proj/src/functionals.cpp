#include "driftsim/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <vector>

#include "driftsim/errors.hpp"
#include "driftsim/numeric.hpp"

namespace driftsim {

double LocalTimeField::value_at(double x) const noexcept {
    const Eigen::Index n = levels.size();
    if (n == 0 || x < levels[0] || x > levels[n - 1]) return 0.0;
    const auto it = std::upper_bound(levels.data(), levels.data() + n, x);
    const Eigen::Index i = std::min<Eigen::Index>((it - levels.data()) - 1, n - 2);
    if (i < 0) return values[0];
    const double w = (x - levels[i]) / (levels[i + 1] - levels[i]);
    return values[i] + w * (values[i + 1] - values[i]);
}

double occupation_integral(const LocalTimeField& field) {
    if (field.origin == FieldOrigin::path_estimate) return field.values.sum() * field.bandwidth;
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < field.size(); ++i)
        s += 0.5 * (field.levels[i + 1] - field.levels[i]) * (field.values[i] + field.values[i + 1]);
    return s;
}

namespace {

// Occupation times of bins centered at j * b for j in [lo, lo + size).
struct BinCounter {
    explicit BinCounter(double bw) : b(bw) {}

    double b;
    long lo = 0;
    std::deque<double> time;

    static long bin_of(double x, double b) { return static_cast<long>(std::floor(x / b + 0.5)); }

    double& at(long j) {
        if (time.empty()) {
            lo = j;
            time.push_back(0.0);
        }
        while (j < lo) {
            time.push_front(0.0);
            --lo;
        }
        while (j >= lo + static_cast<long>(time.size())) time.push_back(0.0);
        return time[static_cast<std::size_t>(j - lo)];
    }

    LocalTimeField field(double t_final, bool undersmoothed) const {
        LocalTimeField f;
        f.origin = FieldOrigin::path_estimate;
        f.bandwidth = b;
        f.t_final = t_final;
        f.undersmoothed = undersmoothed;
        const auto n = static_cast<Eigen::Index>(time.size());
        f.levels.resize(n);
        f.values.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            f.levels[i] = static_cast<double>(lo + i) * b;
            f.values[i] = time[static_cast<std::size_t>(i)] / b;
        }
        return f;
    }
};

double mean_step(const ProcessPath& path) {
    return path.size() > 1 ? (path.times[path.size() - 1] - path.times[0]) / static_cast<double>(path.size() - 1) : 0.0;
}

}  // namespace

LocalTimeField local_time_field(const ProcessPath& path, double t, double bandwidth) {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("local_time_field: bandwidth must be positive");
    if (path.size() < 2) throw std::invalid_argument("local_time_field: path too short");
    if (t > path.times[path.size() - 1] * (1.0 + 1e-12))
        throw PathExhaustedError("local_time_field: path does not cover [0, t]");
    BinCounter bins(bandwidth);
    for (Eigen::Index k = 0; k + 1 < path.size() && path.times[k] < t; ++k) {
        const double d = std::min(path.times[k + 1], t) - path.times[k];
        bins.at(BinCounter::bin_of(path.states[k], bandwidth)) += d;
    }
    return bins.field(t, bandwidth < std::sqrt(mean_step(path)));
}

double inverse_local_time(const ProcessPath& path, double x, double bandwidth) {
    if (!(x >= 0.0)) throw std::invalid_argument("inverse_local_time: x must be nonnegative");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("inverse_local_time: bandwidth must be positive");
    if (x == 0.0) return 0.0;
    const double target = x * bandwidth;
    double occ = 0.0;
    for (Eigen::Index k = 0; k + 1 < path.size(); ++k) {
        if (BinCounter::bin_of(path.states[k], bandwidth) != 0) continue;
        const double d = path.times[k + 1] - path.times[k];
        if (occ + d >= target) return path.times[k] + (target - occ);
        occ += d;
    }
    throw PathExhaustedError("inverse_local_time: local time at 0 never reaches x; extend the path");
}

LocalTimeField field_at_inverse_local_time(double lambda, double dt, double bandwidth, double max_time, Seed seed) {
    if (!(lambda > 0.0) || !(dt > 0.0) || !(bandwidth > 0.0))
        throw std::invalid_argument("field_at_inverse_local_time: need positive lambda, dt and bandwidth");
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(dt));
    BinCounter bins(bandwidth);
    const double target = lambda * bandwidth;
    double x = 0.0, t = 0.0;
    bins.at(0);
    while (t < max_time) {
        const long j = BinCounter::bin_of(x, bandwidth);
        double& cell = bins.at(j);
        if (j == 0 && cell + dt >= target) {
            t += target - cell;
            cell = target;
            return bins.field(t, bandwidth < std::sqrt(dt));
        }
        cell += dt;
        t += dt;
        x += normal(rng);
    }
    throw PathExhaustedError("field_at_inverse_local_time: max_time reached");
}

ProcessPath rescale_brownian(const ProcessPath& path, double v) {
    if (!(v > 0.0)) throw std::invalid_argument("rescale_brownian: v must be positive");
    ProcessPath out = path;
    out.times = path.times / (v * v);
    out.states = path.states / v;
    return out;
}

LocalTimeField rescale_field(const LocalTimeField& field, double v) {
    if (!(v > 0.0)) throw std::invalid_argument("rescale_field: v must be positive");
    LocalTimeField out = field;
    out.levels = field.levels / v;
    out.values = field.values / v;
    out.t_final = field.t_final / (v * v);
    out.bandwidth = field.bandwidth / v;
    return out;
}

// -- Exact fields ----------------------------------------------------------------

namespace {

double next_level(double x, const ExactFieldGrid& g) {
    if (x == 0.0) return g.x0;
    double nx = x + std::min(x * (g.growth - 1.0), g.max_step);
    if (x < 1.0 && nx > 1.0) nx = 1.0;
    return nx;
}

// BESQ(0) from lambda along the grid, values up to and including absorption.
void one_side(double lambda, Rng& rng, const ExactFieldGrid& g, std::vector<double>& xs, std::vector<double>& zs) {
    double x = 0.0, z = lambda;
    xs.push_back(0.0);
    zs.push_back(z);
    while (z > 0.0) {
        const double nx = next_level(x, g);
        z = besq_transition(0.0, z, nx - x, rng);
        x = nx;
        xs.push_back(x);
        zs.push_back(z);
    }
}

}  // namespace

LocalTimeField ray_knight_field(double lambda, Rng& rng, const ExactFieldGrid& grid) {
    if (!(lambda > 0.0)) throw std::invalid_argument("ray_knight_field: lambda must be positive");
    if (!(grid.x0 > 0.0) || !(grid.growth > 1.0) || !(grid.max_step > 0.0))
        throw std::invalid_argument("ray_knight_field: invalid grid");
    std::vector<double> xp, zp, xn, zn;
    one_side(lambda, rng, grid, xp, zp);
    one_side(lambda, rng, grid, xn, zn);

    LocalTimeField f;
    f.origin = FieldOrigin::ray_knight_exact;
    f.t_final = std::numeric_limits<double>::quiet_NaN();
    const auto n = static_cast<Eigen::Index>(xn.size() - 1 + xp.size());
    f.levels.resize(n);
    f.values.resize(n);
    Eigen::Index k = 0;
    for (std::size_t i = xn.size(); i-- > 1;) {
        f.levels[k] = -xn[i];
        f.values[k++] = zn[i];
    }
    for (std::size_t i = 0; i < xp.size(); ++i) {
        f.levels[k] = xp[i];
        f.values[k++] = zp[i];
    }
    f.t_final = occupation_integral(f);
    return f;
}

LocalTimeField ray_knight_field(double lambda, Seed seed, const ExactFieldGrid& grid) {
    Rng rng(seed);
    return ray_knight_field(lambda, rng, grid);
}

// -- Functionals -------------------------------------------------------------------

namespace {

// Index of the level 0; throws when the field has none.
Eigen::Index zero_index(const LocalTimeField& f) {
    const auto it = std::lower_bound(f.levels.data(), f.levels.data() + f.size(), 0.0);
    if (it == f.levels.data() + f.size() || *it != 0.0) throw std::out_of_range("field has no level at 0");
    return it - f.levels.data();
}

}  // namespace

FunctionalValue K_functional(double kappa, const LocalTimeField& field) {
    if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("K_functional: kappa must lie in (0, 1)");
    FunctionalValue out;
    if (field.size() == 0) return out;
    const double p = 1.0 / kappa - 2.0;
    const Eigen::Index z = zero_index(field);
    if (z + 1 >= field.size()) return out;
    double s = 0.0;
    for (Eigen::Index i = z + 1; i + 1 < field.size(); ++i) {
        const double a = field.levels[i], b = field.levels[i + 1];
        s += 0.5 * (b - a) * (std::pow(a, p) * field.values[i] + std::pow(b, p) * field.values[i + 1]);
    }
    const double x0 = field.levels[z + 1];
    const double head = field.values[z] * std::pow(x0, p + 1.0) / (p + 1.0);
    out.value = s + head;
    out.cutoff_share = out.value > 0.0 ? head / out.value : 0.0;
    out.flagged = out.cutoff_share > 0.01;
    return out;
}

FunctionalValue C_functional(const LocalTimeField& field) {
    FunctionalValue out;
    if (field.size() == 0) return out;
    const Eigen::Index z = zero_index(field);
    const auto* one = std::lower_bound(field.levels.data(), field.levels.data() + field.size(), 1.0);
    const bool has_one = one != field.levels.data() + field.size() && *one == 1.0;
    const double last = field.levels[field.size() - 1];
    if (!has_one && last > 1.0) throw std::out_of_range("C_functional: the field needs a level at exactly 1");

    auto integrand = [&](Eigen::Index i) {
        const double x = field.levels[i];
        return x <= 1.0 ? (field.values[i] - 8.0) / x : field.values[i] / x;
    };
    double s = 0.0;
    for (Eigen::Index i = z + 1; i + 1 < field.size(); ++i)
        s += 0.5 * (field.levels[i + 1] - field.levels[i]) * (integrand(i) + integrand(i + 1));
    // A field that dies before 1 still pays -8/x on the rest of (x_last, 1].
    if (last < 1.0) s += -8.0 * std::log(1.0 / last);
    const double head = z + 1 < field.size() ? field.values[z + 1] - 8.0 : 0.0;
    out.value = s + head;
    out.cutoff_share = std::abs(head) / std::max(std::abs(out.value), 1.0);
    out.flagged = out.cutoff_share > 0.01;
    return out;
}

FunctionalValue J_functional(double kappa, double t, const LocalTimeField& field, const JacobiScale& scale) {
    if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("J_functional: kappa must lie in (0, 1]");
    if (!(t > 0.0)) throw std::invalid_argument("J_functional: t must be positive");
    if (std::abs(scale.kappa() - kappa) > 1e-12) throw std::invalid_argument("J_functional: scale built for another kappa");
    FunctionalValue out;
    if (field.size() < 2) {
        if (field.size() == 1) throw std::out_of_range("J_functional: field range insufficient");
        return out;
    }
    auto weight = [&](double x) {
        const double u = scale.logit_of_S(t * x);
        const double y = logistic(u), q = logistic(-u);
        return t * y * y * std::pow(q, 2.0 * kappa - 1.0);
    };
    double prev = weight(field.levels[0]) * field.values[0];
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < field.size(); ++i) {
        const double cur = field.values[i + 1] == 0.0 ? 0.0 : weight(field.levels[i + 1]) * field.values[i + 1];
        s += 0.5 * (field.levels[i + 1] - field.levels[i]) * (prev + cur);
        prev = cur;
    }
    out.value = s;
    return out;
}

}  // namespace driftsim

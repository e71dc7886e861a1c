#include "driftsim/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>

#include "driftsim/errors.hpp"
#include "driftsim/numeric.hpp"
#include "driftsim/parallel.hpp"
#include "driftsim/processes.hpp"
#include "driftsim/stats.hpp"

namespace driftsim {

const char* to_string(Method m) noexcept {
    return m == Method::euler ? "euler" : "ray_knight";
}

std::optional<Method> parse_method(const std::string& s) {
    if (s == "euler") return Method::euler;
    if (s == "ray-knight" || s == "ray_knight") return Method::ray_knight;
    return std::nullopt;
}

double default_dt(double step) { return std::min(step * step / 4.0, 1e-3); }

namespace {

void check_levels(const PotentialPath& path, const std::vector<double>& levels) {
    if (levels.empty()) throw std::invalid_argument("hitting time: no levels requested");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] >= 0.0) || !std::isfinite(levels[i]))
            throw std::invalid_argument("hitting time: levels must be finite and nonnegative");
        if (i > 0 && levels[i] < levels[i - 1]) throw std::invalid_argument("hitting time: levels must be increasing");
    }
    if (levels.back() > path.x_max) throw std::invalid_argument("hitting time: level beyond the simulated range");
}

HittingSample blank(const PotentialPath& path, double r, Method m, Seed noise_seed) {
    HittingSample s;
    s.kappa = path.kappa;
    s.r = r;
    s.method = m;
    s.env_seed = path.seed;
    s.noise_seed = noise_seed;
    return s;
}

}  // namespace

// -- Euler ---------------------------------------------------------------------

std::vector<HittingSample> euler_hitting_times(const PotentialPath& path, const std::vector<double>& levels,
                                               double dt, Seed noise_seed, double horizon) {
    check_levels(path, levels);
    if (!(dt > 0.0)) throw std::invalid_argument("euler_hitting_times: dt must be positive");
    const double h = path.step;
    const double inv_h = 1.0 / h;
    const Eigen::Index cells = path.size() - 1;

    // Drift increment per step in each cell; outside the grid the mean slope -kappa/2 applies.
    Eigen::ArrayXd drift(cells);
    for (Eigen::Index i = 0; i < cells; ++i) drift[i] = -0.5 * (path.values[i + 1] - path.values[i]) * inv_h * dt;
    const double drift_outside = 0.25 * path.kappa * dt;

    std::vector<HittingSample> out;
    out.reserve(levels.size());
    std::size_t next = 0;
    while (next < levels.size() && levels[next] == 0.0) out.push_back(blank(path, 0.0, Method::euler, noise_seed)), ++next;

    // Ziggurat normals: the Gaussian draw dominates the cost of a step.
    Rng rng(noise_seed);
    boost::random::normal_distribution<double> normal(0.0, std::sqrt(dt));
    const auto max_steps = static_cast<std::uint64_t>(std::ceil(horizon / dt));
    double x = 0.0;
    std::uint64_t n = 0, below = 0;
    while (next < levels.size() && n < max_steps) {
        if (x < 0.0) ++below;
        const double s = (x - path.x_min) * inv_h;
        const double b = (s >= 0.0 && s < static_cast<double>(cells)) ? drift[static_cast<Eigen::Index>(s)] : drift_outside;
        x += normal(rng) + b;
        ++n;
        while (next < levels.size() && x > levels[next]) {
            HittingSample smp = blank(path, levels[next], Method::euler, noise_seed);
            smp.h_value = static_cast<double>(n) * dt;
            smp.h_minus = static_cast<double>(below) * dt;
            smp.h_plus = smp.h_value - smp.h_minus;
            out.push_back(smp);
            ++next;
        }
    }
    for (; next < levels.size(); ++next) {
        HittingSample smp = blank(path, levels[next], Method::euler, noise_seed);
        smp.h_value = horizon;
        smp.h_minus = static_cast<double>(below) * dt;
        smp.h_plus = std::max(horizon - smp.h_minus, 0.0);
        smp.flags |= sample_flag::horizon_exceeded;
        out.push_back(smp);
    }
    return out;
}

HittingSample euler_hitting_time(const PotentialPath& path, double r, double dt, Seed noise_seed, double horizon) {
    if (!(r >= 0.0)) throw std::invalid_argument("euler_hitting_time: r must be nonnegative");
    HittingSample s = euler_hitting_times(path, {r}, dt, noise_seed, horizon).front();
    if (s.censored()) throw HorizonExceededError("euler_hitting_time: horizon reached before hitting r");
    return s;
}

// -- Ray-Knight -------------------------------------------------------------------

namespace {

struct Nodes {
    std::vector<double> x;
    std::vector<double> w;
    std::size_t origin = 0;
    std::vector<std::size_t> level_index;  ///< node index of each requested level
};

// Nodes from path.x_min up to x_top: every potential cell split into m pieces,
// with the levels merged in. W is linear inside a cell.
Nodes build_nodes(const PotentialPath& path, double x_top, const std::vector<double>& levels, double node_step) {
    const double h = path.step;
    const int m = node_step > 0.0 ? std::max(1, static_cast<int>(std::ceil(h / node_step - 1e-9))) : 1;
    Nodes nd;
    const auto top_cell = std::min<Eigen::Index>(path.size() - 1, static_cast<Eigen::Index>(std::ceil((x_top - path.x_min) / h - 1e-9)));
    const std::size_t expected = static_cast<std::size_t>(top_cell) * m + levels.size() + 2;
    nd.x.reserve(expected);
    nd.w.reserve(expected);
    nd.level_index.resize(levels.size());

    std::size_t li = 0;
    auto push = [&](double x, double w) {
        nd.x.push_back(x);
        nd.w.push_back(w);
    };
    auto same = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); };

    for (Eigen::Index i = 0; i <= top_cell; ++i) {
        const double x0 = path.x(i);
        const double w0 = path.values[i];
        const double w1 = i + 1 < path.size() ? path.values[i + 1] : w0;
        for (int q = 0; q < (i < top_cell ? m : 1); ++q) {
            const double frac = static_cast<double>(q) / m;
            const double x = x0 + frac * h;
            if (x > x_top && !same(x, x_top)) break;
            // Levels strictly inside the previous sub-cell.
            while (li < levels.size() && levels[li] < x && !same(levels[li], x)) {
                const double lx = levels[li];
                if (nd.x.empty() || !same(nd.x.back(), lx)) push(lx, path.value_at(lx));
                nd.level_index[li++] = nd.x.size() - 1;
            }
            push(x, q == 0 ? w0 : w0 + frac * (w1 - w0));
            if (i == path.origin && q == 0) nd.origin = nd.x.size() - 1;
            while (li < levels.size() && same(levels[li], x)) nd.level_index[li++] = nd.x.size() - 1;
        }
    }
    while (li < levels.size()) {
        const double lx = levels[li];
        if (!same(nd.x.back(), lx)) push(lx, path.value_at(lx));
        nd.level_index[li++] = nd.x.size() - 1;
    }
    return nd;
}

struct Piece {
    double minus = 0.0;
    double plus = 0.0;
    double tail = 0.0;  ///< estimated mass below the grid (included in minus)
};

// Runs the scaled field l~ = e^{-W} l down from node `top` with l~(top) = l_top.
// Cells at or above `switch_node` use dimension 2, cells below dimension 0.
Piece descend(const Nodes& nd, double kappa, std::size_t top, std::size_t switch_node, double l_top, Rng& rng) {
    Piece p;
    double l = l_top;
    for (std::size_t k = top; k-- > 0;) {
        const double delta = k >= switch_node ? 2.0 : 0.0;
        if (delta == 0.0 && l == 0.0) return p;
        const double hk = nd.x[k + 1] - nd.x[k];
        const double e = std::exp(nd.w[k + 1] - nd.w[k]);
        const double next = besq_transition(delta, l * e, 0.5 * hk * (1.0 + e), rng);
        const double area = 0.5 * hk * (l + next);
        (nd.x[k + 1] <= 0.0 ? p.minus : p.plus) += area;
        l = next;
    }
    if (l > 0.0) {
        // Below the grid W_kappa grows like kappa |x| / 2 and l is a martingale in the
        // A scale, so the remaining mass is about l~(x_min) * 2 / kappa.
        p.tail = kappa > 0.0 ? l * 2.0 / kappa : std::numeric_limits<double>::infinity();
        p.minus += p.tail;
    }
    return p;
}

}  // namespace

std::vector<HittingSample> ray_knight_hitting_times(const PotentialPath& path, const std::vector<double>& levels,
                                                    Seed noise_seed, RayKnightOptions options) {
    check_levels(path, levels);
    const Nodes nd = build_nodes(path, levels.back(), levels, options.node_step);
    Rng rng(noise_seed);

    std::vector<HittingSample> out;
    out.reserve(levels.size());
    double minus = 0.0, plus = 0.0, tail = 0.0;
    std::size_t prev = nd.origin;
    for (std::size_t j = 0; j < levels.size(); ++j) {
        HittingSample s = blank(path, levels[j], Method::ray_knight, noise_seed);
        const std::size_t top = nd.level_index[j];
        if (levels[j] > 0.0 && top > prev) {
            const Piece p = descend(nd, path.kappa, top, prev, 0.0, rng);
            minus += p.minus;
            plus += p.plus;
            tail += p.tail;
        }
        if (levels[j] > 0.0) prev = top;
        s.h_minus = minus;
        s.h_plus = plus;
        s.h_value = minus + plus;
        if (tail > options.truncation_fraction * s.h_value) s.flags |= sample_flag::truncated;
        out.push_back(s);
    }
    return out;
}

HittingSample ray_knight_hitting_time(const PotentialPath& path, double r, Seed noise_seed, RayKnightOptions options) {
    if (!(r >= 0.0)) throw std::invalid_argument("ray_knight_hitting_time: r must be nonnegative");
    return ray_knight_hitting_times(path, {r}, noise_seed, options).front();
}

// -- Batches -------------------------------------------------------------------

std::vector<double> BatchResult::values(std::size_t level_index) const {
    std::vector<double> v;
    v.reserve(trials.size());
    for (const auto& t : trials) v.push_back(t.at(level_index).h_value);
    return v;
}

std::vector<HittingSample> BatchResult::flat() const {
    std::vector<HittingSample> v;
    for (const auto& t : trials) v.insert(v.end(), t.begin(), t.end());
    return v;
}

BatchResult run_hitting_batch(const BatchConfig& c) {
    if (c.trials == 0) throw std::invalid_argument("run_hitting_batch: trials must be positive");
    if (c.levels.empty()) throw std::invalid_argument("run_hitting_batch: no levels");
    if (!(c.kappa > 0.0)) throw std::invalid_argument("run_hitting_batch: kappa must be positive");
    if (!(c.step > 0.0)) throw std::invalid_argument("run_hitting_batch: step must be positive");
    const double r_max = c.levels.back();
    const double x_min = c.x_min.value_or(default_x_min(c.kappa, r_max));
    const double x_max = r_max + (c.method == Method::euler ? 1.0 : 0.0);
    const double dt = c.dt > 0.0 ? c.dt : default_dt(c.step);
    const PotentialOptions popt{c.suppress_noise};
    const RayKnightOptions rk{c.node_step, 1e-3};

    std::optional<PotentialPath> shared;
    if (!c.annealed) shared = sample_potential(c.kappa, x_min, x_max, c.step, c.env_seed, popt);

    BatchResult result;
    result.trials.resize(c.trials);
    parallel_for(c.trials, c.threads, [&](std::size_t i) {
        const TrialSeeds seeds = trial_seeds(c.seed, i);
        PotentialPath own;
        if (!shared) own = sample_potential(c.kappa, x_min, x_max, c.step, seeds.env, popt);
        const PotentialPath& path = shared ? *shared : own;
        auto samples = c.method == Method::euler ? euler_hitting_times(path, c.levels, dt, seeds.noise, c.horizon)
                                                 : ray_knight_hitting_times(path, c.levels, seeds.noise, rk);
        if (c.method == Method::ray_knight) {
            for (auto& s : samples) {
                if (s.h_value > c.horizon) {
                    s.h_value = c.horizon;
                    s.flags |= sample_flag::horizon_exceeded;
                }
            }
        }
        result.trials[i] = std::move(samples);
    });
    for (const auto& t : result.trials) {
        for (const auto& s : t) {
            result.censored += s.censored();
            result.truncated += s.truncated();
        }
    }
    return result;
}

void write_samples_csv(const std::vector<HittingSample>& samples, std::ostream& out) {
    const auto old = out.precision(17);
    out << "method,kappa,r,env_seed,noise_seed,h_value,h_minus,h_plus,flags\n";
    for (const auto& s : samples) {
        out << to_string(s.method) << ',' << s.kappa << ',' << s.r << ',' << s.env_seed << ',' << s.noise_seed << ','
            << s.h_value << ',' << s.h_minus << ',' << s.h_plus << ',' << s.flags << '\n';
    }
    out.precision(old);
}

std::vector<HittingSample> read_samples_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("method,kappa,r,", 0) != 0)
        throw std::runtime_error("samples csv: missing header");
    std::vector<HittingSample> out;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::istringstream is(line);
        std::string method;
        HittingSample s;
        char c[8];
        std::getline(is, method, ',');
        is >> s.kappa >> c[0] >> s.r >> c[1] >> s.env_seed >> c[2] >> s.noise_seed >> c[3] >> s.h_value >> c[4] >>
            s.h_minus >> c[5] >> s.h_plus >> c[6] >> s.flags;
        const auto m = parse_method(method);
        if (!is || !m || std::string(c, 7) != ",,,,,,,")
            throw std::runtime_error("samples csv: malformed row " + std::to_string(row));
        s.method = *m;
        out.push_back(s);
    }
    return out;
}

// -- Negative-side tail ----------------------------------------------------------

TailProbeResult negative_tail_probe(double kappa, const std::vector<double>& z_grid, std::size_t trials, Seed seed,
                                    double step, unsigned threads) {
    if (trials < 100) throw std::invalid_argument("negative_tail_probe: need trials >= 100");
    if (!(kappa > 0.0)) throw std::invalid_argument("negative_tail_probe: kappa must be positive");
    const double x_min = default_x_min(kappa, 100.0);
    const double x_max = 80.0 / kappa;

    TailProbeResult out;
    out.samples.resize(trials);
    std::vector<char> truncated(trials, 0);
    parallel_for(trials, threads, [&](std::size_t i) {
        const TrialSeeds seeds = trial_seeds(seed, i);
        const PotentialPath path = sample_potential(kappa, x_min, x_max, step, seeds.env);
        const double a_inf = scale_function(path).a_infinity();
        Rng rng(seeds.noise);
        const double l0 = besq_transition(2.0, 0.0, a_inf, rng);
        const Nodes nd = build_nodes(path, 0.0, {}, 0.0);
        const Piece p = descend(nd, kappa, nd.origin, nd.origin, l0, rng);
        out.samples[i] = p.minus;
        truncated[i] = p.tail > 1e-3 * p.minus;
    });
    for (char t : truncated) out.truncated += t;

    out.z = z_grid;
    if (out.z.empty()) {
        const double m = std::max(median(out.samples), 1e-12);
        for (int k = 0; k <= 12; ++k) out.z.push_back(m * std::pow(10.0, k / 4.0));
    }
    const Ecdf ecdf = make_ecdf(out.samples);
    std::vector<double> lx, ly;
    for (double z : out.z) {
        const double s = 1.0 - ecdf(z);
        out.survival.push_back(s);
        if (s > 0.0 && z > 0.0) {
            lx.push_back(std::log(z));
            ly.push_back(std::log(s));
        }
    }
    if (lx.size() >= 2) {
        const LineFit fit = fit_line(lx, ly);
        out.slope = fit.slope;
        out.intercept = fit.intercept;
    } else {
        out.slope = out.intercept = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

}  // namespace driftsim

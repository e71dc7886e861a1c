#include "driftsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace driftsim {

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0, sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double kolmogorov_p(double d, double n_eff) {
    const double s = std::sqrt(n_eff);
    return kolmogorov_survival((s + 0.12 + 0.11 / s) * d);
}

}  // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t n = a.size(), m = b.size();
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < n && j < m) {
        const double v = std::min(a[i], b[j]);
        while (i < n && a[i] == v) ++i;
        while (j < m && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    KsResult r;
    r.statistic = d;
    r.n = n;
    r.m = m;
    const double scale = std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
    r.critical_01 = kKsC01 * scale;
    r.critical_05 = kKsC05 * scale;
    r.p_value = kolmogorov_p(d, static_cast<double>(n) * m / static_cast<double>(n + m));
    return r;
}

KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
    std::sort(sample.begin(), sample.end());
    const auto n = sample.size();
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    KsResult r;
    r.statistic = d;
    r.n = n;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    r.critical_01 = kKsC01 * scale;
    r.critical_05 = kKsC05 * scale;
    r.p_value = kolmogorov_p(d, static_cast<double>(n));
    return r;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile: empty sample");
    p = std::clamp(p, 0.0, 1.0);
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    std::nth_element(values.begin(), values.begin() + lo, values.end());
    const double v_lo = values[lo];
    if (lo + 1 >= values.size()) return v_lo;
    const double v_hi = *std::min_element(values.begin() + lo + 1, values.end());
    return v_lo + (pos - static_cast<double>(lo)) * (v_hi - v_lo);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double mean(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("mean: empty sample");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double variance(const std::vector<double>& values) {
    if (values.size() < 2) throw std::invalid_argument("variance: need two values");
    const double mu = mean(values);
    double s = 0.0;
    for (double v : values) s += (v - mu) * (v - mu);
    return s / static_cast<double>(values.size() - 1);
}

double Ecdf::operator()(double v) const {
    if (x.empty()) return 0.0;
    return static_cast<double>(std::upper_bound(x.begin(), x.end(), v) - x.begin()) / static_cast<double>(x.size());
}

Ecdf make_ecdf(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return Ecdf{std::move(values)};
}

// -- Hill --------------------------------------------------------------------

namespace {

// Hill estimate from the k largest values of `v` (reordered in place).
double hill_core(std::vector<double>& v, std::size_t k, double* threshold) {
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + (n - k - 1), v.end());
    const double cut = v[n - k - 1];
    if (threshold) *threshold = cut;
    const double log_cut = std::log(cut);
    double s = 0.0;
    for (std::size_t i = n - k; i < n; ++i) s += std::log(v[i]) - log_cut;
    return s > 0.0 ? static_cast<double>(k) / s : std::numeric_limits<double>::infinity();
}

}  // namespace

HillResult hill_estimator(const std::vector<double>& values, HillOptions options) {
    std::vector<double> pos;
    pos.reserve(values.size());
    for (double v : values)
        if (v > 0.0 && std::isfinite(v)) pos.push_back(v);
    if (pos.size() < 3) throw std::invalid_argument("hill_estimator: need at least three positive values");

    HillResult r;
    r.k = std::max<std::size_t>(
        1, std::min(pos.size() - 2, static_cast<std::size_t>(std::floor(options.tail_fraction * pos.size()))));
    r.unstable = r.k < 100;
    std::vector<double> work = pos;
    r.estimate = hill_core(work, r.k, &r.threshold);

    if (options.bootstrap > 0) {
        Rng rng(options.seed);
        std::uniform_int_distribution<std::size_t> pick(0, pos.size() - 1);
        std::vector<double> boot(options.bootstrap);
        for (std::size_t b = 0; b < options.bootstrap; ++b) {
            for (auto& w : work) w = pos[pick(rng)];
            boot[b] = hill_core(work, r.k, nullptr);
        }
        r.lower = quantile(boot, 0.025);
        r.upper = quantile(boot, 0.975);
    } else {
        r.lower = r.upper = r.estimate;
    }
    return r;
}

// -- Reports -------------------------------------------------------------------

const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::informational: return "informational";
    }
    return "unknown";
}

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

Statistic& ExperimentReport::add(Statistic s) {
    statistics.push_back(std::move(s));
    return statistics.back();
}

Statistic& ExperimentReport::check(std::string label, double value, double target, double tolerance, bool ok,
                                   std::string note) {
    return add({std::move(label), value, target, tolerance, ok ? Verdict::pass : Verdict::fail, std::move(note)});
}

Statistic& ExperimentReport::inform(std::string label, double value, std::string note) {
    return add({std::move(label), value, 0.0, 0.0, Verdict::informational, std::move(note)});
}

bool ExperimentReport::hard_failure() const noexcept {
    return std::any_of(statistics.begin(), statistics.end(), [](const Statistic& s) { return s.verdict == Verdict::fail; });
}

namespace {

nlohmann::json number_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace

std::string ExperimentReport::to_json() const {
    nlohmann::json j;
    j["schema_version"] = schema_version;
    j["name"] = name;
    j["parameters"] = parameters;
    j["seed"] = seed;
    j["samples_ref"] = samples_ref;
    nlohmann::json stats = nlohmann::json::array();
    std::size_t pass = 0, fail = 0, info = 0;
    for (const auto& s : statistics) {
        stats.push_back({{"label", s.label},
                         {"value", number_or_null(s.value)},
                         {"target", number_or_null(s.target)},
                         {"tolerance", number_or_null(s.tolerance)},
                         {"verdict", to_string(s.verdict)},
                         {"note", s.note}});
        (s.verdict == Verdict::pass ? pass : s.verdict == Verdict::fail ? fail : info)++;
    }
    j["statistics"] = stats;
    j["verdicts"] = {{"pass", pass}, {"fail", fail}, {"informational", info}};
    return j.dump(2);
}

std::string ExperimentReport::to_text() const {
    std::ostringstream os;
    os << "experiment " << name << " (seed " << seed << ")\n";
    for (const auto& [k, v] : parameters) os << "  " << k << " = " << v << '\n';
    for (const auto& s : statistics) {
        os << "  [" << to_string(s.verdict) << "] " << s.label << ": " << format_number(s.value);
        if (s.verdict != Verdict::informational)
            os << " (target " << format_number(s.target) << ", tol " << format_number(s.tolerance) << ")";
        if (!s.note.empty()) os << "  " << s.note;
        os << '\n';
    }
    if (!samples_ref.empty()) os << "  samples: " << samples_ref << '\n';
    return os.str();
}

}  // namespace driftsim

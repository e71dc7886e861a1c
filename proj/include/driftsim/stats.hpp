#ifndef DRIFTSIM_STATS_HPP
#define DRIFTSIM_STATS_HPP

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "driftsim/rng.hpp"

namespace driftsim {

// -- Kolmogorov-Smirnov ------------------------------------------------------

/// Asymptotic Kolmogorov quantiles c(alpha): reject when D > c * scale.
inline constexpr double kKsC01 = 1.6276;
inline constexpr double kKsC05 = 1.3581;

struct KsResult {
    double statistic = 0.0;
    double critical_01 = 0.0;
    double critical_05 = 0.0;
    double p_value = 1.0;  ///< asymptotic Kolmogorov tail probability
    std::size_t n = 0;
    std::size_t m = 0;     ///< 0 for the one-sample test

    bool passes_01() const noexcept { return statistic < critical_01; }
    bool passes_05() const noexcept { return statistic < critical_05; }
};

/// Exact two-sample statistic sup |F_a - F_b| (ties advance both samples together)
/// with asymptotic critical values c(alpha) sqrt((n + m) / (n m)).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// One-sample statistic against a continuous CDF.
KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

// -- Order statistics ----------------------------------------------------------

/// Linear-interpolation quantile (type 7). Copies and partially sorts.
double quantile(std::vector<double> values, double p);
double median(std::vector<double> values);
double mean(const std::vector<double>& values);
double variance(const std::vector<double>& values);  ///< unbiased

struct Ecdf {
    std::vector<double> x;  ///< sorted sample
    double operator()(double v) const;  ///< fraction of the sample <= v
};
Ecdf make_ecdf(std::vector<double> values);

// -- Hill estimator ----------------------------------------------------------

struct HillResult {
    double estimate = 0.0;  ///< upper-tail index
    double lower = 0.0;     ///< bootstrap 2.5% quantile
    double upper = 0.0;     ///< bootstrap 97.5% quantile
    std::size_t k = 0;      ///< order statistics used
    double threshold = 0.0; ///< X_(n-k), the tail cut
    bool unstable = false;  ///< fewer than 100 tail points
};

struct HillOptions {
    double tail_fraction = 0.02;
    std::size_t bootstrap = 200;
    Seed seed = 0x5eed;
};

/// Hill estimate 1 / mean(log(X_(n-i+1) / X_(n-k))) over the k largest points.
/// Nonpositive values are ignored.
HillResult hill_estimator(const std::vector<double>& values, HillOptions options = {});

// -- Reports --------------------------------------------------------------------

enum class Verdict { pass, fail, informational };

const char* to_string(Verdict v) noexcept;

struct Statistic {
    std::string label;
    double value = 0.0;
    double target = 0.0;
    double tolerance = 0.0;  ///< acceptance half-width; meaning is per label
    Verdict verdict = Verdict::informational;
    std::string note;
};

/// Aggregated results of one experiment. Every statistic carries a verdict.
struct ExperimentReport {
    static constexpr int schema_version = 1;

    std::string name;
    std::map<std::string, std::string> parameters;
    std::vector<Statistic> statistics;
    std::string samples_ref;
    Seed seed = 0;

    Statistic& add(Statistic s);
    /// Hard verdict from a predicate; `tolerance` is recorded, not applied.
    Statistic& check(std::string label, double value, double target, double tolerance, bool ok,
                     std::string note = {});
    Statistic& inform(std::string label, double value, std::string note = {});

    bool hard_failure() const noexcept;
    std::string to_json() const;
    std::string to_text() const;
};

/// Format a double for report parameters without trailing noise.
std::string format_number(double v);

}  // namespace driftsim

#endif  // DRIFTSIM_STATS_HPP

#ifndef DRIFTSIM_NUMERIC_HPP
#define DRIFTSIM_NUMERIC_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>

namespace driftsim {

/// log(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b) noexcept {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

/// Logistic function and its complement, both accurate in the far tails.
inline double logistic(double u) noexcept {
    return u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
}
inline double logistic_complement(double u) noexcept { return logistic(-u); }

/// Gauss-Legendre rule on [-1, 1] by the Golub-Welsch eigenvalue method.
struct GaussLegendre {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
    explicit GaussLegendre(int n);

    /// Integral of f over [a, b].
    template <class F>
    double integrate(F&& f, double a, double b) const {
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        double sum = 0.0;
        for (Eigen::Index i = 0; i < nodes.size(); ++i) sum += weights[i] * f(mid + half * nodes[i]);
        return half * sum;
    }
};

/// Ordinary least squares y = intercept + slope * x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

template <class XS, class YS>
LineFit fit_line(const XS& xs, const YS& ys) {
    const auto n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    LineFit fit;
    const double den = n * sxx - sx * sx;
    fit.slope = den != 0.0 ? (n * sxy - sx * sy) / den : std::numeric_limits<double>::quiet_NaN();
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

}  // namespace driftsim

#endif  // DRIFTSIM_NUMERIC_HPP

#ifndef DRIFTSIM_PLOT_HPP
#define DRIFTSIM_PLOT_HPP

#include <string>
#include <vector>

#include "driftsim/diffusion.hpp"
#include "driftsim/stats.hpp"

namespace driftsim {

/// Empirical CDF of hitting-time samples. Axis labels carry kappa and r.
/// Throws std::invalid_argument on an empty sample.
std::string ecdf_svg(const std::vector<double>& sample, double kappa, double r);

/// Log-log empirical survival with the Hill fit drawn as a line of slope
/// -estimate through the threshold point.
std::string tail_svg(const std::vector<double>& sample, const HillResult& hill, double kappa, double r);

/// Normalized statistic against r (log axis), with a horizontal target line
/// when target is finite.
std::string ratio_svg(const std::vector<double>& r, const std::vector<double>& ratio, double target,
                      const std::string& y_label);

/// Writes ecdf_*.svg and tail_*.svg for every (kappa, r) group of the samples
/// and ratio_*.svg for every kappa with several r. Returns the written paths.
/// Throws std::invalid_argument on an empty sample set.
std::vector<std::string> emit_plots(const std::vector<HittingSample>& samples, const std::string& out_dir);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace driftsim

#endif  // DRIFTSIM_PLOT_HPP

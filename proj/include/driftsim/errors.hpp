#ifndef DRIFTSIM_ERRORS_HPP
#define DRIFTSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace driftsim {

// Invalid arguments are reported with std::invalid_argument. The types below
// cover the domain-specific failure modes.

/// A_inf requested for a non-transient potential (kappa <= 0).
class DivergentScaleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The simulated range does not resolve the requested quantity; extend the grid.
class InsufficientRangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// An Euler run hit its time cap before reaching the target level.
class HorizonExceededError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A path ended before the requested local time was accumulated.
class PathExhaustedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A function evaluated where it diverges (e.g. the Jacobi scale at 0 or 1).
class BoundaryError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Configuration rejected at load time. Carries the offending line (0 when the
/// value came from the command line).
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace driftsim

#endif  // DRIFTSIM_ERRORS_HPP

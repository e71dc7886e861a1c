#include "driftsim/numeric.hpp"

#include <Eigen/Eigenvalues>

#include <stdexcept>

namespace driftsim {

GaussLegendre::GaussLegendre(int n) {
    if (n < 1) throw std::invalid_argument("GaussLegendre: need at least one node");
    // Jacobi matrix of the Legendre recurrence; nodes are its eigenvalues and the
    // weights are 2 * (first eigenvector component)^2.
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jac(k, k - 1) = b;
        jac(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jac);
    nodes = solver.eigenvalues();
    weights = 2.0 * solver.eigenvectors().row(0).transpose().array().square().matrix();
}

}  // namespace driftsim

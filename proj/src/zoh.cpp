#include "spme/discretization.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <stdexcept>

namespace spme {

DiscreteSystem c2d_zoh(const Eigen::MatrixXd& A, const Eigen::VectorXd& B, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("timestep must be positive");
    if (A.rows() != A.cols() || A.rows() != B.size()) throw std::invalid_argument("inconsistent A/B dimensions");
    if (!A.allFinite() || !B.allFinite()) throw std::invalid_argument("non-finite system matrix");

    const Eigen::Index n = A.rows();
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = A * dt;
    aug.topRightCorner(n, 1) = B * dt;
    const Eigen::MatrixXd e = aug.exp();
    if (!e.allFinite()) throw std::runtime_error("matrix exponential overflowed");
    return {e.topLeftCorner(n, n), e.topRightCorner(n, 1)};
}

}  // namespace spme

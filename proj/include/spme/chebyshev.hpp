#pragma once

#include <Eigen/Dense>

namespace spme {

/// Chebyshev-Gauss-Lobatto collocation grid on [a, b].
///
/// Nodes follow the classical ordering x_j = cos(pi j / N), j = 0..N, mapped
/// affinely, so node 0 is the right end b and node N the left end a.
struct ChebyshevGrid {
    int order = 0;  ///< N; the grid has N + 1 nodes
    double lower = -1.0;
    double upper = 1.0;
    Eigen::VectorXd nodes;
    Eigen::MatrixXd first;    ///< d/dx on nodal values
    Eigen::MatrixXd second;   ///< d^2/dx^2 on nodal values
    Eigen::VectorXd weights;  ///< Clenshaw-Curtis weights, sum = b - a

    int size() const { return order + 1; }
};

/// Throws std::invalid_argument for N < 1 or a degenerate interval.
ChebyshevGrid chebyshev_grid(int order, double lower, double upper);

/// Rows evaluate the grid's interpolating polynomial at `points`
/// (barycentric form).
Eigen::MatrixXd interpolation_matrix(const ChebyshevGrid& grid, const Eigen::VectorXd& points);

}  // namespace spme

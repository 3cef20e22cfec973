#include "spme/discretization.hpp"

#include <Eigen/SVD>
#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace spme {

ChebyshevGrid particle_grid(int nodes, double radius) {
    if (nodes < 3) throw std::invalid_argument("particle grid needs at least 3 nodes");
    if (!(radius > 0.0)) throw std::invalid_argument("particle radius must be positive");
    return chebyshev_grid(2 * (nodes - 1), -radius, radius);
}

ParticleSystem build_particle_system(double diffusivity, double radius, double surface_area, double thickness,
                                     int sign, int nodes, double faraday) {
    return build_particle_system(particle_grid(nodes, radius), diffusivity, surface_area, thickness, sign,
                                 faraday);
}

ParticleSystem build_particle_system(const ChebyshevGrid& grid, double diffusivity, double surface_area,
                                     double thickness, int sign, double faraday) {
    if (grid.order < 4 || grid.order % 2 != 0 || grid.lower != -grid.upper) {
        throw std::invalid_argument("particle grid must be symmetric with an even order >= 4");
    }
    if (!(diffusivity > 0.0 && surface_area > 0.0 && thickness > 0.0 && faraday > 0.0)) {
        throw std::invalid_argument("particle inputs must be positive");
    }
    if (sign != 1 && sign != -1) throw std::invalid_argument("particle sign must be +1 or -1");

    // Even extension to [-R, R]: fold the mirrored columns onto r >= 0.
    // Local node 0 is r = R, node n is the centre.
    const int n = grid.order / 2;
    auto fold = [&](const Eigen::MatrixXd& full) {
        Eigen::MatrixXd half = full.topLeftCorner(n + 1, n + 1);
        for (int k = 0; k < n; ++k) half.col(k) += full.block(0, 2 * n - k, n + 1, 1);
        return half;
    };
    const Eigen::MatrixXd d1 = fold(grid.first);
    const Eigen::MatrixXd d2 = fold(grid.second);

    // Spherical Laplacian; L'Hopital limit 3 c'' at the centre.
    Eigen::MatrixXd lap(n + 1, n + 1);
    for (int i = 0; i <= n; ++i) {
        if (i == n) {
            lap.row(i) = 3.0 * d2.row(i);
        } else {
            lap.row(i) = d2.row(i) + (2.0 / grid.nodes(i)) * d1.row(i);
        }
    }
    lap *= diffusivity;

    // -D c'(R) = sign I / (F a L)  =>  c_0 = g x + h I.
    const double flux_per_amp = sign / (faraday * surface_area * thickness);
    Eigen::RowVectorXd g(n);
    for (int k = 1; k <= n; ++k) g(k - 1) = -d1(0, k) / d1(0, 0);
    const double h = -flux_per_amp / (diffusivity * d1(0, 0));

    ParticleSystem ps;
    ps.system.A.resize(n, n);
    ps.system.B.resize(n);
    for (int i = 1; i <= n; ++i) {
        for (int k = 1; k <= n; ++k) ps.system.A(i - 1, k - 1) = lap(i, k) + lap(i, 0) * g(k - 1);
        ps.system.B(i - 1) = lap(i, 0) * h;
    }
    ps.radii = grid.nodes.segment(1, n);
    ps.radii(n - 1) = 0.0;
    for (int i = 0; i < n; ++i) ps.system.labels.push_back(fmt::format("cs[r={:.6g}]", ps.radii(i)));
    ps.surface_row = g;
    ps.surface_feedthrough = h;

    // Smallest right singular vector of A^T spans its null space.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ps.system.A.transpose(), Eigen::ComputeFullV);
    const Eigen::VectorXd null = svd.matrixV().col(n - 1);
    ps.average_row = null.transpose() / null.sum();
    return ps;
}

}  // namespace spme

#include "spme/chebyshev.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spme {

ChebyshevGrid chebyshev_grid(int order, double lower, double upper) {
    if (order < 1) throw std::invalid_argument("Chebyshev grid needs order >= 1");
    if (!(upper > lower)) throw std::invalid_argument("Chebyshev grid needs a non-degenerate interval");

    const int n = order;
    const double pi = std::numbers::pi;
    Eigen::VectorXd x(n + 1);
    for (int j = 0; j <= n; ++j) x(j) = std::cos(pi * j / n);

    // Differentiation matrix on [-1, 1] (Trefethen, Spectral Methods in MATLAB, cheb.m)
    // with the diagonal set by the negative-sum trick so that rows annihilate constants.
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n + 1, n + 1);
    auto c = [n](int j) { return (j == 0 || j == n ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0); };
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            if (i != j) d(i, j) = c(i) / c(j) / (x(i) - x(j));
        }
    }
    for (int i = 0; i <= n; ++i) d(i, i) = -d.row(i).sum();

    // Clenshaw-Curtis weights on [-1, 1] (clencurt.m).
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n + 1);
    const Eigen::VectorXd theta = Eigen::VectorXd::LinSpaced(n + 1, 0.0, pi);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n - 1 > 0 ? n - 1 : 0);
    if (n % 2 == 0) {
        w(0) = w(n) = 1.0 / (n * n - 1.0);
        for (int k = 1; k < n / 2; ++k) {
            for (int i = 1; i < n; ++i) v(i - 1) -= 2.0 * std::cos(2.0 * k * theta(i)) / (4.0 * k * k - 1.0);
        }
        for (int i = 1; i < n; ++i) v(i - 1) -= std::cos(n * theta(i)) / (n * n - 1.0);
    } else {
        w(0) = w(n) = 1.0 / (n * n);
        for (int k = 1; k <= (n - 1) / 2; ++k) {
            for (int i = 1; i < n; ++i) v(i - 1) -= 2.0 * std::cos(2.0 * k * theta(i)) / (4.0 * k * k - 1.0);
        }
    }
    for (int i = 1; i < n; ++i) w(i) = 2.0 * v(i - 1) / n;

    const double half = 0.5 * (upper - lower);
    ChebyshevGrid g;
    g.order = n;
    g.lower = lower;
    g.upper = upper;
    g.nodes = (0.5 * (upper + lower)) + half * x.array();
    // Pin the end points exactly.
    g.nodes(0) = upper;
    g.nodes(n) = lower;
    g.first = d / half;
    g.second = g.first * g.first;
    g.weights = w * half;
    return g;
}

Eigen::MatrixXd interpolation_matrix(const ChebyshevGrid& grid, const Eigen::VectorXd& points) {
    const int n = grid.order;
    Eigen::VectorXd bw(n + 1);
    for (int j = 0; j <= n; ++j) bw(j) = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == n) ? 0.5 : 1.0);

    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(points.size(), n + 1);
    for (Eigen::Index i = 0; i < points.size(); ++i) {
        int hit = -1;
        for (int j = 0; j <= n; ++j) {
            if (points(i) == grid.nodes(j)) hit = j;
        }
        if (hit >= 0) {
            p(i, hit) = 1.0;
            continue;
        }
        const Eigen::VectorXd t = bw.array() / (points(i) - grid.nodes.array());
        p.row(i) = t.transpose() / t.sum();
    }
    return p;
}

}  // namespace spme

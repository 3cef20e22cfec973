#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>

namespace spme {

struct NelderMeadOptions {
    double tolerance = 1e-6;          ///< simplex diameter at convergence
    std::size_t max_evaluations = 20000;
    double initial_step = 0.1;        ///< per-coordinate offset of the starting simplex
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    std::size_t evaluations = 0;
    std::size_t iterations = 0;
    bool converged = false;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;
/// Maps optimiser coordinates to the space in which the diameter is measured.
using Chart = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Derivative-free simplex minimisation (standard reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2). Non-finite objective values are treated as
/// +inf. Converged when the largest distance from the best vertex, measured
/// through `chart` (identity when empty), drops below the tolerance.
NelderMeadResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const NelderMeadOptions& options = {},
                             const Chart& chart = {});

}  // namespace spme

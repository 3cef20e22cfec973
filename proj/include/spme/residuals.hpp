#pragma once

#include "spme/excitation.hpp"
#include "spme/model.hpp"
#include "spme/theta.hpp"

#include <vector>

namespace spme {

/// Simulated voltage against one dataset. Rebuilds the model per call (grids
/// are cached). Not thread safe: one instance per worker.
class VoltageResiduals {
public:
    VoltageResiduals(const Dataset& data, ParameterSet params);

    /// Noise-free simulated voltage; throws on invalid theta or simulation failure.
    const std::vector<double>& simulate(const PhysicalTheta& theta);
    /// Sum of squared residuals against the noisy data; +inf for invalid
    /// theta and simulation-domain failures. The noise variance is ignored.
    double residual_sum_of_squares(const PhysicalTheta& theta);

    const Dataset& data() const { return data_; }

private:
    const Dataset& data_;
    ModelBuilder builder_;
    std::vector<double> buffer_;
};

}  // namespace spme

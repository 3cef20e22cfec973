#include "spme/residuals.hpp"

#include "spme/errors.hpp"

#include <cmath>
#include <limits>

namespace spme {

VoltageResiduals::VoltageResiduals(const Dataset& data, ParameterSet params)
    : data_(data), builder_(std::move(params), data.dt(), data.nodes), buffer_(data.size()) {}

const std::vector<double>& VoltageResiduals::simulate(const PhysicalTheta& theta) {
    const auto model = builder_.build(theta);
    simulate_voltage(model, data_.current, uniform_state(model, data_.soc.negative, data_.soc.positive), buffer_);
    return buffer_;
}

double VoltageResiduals::residual_sum_of_squares(const PhysicalTheta& theta) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    PhysicalTheta t = theta;
    t.noise_variance = 1.0;
    if (!t.valid()) return inf;
    try {
        const auto& v = simulate(t);
        double rss = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) {
            const double r = data_.noisy[k] - v[k];
            rss += r * r;
        }
        return std::isfinite(rss) ? rss : inf;
    } catch (const SimulationError&) {
        return inf;
    } catch (const DomainError&) {
        return inf;
    }
}

}  // namespace spme

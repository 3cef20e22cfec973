#include "spme/theta.hpp"

#include "spme/parameters.hpp"

#include <cmath>

namespace spme {

bool PhysicalTheta::valid() const {
    auto pos = [](double x) { return std::isfinite(x) && x > 0.0; };
    return pos(negative_diffusivity) && pos(positive_diffusivity) && pos(electrolyte_diffusivity) &&
           std::isfinite(transference) && transference > 0.0 && transference < 1.0 && pos(noise_variance);
}

ThetaVector ThetaVector::from_physical(const PhysicalTheta& p) {
    return ThetaVector({p.negative_diffusivity * negative_scale, p.positive_diffusivity * positive_scale,
                        p.electrolyte_diffusivity * electrolyte_scale, p.transference,
                        std::log(p.noise_variance)});
}

PhysicalTheta ThetaVector::to_physical() const {
    return {v_[0] / negative_scale, v_[1] / positive_scale, v_[2] / electrolyte_scale, v_[3], std::exp(v_[4])};
}

std::array<double, ThetaVector::size> reported(const ThetaVector& theta) {
    auto r = theta.values();
    r[ThetaVector::log_noise] = std::exp(r[ThetaVector::log_noise]) / reported_noise_unit;
    return r;
}

PhysicalTheta default_true_theta() {
    const ParameterSet p;
    return {p.negative.diffusivity, p.positive.diffusivity, p.electrolyte_diffusivity, p.transference, 1.6e-9};
}

}  // namespace spme

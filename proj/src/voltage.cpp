#include "spme/voltage.hpp"

#include "spme/errors.hpp"
#include "spme/ocp.hpp"

#include <cmath>

namespace spme {

double exchange_current_density(double reaction_rate, double surface_concentration,
                                double max_concentration, double electrolyte_concentration) {
    if (!(surface_concentration >= 0.0) || !(surface_concentration <= max_concentration)) {
        throw DomainError("surface concentration outside [0, c_max]");
    }
    if (!(electrolyte_concentration >= 0.0)) {
        throw DomainError("negative electrolyte concentration");
    }
    return reaction_rate * std::sqrt(surface_concentration) *
           std::sqrt(max_concentration - surface_concentration) * std::sqrt(electrolyte_concentration);
}

double reaction_overpotential(double current, double surface_area, double thickness, double j0,
                              double thermal_voltage) {
    if (current == 0.0) return 0.0;
    if (!(j0 > 0.0)) throw DomainError("exchange current density vanishes at non-zero current");
    return -2.0 * thermal_voltage * std::asinh(current / (surface_area * j0 * thickness));
}

double concentration_overpotential(double electrolyte_positive, double electrolyte_negative,
                                   double transference, const ParameterSet& params) {
    if (!(electrolyte_positive >= 0.0) || !(electrolyte_negative >= 0.0)) {
        throw DomainError("negative electrolyte concentration");
    }
    return 2.0 * params.thermal_voltage() / params.electrolyte_concentration * (1.0 - transference) *
           (electrolyte_positive - electrolyte_negative);
}

OhmicLosses ohmic_losses(double current, const ParameterSet& params) {
    const double b = params.bruggeman;
    const double path = params.negative.thickness / (3.0 * std::pow(params.negative.porosity, b)) +
                        params.separator.thickness / std::pow(params.separator.porosity, b) +
                        params.positive.thickness / (3.0 * std::pow(params.positive.porosity, b));
    const double electrolyte = -current / params.electrolyte_conductivity * path;
    const double solid = -current / 3.0 *
                         (params.positive.thickness / params.positive.conductivity +
                          params.negative.thickness / params.negative.conductivity);
    return {electrolyte, solid};
}

VoltageBreakdown terminal_voltage(const ElectrodeReadout& r, double current, double transference,
                                  const ParameterSet& params) {
    const auto& n = params.negative;
    const auto& p = params.positive;
    const double vt = params.thermal_voltage();

    VoltageBreakdown v{};
    v.open_circuit = ocp(Electrode::positive, r.surface_positive / p.max_concentration) -
                     ocp(Electrode::negative, r.surface_negative / n.max_concentration);

    const double j0n = exchange_current_density(n.reaction_rate, r.surface_negative, n.max_concentration,
                                                r.electrolyte_negative);
    const double j0p = exchange_current_density(p.reaction_rate, r.surface_positive, p.max_concentration,
                                                r.electrolyte_positive);
    const double eta_n = reaction_overpotential(-current, n.surface_area, n.thickness, j0n, vt);
    const double eta_p = reaction_overpotential(current, p.surface_area, p.thickness, j0p, vt);
    v.reaction = eta_p - eta_n;

    v.concentration =
        concentration_overpotential(r.electrolyte_positive, r.electrolyte_negative, transference, params);
    const auto ohm = ohmic_losses(current, params);
    v.electrolyte_ohmic = ohm.electrolyte;
    v.solid_ohmic = ohm.solid;
    v.total = v.open_circuit + v.reaction + v.concentration + v.electrolyte_ohmic + v.solid_ohmic;
    return v;
}

VoltageKernel::VoltageKernel(const ParameterSet& params, double transference)
    : cmax_n_(params.negative.max_concentration),
      cmax_p_(params.positive.max_concentration),
      rate_n_(params.negative.reaction_rate),
      rate_p_(params.positive.reaction_rate),
      aL_n_(params.negative.surface_area * params.negative.thickness),
      aL_p_(params.positive.surface_area * params.positive.thickness),
      two_vt_(2.0 * params.thermal_voltage()),
      conc_coeff_(2.0 * params.thermal_voltage() / params.electrolyte_concentration * (1.0 - transference)),
      ohmic_per_amp_(ohmic_losses(1.0, params).electrolyte + ohmic_losses(1.0, params).solid) {}

double VoltageKernel::operator()(const ElectrodeReadout& r, double current) const noexcept {
    const double ueq = positive_ocp(r.surface_positive / cmax_p_) - negative_ocp(r.surface_negative / cmax_n_);
    double reaction = 0.0;
    if (current != 0.0) {
        const double j0n = rate_n_ * std::sqrt(r.surface_negative) * std::sqrt(cmax_n_ - r.surface_negative) *
                           std::sqrt(r.electrolyte_negative);
        const double j0p = rate_p_ * std::sqrt(r.surface_positive) * std::sqrt(cmax_p_ - r.surface_positive) *
                           std::sqrt(r.electrolyte_positive);
        reaction = -two_vt_ * (std::asinh(current / (aL_p_ * j0p)) + std::asinh(current / (aL_n_ * j0n)));
    }
    const double conc = conc_coeff_ * (r.electrolyte_positive - r.electrolyte_negative);
    return ueq + reaction + conc + ohmic_per_amp_ * current;
}

}  // namespace spme

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace spme {

enum class Electrode { negative, positive };

/// Per-electrode constants, SI units throughout.
struct ElectrodeParams {
    double porosity;           ///< electrolyte volume fraction [-]
    double max_concentration;  ///< c_max [mol/m^3]
    double conductivity;       ///< solid conductivity [S/m]
    double diffusivity;        ///< solid diffusivity [m^2/s]
    double particle_radius;    ///< [m]
    double surface_area;       ///< surface area density [1/m]
    double reaction_rate;      ///< [(A/m^2)(m^3/mol)^1.5]
    double thickness;          ///< [m]
    double reference_ocp;      ///< [V]

    bool operator==(const ElectrodeParams&) const = default;
};

struct SeparatorParams {
    double porosity;   ///< [-]
    double thickness;  ///< [m]

    bool operator==(const SeparatorParams&) const = default;
};

/// Fixed physical and geometric constants of the cell.
///
/// Default construction gives the LiCoO2/graphite parameterisation used
/// throughout the project. Values that are estimated (the three diffusivities
/// and the transference number) also live here as nominal values; the
/// inference layer overrides them through PhysicalTheta.
struct ParameterSet {
    ElectrodeParams negative{0.3, 2.4983e4, 100.0, 3.9e-14, 10e-6, 0.18e6, 2e-5, 100e-6, 0.18};
    SeparatorParams separator{1.0, 25e-6};
    ElectrodeParams positive{0.3, 5.1218e4, 10.0, 1e-13, 10e-6, 0.15e6, 6e-7, 100e-6, 3.94};

    double electrolyte_concentration = 1e3;        ///< c_e,typ [mol/m^3]
    double electrolyte_diffusivity = 5.34e-10;     ///< D_e,typ [m^2/s]
    double electrolyte_conductivity = 1.1;         ///< kappa_e,typ [S/m]
    double faraday = 96485.0;                      ///< [C/mol]
    double gas_constant = 8.314472;                ///< [J/(mol K)]
    double temperature = 298.15;                   ///< [K]
    double bruggeman = 1.5;                        ///< [-]
    double transference = 0.4;                     ///< t+ [-]
    double typical_current = 24.0;                 ///< 1C current density [A/m^2]

    const ElectrodeParams& electrode(Electrode e) const {
        return e == Electrode::negative ? negative : positive;
    }

    /// RT/F [V].
    double thermal_voltage() const { return gas_constant * temperature / faraday; }

    double cell_thickness() const {
        return negative.thickness + separator.thickness + positive.thickness;
    }

    /// Throws DomainError naming the first violated constraint.
    void validate() const;

    bool operator==(const ParameterSet&) const = default;
};

/// key = value text, one parameter per line, region-prefixed keys
/// (n_, s_, p_). Doubles are written in shortest round-trip form.
std::string to_config_text(const ParameterSet& params);

/// Parses text produced by to_config_text. Missing keys keep their default;
/// unknown keys and malformed numbers raise ConfigError.
ParameterSet parse_parameters(std::string_view text);

ParameterSet load_parameters(const std::filesystem::path& path);
void save_parameters(const ParameterSet& params, const std::filesystem::path& path);

}  // namespace spme

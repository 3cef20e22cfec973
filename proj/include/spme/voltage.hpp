#pragma once

#include "spme/parameters.hpp"

namespace spme {

/// Electrode-averaged quantities the voltage relations need.
struct ElectrodeReadout {
    double surface_negative;      ///< c_ss,n [mol/m^3]
    double surface_positive;      ///< c_ss,p [mol/m^3]
    double electrolyte_negative;  ///< electrode-averaged c_e over the negative electrode
    double electrolyte_positive;  ///< electrode-averaged c_e over the positive electrode
};

/// Terminal voltage split into its five contributions [V].
struct VoltageBreakdown {
    double open_circuit;
    double reaction;
    double concentration;
    double electrolyte_ohmic;
    double solid_ohmic;
    double total;
};

struct OhmicLosses {
    double electrolyte;
    double solid;
};

/// j0 = m c_ss^1/2 (c_max - c_ss)^1/2 c_e^1/2  [A/m^2].
double exchange_current_density(double reaction_rate, double surface_concentration,
                                double max_concentration, double electrolyte_concentration);

/// eta = -2 (RT/F) asinh(I / (a j0 L)).
///
/// `current` is the interfacial current density seen by the electrode with
/// the sign convention of the formula; terminal_voltage passes -I for the
/// negative electrode and +I for the positive one.
double reaction_overpotential(double current, double surface_area, double thickness, double j0,
                              double thermal_voltage);

/// eta_c = 2RT/(F c_e,typ) (1 - t+) (c_e,p - c_e,n).
double concentration_overpotential(double electrolyte_positive, double electrolyte_negative,
                                   double transference, const ParameterSet& params);

OhmicLosses ohmic_losses(double current, const ParameterSet& params);

/// Electrode-averaged terminal voltage. Positive current is discharge.
/// The open-circuit term is U_p(c_ss,p / c_max,p) - U_n(c_ss,n / c_max,n).
VoltageBreakdown terminal_voltage(const ElectrodeReadout& readout, double current, double transference,
                                  const ParameterSet& params);

/// Precomputed form of terminal_voltage().total for inner simulation loops.
/// No domain checks: callers guarantee 0 < c_ss < c_max and c_e > 0.
class VoltageKernel {
public:
    VoltageKernel(const ParameterSet& params, double transference);

    double operator()(const ElectrodeReadout& r, double current) const noexcept;

private:
    double cmax_n_, cmax_p_;
    double rate_n_, rate_p_;
    double aL_n_, aL_p_;
    double two_vt_;
    double conc_coeff_;
    double ohmic_per_amp_;
};

}  // namespace spme

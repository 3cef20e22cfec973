#pragma once

#include "spme/parameters.hpp"

namespace spme {

/// Half-cell open-circuit potential [V] as a function of stoichiometry
/// (surface concentration over c_max).
///
/// Negative electrode: MCMB 2528 graphite fit from the Dualfoil 1998
/// parameter set (Doyle, Fuller & Newman):
///
///   U_n(x) = 0.194 + 1.5 exp(-120 x)
///          + 0.0351 tanh((x - 0.286)/0.083)  - 0.0045 tanh((x - 0.849)/0.119)
///          - 0.035  tanh((x - 0.9233)/0.05)  - 0.0147 tanh((x - 0.5)/0.034)
///          - 0.102  tanh((x - 0.194)/0.142)  - 0.022  tanh((x - 0.9)/0.0164)
///          - 0.011  tanh((x - 0.124)/0.0226) + 0.0155 tanh((x - 0.105)/0.029)
///
/// Positive electrode: LiCoO2 fit from the same source, evaluated at the
/// stretched stoichiometry y = 1.062 x:
///
///   U_p(x) = 2.16216 + 0.07645 tanh(30.834 - 54.4806 y)
///          + 2.1581 tanh(52.294 - 50.294 y) - 0.14169 tanh(11.0923 - 19.8543 y)
///          + 0.2051 tanh(1.4684 - 5.4888 y) + 0.2531 tanh((0.56478 - y)/0.1316)
///          - 0.02167 tanh((y - 0.525)/0.006)
///
/// Both are smooth and finite on [0, 1]. Throws DomainError outside [0, 1].
double ocp(Electrode electrode, double stoichiometry);

/// Unchecked variants for inner loops; callers guarantee the domain.
double negative_ocp(double stoichiometry) noexcept;
double positive_ocp(double stoichiometry) noexcept;

/// Stoichiometries at which the fits reproduce the tabulated reference
/// potentials (U_n = 0.179 V, U_p = 3.939 V; nominal 0.18 V and 3.94 V).
inline constexpr double negative_reference_stoichiometry = 0.6;
inline constexpr double positive_reference_stoichiometry = 0.7;

}  // namespace spme

#pragma once

#include "spme/chebyshev.hpp"
#include "spme/parameters.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace spme {

/// dx/dt = A x + B I, with I the applied current density [A/m^2].
struct ContinuousSystem {
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    std::vector<std::string> labels;
};

/// Collocated electrode-averaged particle.
///
/// The concentration is treated as an even function on [-R, R], so the
/// collocation nodes on [0, R] are the non-negative half of a Chebyshev grid
/// of twice the order. States are the nodal concentrations at the interior
/// and centre nodes; the
/// surface node is eliminated through the flux condition, so the surface
/// concentration is surface_row * x + surface_feedthrough * I.
struct ParticleSystem {
    ContinuousSystem system;
    Eigen::VectorXd radii;
    Eigen::RowVectorXd surface_row;
    double surface_feedthrough = 0.0;
    /// Left null vector of A normalised to unit sum: the scheme's
    /// volume-averaged concentration. d/dt (row * x) = -3 sign I / (F a L R).
    Eigen::RowVectorXd average_row;
};

/// Three-region electrolyte in weak form on Chebyshev subgrids. All nodes are
/// states; the two interface nodes are shared between neighbouring subgrids,
/// which gives value continuity, while flux continuity and the zero-flux walls
/// are natural conditions. Mass is lumped with Clenshaw-Curtis weights and the
/// stiffness integrals are exact.
struct ElectrolyteSystem {
    ContinuousSystem system;
    Eigen::VectorXd positions;
    Eigen::RowVectorXd average_negative;  ///< (1/L_n) int_n c dx
    Eigen::RowVectorXd average_positive;  ///< (1/L_p) int_p c dx
    Eigen::RowVectorXd mass_row;          ///< int_0^L eps c dx (Clenshaw-Curtis)
};

/// Symmetric grid on [-R, R] of order 2 (nodes - 1).
ChebyshevGrid particle_grid(int nodes, double radius);

/// sign = +1 for the negative electrode, -1 for the positive electrode.
/// `nodes` counts collocation points on [0, R] including centre and surface (>= 3).
ParticleSystem build_particle_system(double diffusivity, double radius, double surface_area, double thickness,
                                     int sign, int nodes, double faraday);
ParticleSystem build_particle_system(const ChebyshevGrid& grid, double diffusivity, double surface_area,
                                     double thickness, int sign, double faraday);

/// Region node counts include both ends of each subgrid (>= 2 each).
ElectrolyteSystem build_electrolyte_system(const ParameterSet& params, double electrolyte_diffusivity,
                                           double transference, int nodes_negative, int nodes_separator,
                                           int nodes_positive);
ElectrolyteSystem build_electrolyte_system(const ParameterSet& params, double electrolyte_diffusivity,
                                           double transference, const ChebyshevGrid& negative,
                                           const ChebyshevGrid& separator, const ChebyshevGrid& positive);

struct DiscreteSystem {
    Eigen::MatrixXd Ad;
    Eigen::VectorXd Bd;
};

/// Exact zero-order-hold discretisation, Ad = exp(A dt) and
/// Bd = int_0^dt exp(A s) ds B, from the exponential of the augmented matrix
/// [[A, B], [0, 0]] dt. Valid for singular A.
DiscreteSystem c2d_zoh(const Eigen::MatrixXd& A, const Eigen::VectorXd& B, double dt);

}  // namespace spme

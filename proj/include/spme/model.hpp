#pragma once

#include "spme/discretization.hpp"
#include "spme/parameters.hpp"
#include "spme/theta.hpp"
#include "spme/voltage.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace spme {

/// Collocation node counts (ends included).
struct NodeCounts {
    int negative_particle = 3;
    int positive_particle = 3;
    int electrolyte_negative = 4;
    int electrolyte_separator = 2;
    int electrolyte_positive = 4;

    int electrolyte_states() const {
        return electrolyte_negative + electrolyte_separator + electrolyte_positive - 2;
    }
    NodeCounts doubled() const;
    bool operator==(const NodeCounts&) const = default;
};

struct ParticleReadout {
    Eigen::RowVectorXd surface_row;
    double feedthrough = 0.0;
    Eigen::RowVectorXd average_row;
};

/// Immutable discrete-time SPMe for one theta and timestep.
struct DiscreteModel {
    DiscreteSystem negative;
    DiscreteSystem positive;
    DiscreteSystem electrolyte;
    ParticleReadout negative_readout;
    ParticleReadout positive_readout;
    Eigen::RowVectorXd electrolyte_average_negative;
    Eigen::RowVectorXd electrolyte_average_positive;
    Eigen::RowVectorXd electrolyte_mass;
    std::vector<std::string> labels;  ///< negative, positive, electrolyte states in order
    double dt = 0.0;
    PhysicalTheta theta{};
    ParameterSet params;
    NodeCounts nodes;
};

/// Nodal concentrations [mol/m^3].
struct ModelState {
    Eigen::VectorXd negative;
    Eigen::VectorXd positive;
    Eigen::VectorXd electrolyte;
};

/// Rest state: uniform particles at the given stoichiometries, electrolyte at c_e,typ.
ModelState uniform_state(const DiscreteModel& model, double negative_stoichiometry,
                         double positive_stoichiometry);

/// Surface and electrode-averaged concentrations for a state under current I.
ElectrodeReadout readout(const DiscreteModel& model, const ModelState& state, double current);

/// Builds DiscreteModels for a fixed parameter set, timestep and resolution.
/// Chebyshev grids are theta independent and built once.
class ModelBuilder {
public:
    ModelBuilder(ParameterSet params, double dt, NodeCounts nodes = {});

    /// Throws std::invalid_argument for invalid theta.
    DiscreteModel build(const PhysicalTheta& theta) const;

    /// Continuous-time subsystems for the same theta (test and oracle use).
    ParticleSystem negative_particle(const PhysicalTheta& theta) const;
    ParticleSystem positive_particle(const PhysicalTheta& theta) const;
    ElectrolyteSystem electrolyte(const PhysicalTheta& theta) const;

    const ParameterSet& params() const { return params_; }
    double dt() const { return dt_; }
    const NodeCounts& nodes() const { return nodes_; }

private:
    ParameterSet params_;
    double dt_;
    NodeCounts nodes_;
    ChebyshevGrid grid_n_, grid_p_, grid_en_, grid_es_, grid_ep_;
};

DiscreteModel assemble_model(const PhysicalTheta& theta, const ParameterSet& params, double dt,
                             const NodeCounts& nodes = {});

struct SimulationResult {
    std::vector<double> voltage;      ///< one per current sample
    std::vector<ModelState> states;   ///< x_0 .. x_n when requested, else empty
};

/// x_{k+1} = Ad x_k + Bd I_k per subsystem; V_k from x_k and I_k.
/// Throws SimulationError naming the first step whose surface stoichiometry
/// leaves [0, 1] or whose electrolyte average is not positive.
SimulationResult simulate(const DiscreteModel& model, std::span<const double> current, const ModelState& x0,
                          bool record_states = false);

/// Allocation-free voltage-only path; `voltage` must match `current` in size.
void simulate_voltage(const DiscreteModel& model, std::span<const double> current, const ModelState& x0,
                      std::span<double> voltage);

/// Debug dump: t, one column per state label, V.
void write_trajectory_csv(const std::filesystem::path& path, const DiscreteModel& model,
                          const SimulationResult& result);

}  // namespace spme

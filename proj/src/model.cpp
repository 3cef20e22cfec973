#include "spme/model.hpp"

#include "spme/errors.hpp"
#include "spme/io.hpp"

#include <fmt/format.h>

#include <stdexcept>

namespace spme {

NodeCounts NodeCounts::doubled() const {
    return {2 * negative_particle, 2 * positive_particle, 2 * electrolyte_negative, 2 * electrolyte_separator,
            2 * electrolyte_positive};
}

ModelBuilder::ModelBuilder(ParameterSet params, double dt, NodeCounts nodes)
    : params_(std::move(params)), dt_(dt), nodes_(nodes) {
    params_.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("timestep must be positive");
    if (nodes_.negative_particle < 3 || nodes_.positive_particle < 3) {
        throw std::invalid_argument("particle grids need at least 3 nodes");
    }
    if (nodes_.electrolyte_negative < 2 || nodes_.electrolyte_separator < 2 || nodes_.electrolyte_positive < 2) {
        throw std::invalid_argument("electrolyte regions need at least 2 nodes each");
    }
    const double ln = params_.negative.thickness;
    const double ls = params_.separator.thickness;
    const double lp = params_.positive.thickness;
    grid_n_ = particle_grid(nodes_.negative_particle, params_.negative.particle_radius);
    grid_p_ = particle_grid(nodes_.positive_particle, params_.positive.particle_radius);
    grid_en_ = chebyshev_grid(nodes_.electrolyte_negative - 1, 0.0, ln);
    grid_es_ = chebyshev_grid(nodes_.electrolyte_separator - 1, ln, ln + ls);
    grid_ep_ = chebyshev_grid(nodes_.electrolyte_positive - 1, ln + ls, ln + ls + lp);
}

namespace {

void check_theta(const PhysicalTheta& theta) {
    auto pos = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!pos(theta.negative_diffusivity) || !pos(theta.positive_diffusivity) ||
        !pos(theta.electrolyte_diffusivity)) {
        throw std::invalid_argument("diffusivities must be positive");
    }
    if (!(theta.transference > 0.0 && theta.transference < 1.0)) {
        throw std::invalid_argument("transference number must lie in (0, 1)");
    }
}

}  // namespace

ParticleSystem ModelBuilder::negative_particle(const PhysicalTheta& theta) const {
    check_theta(theta);
    const auto& e = params_.negative;
    return build_particle_system(grid_n_, theta.negative_diffusivity, e.surface_area, e.thickness, +1,
                                 params_.faraday);
}

ParticleSystem ModelBuilder::positive_particle(const PhysicalTheta& theta) const {
    check_theta(theta);
    const auto& e = params_.positive;
    return build_particle_system(grid_p_, theta.positive_diffusivity, e.surface_area, e.thickness, -1,
                                 params_.faraday);
}

ElectrolyteSystem ModelBuilder::electrolyte(const PhysicalTheta& theta) const {
    check_theta(theta);
    return build_electrolyte_system(params_, theta.electrolyte_diffusivity, theta.transference, grid_en_,
                                    grid_es_, grid_ep_);
}

DiscreteModel ModelBuilder::build(const PhysicalTheta& theta) const {
    const auto pn = negative_particle(theta);
    const auto pp = positive_particle(theta);
    const auto el = electrolyte(theta);

    DiscreteModel m;
    m.negative = c2d_zoh(pn.system.A, pn.system.B, dt_);
    m.positive = c2d_zoh(pp.system.A, pp.system.B, dt_);
    m.electrolyte = c2d_zoh(el.system.A, el.system.B, dt_);
    m.negative_readout = {pn.surface_row, pn.surface_feedthrough, pn.average_row};
    m.positive_readout = {pp.surface_row, pp.surface_feedthrough, pp.average_row};
    m.electrolyte_average_negative = el.average_negative;
    m.electrolyte_average_positive = el.average_positive;
    m.electrolyte_mass = el.mass_row;
    for (const auto& l : pn.system.labels) m.labels.push_back("n." + l);
    for (const auto& l : pp.system.labels) m.labels.push_back("p." + l);
    for (const auto& l : el.system.labels) m.labels.push_back(l);
    m.dt = dt_;
    m.theta = theta;
    m.params = params_;
    m.nodes = nodes_;
    return m;
}

DiscreteModel assemble_model(const PhysicalTheta& theta, const ParameterSet& params, double dt,
                             const NodeCounts& nodes) {
    return ModelBuilder(params, dt, nodes).build(theta);
}

ModelState uniform_state(const DiscreteModel& model, double negative_stoichiometry,
                         double positive_stoichiometry) {
    if (!(negative_stoichiometry >= 0.0 && negative_stoichiometry <= 1.0 && positive_stoichiometry >= 0.0 &&
          positive_stoichiometry <= 1.0)) {
        throw DomainError("initial stoichiometry outside [0, 1]");
    }
    const auto& p = model.params;
    ModelState s;
    s.negative = Eigen::VectorXd::Constant(model.negative.Bd.size(),
                                           negative_stoichiometry * p.negative.max_concentration);
    s.positive = Eigen::VectorXd::Constant(model.positive.Bd.size(),
                                           positive_stoichiometry * p.positive.max_concentration);
    s.electrolyte = Eigen::VectorXd::Constant(model.electrolyte.Bd.size(), p.electrolyte_concentration);
    return s;
}

ElectrodeReadout readout(const DiscreteModel& model, const ModelState& state, double current) {
    return {model.negative_readout.surface_row.dot(state.negative) + model.negative_readout.feedthrough * current,
            model.positive_readout.surface_row.dot(state.positive) + model.positive_readout.feedthrough * current,
            model.electrolyte_average_negative.dot(state.electrolyte),
            model.electrolyte_average_positive.dot(state.electrolyte)};
}

namespace {

void check_readout(const ElectrodeReadout& r, const ParameterSet& p, double current, std::size_t step) {
    auto inside = [current](double c, double cmax) {
        if (current == 0.0) return c >= 0.0 && c <= cmax;
        return c > 0.0 && c < cmax;
    };
    if (!inside(r.surface_negative, p.negative.max_concentration)) {
        throw SimulationError(step, fmt::format("negative surface stoichiometry {:.6g} outside [0, 1]",
                                                r.surface_negative / p.negative.max_concentration));
    }
    if (!inside(r.surface_positive, p.positive.max_concentration)) {
        throw SimulationError(step, fmt::format("positive surface stoichiometry {:.6g} outside [0, 1]",
                                                r.surface_positive / p.positive.max_concentration));
    }
    if (!(r.electrolyte_negative > 0.0) || !(r.electrolyte_positive > 0.0)) {
        throw SimulationError(step, "electrolyte concentration is not positive");
    }
}

void check_inputs(const DiscreteModel& model, const ModelState& x0) {
    if (x0.negative.size() != model.negative.Bd.size() || x0.positive.size() != model.positive.Bd.size() ||
        x0.electrolyte.size() != model.electrolyte.Bd.size()) {
        throw std::invalid_argument("initial state does not match model dimensions");
    }
}

// y = A x + b u for small dense column-major A.
inline void affine_step(const DiscreteSystem& sys, const Eigen::VectorXd& x, double u, Eigen::VectorXd& y) {
    const Eigen::Index n = x.size();
    const double* a = sys.Ad.data();
    const double* b = sys.Bd.data();
    double* out = y.data();
    for (Eigen::Index i = 0; i < n; ++i) out[i] = b[i] * u;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double xj = x[j];
        const double* col = a + j * n;
        for (Eigen::Index i = 0; i < n; ++i) out[i] += col[i] * xj;
    }
}

template <typename OnStep>
void run(const DiscreteModel& model, std::span<const double> current, const ModelState& x0, OnStep&& on_step) {
    check_inputs(model, x0);
    const VoltageKernel kernel(model.params, model.theta.transference);
    ModelState x = x0;
    ModelState tmp = x0;
    for (std::size_t k = 0; k < current.size(); ++k) {
        const double i = current[k];
        const ElectrodeReadout r = readout(model, x, i);
        check_readout(r, model.params, i, k);
        on_step(k, x, kernel(r, i));
        affine_step(model.negative, x.negative, i, tmp.negative);
        affine_step(model.positive, x.positive, i, tmp.positive);
        affine_step(model.electrolyte, x.electrolyte, i, tmp.electrolyte);
        std::swap(x, tmp);
    }
    on_step(current.size(), x, 0.0);
}

}  // namespace

SimulationResult simulate(const DiscreteModel& model, std::span<const double> current, const ModelState& x0,
                          bool record_states) {
    SimulationResult out;
    out.voltage.resize(current.size());
    if (record_states) out.states.reserve(current.size() + 1);
    run(model, current, x0, [&](std::size_t k, const ModelState& x, double v) {
        if (k < current.size()) out.voltage[k] = v;
        if (record_states) out.states.push_back(x);
    });
    return out;
}

void simulate_voltage(const DiscreteModel& model, std::span<const double> current, const ModelState& x0,
                      std::span<double> voltage) {
    if (voltage.size() != current.size()) throw std::invalid_argument("voltage buffer size mismatch");
    run(model, current, x0, [&](std::size_t k, const ModelState&, double v) {
        if (k < voltage.size()) voltage[k] = v;
    });
}

void write_trajectory_csv(const std::filesystem::path& path, const DiscreteModel& model,
                          const SimulationResult& result) {
    if (result.states.size() < result.voltage.size()) {
        throw std::invalid_argument("trajectory dump needs recorded states");
    }
    std::string out = "t";
    for (const auto& l : model.labels) out += "," + l;
    out += ",V\n";
    for (std::size_t k = 0; k < result.voltage.size(); ++k) {
        const auto& s = result.states[k];
        out += io::format_double(static_cast<double>(k) * model.dt);
        for (auto v : s.negative) out += "," + io::format_double(v);
        for (auto v : s.positive) out += "," + io::format_double(v);
        for (auto v : s.electrolyte) out += "," + io::format_double(v);
        out += "," + io::format_double(result.voltage[k]) + "\n";
    }
    io::write_text_atomic(path, out);
}

}  // namespace spme

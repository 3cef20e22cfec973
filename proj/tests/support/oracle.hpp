#pragma once

// Adaptive continuous-time reference for the assembled subsystems. Shares only
// the continuous A, B and the output rows with the code under test; the time
// stepping is an embedded Runge-Kutta pair with tight tolerances.

#include "spme/model.hpp"
#include "spme/voltage.hpp"

#include <boost/numeric/odeint.hpp>

#include <span>
#include <vector>

namespace spme::testing {

inline std::vector<double> oracle_voltage(const ModelBuilder& builder, const DiscreteModel& model,
                                          std::span<const double> current, const ModelState& x0,
                                          double abs_tol = 1e-9, double rel_tol = 1e-11) {
    namespace ode = boost::numeric::odeint;
    using State = std::vector<double>;

    const auto pn = builder.negative_particle(model.theta);
    const auto pp = builder.positive_particle(model.theta);
    const auto el = builder.electrolyte(model.theta);
    const Eigen::Index nn = pn.system.A.rows(), np = pp.system.A.rows(), ne = el.system.A.rows();

    State x(nn + np + ne);
    Eigen::Map<Eigen::VectorXd>(x.data(), nn) = x0.negative;
    Eigen::Map<Eigen::VectorXd>(x.data() + nn, np) = x0.positive;
    Eigen::Map<Eigen::VectorXd>(x.data() + nn + np, ne) = x0.electrolyte;

    auto unpack = [&](const State& s) {
        ModelState m;
        m.negative = Eigen::Map<const Eigen::VectorXd>(s.data(), nn);
        m.positive = Eigen::Map<const Eigen::VectorXd>(s.data() + nn, np);
        m.electrolyte = Eigen::Map<const Eigen::VectorXd>(s.data() + nn + np, ne);
        return m;
    };

    auto stepper = ode::make_controlled(abs_tol, rel_tol, ode::runge_kutta_dopri5<State>());
    std::vector<double> v(current.size());
    for (std::size_t k = 0; k < current.size(); ++k) {
        const double i = current[k];
        v[k] = terminal_voltage(readout(model, unpack(x), i), i, model.theta.transference, model.params).total;
        auto rhs = [&](const State& s, State& ds, double) {
            Eigen::Map<const Eigen::VectorXd> a(s.data(), nn), b(s.data() + nn, np), c(s.data() + nn + np, ne);
            Eigen::Map<Eigen::VectorXd>(ds.data(), nn) = pn.system.A * a + pn.system.B * i;
            Eigen::Map<Eigen::VectorXd>(ds.data() + nn, np) = pp.system.A * b + pp.system.B * i;
            Eigen::Map<Eigen::VectorXd>(ds.data() + nn + np, ne) = el.system.A * c + el.system.B * i;
        };
        ode::integrate_adaptive(stepper, rhs, x, 0.0, model.dt, model.dt / 4.0);
    }
    return v;
}

}  // namespace spme::testing

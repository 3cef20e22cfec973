#include "spme/discretization.hpp"

#include <fmt/format.h>

#include <array>
#include <cmath>
#include <stdexcept>

namespace spme {

ElectrolyteSystem build_electrolyte_system(const ParameterSet& params, double electrolyte_diffusivity,
                                           double transference, int nodes_negative, int nodes_separator,
                                           int nodes_positive) {
    if (nodes_negative < 2 || nodes_separator < 2 || nodes_positive < 2) {
        throw std::invalid_argument("electrolyte regions need at least 2 nodes each");
    }
    const double ln = params.negative.thickness;
    const double ls = params.separator.thickness;
    const double lp = params.positive.thickness;
    return build_electrolyte_system(params, electrolyte_diffusivity, transference,
                                    chebyshev_grid(nodes_negative - 1, 0.0, ln),
                                    chebyshev_grid(nodes_separator - 1, ln, ln + ls),
                                    chebyshev_grid(nodes_positive - 1, ln + ls, ln + ls + lp));
}

// Weak form: for each nodal basis function phi_i,
//   sum_k eps_k int c_t phi_i = -sum_k kappa_k int c' phi_i' + sum_k s_k int phi_i,
// with kappa_k = eps_k^b D_e. The wall and interface flux terms vanish or
// cancel, so zero flux at the walls and flux continuity hold naturally. The
// stiffness integrals are exact (derivatives are sampled on a grid of twice
// the order); the mass is lumped with Clenshaw-Curtis weights, whose sum
// against eps is then conserved exactly.
ElectrolyteSystem build_electrolyte_system(const ParameterSet& params, double electrolyte_diffusivity,
                                           double transference, const ChebyshevGrid& negative,
                                           const ChebyshevGrid& separator, const ChebyshevGrid& positive) {
    if (!(electrolyte_diffusivity > 0.0)) throw std::invalid_argument("electrolyte diffusivity must be positive");
    if (!(transference > 0.0 && transference < 1.0)) {
        throw std::invalid_argument("transference number must lie in (0, 1)");
    }

    const std::array<const ChebyshevGrid*, 3> grids{&negative, &separator, &positive};
    const std::array<double, 3> eps{params.negative.porosity, params.separator.porosity, params.positive.porosity};
    const std::array<double, 3> thickness{params.negative.thickness, params.separator.thickness,
                                          params.positive.thickness};
    const double source = (1.0 - transference) / params.faraday;
    const std::array<double, 3> sources{source / thickness[0], 0.0, -source / thickness[2]};

    std::array<int, 3> offset{};
    offset[0] = 0;
    offset[1] = negative.size() - 1;
    offset[2] = offset[1] + separator.size() - 1;
    const int m = offset[2] + positive.size();

    // Local node j of region k (descending order) -> global ascending index.
    auto global = [&](int k, int j) { return offset[k] + grids[k]->order - j; };

    Eigen::MatrixXd stiffness = Eigen::MatrixXd::Zero(m, m);
    ElectrolyteSystem es;
    es.system.A = Eigen::MatrixXd::Zero(m, m);
    es.system.B = Eigen::VectorXd::Zero(m);
    es.mass_row = Eigen::RowVectorXd::Zero(m);
    es.average_negative = Eigen::RowVectorXd::Zero(m);
    es.average_positive = Eigen::RowVectorXd::Zero(m);
    es.positions.resize(m);

    for (int k = 0; k < 3; ++k) {
        const ChebyshevGrid& grid = *grids[k];
        const ChebyshevGrid fine = chebyshev_grid(2 * grid.order, grid.lower, grid.upper);
        const Eigen::MatrixXd slope = interpolation_matrix(grid, fine.nodes) * grid.first;
        const double kappa = std::pow(eps[k], params.bruggeman) * electrolyte_diffusivity;
        const Eigen::MatrixXd local = kappa * slope.transpose() * fine.weights.asDiagonal() * slope;
        for (int j = 0; j < grid.size(); ++j) {
            const int i = global(k, j);
            for (int l = 0; l < grid.size(); ++l) stiffness(i, global(k, l)) += local(j, l);
            es.system.B(i) += grid.weights(j) * sources[k];
            es.mass_row(i) += eps[k] * grid.weights(j);
            es.positions(i) = grid.nodes(j);
        }
    }
    es.system.A = -stiffness;
    for (int i = 0; i < m; ++i) {
        es.system.A.row(i) /= es.mass_row(i);
        es.system.B(i) /= es.mass_row(i);
    }
    for (int j = 0; j < negative.size(); ++j) {
        es.average_negative(global(0, j)) += negative.weights(j) / thickness[0];
    }
    for (int j = 0; j < positive.size(); ++j) {
        es.average_positive(global(2, j)) += positive.weights(j) / thickness[2];
    }
    for (int i = 0; i < m; ++i) es.system.labels.push_back(fmt::format("ce[x={:.6g}]", es.positions(i)));
    return es;
}

}  // namespace spme

#pragma once

#include "spme/errors.hpp"
#include "spme/excitation.hpp"
#include "spme/optimize.hpp"
#include "spme/residuals.hpp"
#include "spme/theta.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

namespace spme {

struct MleOptions {
    NelderMeadOptions simplex{};  ///< tolerance is the simplex diameter in scaled coordinates
    int restarts = 1;             ///< fresh simplices started from each converged point
};

struct MleResult {
    ThetaVector theta;  ///< ln sigma^2 set to ln(rss / n)
    double rss = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Evaluation cap reached before the simplex diameter fell below tolerance.
class MleNotConverged : public ConvergenceError {
public:
    MleNotConverged(const std::string& what, MleResult best) : ConvergenceError(what), best_(std::move(best)) {}
    const MleResult& best() const noexcept { return best_; }

private:
    MleResult best_;
};

/// Maximum-likelihood estimate. sigma^2 is profiled out, so the simplex
/// minimises the residual sum of squares over (ln D_n, ln D_p, ln D_e,
/// logit t+). The ln sigma^2 entry of `init` is ignored.
/// Throws std::invalid_argument for an invalid init and MleNotConverged.
MleResult mle(VoltageResiduals& residuals, const ThetaVector& init, const MleOptions& options = {});

/// Uniform draw within +-fraction of each scaled coordinate of `truth`
/// (t+ clamped inside (0, 1)); ln sigma^2 copied.
ThetaVector random_mle_start(const ThetaVector& truth, std::mt19937_64& rng, double fraction = 0.1);

using VectorFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Central differences with per-coordinate step h_i = step * |theta_i|
/// (step itself where theta_i = 0).
/// Throws std::invalid_argument unless step > 0, DomainError on non-finite output.
Eigen::MatrixXd jacobian_fd(const VectorFunction& f, const Eigen::VectorXd& theta, double step = 1e-4);

/// J^T J / sigma^2, with the diagonal block n / (2 sigma^4) appended for
/// sigma^2 when include_noise is set.
Eigen::MatrixXd fisher_information(const Eigen::MatrixXd& jacobian, double noise_variance, std::size_t n,
                                   bool include_noise = true);

struct Crlb {
    Eigen::MatrixXd covariance;
    Eigen::VectorXd sigma;
};

/// Inverse via SVD. Throws NonIdentifiableError when the condition number
/// exceeds max_condition, naming the weakest direction (labels optional).
Crlb crlb(const Eigen::MatrixXd& fim, double max_condition = 1e12, const std::vector<std::string>& labels = {});

struct FimResult {
    std::string dataset;
    ThetaVector theta;          ///< MLE, scaled
    Eigen::MatrixXd fim;        ///< 5 x 5 in reported coordinates
    Eigen::MatrixXd covariance; ///< empty when not identifiable
    Eigen::VectorXd sigma;      ///< reported coordinates; +inf when not identifiable
    bool identifiable = true;
    std::string diagnosis;      ///< null direction when not identifiable
    double rss = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Fisher information and CRLB at `estimate`, with sigma^2 at its MLE.
/// The parameter and noise blocks are independent.
FimResult fisher_analysis(VoltageResiduals& residuals, const MleResult& estimate, double step = 1e-4);

/// Text file with [mle], [crlb], [optimizer] and [fim] sections.
void write_fim_result(const std::filesystem::path& path, const FimResult& result);
FimResult read_fim_result(const std::filesystem::path& path);

}  // namespace spme

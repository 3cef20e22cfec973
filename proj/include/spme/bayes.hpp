#pragma once

#include "spme/excitation.hpp"
#include "spme/freq.hpp"
#include "spme/model.hpp"
#include "spme/residuals.hpp"
#include "spme/theta.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace spme {

struct GammaPrior {
    double shape = 1.0;  ///< k
    double scale = 1.0;  ///< s
};

/// Gamma(k, s) with mode (k - 1) s = `mode` and CDF(p99_value) = probability.
/// Throws std::invalid_argument unless 0 < mode < p99_value, and
/// ConvergenceError when the root is not bracketed.
GammaPrior fit_gamma_prior(double mode, double p99_value = 100.0, double probability = 0.99);

struct PriorSpec {
    GammaPrior negative_diffusivity;
    GammaPrior positive_diffusivity;
    GammaPrior electrolyte_diffusivity;
    double beta_alpha = 4.0;
    double beta_beta = 5.5;
    // ln sigma^2: improper uniform on the real line.
};

/// Gamma priors with their modes at the scaled truth.
PriorSpec default_priors(const PhysicalTheta& truth, double p99_value = 100.0);

/// Sum of log densities; -inf outside the support.
double log_prior(const ThetaVector& theta, const PriorSpec& priors);

/// -(n/2) ln(2 pi sigma^2) - rss / (2 sigma^2).
double gaussian_log_likelihood(double rss, std::size_t n, double noise_variance);

/// Unnormalised log posterior for one dataset. Not thread safe: one
/// instance per chain.
class LogPosterior {
public:
    LogPosterior(const Dataset& data, ParameterSet params, PriorSpec priors);

    /// -inf for support violations and simulation-domain failures.
    double operator()(const ThetaVector& theta);
    double log_likelihood(const ThetaVector& theta);
    double residual_sum_of_squares(const PhysicalTheta& theta) { return residuals_.residual_sum_of_squares(theta); }
    const std::vector<double>& simulate(const PhysicalTheta& theta) { return residuals_.simulate(theta); }

    const Dataset& data() const { return residuals_.data(); }
    const PriorSpec& priors() const { return priors_; }

private:
    VoltageResiduals residuals_;
    PriorSpec priors_;
};

struct RamhSettings {
    double target_acceptance = 0.234;  ///< alpha*
    double gamma = 2.0 / 3.0;          ///< adaptation step eta_n = min(1, c n^-gamma)
    bool dimension_scaled = true;      ///< c = dimension when set, else 1
    bool adapt = true;
};

using LogDensity = std::function<double(const Eigen::VectorXd&)>;

struct ChainState {
    Eigen::VectorXd theta;
    double log_density = 0.0;
    Eigen::MatrixXd factor;  ///< lower-triangular S, proposal covariance S S^T
    std::uint64_t iteration = 0;
    std::mt19937_64 rng;
};

struct StepResult {
    bool accepted = false;
    double acceptance_probability = 0.0;
    bool adapted = false;
};

/// One step of the robust adaptive Metropolis algorithm:
/// theta_c = theta + S w, accept when U < alpha, then
/// S S^T <- S (I + eta_n (alpha - alpha*) w w^T / |w|^2) S^T,
/// eta_n = min(1, c n^-gamma).
/// A failed Cholesky factorisation keeps the old S.
StepResult ramh_step(ChainState& state, const LogDensity& target, const RamhSettings& settings);

struct RamhRun {
    Eigen::MatrixXd samples;  ///< iterations x dimension, state after each step
    std::vector<std::uint8_t> accepted;
    Eigen::MatrixXd final_factor;
    std::size_t failed_adaptations = 0;
};

RamhRun run_ramh(const LogDensity& target, const Eigen::VectorXd& start, const Eigen::MatrixXd& initial_factor,
                 std::size_t iterations, std::uint64_t seed, const RamhSettings& settings = {});

enum class ChainStart {
    prior,      ///< first prior draw with finite posterior
    optimized,  ///< best least-squares optimum reached from the best prior draws
};

struct ChainConfig {
    std::size_t iterations = 20000;
    std::size_t burn_in = 5000;
    std::uint64_t seed = 1;
    double initial_covariance = 1e-3;  ///< Sigma_0 = c I
    RamhSettings ramh;
    double log_noise_min = -21.0;  ///< initial ln sigma^2 window
    double log_noise_max = -16.0;
    int max_init_attempts = 1000;
    ChainStart start = ChainStart::optimized;
    std::size_t start_candidates = 200;  ///< prior draws ranked by residual
    std::size_t start_refinements = 5;   ///< best draws refined by simplex search
    MleOptions start_search{{1e-4, 3000, 0.3}, 1};
};

struct Chain {
    Eigen::MatrixXd samples;  ///< iterations x 5, scaled coordinates
    std::vector<std::uint8_t> accepted;
    std::size_t burn_in = 0;
    std::uint64_t seed = 0;
    std::string dataset;
    ThetaVector initial;

    std::size_t size() const { return static_cast<std::size_t>(samples.rows()); }
    double acceptance_rate(std::size_t from = 0) const;
};

/// Prior start: theta drawn from the priors (ln sigma^2 uniform on the
/// window) until the log posterior is finite; ConvergenceError after
/// max_init_attempts draws. Optimized start: start_candidates prior draws are
/// ranked by residual, the best start_refinements are refined by simplex
/// search, and the chain starts at the lowest residual found with sigma^2 at
/// its residual variance.
Chain run_chain(const ChainConfig& config, const Dataset& data, const ParameterSet& params,
                const PriorSpec& priors);

/// CSV (d_n, d_p, d_e, t_plus, log_noise, accepted) plus `<path>.meta`.
void write_chain(const std::filesystem::path& csv_path, const Chain& chain);
Chain read_chain(const std::filesystem::path& csv_path);

struct Histogram {
    std::vector<double> edges;  ///< bins + 1
    std::vector<std::size_t> counts;
};

struct Histogram2D {
    std::vector<double> x_edges, y_edges;
    std::vector<std::size_t> counts;  ///< row-major, x outer
    std::size_t at(std::size_t i, std::size_t j) const { return counts[i * (y_edges.size() - 1) + j]; }
};

Histogram histogram(const Eigen::VectorXd& values, std::size_t bins);
Histogram2D histogram2d(const Eigen::VectorXd& x, const Eigen::VectorXd& y, std::size_t bins);

/// Reported coordinates: scaled D's and t+, with sigma^2 in units of 1e-9 V^2.
Eigen::MatrixXd reported_samples(const Eigen::MatrixXd& scaled);

struct PosteriorSummary {
    Eigen::VectorXd mmse;  ///< reported coordinates
    Eigen::VectorXd std;
    double acceptance_rate = 0.0;
    std::size_t samples = 0;
    std::vector<Histogram> marginals;
    Histogram2D diffusivities;   ///< (D_n, D_p)
    Histogram2D electrolyte;     ///< (D_e, t+)
};

/// Throws std::invalid_argument when no samples remain after burn-in.
PosteriorSummary summarize(const Chain& chain, std::size_t burn_in, std::size_t bins = 50);

}  // namespace spme

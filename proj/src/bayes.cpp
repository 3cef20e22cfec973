#include "spme/bayes.hpp"

#include "spme/errors.hpp"
#include "spme/io.hpp"
#include "spme/random.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

namespace spme {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double gamma_log_pdf(double x, const GammaPrior& g) {
    if (!(x > 0.0) || !std::isfinite(x)) return kNegInf;
    return (g.shape - 1.0) * std::log(x) - x / g.scale - boost::math::lgamma(g.shape) - g.shape * std::log(g.scale);
}

double beta_log_pdf(double x, double a, double b) {
    if (!(x > 0.0 && x < 1.0)) return kNegInf;
    return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - std::log(boost::math::beta(a, b));
}

}  // namespace

GammaPrior fit_gamma_prior(double mode, double p99_value, double probability) {
    if (!(mode > 0.0 && mode < p99_value)) throw std::invalid_argument("Gamma prior needs 0 < mode < p99 value");
    if (!(probability > 0.0 && probability < 1.0)) throw std::invalid_argument("probability must lie in (0, 1)");
    auto residual = [&](double k) { return boost::math::gamma_p(k, p99_value * (k - 1.0) / mode) - probability; };

    double lo = 1.0 + 1e-9, hi = 2.0;
    if (residual(lo) >= 0.0) throw ConvergenceError("Gamma prior root not bracketed at k -> 1");
    while (residual(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e8) throw ConvergenceError("Gamma prior root not bracketed");
    }
    std::uintmax_t iters = 200;
    const auto [a, b] =
        boost::math::tools::toms748_solve(residual, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
    const double k = 0.5 * (a + b);
    return {k, mode / (k - 1.0)};
}

PriorSpec default_priors(const PhysicalTheta& truth, double p99_value) {
    const auto scaled = ThetaVector::from_physical(truth);
    PriorSpec p;
    p.negative_diffusivity = fit_gamma_prior(scaled[ThetaVector::neg_diffusivity], p99_value);
    p.positive_diffusivity = fit_gamma_prior(scaled[ThetaVector::pos_diffusivity], p99_value);
    p.electrolyte_diffusivity = fit_gamma_prior(scaled[ThetaVector::el_diffusivity], p99_value);
    return p;
}

double log_prior(const ThetaVector& theta, const PriorSpec& priors) {
    if (!std::isfinite(theta[ThetaVector::log_noise])) return kNegInf;
    const double lp = gamma_log_pdf(theta[ThetaVector::neg_diffusivity], priors.negative_diffusivity) +
                      gamma_log_pdf(theta[ThetaVector::pos_diffusivity], priors.positive_diffusivity) +
                      gamma_log_pdf(theta[ThetaVector::el_diffusivity], priors.electrolyte_diffusivity) +
                      beta_log_pdf(theta[ThetaVector::transference], priors.beta_alpha, priors.beta_beta);
    return std::isnan(lp) ? kNegInf : lp;
}

double gaussian_log_likelihood(double rss, std::size_t n, double noise_variance) {
    if (!(noise_variance > 0.0) || !std::isfinite(rss)) return kNegInf;
    const double nn = static_cast<double>(n);
    return -0.5 * nn * std::log(2.0 * std::numbers::pi * noise_variance) - rss / (2.0 * noise_variance);
}

LogPosterior::LogPosterior(const Dataset& data, ParameterSet params, PriorSpec priors)
    : residuals_(data, std::move(params)), priors_(priors) {}

double LogPosterior::log_likelihood(const ThetaVector& theta) {
    const auto p = theta.to_physical();
    if (!p.valid()) return kNegInf;
    return gaussian_log_likelihood(residual_sum_of_squares(p), data().size(), p.noise_variance);
}

double LogPosterior::operator()(const ThetaVector& theta) {
    const double lp = log_prior(theta, priors_);
    if (lp == kNegInf) return kNegInf;
    return lp + log_likelihood(theta);
}

StepResult ramh_step(ChainState& state, const LogDensity& target, const RamhSettings& settings) {
    const Eigen::Index d = state.theta.size();
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd w(d);
    for (Eigen::Index i = 0; i < d; ++i) w(i) = gauss(state.rng);
    const double u = unif(state.rng);

    const Eigen::VectorXd candidate = state.theta + state.factor.triangularView<Eigen::Lower>() * w;
    const double lc = target(candidate);
    double alpha = 0.0;
    if (!std::isnan(lc) && lc != kNegInf) alpha = std::min(1.0, std::exp(lc - state.log_density));

    StepResult out;
    out.acceptance_probability = alpha;
    if (u < alpha) {
        state.theta = candidate;
        state.log_density = lc;
        out.accepted = true;
    }
    ++state.iteration;

    const double step = alpha - settings.target_acceptance;
    const double norm2 = w.squaredNorm();
    if (settings.adapt && step != 0.0 && norm2 > 0.0) {
        const double eta =
            std::min(1.0, (settings.dimension_scaled ? static_cast<double>(d) : 1.0) * std::pow(static_cast<double>(state.iteration), -settings.gamma));
        const Eigen::MatrixXd s = state.factor.triangularView<Eigen::Lower>();
        const Eigen::MatrixXd inner =
            Eigen::MatrixXd::Identity(d, d) + (eta * step / norm2) * (w * w.transpose());
        const Eigen::MatrixXd cov = s * inner * s.transpose();
        Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (cov + cov.transpose()));
        if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().allFinite()) {
            state.factor = llt.matrixL();
            out.adapted = true;
        }
    }
    return out;
}

RamhRun run_ramh(const LogDensity& target, const Eigen::VectorXd& start, const Eigen::MatrixXd& initial_factor,
                 std::size_t iterations, std::uint64_t seed, const RamhSettings& settings) {
    ChainState state;
    state.theta = start;
    state.log_density = target(start);
    if (!std::isfinite(state.log_density)) throw std::invalid_argument("chain start has zero density");
    state.factor = initial_factor;
    state.rng.seed(seed);

    RamhRun run;
    run.samples.resize(static_cast<Eigen::Index>(iterations), start.size());
    run.accepted.resize(iterations);
    for (std::size_t k = 0; k < iterations; ++k) {
        const auto r = ramh_step(state, target, settings);
        if (settings.adapt && !r.adapted && r.acceptance_probability != settings.target_acceptance) {
            ++run.failed_adaptations;
        }
        run.samples.row(static_cast<Eigen::Index>(k)) = state.theta.transpose();
        run.accepted[k] = r.accepted ? 1 : 0;
    }
    run.final_factor = state.factor;
    return run;
}

double Chain::acceptance_rate(std::size_t from) const {
    if (from >= accepted.size()) return 0.0;
    std::size_t n = 0;
    for (std::size_t k = from; k < accepted.size(); ++k) n += accepted[k];
    return static_cast<double>(n) / static_cast<double>(accepted.size() - from);
}

Chain run_chain(const ChainConfig& config, const Dataset& data, const ParameterSet& params,
                const PriorSpec& priors) {
    if (config.iterations <= config.burn_in) throw std::invalid_argument("iterations must exceed burn-in");
    if (!(config.initial_covariance > 0.0)) throw std::invalid_argument("initial covariance must be positive");
    if (!(config.log_noise_max > config.log_noise_min)) throw std::invalid_argument("empty ln sigma^2 window");

    LogPosterior posterior(data, params, priors);
    std::mt19937_64 init_rng(derive_seed(config.seed, "init"));
    auto draw_gamma = [&](const GammaPrior& g) { return std::gamma_distribution<double>(g.shape, g.scale)(init_rng); };

    auto draw_prior = [&] {
        ThetaVector t;
        t[ThetaVector::neg_diffusivity] = draw_gamma(priors.negative_diffusivity);
        t[ThetaVector::pos_diffusivity] = draw_gamma(priors.positive_diffusivity);
        t[ThetaVector::el_diffusivity] = draw_gamma(priors.electrolyte_diffusivity);
        const double x = std::gamma_distribution<double>(priors.beta_alpha, 1.0)(init_rng);
        const double y = std::gamma_distribution<double>(priors.beta_beta, 1.0)(init_rng);
        t[ThetaVector::transference] = x / (x + y);
        t[ThetaVector::log_noise] =
            std::uniform_real_distribution<double>(config.log_noise_min, config.log_noise_max)(init_rng);
        return t;
    };

    ThetaVector start;
    double start_density = kNegInf;
    if (config.start == ChainStart::optimized) {
        VoltageResiduals residuals(data, params);
        std::vector<std::pair<double, ThetaVector>> ranked;
        for (std::size_t k = 0; k < config.start_candidates; ++k) {
            const auto t = draw_prior();
            ranked.emplace_back(residuals.residual_sum_of_squares(t.to_physical()), t);
        }
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        double best_rss = std::numeric_limits<double>::infinity();
        const std::size_t refine = std::min(config.start_refinements, ranked.size());
        for (std::size_t k = 0; k < refine && std::isfinite(ranked[k].first); ++k) {
            MleResult r;
            try {
                r = mle(residuals, ranked[k].second, config.start_search);
            } catch (const MleNotConverged& e) {
                r = e.best();
            }
            if (r.rss < best_rss) {
                best_rss = r.rss;
                start = r.theta;
            }
        }
        if (std::isfinite(best_rss)) start_density = posterior(start);
    }
    for (int attempt = 0; !std::isfinite(start_density) && attempt < config.max_init_attempts; ++attempt) {
        const auto t = draw_prior();
        const double lp = posterior(t);
        if (std::isfinite(lp)) {
            start = t;
            start_density = lp;
        }
    }
    if (!std::isfinite(start_density)) {
        throw ConvergenceError(fmt::format("no valid initial theta after {} draws", config.max_init_attempts));
    }

    const LogDensity target = [&](const Eigen::VectorXd& v) {
        std::array<double, ThetaVector::size> a{};
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = v(static_cast<Eigen::Index>(i));
        return posterior(ThetaVector(a));
    };
    Eigen::VectorXd v0(5);
    for (std::size_t i = 0; i < 5; ++i) v0(static_cast<Eigen::Index>(i)) = start[i];
    const Eigen::MatrixXd s0 = std::sqrt(config.initial_covariance) * Eigen::MatrixXd::Identity(5, 5);
    auto run = run_ramh(target, v0, s0, config.iterations, derive_seed(config.seed, "ramh"), config.ramh);

    Chain chain;
    chain.samples = std::move(run.samples);
    chain.accepted = std::move(run.accepted);
    chain.burn_in = config.burn_in;
    chain.seed = config.seed;
    chain.dataset = data.label;
    chain.initial = start;
    return chain;
}

namespace {

const char* const kChainColumns = "d_n,d_p,d_e,t_plus,log_noise,accepted";

std::uint64_t parse_u64(const std::string& text) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("malformed unsigned integer '" + text + "'");
    return v;
}

}  // namespace

void write_chain(const std::filesystem::path& csv_path, const Chain& chain) {
    std::string out = kChainColumns;
    out += '\n';
    for (Eigen::Index k = 0; k < chain.samples.rows(); ++k) {
        for (Eigen::Index j = 0; j < chain.samples.cols(); ++j) {
            out += io::format_double(chain.samples(k, j));
            out += ',';
        }
        out += chain.accepted[static_cast<std::size_t>(k)] ? "1\n" : "0\n";
    }
    io::IniDocument meta;
    auto& c = meta["chain"];
    c["dataset"] = chain.dataset;
    c["seed"] = std::to_string(chain.seed);
    c["burn_in"] = std::to_string(chain.burn_in);
    c["iterations"] = std::to_string(chain.size());
    std::vector<double> init(chain.initial.values().begin(), chain.initial.values().end());
    c["initial"] = io::format_double_list(init);
    io::write_text_atomic(csv_path, out);
    auto meta_file = csv_path;
    meta_file += ".meta";
    io::write_text_atomic(meta_file, io::format_ini(meta));
}

Chain read_chain(const std::filesystem::path& csv_path) {
    auto meta_file = csv_path;
    meta_file += ".meta";
    const auto meta = io::parse_ini(io::read_text(meta_file));
    auto get = [&](const std::string& key) -> const std::string& {
        const auto s = meta.find("chain");
        if (s == meta.end() || !s->second.contains(key)) throw ConfigError("chain metadata lacks " + key);
        return s->second.at(key);
    };
    Chain chain;
    chain.dataset = get("dataset");
    chain.seed = parse_u64(get("seed"));
    chain.burn_in = parse_u64(get("burn_in"));
    const auto rows = parse_u64(get("iterations"));
    const auto init = io::parse_double_list(get("initial"));
    if (init.size() != ThetaVector::size) throw ConfigError("chain metadata: initial needs 5 values");
    for (std::size_t i = 0; i < init.size(); ++i) chain.initial[i] = init[i];

    const std::string text = io::read_text(csv_path);
    std::size_t pos = text.find('\n');
    if (pos == std::string::npos || text.substr(0, pos) != kChainColumns) {
        throw ConfigError("chain csv has an unexpected header: " + csv_path.string());
    }
    ++pos;
    chain.samples.resize(static_cast<Eigen::Index>(rows), 5);
    chain.accepted.reserve(rows);
    std::size_t k = 0;
    while (pos < text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        const std::string_view row(text.data() + pos, end - pos);
        if (k >= rows) throw ConfigError("chain csv has more rows than its metadata");
        std::size_t start = 0;
        for (Eigen::Index j = 0; j < 6; ++j) {
            const std::size_t comma = j < 5 ? row.find(',', start) : row.size();
            if (comma == std::string_view::npos) throw ConfigError("chain csv row has too few columns");
            const auto field = row.substr(start, comma - start);
            if (j < 5) {
                chain.samples(static_cast<Eigen::Index>(k), j) = io::parse_double(field);
            } else if (field == "0" || field == "1") {
                chain.accepted.push_back(field == "1" ? 1 : 0);
            } else {
                throw ConfigError("chain csv acceptance flag must be 0 or 1");
            }
            start = comma + 1;
        }
        ++k;
        pos = end + 1;
    }
    if (k != rows) throw ConfigError(fmt::format("chain csv has {} rows, metadata says {}", k, rows));
    return chain;
}

namespace {

std::vector<double> edges_for(double lo, double hi, std::size_t bins) {
    if (!(hi > lo)) {
        const double pad = lo == 0.0 ? 0.5 : 0.5 * std::abs(lo) * 1e-6;
        lo -= pad;
        hi += pad;
    }
    std::vector<double> e(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    e[bins] = hi;
    return e;
}

std::size_t bin_of(double x, const std::vector<double>& e) {
    const std::size_t bins = e.size() - 1;
    const double f = (x - e.front()) / (e.back() - e.front());
    const auto i = static_cast<std::ptrdiff_t>(std::floor(f * static_cast<double>(bins)));
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(bins) - 1));
}

}  // namespace

Histogram histogram(const Eigen::VectorXd& values, std::size_t bins) {
    if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
    if (values.size() == 0) throw std::invalid_argument("histogram of no samples");
    Histogram h;
    h.edges = edges_for(values.minCoeff(), values.maxCoeff(), bins);
    h.counts.assign(bins, 0);
    for (double x : values) ++h.counts[bin_of(x, h.edges)];
    return h;
}

Histogram2D histogram2d(const Eigen::VectorXd& x, const Eigen::VectorXd& y, std::size_t bins) {
    if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
    if (x.size() == 0 || x.size() != y.size()) throw std::invalid_argument("joint histogram needs paired samples");
    Histogram2D h;
    h.x_edges = edges_for(x.minCoeff(), x.maxCoeff(), bins);
    h.y_edges = edges_for(y.minCoeff(), y.maxCoeff(), bins);
    h.counts.assign(bins * bins, 0);
    for (Eigen::Index k = 0; k < x.size(); ++k) ++h.counts[bin_of(x(k), h.x_edges) * bins + bin_of(y(k), h.y_edges)];
    return h;
}

Eigen::MatrixXd reported_samples(const Eigen::MatrixXd& scaled) {
    Eigen::MatrixXd r = scaled;
    r.col(ThetaVector::log_noise) = (scaled.col(ThetaVector::log_noise).array().exp() / reported_noise_unit).matrix();
    return r;
}

PosteriorSummary summarize(const Chain& chain, std::size_t burn_in, std::size_t bins) {
    if (burn_in >= chain.size()) throw std::invalid_argument("no samples after burn-in");
    const auto n = static_cast<Eigen::Index>(chain.size() - burn_in);
    const Eigen::MatrixXd r = reported_samples(chain.samples.bottomRows(n));
    PosteriorSummary s;
    s.samples = static_cast<std::size_t>(n);
    s.mmse = r.colwise().mean().transpose();
    s.std = Eigen::VectorXd::Zero(r.cols());
    if (n > 1) {
        const Eigen::MatrixXd centred = r.rowwise() - s.mmse.transpose();
        s.std = (centred.colwise().squaredNorm() / static_cast<double>(n - 1)).cwiseSqrt().transpose();
    }
    s.acceptance_rate = chain.acceptance_rate(burn_in);
    for (Eigen::Index j = 0; j < r.cols(); ++j) s.marginals.push_back(histogram(r.col(j), bins));
    s.diffusivities = histogram2d(r.col(ThetaVector::neg_diffusivity), r.col(ThetaVector::pos_diffusivity), bins);
    s.electrolyte = histogram2d(r.col(ThetaVector::el_diffusivity), r.col(ThetaVector::transference), bins);
    return s;
}

}  // namespace spme

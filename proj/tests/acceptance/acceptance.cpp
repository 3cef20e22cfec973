// Acceptance suite: one PASS/FAIL line per criterion. Arguments select
// criteria by number; no arguments runs all nine.

#include "spme/bayes.hpp"
#include "spme/experiment.hpp"
#include "spme/freq.hpp"
#include "spme/io.hpp"
#include "spme/model.hpp"
#include "spme/ocp.hpp"
#include "spme/parameters.hpp"
#include "spme/voltage.hpp"

#include "support/oracle.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

using namespace spme;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Sarle's bimodality coefficient with the small-sample skewness and excess
// kurtosis. Values above 5/9 (the uniform distribution) indicate a flat or
// multimodal density.
constexpr double kBimodalityThreshold = 5.0 / 9.0;

double bimodality_coefficient(const Eigen::VectorXd& x) {
    const double n = static_cast<double>(x.size());
    const Eigen::ArrayXd c = x.array() - x.mean();
    const double m2 = c.square().mean(), m3 = c.cube().mean(), m4 = c.square().square().mean();
    const double g = std::sqrt(n * (n - 1.0)) / (n - 2.0) * m3 / std::pow(m2, 1.5);
    const double k = (n - 1.0) / ((n - 2.0) * (n - 3.0)) * ((n + 1.0) * m4 / (m2 * m2) - 3.0 * (n - 1.0));
    return (g * g + 1.0) / (k + 3.0 * (n - 1.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0)));
}

struct JointShape {
    double along_negative = 0.0;
    double along_positive = 0.0;
    double along_principal = 0.0;
    double max() const { return std::max({along_negative, along_positive, along_principal}); }
};

// Bimodality of the (D_n, D_p) cloud along both axes and along the leading
// principal axis of the standardized pair.
JointShape joint_shape(const Eigen::MatrixXd& reported) {
    const Eigen::VectorXd dn = reported.col(0), dp = reported.col(1);
    auto standardize = [](const Eigen::VectorXd& v) {
        const Eigen::ArrayXd c = v.array() - v.mean();
        return Eigen::VectorXd(c / std::sqrt(c.square().mean()));
    };
    const Eigen::VectorXd zn = standardize(dn), zp = standardize(dp);
    const double correlation = zn.dot(zp) / static_cast<double>(zn.size());
    const Eigen::VectorXd pc = (correlation >= 0.0 ? Eigen::VectorXd(zn + zp) : Eigen::VectorXd(zn - zp)) / std::sqrt(2.0);
    return {bimodality_coefficient(dn), bimodality_coefficient(dp), bimodality_coefficient(pc)};
}

fs::path work_dir(const std::string& name) {
    const char* root = std::getenv("SPME_ACCEPTANCE_DIR");
    const fs::path dir = (root && *root ? fs::path(root) : fs::temp_directory_path() / "spme_acceptance") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// One posterior run of the desk-scale study.
struct PosteriorRun {
    ExperimentEntry entry;
    Dataset data;
    Chain chain;
    PosteriorSummary summary;
    Eigen::MatrixXd reported;  // post burn-in samples
    double seconds = 0.0;
};

PosteriorRun posterior_run(const ExperimentConfig& config, const ExperimentEntry& entry) {
    const auto t0 = Clock::now();
    PosteriorRun r;
    r.entry = entry;
    r.data = make_dataset(config, entry);
    r.chain = fit_mcmc(config, entry, r.data);
    r.summary = summarize(r.chain, r.chain.burn_in);
    const auto kept = static_cast<Eigen::Index>(r.chain.size() - r.chain.burn_in);
    r.reported = reported_samples(r.chain.samples.bottomRows(kept));
    r.seconds = seconds_since(t0);
    return r;
}

const ExperimentConfig& desk_config() {
    static const ExperimentConfig config;
    return config;
}

const PosteriorRun& wide_run() {
    static const PosteriorRun run = posterior_run(desk_config(), select_entries(desk_config(), "wide").front());
    return run;
}

Outcome model_algebra() {
    const auto t0 = Clock::now();
    const ParameterSet p;
    const auto& n = p.negative;
    const double j0 = exchange_current_density(n.reaction_rate, 0.5 * n.max_concentration, n.max_concentration,
                                               p.electrolyte_concentration);
    const double eta = reaction_overpotential(p.typical_current, n.surface_area, n.thickness, 7.90, p.thermal_voltage());
    const double eta_c = concentration_overpotential(990.0, 1010.0, p.transference, p);
    const auto ohm = ohmic_losses(p.typical_current, p);
    const double worst = std::max({rel(j0, 7.90), rel(eta, -8.63e-3), rel(eta_c, -6.17e-4),
                                   rel(ohm.electrolyte, -9.40e-3), rel(ohm.solid, -8.8e-5)});
    const double s = seconds_since(t0);
    return {worst < 1e-3 && s < 1.0,
            fmt::format("j0 {:.4g} A/m^2, eta_r,n {:.4g} V, eta_c {:.4g} V, dPhi_e {:.4g} V, dPhi_s {:.4g} V; "
                        "worst relative error {:.2e} (limit 1e-3); {:.3f} s (limit 1 s)",
                        j0, eta, eta_c, ohm.electrolyte, ohm.solid, worst, s)};
}

Outcome conservation() {
    const auto t0 = Clock::now();
    const ParameterSet p;
    const auto m = assemble_model(default_true_theta(), p, 1.0);
    const std::vector<double> current(1000, p.typical_current);
    const auto r = simulate(m, current, uniform_state(m, 0.55, 0.66), true);
    const double mass0 = m.electrolyte_mass.dot(r.states.front().electrolyte);
    double electrolyte = 0.0, particle = 0.0, charge = 0.0;
    for (std::size_t k = 1; k < r.states.size(); ++k) {
        const auto& s = r.states[k];
        electrolyte = std::max(electrolyte, std::abs(m.electrolyte_mass.dot(s.electrolyte) - mass0) / mass0);
        charge += current[k - 1] * m.dt;
        for (int e = 0; e < 2; ++e) {
            const auto& ep = e == 0 ? p.negative : p.positive;
            const auto& row = e == 0 ? m.negative_readout.average_row : m.positive_readout.average_row;
            const auto& x = e == 0 ? s.negative : s.positive;
            const auto& x0 = e == 0 ? r.states.front().negative : r.states.front().positive;
            const double sign = e == 0 ? 1.0 : -1.0;
            const double expected =
                -3.0 * sign * charge / (ep.particle_radius * p.faraday * ep.surface_area * ep.thickness);
            particle = std::max(particle, rel(row.dot(x) - row.dot(x0), expected));
        }
    }
    const double s = seconds_since(t0);
    return {particle < 1e-6 && electrolyte < 1e-6 && s < 5.0,
            fmt::format("1000 s at 1C: particle balance {:.2e}, electrolyte ions {:.2e} relative (limit 1e-6); "
                        "{:.2f} s (limit 5 s)",
                        particle, electrolyte, s)};
}

Outcome numerics() {
    const auto t0 = Clock::now();
    const ParameterSet p;
    const auto theta = default_true_theta();
    const SocPoint soc = soc_point(5);
    SignalSpec spec = default_local_signal();
    const double a = calibrate_current_amplitude(spec, 8e-3, soc, theta, p);
    std::fill(spec.amplitudes.begin(), spec.amplitudes.end(), a);
    const auto current = current_series(spec);

    const ModelBuilder builder(p, 1.0 / spec.sample_rate);
    const auto m = builder.build(theta);
    const auto x0 = uniform_state(m, soc.negative, soc.positive);
    const auto v = simulate(m, current, x0).voltage;
    const double oracle = max_abs_diff(v, testing::oracle_voltage(builder, m, current, x0));

    const auto m2 = assemble_model(theta, p, 1.0 / spec.sample_rate, NodeCounts{}.doubled());
    const auto v2 = simulate(m2, current, uniform_state(m2, soc.negative, soc.positive)).voltage;
    const double doubling = max_abs_diff(v, v2);
    const double s = seconds_since(t0);
    return {oracle < 1e-5 && doubling < 1e-6 && s < 30.0,
            fmt::format("{:.0f} s multiharmonic at {:.0f} Hz, {:.3g} A per harmonic: oracle {:.2e} V (limit 1e-5), "
                        "node doubling {:.2e} V (limit 1e-6); {:.1f} s (limit 30 s)",
                        spec.duration, spec.sample_rate, a, oracle, doubling, s)};
}

Outcome sampler() {
    const auto t0 = Clock::now();
    const LogDensity gaussian = [](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm(); };
    constexpr std::size_t burn_in = 5000, kept = 50000;
    const auto run = run_ramh(gaussian, Eigen::VectorXd::Zero(2), std::sqrt(1e-3) * Eigen::MatrixXd::Identity(2, 2),
                              burn_in + kept, 2024);
    const Eigen::MatrixXd x = run.samples.bottomRows(kept);
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd c = x.rowwise() - mean;
    const Eigen::MatrixXd cov = c.transpose() * c / static_cast<double>(kept - 1);
    double accepted = 0.0;
    for (std::size_t k = burn_in; k < run.accepted.size(); ++k) accepted += run.accepted[k];
    const double rate = accepted / kept;
    const double mean_err = mean.cwiseAbs().maxCoeff();
    const double cov_err = (cov - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff();
    const double s = seconds_since(t0);
    return {std::abs(rate - 0.234) <= 0.05 && mean_err < 0.05 && cov_err < 0.1 && s < 60.0,
            fmt::format("{} iterations after {} burn-in: acceptance {:.3f} (0.234 +- 0.05), |mean| {:.3f} (limit 0.05), "
                        "max |cov - I| {:.3f} (limit 0.1); {:.2f} s (limit 60 s)",
                        kept, burn_in, rate, mean_err, cov_err, s)};
}

Outcome priors() {
    const auto truth = ThetaVector::from_physical(default_true_theta());
    const auto spec = default_priors(default_true_theta());
    const GammaPrior gammas[] = {spec.negative_diffusivity, spec.positive_diffusivity, spec.electrolyte_diffusivity};
    double mode_err = 0.0, cdf_err = 0.0;
    std::string shapes;
    for (int i = 0; i < 3; ++i) {
        const auto& g = gammas[i];
        mode_err = std::max(mode_err, std::abs((g.shape - 1.0) * g.scale - truth[i]));
        const boost::math::gamma_distribution<double> d(g.shape, g.scale);
        cdf_err = std::max(cdf_err, std::abs(boost::math::cdf(d, 100.0) - 0.99));
        shapes += fmt::format("{}Gamma({:.5g}, {:.5g})", i ? ", " : "", g.shape, g.scale);
    }
    const double mass =
        boost::math::ibeta(spec.beta_alpha, spec.beta_beta, 0.6) - boost::math::ibeta(spec.beta_alpha, spec.beta_beta, 0.2);
    return {mode_err <= 1e-6 && cdf_err <= 1e-4 && std::abs(mass - 0.80) <= 0.005,
            fmt::format("{}: mode error {:.1e} (limit 1e-6), CDF(100) error {:.1e} (limit 1e-4); "
                        "Beta({:g}, {:g}) mass on [0.2, 0.6] {:.4f} (0.80 +- 0.005)",
                        shapes, mode_err, cdf_err, spec.beta_alpha, spec.beta_beta, mass)};
}

Outcome wide_recovery() {
    const auto& w = wide_run();
    const auto truth = reported(ThetaVector::from_physical(desk_config().truth()));
    const auto& mmse = w.summary.mmse;
    const double en = rel(mmse(0), truth[0]), ep = rel(mmse(1), truth[1]);
    const double et = std::abs(mmse(3) - truth[3]), es = rel(mmse(4), truth[4]);
    return {en <= 0.05 && ep <= 0.05 && et <= 0.01 && es <= 0.25 && w.seconds < 3600.0,
            fmt::format("{} samples, {} iterations ({} burn-in), acceptance {:.3f}: D_n {:.4g} ({:.2f}%), "
                        "D_p {:.4g} ({:.2f}%), t+ {:.4f} ({:.4f} abs), sigma2 {:.4g}e-9 ({:.1f}%); D_e {:.4g}; {:.1f} s",
                        w.data.size(), w.chain.size(), w.chain.burn_in, w.summary.acceptance_rate, mmse(0), 100.0 * en,
                        mmse(1), 100.0 * ep, mmse(3), et, mmse(4), 100.0 * es, mmse(2), w.seconds)};
}

Outcome convergence() {
    const auto& w = wide_run();
    const auto t0 = Clock::now();
    const auto fim = fit_mle(desk_config(), w.entry, w.data);
    const double s = seconds_since(t0);
    if (!fim.identifiable) return {false, "wide FIM not identifiable: " + fim.diagnosis};
    bool ok = true;
    std::string rows;
    for (int i = 0; i < 5; ++i) {
        const double ratio = fim.sigma(i) / w.summary.std(i);
        ok = ok && ratio >= 0.5 && ratio <= 2.0;
        rows += fmt::format("{}{} {:.3g}/{:.3g} = {:.2f}", i ? ", " : "", parameter_labels[i], fim.sigma(i),
                            w.summary.std(i), ratio);
    }
    return {ok, fmt::format("sigma_CRLB/sigma_MCMC (limit 0.5..2): {}; MLE {} evaluations, {:.1f} s", rows,
                            fim.evaluations, s)};
}

Outcome local_identifiability() {
    const auto& config = desk_config();
    constexpr int flat_point = 9;
    const int points[] = {3, 6, flat_point};

    // The flat point is fixed in advance; confirm it has the smallest
    // negative OCP slope of the three.
    auto slope = [](int point) {
        const double x = soc_point(point).negative, h = 1e-4;
        return std::abs(negative_ocp(x + h) - negative_ocp(x - h)) / (2.0 * h);
    };
    bool flattest = true;
    for (int p : points) flattest = flattest && slope(flat_point) <= slope(p);

    const auto& wide = wide_run();
    double total = wide.seconds;
    std::string rows;
    std::optional<PosteriorRun> flat;
    for (int p : points) {
        auto run = posterior_run(config, select_entries(config, std::to_string(p)).front());
        total += run.seconds;
        const auto shape = joint_shape(run.reported);
        rows += fmt::format("; point {} (dU_n/dx {:.3f} V): std D_n {:.4g}, BC D_n {:.3f} D_p {:.3f} pc1 {:.3f}", p,
                            slope(p), run.summary.std(0), shape.along_negative, shape.along_positive,
                            shape.along_principal);
        if (p == flat_point) flat = std::move(run);
    }
    const double ratio = flat->summary.std(0) / wide.summary.std(0);
    const double bc = joint_shape(flat->reported).max();
    const double wide_bc = joint_shape(wide.reported).max();
    const bool ok = flattest && ratio >= 100.0 && bc > kBimodalityThreshold && wide_bc < kBimodalityThreshold &&
                    total < 1800.0;
    return {ok, fmt::format("flat point {}{}: std ratio {:.4g} (limit 100); joint BC {:.3f} vs wide {:.3f} "
                            "(threshold 5/9){}; {:.0f} s total (limit 1800 s)",
                            flat_point, flattest ? "" : " (not the flattest)", ratio, bc, wide_bc, rows, total)};
}

Outcome determinism() {
    auto config = parse_experiment_config(R"(
[experiment]
kind = both
points = 3, 9
seed = 17

[local_signal]
sample_rate = 400
duration = 2
frequencies = 1, 10, 100
amplitudes = 1, 1, 1

[mcmc]
iterations = 2000
burn_in = 500
start_candidates = 50
start_refinements = 2
)");
    auto tree = [](const fs::path& root) {
        std::map<std::string, std::string> out;
        for (const auto& e : fs::recursive_directory_iterator(root)) {
            if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = io::read_text(e.path());
        }
        return out;
    };
    auto run = [&](const std::string& name, std::size_t workers) {
        config.output_dir = work_dir(name);
        RunOptions o;
        o.workers = workers;
        run_generate(config, o);
        run_fit(config, FitMethod::both, o);
        run_summarize(config, o);
        return tree(config.output_dir);
    };
    const auto t0 = Clock::now();
    const auto a = run("determinism_a", 1), b = run("determinism_b", 1), c = run("determinism_c", 2);
    std::size_t differing = 0;
    for (const auto& [name, bytes] : a) {
        if (!b.count(name) || b.at(name) != bytes || !c.count(name) || c.at(name) != bytes) ++differing;
    }
    std::size_t datasets = 0, chains = 0, summaries = 0;
    for (const auto& [name, bytes] : a) {
        datasets += name.starts_with("datasets/");
        chains += name.starts_with("chains/");
        summaries += name.starts_with("summary/");
    }
    const bool ok = differing == 0 && a.size() == b.size() && a.size() == c.size() && datasets > 0 && chains > 0 &&
                    summaries > 0;
    return {ok, fmt::format("{} files ({} dataset, {} chain, {} summary); reruns with 1 and 2 workers differ in {} "
                            "files; {:.1f} s",
                            a.size(), datasets, chains, summaries, differing, seconds_since(t0))};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
        {1, model_algebra}, {2, conservation},  {3, numerics},    {4, sampler},       {5, priors},
        {6, wide_recovery}, {7, convergence},   {8, local_identifiability},           {9, determinism},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& [number, check] : criteria) {
        if (!selected.empty() && !selected.count(number)) continue;
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        fmt::print("{} criterion {}: {}\n", o.pass ? "PASS" : "FAIL", number, o.detail);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}

#include "spme/experiment.hpp"

#include "spme/errors.hpp"
#include "spme/io.hpp"
#include "spme/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace spme {

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::local: return "local";
        case ExperimentKind::wide: return "wide";
        case ExperimentKind::both: return "both";
    }
    return "both";
}

std::string to_string(FitMethod method) {
    switch (method) {
        case FitMethod::mcmc: return "mcmc";
        case FitMethod::mle: return "mle";
        case FitMethod::both: return "both";
    }
    return "both";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
    if (name == "local") return ExperimentKind::local;
    if (name == "wide") return ExperimentKind::wide;
    if (name == "both") return ExperimentKind::both;
    throw ConfigError("unknown experiment kind '" + name + "' (local, wide or both)");
}

FitMethod parse_fit_method(const std::string& name) {
    if (name == "mcmc") return FitMethod::mcmc;
    if (name == "mle") return FitMethod::mle;
    if (name == "both") return FitMethod::both;
    throw ConfigError("unknown fit method '" + name + "' (mcmc, mle or both)");
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("experiment config: " + what); };
    if (points.empty() && kind != ExperimentKind::wide) fail("no local points selected");
    std::set<int> seen;
    for (int p : points) {
        soc_point(p);
        if (!seen.insert(p).second) fail(fmt::format("point {} listed twice", p));
    }
    soc_point(wide_point);
    local_signal.validate();
    wide_signal.validate();
    if (!(target_deviation > 0.0)) fail("target_deviation must be positive");
    if (!(noise.percent >= 0.0) || !(noise.response_amplitude > 0.0)) fail("invalid noise settings");
    PhysicalTheta t = theta_true;
    t.noise_variance = 1.0;
    if (!t.valid()) fail("theta_true outside the parameter support");
    if (mcmc.iterations <= mcmc.burn_in) fail("mcmc iterations must exceed burn_in");
    if (!(mcmc.initial_covariance > 0.0)) fail("mcmc initial_covariance must be positive");
    if (!(mcmc.ramh.target_acceptance > 0.0 && mcmc.ramh.target_acceptance < 1.0)) fail("target_acceptance in (0, 1)");
    if (!(mcmc.ramh.gamma > 0.5 && mcmc.ramh.gamma <= 1.0)) fail("gamma must lie in (0.5, 1]");
    if (!(mcmc.log_noise_max > mcmc.log_noise_min)) fail("empty ln sigma^2 window");
    if (!(prior_p99 > 0.0)) fail("prior_p99 must be positive");
    if (!(mle.simplex.tolerance > 0.0) || mle.simplex.max_evaluations == 0) fail("invalid mle simplex settings");
    if (!(mle_init_fraction >= 0.0 && mle_init_fraction < 1.0)) fail("mle init_fraction in [0, 1)");
    if (!(fd_step > 0.0)) fail("fd_step must be positive");
    if (histogram_bins == 0) fail("histogram_bins must be positive");
    if (output_dir.empty()) fail("output_dir must not be empty");
}

ParameterSet ExperimentConfig::parameters() const {
    return parameter_file.empty() ? ParameterSet{} : load_parameters(parameter_file);
}

PhysicalTheta ExperimentConfig::truth() const {
    PhysicalTheta t = theta_true;
    t.noise_variance = noise.variance();
    return t;
}

namespace {

using Section = std::map<std::string, std::string>;

class Reader {
public:
    explicit Reader(io::IniDocument doc) : doc_(std::move(doc)) {}

    template <typename F>
    void read(const std::string& section, const std::string& key, F&& apply) {
        const auto s = doc_.find(section);
        if (s == doc_.end()) return;
        const auto k = s->second.find(key);
        if (k == s->second.end()) return;
        try {
            apply(k->second);
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("[{}] {}: {}", section, key, e.what()));
        }
        s->second.erase(k);
    }

    void finish() const {
        for (const auto& [section, keys] : doc_) {
            if (!keys.empty()) {
                throw ConfigError(fmt::format("unknown key [{}] {}", section.empty() ? "(none)" : section,
                                              keys.begin()->first));
            }
        }
    }

private:
    io::IniDocument doc_;
};

bool parse_bool(const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("expected true or false, got '" + text + "'");
}

std::size_t parse_size(const std::string& text) {
    const auto v = io::parse_integer(text);
    if (v < 0) throw ConfigError("expected a non-negative integer, got '" + text + "'");
    return static_cast<std::size_t>(v);
}

std::uint64_t parse_seed(const std::string& text) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError("malformed seed '" + text + "'");
    }
    return v;
}

std::vector<int> parse_points(const std::string& text) {
    std::vector<int> out;
    for (double v : io::parse_double_list(text)) {
        if (v != std::floor(v)) throw ConfigError("points must be integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

std::string format_points(const std::vector<int>& points) {
    std::string out;
    for (std::size_t i = 0; i < points.size(); ++i) out += (i ? ", " : "") + std::to_string(points[i]);
    return out;
}

ChainStart parse_chain_start(const std::string& text) {
    if (text == "optimized") return ChainStart::optimized;
    if (text == "prior") return ChainStart::prior;
    throw ConfigError("chain start must be optimized or prior");
}

void read_signal(Reader& r, const std::string& section, SignalSpec& s) {
    r.read(section, "kind", [&](const std::string& v) { s.kind = parse_signal_kind(v); });
    r.read(section, "sample_rate", [&](const std::string& v) { s.sample_rate = io::parse_double(v); });
    r.read(section, "duration", [&](const std::string& v) { s.duration = io::parse_double(v); });
    r.read(section, "frequencies", [&](const std::string& v) { s.frequencies = io::parse_double_list(v); });
    r.read(section, "amplitudes", [&](const std::string& v) { s.amplitudes = io::parse_double_list(v); });
    r.read(section, "bias", [&](const std::string& v) { s.bias = io::parse_double(v); });
}

void write_signal(Section& s, const SignalSpec& spec) {
    s["kind"] = to_string(spec.kind);
    s["sample_rate"] = io::format_double(spec.sample_rate);
    s["duration"] = io::format_double(spec.duration);
    s["frequencies"] = io::format_double_list(spec.frequencies);
    s["amplitudes"] = io::format_double_list(spec.amplitudes);
    s["bias"] = io::format_double(spec.bias);
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view text, const std::filesystem::path& base_dir) {
    ExperimentConfig c;
    Reader r(io::parse_ini(text));
    const auto num = [](double& target) { return [&target](const std::string& v) { target = io::parse_double(v); }; };
    const auto size = [](std::size_t& target) { return [&target](const std::string& v) { target = parse_size(v); }; };
    const auto integer = [](int& target) {
        return [&target](const std::string& v) { target = static_cast<int>(io::parse_integer(v)); };
    };
    const auto flag = [](bool& target) { return [&target](const std::string& v) { target = parse_bool(v); }; };

    r.read("experiment", "kind", [&](const std::string& v) { c.kind = parse_experiment_kind(v); });
    r.read("experiment", "points", [&](const std::string& v) { c.points = parse_points(v); });
    r.read("experiment", "wide_point", integer(c.wide_point));
    r.read("experiment", "seed", [&](const std::string& v) { c.seed = parse_seed(v); });
    r.read("experiment", "output_dir", [&](const std::string& v) { c.output_dir = v; });
    r.read("experiment", "parameter_file", [&](const std::string& v) {
        c.parameter_file = v.empty() || std::filesystem::path(v).is_absolute() ? std::filesystem::path(v) : base_dir / v;
    });
    r.read("experiment", "histogram_bins", size(c.histogram_bins));

    r.read("theta_true", "negative_diffusivity", num(c.theta_true.negative_diffusivity));
    r.read("theta_true", "positive_diffusivity", num(c.theta_true.positive_diffusivity));
    r.read("theta_true", "electrolyte_diffusivity", num(c.theta_true.electrolyte_diffusivity));
    r.read("theta_true", "transference", num(c.theta_true.transference));

    r.read("noise", "percent", num(c.noise.percent));
    r.read("noise", "response_amplitude", num(c.noise.response_amplitude));

    read_signal(r, "local_signal", c.local_signal);
    r.read("local_signal", "calibrate", flag(c.calibrate));
    r.read("local_signal", "target_deviation", num(c.target_deviation));
    read_signal(r, "wide_signal", c.wide_signal);

    r.read("nodes", "negative_particle", integer(c.nodes.negative_particle));
    r.read("nodes", "positive_particle", integer(c.nodes.positive_particle));
    r.read("nodes", "electrolyte_negative", integer(c.nodes.electrolyte_negative));
    r.read("nodes", "electrolyte_separator", integer(c.nodes.electrolyte_separator));
    r.read("nodes", "electrolyte_positive", integer(c.nodes.electrolyte_positive));

    r.read("mcmc", "iterations", size(c.mcmc.iterations));
    r.read("mcmc", "burn_in", size(c.mcmc.burn_in));
    r.read("mcmc", "initial_covariance", num(c.mcmc.initial_covariance));
    r.read("mcmc", "target_acceptance", num(c.mcmc.ramh.target_acceptance));
    r.read("mcmc", "gamma", num(c.mcmc.ramh.gamma));
    r.read("mcmc", "dimension_scaled", flag(c.mcmc.ramh.dimension_scaled));
    r.read("mcmc", "start", [&](const std::string& v) { c.mcmc.start = parse_chain_start(v); });
    r.read("mcmc", "start_candidates", size(c.mcmc.start_candidates));
    r.read("mcmc", "start_refinements", size(c.mcmc.start_refinements));
    r.read("mcmc", "log_noise_min", num(c.mcmc.log_noise_min));
    r.read("mcmc", "log_noise_max", num(c.mcmc.log_noise_max));
    r.read("mcmc", "prior_p99", num(c.prior_p99));

    r.read("mle", "tolerance", num(c.mle.simplex.tolerance));
    r.read("mle", "max_evaluations", size(c.mle.simplex.max_evaluations));
    r.read("mle", "initial_step", num(c.mle.simplex.initial_step));
    r.read("mle", "restarts", integer(c.mle.restarts));
    r.read("mle", "init_fraction", num(c.mle_init_fraction));
    r.read("mle", "fd_step", num(c.fd_step));
    r.finish();
    c.validate();
    return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    auto c = parse_experiment_config(io::read_text(path), path.parent_path());
    if (const char* dir = std::getenv(output_dir_variable); dir && *dir) c.output_dir = dir;
    return c;
}

std::string format_experiment_config(const ExperimentConfig& c) {
    io::IniDocument doc;
    auto& e = doc["experiment"];
    e["kind"] = to_string(c.kind);
    e["points"] = format_points(c.points);
    e["wide_point"] = std::to_string(c.wide_point);
    e["seed"] = std::to_string(c.seed);
    e["output_dir"] = c.output_dir.string();
    e["parameter_file"] = c.parameter_file.string();
    e["histogram_bins"] = std::to_string(c.histogram_bins);
    auto& t = doc["theta_true"];
    t["negative_diffusivity"] = io::format_double(c.theta_true.negative_diffusivity);
    t["positive_diffusivity"] = io::format_double(c.theta_true.positive_diffusivity);
    t["electrolyte_diffusivity"] = io::format_double(c.theta_true.electrolyte_diffusivity);
    t["transference"] = io::format_double(c.theta_true.transference);
    auto& n = doc["noise"];
    n["percent"] = io::format_double(c.noise.percent);
    n["response_amplitude"] = io::format_double(c.noise.response_amplitude);
    auto& ls = doc["local_signal"];
    write_signal(ls, c.local_signal);
    ls["calibrate"] = c.calibrate ? "true" : "false";
    ls["target_deviation"] = io::format_double(c.target_deviation);
    write_signal(doc["wide_signal"], c.wide_signal);
    auto& nd = doc["nodes"];
    nd["negative_particle"] = std::to_string(c.nodes.negative_particle);
    nd["positive_particle"] = std::to_string(c.nodes.positive_particle);
    nd["electrolyte_negative"] = std::to_string(c.nodes.electrolyte_negative);
    nd["electrolyte_separator"] = std::to_string(c.nodes.electrolyte_separator);
    nd["electrolyte_positive"] = std::to_string(c.nodes.electrolyte_positive);
    auto& m = doc["mcmc"];
    m["iterations"] = std::to_string(c.mcmc.iterations);
    m["burn_in"] = std::to_string(c.mcmc.burn_in);
    m["initial_covariance"] = io::format_double(c.mcmc.initial_covariance);
    m["target_acceptance"] = io::format_double(c.mcmc.ramh.target_acceptance);
    m["gamma"] = io::format_double(c.mcmc.ramh.gamma);
    m["dimension_scaled"] = c.mcmc.ramh.dimension_scaled ? "true" : "false";
    m["start"] = c.mcmc.start == ChainStart::optimized ? "optimized" : "prior";
    m["start_candidates"] = std::to_string(c.mcmc.start_candidates);
    m["start_refinements"] = std::to_string(c.mcmc.start_refinements);
    m["log_noise_min"] = io::format_double(c.mcmc.log_noise_min);
    m["log_noise_max"] = io::format_double(c.mcmc.log_noise_max);
    m["prior_p99"] = io::format_double(c.prior_p99);
    auto& l = doc["mle"];
    l["tolerance"] = io::format_double(c.mle.simplex.tolerance);
    l["max_evaluations"] = std::to_string(c.mle.simplex.max_evaluations);
    l["initial_step"] = io::format_double(c.mle.simplex.initial_step);
    l["restarts"] = std::to_string(c.mle.restarts);
    l["init_fraction"] = io::format_double(c.mle_init_fraction);
    l["fd_step"] = io::format_double(c.fd_step);
    return io::format_ini(doc);
}

std::vector<ExperimentEntry> select_entries(const ExperimentConfig& config, const std::optional<std::string>& only) {
    const bool local = config.kind != ExperimentKind::wide;
    const bool wide = config.kind != ExperimentKind::local;
    auto local_entry = [](int p) {
        return ExperimentEntry{fmt::format("point_{:02d}", p), false, p, static_cast<std::uint64_t>(p)};
    };
    const ExperimentEntry wide_entry{"wide", true, config.wide_point, 0};

    std::vector<ExperimentEntry> out;
    if (only) {
        if (*only == "wide") {
            if (!wide) throw ConfigError("--only-point wide: the configured experiment has no wide excursion");
            out.push_back(wide_entry);
            return out;
        }
        int p = 0;
        const auto [ptr, ec] = std::from_chars(only->data(), only->data() + only->size(), p);
        if (ec != std::errc{} || ptr != only->data() + only->size()) {
            throw ConfigError("--only-point expects a point number or 'wide', got '" + *only + "'");
        }
        if (!local || std::find(config.points.begin(), config.points.end(), p) == config.points.end()) {
            throw ConfigError(fmt::format("--only-point {}: not a configured local point", p));
        }
        out.push_back(local_entry(p));
        return out;
    }
    if (local) {
        for (int p : config.points) out.push_back(local_entry(p));
    }
    if (wide) out.push_back(wide_entry);
    return out;
}

std::filesystem::path dataset_path(const ExperimentConfig& config, const std::string& label) {
    return config.output_dir / "datasets" / (label + ".csv");
}

std::filesystem::path chain_path(const ExperimentConfig& config, const std::string& label) {
    return config.output_dir / "chains" / (label + ".csv");
}

std::filesystem::path mle_path(const ExperimentConfig& config, const std::string& label) {
    return config.output_dir / "mle" / (label + ".txt");
}

std::filesystem::path summary_dir(const ExperimentConfig& config) { return config.output_dir / "summary"; }

std::uint64_t dataset_seed(const ExperimentConfig& config, const ExperimentEntry& entry) {
    return derive_seed(config.seed, "dataset", entry.stream);
}

std::uint64_t chain_seed(const ExperimentConfig& config, const ExperimentEntry& entry) {
    return derive_seed(config.seed, "chain", entry.stream);
}

std::uint64_t mle_seed(const ExperimentConfig& config, const ExperimentEntry& entry) {
    return derive_seed(config.seed, "mle", entry.stream);
}

namespace {

/// Runs jobs on up to `workers` threads. Rethrows the first failure after
/// all threads finish.
void run_jobs(std::vector<std::function<void()>>& jobs, std::size_t workers) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mutex;
    auto worker = [&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++) {
            try {
                jobs[k]();
            } catch (...) {
                const std::lock_guard lock(mutex);
                if (!failure) failure = std::current_exception();
                next = jobs.size();
            }
        }
    };
    const std::size_t n = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(jobs.size(), 1));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

class Logger {
public:
    explicit Logger(std::ostream* out) : out_(out) {}
    void line(const std::string& text) {
        if (!out_) return;
        const std::lock_guard lock(mutex_);
        *out_ << text << '\n' << std::flush;
    }

private:
    std::ostream* out_;
    std::mutex mutex_;
};

}  // namespace

Dataset make_dataset(const ExperimentConfig& config, const ExperimentEntry& entry) {
    const auto params = config.parameters();
    const auto truth = config.truth();
    const SocPoint soc = soc_point(entry.point);
    SignalSpec signal = entry.wide ? config.wide_signal : config.local_signal;
    if (!entry.wide && config.calibrate) {
        const double a = calibrate_current_amplitude(signal, config.target_deviation, soc, truth, params, config.nodes);
        std::fill(signal.amplitudes.begin(), signal.amplitudes.end(), a);
    }
    return generate_dataset(entry.label, signal, soc, truth, params, config.noise, dataset_seed(config, entry),
                            config.nodes);
}

std::vector<std::filesystem::path> run_generate(const ExperimentConfig& config, const RunOptions& options) {
    const auto entries = select_entries(config, options.only);
    std::filesystem::create_directories(config.output_dir / "datasets");
    std::vector<Dataset> made(entries.size());
    std::vector<std::function<void()>> jobs;
    Logger log(options.log);
    for (std::size_t k = 0; k < entries.size(); ++k) {
        jobs.emplace_back([&, k] {
            made[k] = make_dataset(config, entries[k]);
            write_dataset(dataset_path(config, entries[k].label), made[k]);
            log.line(fmt::format("generated {} ({} samples)", entries[k].label, made[k].size()));
        });
    }
    run_jobs(jobs, options.workers);

    io::IniDocument manifest;
    std::vector<std::filesystem::path> paths;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& d = made[k];
        auto& s = manifest[d.label];
        s["file"] = dataset_path(config, d.label).filename().string();
        s["soc_point"] = std::to_string(d.soc.index);
        s["kind"] = to_string(d.signal.kind);
        s["samples"] = std::to_string(d.size());
        s["amplitudes"] = io::format_double_list(d.signal.amplitudes);
        s["noise_variance"] = io::format_double(d.noise_variance);
        s["seed"] = std::to_string(d.seed);
        paths.push_back(dataset_path(config, d.label));
    }
    // A restricted run merges into an existing manifest.
    const auto manifest_path = config.output_dir / "datasets" / "manifest.txt";
    if (options.only && std::filesystem::exists(manifest_path)) {
        auto old = io::parse_ini(io::read_text(manifest_path));
        for (auto& [label, section] : manifest) old[label] = section;
        manifest = std::move(old);
    }
    io::write_text_atomic(manifest_path, io::format_ini(manifest));
    return paths;
}

Chain fit_mcmc(const ExperimentConfig& config, const ExperimentEntry& entry, const Dataset& data) {
    ChainConfig c = config.mcmc;
    c.seed = chain_seed(config, entry);
    return run_chain(c, data, config.parameters(), default_priors(config.truth(), config.prior_p99));
}

FimResult fit_mle(const ExperimentConfig& config, const ExperimentEntry& entry, const Dataset& data) {
    VoltageResiduals residuals(data, config.parameters());
    std::mt19937_64 rng(mle_seed(config, entry));
    const auto start = random_mle_start(ThetaVector::from_physical(config.truth()), rng, config.mle_init_fraction);
    MleResult estimate;
    try {
        estimate = mle(residuals, start, config.mle);
    } catch (const MleNotConverged& e) {
        estimate = e.best();
    }
    return fisher_analysis(residuals, estimate, config.fd_step);
}

void run_fit(const ExperimentConfig& config, FitMethod method, const RunOptions& options) {
    const auto entries = select_entries(config, options.only);
    std::vector<Dataset> data(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto path = dataset_path(config, entries[k].label);
        if (!std::filesystem::exists(path)) throw std::runtime_error("missing dataset " + path.string());
        data[k] = read_dataset(path);
    }
    if (method != FitMethod::mle) std::filesystem::create_directories(config.output_dir / "chains");
    if (method != FitMethod::mcmc) std::filesystem::create_directories(config.output_dir / "mle");

    Logger log(options.log);
    std::vector<std::function<void()>> jobs;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        if (method != FitMethod::mle) {
            jobs.emplace_back([&, k] {
                const auto chain = fit_mcmc(config, entries[k], data[k]);
                write_chain(chain_path(config, entries[k].label), chain);
                log.line(fmt::format("mcmc {}: {} iterations, acceptance {:.3f}", entries[k].label, chain.size(),
                                     chain.acceptance_rate(chain.burn_in)));
            });
        }
        if (method != FitMethod::mcmc) {
            jobs.emplace_back([&, k] {
                const auto r = fit_mle(config, entries[k], data[k]);
                write_fim_result(mle_path(config, entries[k].label), r);
                log.line(fmt::format("mle {}: {} evaluations{}{}", entries[k].label, r.evaluations,
                                     r.converged ? "" : ", not converged",
                                     r.identifiable ? "" : ", not identifiable"));
            });
        }
    }
    run_jobs(jobs, options.workers);
}

double SummaryTable::value(std::size_t column, std::size_t parameter, std::size_t statistic) const {
    constexpr double missing = std::numeric_limits<double>::quiet_NaN();
    const auto& c = columns.at(column);
    const auto p = static_cast<Eigen::Index>(parameter);
    switch (statistic) {
        case 0: return c.posterior ? c.posterior->mmse(p) : missing;
        case 1: return c.posterior ? c.posterior->std(p) : missing;
        case 2: return c.mle ? reported(c.mle->theta)[parameter] : missing;
        case 3: return c.mle && p < c.mle->sigma.size() ? c.mle->sigma(p) : missing;
        default: throw std::out_of_range("summary statistic index");
    }
}

SummaryTable collect_summary(const ExperimentConfig& config, const std::optional<std::string>& only,
                             std::optional<std::size_t> bins) {
    SummaryTable table;
    const std::size_t nbins = bins.value_or(config.histogram_bins);
    for (const auto& e : select_entries(config, only)) {
        SummaryColumn col;
        col.label = e.label;
        if (std::filesystem::exists(chain_path(config, e.label))) {
            const auto chain = read_chain(chain_path(config, e.label));
            col.posterior = summarize(chain, chain.burn_in, nbins);
        }
        if (std::filesystem::exists(mle_path(config, e.label))) col.mle = read_fim_result(mle_path(config, e.label));
        if (col.posterior || col.mle) table.columns.push_back(std::move(col));
    }
    if (table.columns.empty()) throw std::runtime_error("no fit outputs under " + config.output_dir.string());
    return table;
}

namespace {

std::string cell(double v) {
    if (std::isnan(v)) return "-";
    if (std::isinf(v)) return "inf";
    return fmt::format("{:.4g}", v);
}

}  // namespace

std::string format_summary_text(const SummaryTable& table) {
    std::string out = "# Parameter and uncertainty estimates of the scaled variables (sigma2 in 1e-9 V^2)\n";
    out += fmt::format("{:<8} {:<11}", "param", "statistic");
    for (const auto& c : table.columns) out += fmt::format(" {:>11}", c.label);
    out += '\n';
    for (std::size_t p = 0; p < parameter_labels.size(); ++p) {
        for (std::size_t s = 0; s < summary_statistics.size(); ++s) {
            out += fmt::format("{:<8} {:<11}", parameter_labels[p], summary_statistics[s]);
            for (std::size_t c = 0; c < table.columns.size(); ++c) out += fmt::format(" {:>11}", cell(table.value(c, p, s)));
            out += '\n';
        }
    }
    return out;
}

std::string format_summary_csv(const SummaryTable& table) {
    std::string out = "parameter,statistic";
    for (const auto& c : table.columns) out += "," + c.label;
    out += '\n';
    for (std::size_t p = 0; p < parameter_labels.size(); ++p) {
        for (std::size_t s = 0; s < summary_statistics.size(); ++s) {
            out += fmt::format("{},{}", parameter_labels[p], summary_statistics[s]);
            for (std::size_t c = 0; c < table.columns.size(); ++c) {
                const double v = table.value(c, p, s);
                out += "," + (std::isnan(v) ? std::string() : io::format_double(v));
            }
            out += '\n';
        }
    }
    return out;
}

namespace {

std::string histogram_csv(const Histogram& h) {
    std::string out = "lower,upper,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        out += fmt::format("{},{},{}\n", io::format_double(h.edges[i]), io::format_double(h.edges[i + 1]), h.counts[i]);
    }
    return out;
}

std::string joint_csv(const Histogram2D& h) {
    std::string out = "x_lower,x_upper,y_lower,y_upper,count\n";
    for (std::size_t i = 0; i + 1 < h.x_edges.size(); ++i) {
        for (std::size_t j = 0; j + 1 < h.y_edges.size(); ++j) {
            out += fmt::format("{},{},{},{},{}\n", io::format_double(h.x_edges[i]), io::format_double(h.x_edges[i + 1]),
                               io::format_double(h.y_edges[j]), io::format_double(h.y_edges[j + 1]), h.at(i, j));
        }
    }
    return out;
}

}  // namespace

SummaryTable run_summarize(const ExperimentConfig& config, const RunOptions& options, std::optional<std::size_t> bins) {
    auto table = collect_summary(config, options.only, bins);
    const auto dir = summary_dir(config);
    std::filesystem::create_directories(dir / "histograms");
    io::write_text_atomic(dir / "table.txt", format_summary_text(table));
    io::write_text_atomic(dir / "table.csv", format_summary_csv(table));
    for (const auto& c : table.columns) {
        if (!c.posterior) continue;
        for (std::size_t p = 0; p < parameter_labels.size(); ++p) {
            io::write_text_atomic(dir / "histograms" / fmt::format("{}_{}.csv", c.label, parameter_labels[p]),
                                  histogram_csv(c.posterior->marginals[p]));
        }
        io::write_text_atomic(dir / "histograms" / (c.label + "_D_n_D_p.csv"), joint_csv(c.posterior->diffusivities));
        io::write_text_atomic(dir / "histograms" / (c.label + "_D_e_t_plus.csv"), joint_csv(c.posterior->electrolyte));
    }
    if (options.log) *options.log << format_summary_text(table) << std::flush;
    return table;
}

}  // namespace spme

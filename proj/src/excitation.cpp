#include "spme/excitation.hpp"

#include "spme/errors.hpp"
#include "spme/io.hpp"
#include "spme/ocp.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>

namespace spme {

std::string to_string(SignalKind kind) {
    switch (kind) {
        case SignalKind::multiharmonic: return "multiharmonic";
        case SignalKind::biased_sinusoid: return "biased_sinusoid";
        case SignalKind::constant: return "constant";
    }
    return "unknown";
}

SignalKind parse_signal_kind(const std::string& name) {
    if (name == "multiharmonic") return SignalKind::multiharmonic;
    if (name == "biased_sinusoid") return SignalKind::biased_sinusoid;
    if (name == "constant") return SignalKind::constant;
    throw ConfigError("unknown signal kind '" + name + "'");
}

void SignalSpec::validate() const {
    auto finite = [](double x) { return std::isfinite(x); };
    if (!(finite(sample_rate) && sample_rate > 0.0)) throw ConfigError("sample rate must be positive");
    if (!(finite(duration) && duration > 0.0)) throw ConfigError("duration must be positive");
    if (!finite(bias)) throw ConfigError("bias must be finite");
    if (frequencies.size() != amplitudes.size()) {
        throw ConfigError("frequencies and amplitudes must have the same length");
    }
    for (std::size_t j = 0; j < frequencies.size(); ++j) {
        if (!(finite(frequencies[j]) && frequencies[j] > 0.0)) throw ConfigError("frequencies must be positive");
        if (!finite(amplitudes[j])) throw ConfigError("amplitudes must be finite");
        if (!(sample_rate > 2.0 * frequencies[j])) {
            throw ConfigError(fmt::format("sample rate {} Hz violates Nyquist for {} Hz", sample_rate, frequencies[j]));
        }
    }
    if (!frequencies.empty()) {
        const double lowest = *std::min_element(frequencies.begin(), frequencies.end());
        if (duration * lowest < 1.0 - 1e-9) {
            throw ConfigError(fmt::format("duration {} s is shorter than one period at {} Hz", duration, lowest));
        }
    }
    switch (kind) {
        case SignalKind::multiharmonic:
            if (frequencies.empty()) throw ConfigError("multiharmonic signal needs at least one harmonic");
            if (bias != 0.0) throw ConfigError("multiharmonic signal has zero bias");
            break;
        case SignalKind::biased_sinusoid:
            if (frequencies.size() != 1) throw ConfigError("biased sinusoid has exactly one harmonic");
            break;
        case SignalKind::constant:
            if (!frequencies.empty()) throw ConfigError("constant signal has no harmonics");
            break;
    }
    if (sample_count() < 1) throw ConfigError("signal has no samples");
}

std::size_t SignalSpec::sample_count() const {
    return static_cast<std::size_t>(std::llround(duration * sample_rate));
}

std::vector<double> SignalSpec::times() const {
    std::vector<double> t(sample_count());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = static_cast<double>(k) / sample_rate;
    return t;
}

SignalSpec default_local_signal() { return {}; }

SignalSpec default_wide_signal() {
    SignalSpec s;
    s.kind = SignalKind::biased_sinusoid;
    s.sample_rate = 1.0;
    s.duration = 1000.0;
    s.frequencies = {1e-3};
    s.amplitudes = {1.0};
    s.bias = 24.0;
    return s;
}

namespace {

std::vector<double> sum_of_sines(const SignalSpec& spec) {
    const auto t = spec.times();
    std::vector<double> out(t.size(), spec.bias);
    for (std::size_t j = 0; j < spec.frequencies.size(); ++j) {
        const double w = 2.0 * std::numbers::pi * spec.frequencies[j];
        for (std::size_t k = 0; k < t.size(); ++k) out[k] += spec.amplitudes[j] * std::sin(w * t[k]);
    }
    return out;
}

}  // namespace

std::vector<double> multiharmonic_current(const SignalSpec& spec) {
    spec.validate();
    if (spec.kind != SignalKind::multiharmonic) throw ConfigError("not a multiharmonic signal");
    return sum_of_sines(spec);
}

std::vector<double> biased_sinusoid_current(const SignalSpec& spec) {
    spec.validate();
    if (spec.kind != SignalKind::biased_sinusoid) throw ConfigError("not a biased sinusoid");
    return sum_of_sines(spec);
}

std::vector<double> current_series(const SignalSpec& spec) {
    spec.validate();
    return sum_of_sines(spec);
}

std::vector<SocPoint> soc_points() {
    static const double neg[] = {0.80, 0.73, 0.67, 0.61, 0.55, 0.49, 0.43, 0.37, 0.31, 0.25, 0.19};
    static const double pos[] = {0.51, 0.55, 0.59, 0.62, 0.66, 0.69, 0.73, 0.76, 0.80, 0.83, 0.87};
    std::vector<SocPoint> out;
    for (int i = 0; i < 11; ++i) out.push_back({i + 1, neg[i], pos[i]});
    return out;
}

SocPoint soc_point(int index) {
    if (index < 1 || index > 11) throw ConfigError(fmt::format("excitation point {} not in 1..11", index));
    return soc_points()[static_cast<std::size_t>(index - 1)];
}

double peak_voltage_deviation(const SignalSpec& spec, const SocPoint& soc, const PhysicalTheta& theta,
                              const ParameterSet& params, const NodeCounts& nodes) {
    const auto current = current_series(spec);
    const auto model = assemble_model(theta, params, 1.0 / spec.sample_rate, nodes);
    std::vector<double> v(current.size());
    simulate_voltage(model, current, uniform_state(model, soc.negative, soc.positive), v);
    const double rest = positive_ocp(soc.positive) - negative_ocp(soc.negative);
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, std::abs(x - rest));
    return peak;
}

double calibrate_current_amplitude(const SignalSpec& spec, double target, const SocPoint& soc,
                                   const PhysicalTheta& theta, const ParameterSet& params,
                                   const NodeCounts& nodes) {
    if (!(target > 0.0) || !std::isfinite(target)) {
        throw std::invalid_argument("target voltage amplitude must be positive");
    }
    if (spec.frequencies.empty()) throw std::invalid_argument("calibration needs at least one harmonic");
    SignalSpec s = spec;
    auto deviation = [&](double amp) {
        std::fill(s.amplitudes.begin(), s.amplitudes.end(), amp);
        return peak_voltage_deviation(s, soc, theta, params, nodes);
    };

    double lo = 0.0, hi = 1.0;
    for (int k = 0;; ++k) {
        double d = 0.0;
        try {
            d = deviation(hi);
        } catch (const SimulationError&) {
            break;  // bracket edge lies beyond the valid operating range
        }
        if (d >= target) {
            for (int it = 0; it < 200 && hi - lo > 1e-10 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                double dm = 0.0;
                try {
                    dm = deviation(mid);
                } catch (const SimulationError&) {
                    hi = mid;
                    continue;
                }
                (dm < target ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
        lo = hi;
        hi *= 2.0;
        if (k > 60) break;
    }
    throw ConvergenceError(fmt::format("no current amplitude reaches a {} V peak deviation", target));
}

double NoiseSpec::variance() const {
    const double sigma = percent / 100.0 * response_amplitude / 2.0;
    return sigma * sigma;
}

Dataset generate_dataset(const std::string& label, const SignalSpec& signal, const SocPoint& soc,
                         const PhysicalTheta& theta_true, const ParameterSet& params, const NoiseSpec& noise,
                         std::uint64_t seed, const NodeCounts& nodes) {
    if (!(noise.percent >= 0.0 && noise.response_amplitude >= 0.0)) {
        throw std::invalid_argument("noise settings must be non-negative");
    }
    Dataset d;
    d.label = label;
    d.soc = soc;
    d.signal = signal;
    d.noise = noise;
    d.noise_variance = noise.variance();
    d.seed = seed;
    d.theta_true = theta_true;
    d.theta_true.noise_variance = d.noise_variance > 0.0 ? d.noise_variance : theta_true.noise_variance;
    d.nodes = nodes;
    d.current = current_series(signal);
    d.time = signal.times();

    const auto model = assemble_model(theta_true, params, d.dt(), nodes);
    d.clean.resize(d.current.size());
    simulate_voltage(model, d.current, uniform_state(model, soc.negative, soc.positive), d.clean);

    d.noisy = d.clean;
    if (d.noise_variance > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, std::sqrt(d.noise_variance));
        for (double& y : d.noisy) y += gauss(rng);
    }
    return d;
}

std::filesystem::path meta_path(const std::filesystem::path& csv_path) {
    auto p = csv_path;
    p += ".meta";
    return p;
}

void write_dataset(const std::filesystem::path& csv_path, const Dataset& data) {
    using io::format_double;
    std::string csv = "t,current,v_clean,v_noisy\n";
    csv.reserve(data.size() * 80);
    for (std::size_t k = 0; k < data.size(); ++k) {
        csv += format_double(data.time[k]);
        csv += ',';
        csv += format_double(data.current[k]);
        csv += ',';
        csv += format_double(data.clean[k]);
        csv += ',';
        csv += format_double(data.noisy[k]);
        csv += '\n';
    }

    io::IniDocument meta;
    auto& ds = meta["dataset"];
    ds["label"] = data.label;
    ds["soc_point"] = std::to_string(data.soc.index);
    ds["negative_stoichiometry"] = format_double(data.soc.negative);
    ds["positive_stoichiometry"] = format_double(data.soc.positive);
    ds["seed"] = std::to_string(data.seed);
    ds["noise_percent"] = format_double(data.noise.percent);
    ds["response_amplitude"] = format_double(data.noise.response_amplitude);
    ds["noise_variance"] = format_double(data.noise_variance);
    ds["samples"] = std::to_string(data.size());
    auto& sg = meta["signal"];
    sg["kind"] = to_string(data.signal.kind);
    sg["sample_rate"] = format_double(data.signal.sample_rate);
    sg["duration"] = format_double(data.signal.duration);
    sg["frequencies"] = io::format_double_list(data.signal.frequencies);
    sg["amplitudes"] = io::format_double_list(data.signal.amplitudes);
    sg["bias"] = format_double(data.signal.bias);
    auto& th = meta["theta_true"];
    th["negative_diffusivity"] = format_double(data.theta_true.negative_diffusivity);
    th["positive_diffusivity"] = format_double(data.theta_true.positive_diffusivity);
    th["electrolyte_diffusivity"] = format_double(data.theta_true.electrolyte_diffusivity);
    th["transference"] = format_double(data.theta_true.transference);
    th["noise_variance"] = format_double(data.theta_true.noise_variance);
    auto& nd = meta["nodes"];
    nd["negative_particle"] = std::to_string(data.nodes.negative_particle);
    nd["positive_particle"] = std::to_string(data.nodes.positive_particle);
    nd["electrolyte_negative"] = std::to_string(data.nodes.electrolyte_negative);
    nd["electrolyte_separator"] = std::to_string(data.nodes.electrolyte_separator);
    nd["electrolyte_positive"] = std::to_string(data.nodes.electrolyte_positive);

    io::write_text_atomic(csv_path, csv);
    io::write_text_atomic(meta_path(csv_path), io::format_ini(meta));
}

namespace {

const std::string& require(const io::IniDocument& doc, const std::string& section, const std::string& key) {
    const auto s = doc.find(section);
    if (s == doc.end()) throw ConfigError("dataset metadata lacks section [" + section + "]");
    const auto k = s->second.find(key);
    if (k == s->second.end()) throw ConfigError("dataset metadata lacks " + section + "." + key);
    return k->second;
}

std::uint64_t parse_u64(const std::string& text) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("malformed unsigned integer '" + text + "'");
    return v;
}

int parse_int(const std::string& text) { return static_cast<int>(io::parse_integer(text)); }

}  // namespace

Dataset read_dataset(const std::filesystem::path& csv_path) {
    const auto meta = io::parse_ini(io::read_text(meta_path(csv_path)));
    using io::parse_double;
    Dataset d;
    d.label = require(meta, "dataset", "label");
    d.soc.index = parse_int(require(meta, "dataset", "soc_point"));
    d.soc.negative = parse_double(require(meta, "dataset", "negative_stoichiometry"));
    d.soc.positive = parse_double(require(meta, "dataset", "positive_stoichiometry"));
    d.seed = parse_u64(require(meta, "dataset", "seed"));
    d.noise.percent = parse_double(require(meta, "dataset", "noise_percent"));
    d.noise.response_amplitude = parse_double(require(meta, "dataset", "response_amplitude"));
    d.noise_variance = parse_double(require(meta, "dataset", "noise_variance"));
    d.signal.kind = parse_signal_kind(require(meta, "signal", "kind"));
    d.signal.sample_rate = parse_double(require(meta, "signal", "sample_rate"));
    d.signal.duration = parse_double(require(meta, "signal", "duration"));
    d.signal.frequencies = io::parse_double_list(require(meta, "signal", "frequencies"));
    d.signal.amplitudes = io::parse_double_list(require(meta, "signal", "amplitudes"));
    d.signal.bias = parse_double(require(meta, "signal", "bias"));
    d.theta_true.negative_diffusivity = parse_double(require(meta, "theta_true", "negative_diffusivity"));
    d.theta_true.positive_diffusivity = parse_double(require(meta, "theta_true", "positive_diffusivity"));
    d.theta_true.electrolyte_diffusivity = parse_double(require(meta, "theta_true", "electrolyte_diffusivity"));
    d.theta_true.transference = parse_double(require(meta, "theta_true", "transference"));
    d.theta_true.noise_variance = parse_double(require(meta, "theta_true", "noise_variance"));
    d.nodes.negative_particle = parse_int(require(meta, "nodes", "negative_particle"));
    d.nodes.positive_particle = parse_int(require(meta, "nodes", "positive_particle"));
    d.nodes.electrolyte_negative = parse_int(require(meta, "nodes", "electrolyte_negative"));
    d.nodes.electrolyte_separator = parse_int(require(meta, "nodes", "electrolyte_separator"));
    d.nodes.electrolyte_positive = parse_int(require(meta, "nodes", "electrolyte_positive"));
    const auto samples = parse_u64(require(meta, "dataset", "samples"));

    const std::string text = io::read_text(csv_path);
    std::size_t pos = text.find('\n');
    if (pos == std::string::npos || text.substr(0, pos) != "t,current,v_clean,v_noisy") {
        throw ConfigError("dataset csv has an unexpected header: " + csv_path.string());
    }
    ++pos;
    for (std::size_t line = 2; pos < text.size(); ++line) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        const std::string_view row(text.data() + pos, end - pos);
        std::array<double, 4> v{};
        std::size_t start = 0;
        for (std::size_t c = 0; c < 4; ++c) {
            const std::size_t comma = c < 3 ? row.find(',', start) : row.size();
            if (comma == std::string_view::npos) {
                throw ConfigError(fmt::format("{}:{}: expected 4 columns", csv_path.string(), line));
            }
            v[c] = parse_double(row.substr(start, comma - start));
            start = comma + 1;
        }
        d.time.push_back(v[0]);
        d.current.push_back(v[1]);
        d.clean.push_back(v[2]);
        d.noisy.push_back(v[3]);
        pos = end + 1;
    }
    if (d.size() != samples) {
        throw ConfigError(fmt::format("{}: {} rows, metadata says {}", csv_path.string(), d.size(), samples));
    }
    return d;
}

}  // namespace spme

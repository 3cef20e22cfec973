#pragma once

#include "spme/model.hpp"
#include "spme/parameters.hpp"
#include "spme/theta.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace spme {

enum class SignalKind { multiharmonic, biased_sinusoid, constant };

std::string to_string(SignalKind kind);
/// Throws ConfigError for unknown names.
SignalKind parse_signal_kind(const std::string& name);

/// Sampled current excitation [A/m^2]. Harmonics have zero phase.
struct SignalSpec {
    SignalKind kind = SignalKind::multiharmonic;
    double sample_rate = 4000.0;  ///< [Hz]
    double duration = 10.0;       ///< [s]
    std::vector<double> frequencies{0.1, 1.0, 10.0, 100.0};
    std::vector<double> amplitudes{1.0, 1.0, 1.0, 1.0};
    double bias = 0.0;

    /// Throws ConfigError: Nyquist violation, duration shorter than one
    /// period of the lowest frequency, mismatched lists, non-finite values.
    void validate() const;
    std::size_t sample_count() const;
    std::vector<double> times() const;
    bool operator==(const SignalSpec&) const = default;
};

/// Zero-bias four-decade multiharmonic, 10 s at 4 kHz, unit amplitudes.
SignalSpec default_local_signal();
/// 1C bias with a C/24 sinusoid at 1 mHz, 1000 s at 1 Hz.
SignalSpec default_wide_signal();

std::vector<double> multiharmonic_current(const SignalSpec& spec);
std::vector<double> biased_sinusoid_current(const SignalSpec& spec);
/// Dispatches on spec.kind.
std::vector<double> current_series(const SignalSpec& spec);

/// Initial stoichiometries of one excitation point.
struct SocPoint {
    int index = 0;  ///< 1-based
    double negative = 0.0;
    double positive = 0.0;
};

/// The eleven equispaced excitation points.
std::vector<SocPoint> soc_points();
/// Throws ConfigError when index is not in 1..11.
SocPoint soc_point(int index);

/// Largest |V - V_rest| of the noise-free response, V_rest the open-circuit voltage.
double peak_voltage_deviation(const SignalSpec& spec, const SocPoint& soc, const PhysicalTheta& theta,
                              const ParameterSet& params, const NodeCounts& nodes = {});

/// Common per-harmonic amplitude for which the peak voltage deviation hits
/// `target` [V]. Bisection on a bracket grown by doubling. Throws
/// std::invalid_argument for target <= 0 and ConvergenceError when no
/// amplitude in the reachable bracket attains the target.
double calibrate_current_amplitude(const SignalSpec& spec, double target, const SocPoint& soc,
                                   const PhysicalTheta& theta, const ParameterSet& params,
                                   const NodeCounts& nodes = {});

struct NoiseSpec {
    double percent = 1.0;               ///< two-sigma error as % of the response amplitude
    double response_amplitude = 8e-3;   ///< [V]
    /// sigma = (percent / 100) * amplitude / 2.
    double variance() const;
};

struct Dataset {
    std::string label;  ///< "point_05" or "wide"
    SocPoint soc;
    SignalSpec signal;
    NoiseSpec noise;
    double noise_variance = 0.0;  ///< injected sigma^2 [V^2]
    std::uint64_t seed = 0;
    PhysicalTheta theta_true{};
    NodeCounts nodes;
    std::vector<double> time, current, clean, noisy;

    std::size_t size() const { return time.size(); }
    /// Inverse of the sampling interval used to build the model.
    double dt() const { return 1.0 / signal.sample_rate; }
};

/// Simulates the clean response and adds i.i.d. Gaussian noise drawn from `seed`.
/// SimulationError propagates.
Dataset generate_dataset(const std::string& label, const SignalSpec& signal, const SocPoint& soc,
                         const PhysicalTheta& theta_true, const ParameterSet& params, const NoiseSpec& noise,
                         std::uint64_t seed, const NodeCounts& nodes = {});

/// CSV (t, current, v_clean, v_noisy) plus a sidecar `<path>.meta`.
void write_dataset(const std::filesystem::path& csv_path, const Dataset& data);
/// Throws ConfigError on malformed files.
Dataset read_dataset(const std::filesystem::path& csv_path);
std::filesystem::path meta_path(const std::filesystem::path& csv_path);

}  // namespace spme

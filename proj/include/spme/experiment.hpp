#pragma once

#include "spme/bayes.hpp"
#include "spme/excitation.hpp"
#include "spme/freq.hpp"
#include "spme/model.hpp"
#include "spme/parameters.hpp"
#include "spme/theta.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace spme {

enum class ExperimentKind { local, wide, both };
enum class FitMethod { mcmc, mle, both };

std::string to_string(ExperimentKind kind);
std::string to_string(FitMethod method);
/// Throw ConfigError for unknown names.
ExperimentKind parse_experiment_kind(const std::string& name);
FitMethod parse_fit_method(const std::string& name);

/// Everything needed to reproduce a study. Defaults give the desk-scale
/// study: 11 local points plus the wide excursion.
struct ExperimentConfig {
    std::filesystem::path parameter_file;  ///< empty: built-in parameter set
    PhysicalTheta theta_true = default_true_theta();  ///< noise_variance follows `noise`
    ExperimentKind kind = ExperimentKind::both;
    std::vector<int> points{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
    int wide_point = 5;
    SignalSpec local_signal = default_local_signal();
    bool calibrate = true;            ///< rescale local amplitudes to target_deviation
    double target_deviation = 8e-3;   ///< [V]
    SignalSpec wide_signal = default_wide_signal();
    NoiseSpec noise;
    NodeCounts nodes;
    std::uint64_t seed = 1;
    ChainConfig mcmc;                 ///< seed is derived per dataset
    double prior_p99 = 100.0;
    MleOptions mle;
    double mle_init_fraction = 0.1;
    double fd_step = 1e-4;
    std::size_t histogram_bins = 50;
    std::filesystem::path output_dir = "spme_output";

    /// Throws ConfigError on inconsistent settings.
    void validate() const;
    ParameterSet parameters() const;
    PhysicalTheta truth() const;  ///< theta_true with the injected noise variance
};

/// Environment variable that overrides output_dir.
inline constexpr const char* output_dir_variable = "SPME_OUTPUT_DIR";

/// Sectioned key = value text. Absent keys keep their defaults; unknown
/// sections or keys are ConfigErrors. Relative parameter_file paths resolve
/// against `base_dir`.
ExperimentConfig parse_experiment_config(std::string_view text, const std::filesystem::path& base_dir = {});
/// Reads the file and applies the output directory override.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
std::string format_experiment_config(const ExperimentConfig& config);

/// One dataset of the study: local point (1..11) or the wide excursion.
struct ExperimentEntry {
    std::string label;  ///< point_01 .. point_11 or wide
    bool wide = false;
    int point = 0;      ///< SoC point index
    std::uint64_t stream = 0;  ///< seed stream index, 0 for the wide excursion
};

/// Entries selected by kind and points, optionally restricted to one local
/// point ("N") or to "wide". Throws ConfigError for a selector outside the
/// configured study.
std::vector<ExperimentEntry> select_entries(const ExperimentConfig& config, const std::optional<std::string>& only = {});

std::filesystem::path dataset_path(const ExperimentConfig& config, const std::string& label);
std::filesystem::path chain_path(const ExperimentConfig& config, const std::string& label);
std::filesystem::path mle_path(const ExperimentConfig& config, const std::string& label);
std::filesystem::path summary_dir(const ExperimentConfig& config);

/// Seeds for the named sub-streams of one entry.
std::uint64_t dataset_seed(const ExperimentConfig& config, const ExperimentEntry& entry);
std::uint64_t chain_seed(const ExperimentConfig& config, const ExperimentEntry& entry);
std::uint64_t mle_seed(const ExperimentConfig& config, const ExperimentEntry& entry);

struct RunOptions {
    std::optional<std::string> only;
    std::size_t workers = 1;
    std::ostream* log = nullptr;  ///< one line per finished job
};

/// Builds (and calibrates) the dataset of one entry.
Dataset make_dataset(const ExperimentConfig& config, const ExperimentEntry& entry);

/// Writes datasets and datasets/manifest.txt; returns the dataset paths.
std::vector<std::filesystem::path> run_generate(const ExperimentConfig& config, const RunOptions& options = {});

/// MCMC chain for one dataset.
Chain fit_mcmc(const ExperimentConfig& config, const ExperimentEntry& entry, const Dataset& data);
/// MLE from a seeded start within +-mle_init_fraction of the truth, then
/// Fisher analysis. A capped simplex keeps its best point (converged = false).
FimResult fit_mle(const ExperimentConfig& config, const ExperimentEntry& entry, const Dataset& data);

/// Throws std::runtime_error naming the first missing dataset file.
void run_fit(const ExperimentConfig& config, FitMethod method, const RunOptions& options = {});

struct SummaryColumn {
    std::string label;
    std::optional<PosteriorSummary> posterior;
    std::optional<FimResult> mle;
};

struct SummaryTable {
    std::vector<SummaryColumn> columns;
    /// Rows (D_n, D_p, D_e, t_plus, sigma2) x (theta_MMSE, sigma_MCMC,
    /// theta_MLE, sigma_CRLB); NaN where the column lacks that output.
    double value(std::size_t column, std::size_t parameter, std::size_t statistic) const;
};

inline constexpr std::array<const char*, 4> summary_statistics{"theta_MMSE", "sigma_MCMC", "theta_MLE", "sigma_CRLB"};

/// Collects fit outputs of the selected entries. Throws std::runtime_error
/// when none exist.
SummaryTable collect_summary(const ExperimentConfig& config, const std::optional<std::string>& only = {},
                             std::optional<std::size_t> bins = {});
std::string format_summary_text(const SummaryTable& table);
std::string format_summary_csv(const SummaryTable& table);

/// Writes summary/table.txt, summary/table.csv and histogram CSVs.
SummaryTable run_summarize(const ExperimentConfig& config, const RunOptions& options = {},
                           std::optional<std::size_t> bins = {});

}  // namespace spme

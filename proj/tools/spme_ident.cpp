#include "spme/errors.hpp"
#include "spme/experiment.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Identifiability study of the single particle model with electrolyte"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::optional<std::string> only;
    std::string method = "both";
    std::size_t workers = 1;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> bins;

    app.add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
    app.add_option("--only-point", only, "Restrict to one local point (1..11) or 'wide'");
    app.add_option("--method", method, "Inference for fit")->check(CLI::IsMember({"mcmc", "mle", "both"}));
    app.add_option("--workers", workers, "Concurrent jobs")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Override the base seed");
    app.add_option("--bins", bins, "Histogram bins for summarize")->check(CLI::PositiveNumber);

    auto* generate = app.add_subcommand("generate", "Write synthetic datasets and a manifest")->fallthrough();
    auto* fit = app.add_subcommand("fit", "Run MCMC and/or MLE on the datasets")->fallthrough();
    auto* summarize = app.add_subcommand("summarize", "Write the estimate table and histogram data")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    spme::ExperimentConfig config;
    try {
        config = spme::load_experiment_config(config_path);
        if (seed) config.seed = *seed;
        spme::select_entries(config, only);
    } catch (const spme::ConfigError& e) {
        std::cerr << "spme-ident: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "spme-ident: " << e.what() << '\n';
        return kRuntimeFailure;
    }

    spme::RunOptions options;
    options.only = only;
    options.workers = workers;
    options.log = &std::cout;
    try {
        if (generate->parsed()) {
            for (const auto& path : spme::run_generate(config, options)) std::cout << path.string() << '\n';
        } else if (fit->parsed()) {
            spme::run_fit(config, spme::parse_fit_method(method), options);
        } else if (summarize->parsed()) {
            spme::run_summarize(config, options, bins);
        }
    } catch (const spme::ConfigError& e) {
        std::cerr << "spme-ident: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "spme-ident: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    return 0;
}

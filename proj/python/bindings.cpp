#include "spme/bayes.hpp"
#include "spme/errors.hpp"
#include "spme/excitation.hpp"
#include "spme/experiment.hpp"
#include "spme/freq.hpp"
#include "spme/model.hpp"
#include "spme/ocp.hpp"
#include "spme/parameters.hpp"
#include "spme/residuals.hpp"
#include "spme/theta.hpp"
#include "spme/voltage.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace spme;

namespace {

py::array_t<double> to_numpy(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::array<double, 5> scaled_of(const PhysicalTheta& t) { return ThetaVector::from_physical(t).values(); }

PhysicalTheta physical_of(const std::array<double, 5>& scaled) { return ThetaVector(scaled).to_physical(); }

std::vector<double> simulate_at(const PhysicalTheta& theta, const std::vector<double>& current, const SocPoint& soc,
                                double dt, const ParameterSet& params, const NodeCounts& nodes) {
    const auto m = assemble_model(theta, params, dt, nodes);
    return simulate(m, current, uniform_state(m, soc.negative, soc.positive)).voltage;
}

RunOptions run_options(std::optional<std::string> only, std::size_t workers) {
    RunOptions o;
    o.only = std::move(only);
    o.workers = workers;
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Single particle model with electrolyte: simulation and parameter identification";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<NonIdentifiableError>(m, "NonIdentifiableError", PyExc_RuntimeError);

    // model-core
    py::class_<ParameterSet>(m, "ParameterSet")
        .def(py::init<>())
        .def_readwrite("typical_current", &ParameterSet::typical_current)
        .def_readwrite("temperature", &ParameterSet::temperature)
        .def_readwrite("transference", &ParameterSet::transference)
        .def_readwrite("electrolyte_concentration", &ParameterSet::electrolyte_concentration)
        .def("thermal_voltage", &ParameterSet::thermal_voltage)
        .def("validate", &ParameterSet::validate);
    m.def("load_parameters", &load_parameters, py::arg("path"));
    m.def("save_parameters", &save_parameters, py::arg("params"), py::arg("path"));

    py::class_<PhysicalTheta>(m, "PhysicalTheta")
        .def(py::init([](double dn, double dp, double de, double t, double s2) {
                 return PhysicalTheta{dn, dp, de, t, s2};
             }),
             py::arg("negative_diffusivity"), py::arg("positive_diffusivity"), py::arg("electrolyte_diffusivity"),
             py::arg("transference"), py::arg("noise_variance"))
        .def_readwrite("negative_diffusivity", &PhysicalTheta::negative_diffusivity)
        .def_readwrite("positive_diffusivity", &PhysicalTheta::positive_diffusivity)
        .def_readwrite("electrolyte_diffusivity", &PhysicalTheta::electrolyte_diffusivity)
        .def_readwrite("transference", &PhysicalTheta::transference)
        .def_readwrite("noise_variance", &PhysicalTheta::noise_variance)
        .def("valid", &PhysicalTheta::valid)
        .def("scaled", &scaled_of, "(D_n 1e14, D_p 1e13, D_e 1e10, t+, ln sigma^2)")
        .def_static("from_scaled", &physical_of, py::arg("scaled"))
        .def("__eq__", [](const PhysicalTheta& a, const PhysicalTheta& b) { return a == b; });
    m.def("default_true_theta", &default_true_theta);
    m.def("reported", [](const std::array<double, 5>& s) { return reported(ThetaVector(s)); }, py::arg("scaled"),
          "Scaled D's and t+ with sigma^2 in 1e-9 V^2");
    m.attr("parameter_labels") = std::vector<std::string>(parameter_labels.begin(), parameter_labels.end());

    m.def("negative_ocp", &negative_ocp, py::arg("stoichiometry"));
    m.def("positive_ocp", &positive_ocp, py::arg("stoichiometry"));
    m.def("exchange_current_density", &exchange_current_density, py::arg("reaction_rate"),
          py::arg("surface_concentration"), py::arg("max_concentration"), py::arg("electrolyte_concentration"));
    m.def("reaction_overpotential", &reaction_overpotential, py::arg("current"), py::arg("surface_area"),
          py::arg("thickness"), py::arg("j0"), py::arg("thermal_voltage"));
    m.def("concentration_overpotential", &concentration_overpotential, py::arg("electrolyte_positive"),
          py::arg("electrolyte_negative"), py::arg("transference"), py::arg("params"));
    m.def("ohmic_losses",
          [](double current, const ParameterSet& p) {
              const auto o = ohmic_losses(current, p);
              return py::make_tuple(o.electrolyte, o.solid);
          },
          py::arg("current"), py::arg("params"), "(electrolyte, solid) potential drops [V]");

    // discretization
    py::class_<NodeCounts>(m, "NodeCounts")
        .def(py::init<>())
        .def_readwrite("negative_particle", &NodeCounts::negative_particle)
        .def_readwrite("positive_particle", &NodeCounts::positive_particle)
        .def_readwrite("electrolyte_negative", &NodeCounts::electrolyte_negative)
        .def_readwrite("electrolyte_separator", &NodeCounts::electrolyte_separator)
        .def_readwrite("electrolyte_positive", &NodeCounts::electrolyte_positive)
        .def("doubled", &NodeCounts::doubled);
    m.def("simulate", &simulate_at, py::arg("theta"), py::arg("current"), py::arg("soc"), py::arg("dt"),
          py::arg("params") = ParameterSet{}, py::arg("nodes") = NodeCounts{},
          "Terminal voltage for a current series from rest at the given stoichiometries",
          py::call_guard<py::gil_scoped_release>());

    // excitation
    py::enum_<SignalKind>(m, "SignalKind")
        .value("multiharmonic", SignalKind::multiharmonic)
        .value("biased_sinusoid", SignalKind::biased_sinusoid)
        .value("constant", SignalKind::constant);
    py::class_<SignalSpec>(m, "SignalSpec")
        .def(py::init<>())
        .def_readwrite("kind", &SignalSpec::kind)
        .def_readwrite("sample_rate", &SignalSpec::sample_rate)
        .def_readwrite("duration", &SignalSpec::duration)
        .def_readwrite("frequencies", &SignalSpec::frequencies)
        .def_readwrite("amplitudes", &SignalSpec::amplitudes)
        .def_readwrite("bias", &SignalSpec::bias)
        .def("validate", &SignalSpec::validate)
        .def("sample_count", &SignalSpec::sample_count)
        .def("times", [](const SignalSpec& s) { return to_numpy(s.times()); });
    m.def("default_local_signal", &default_local_signal);
    m.def("default_wide_signal", &default_wide_signal);
    m.def("current_series", [](const SignalSpec& s) { return to_numpy(current_series(s)); }, py::arg("spec"));

    py::class_<SocPoint>(m, "SocPoint")
        .def_readonly("index", &SocPoint::index)
        .def_readonly("negative", &SocPoint::negative)
        .def_readonly("positive", &SocPoint::positive);
    m.def("soc_point", &soc_point, py::arg("index"));
    m.def("soc_points", &soc_points);
    m.def("calibrate_current_amplitude", &calibrate_current_amplitude, py::arg("spec"), py::arg("target"),
          py::arg("soc"), py::arg("theta"), py::arg("params") = ParameterSet{}, py::arg("nodes") = NodeCounts{});

    py::class_<NoiseSpec>(m, "NoiseSpec")
        .def(py::init<>())
        .def_readwrite("percent", &NoiseSpec::percent)
        .def_readwrite("response_amplitude", &NoiseSpec::response_amplitude)
        .def("variance", &NoiseSpec::variance);

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("label", &Dataset::label)
        .def_readonly("soc", &Dataset::soc)
        .def_readonly("signal", &Dataset::signal)
        .def_readonly("noise_variance", &Dataset::noise_variance)
        .def_readonly("seed", &Dataset::seed)
        .def_readonly("theta_true", &Dataset::theta_true)
        .def_property_readonly("time", [](const Dataset& d) { return to_numpy(d.time); })
        .def_property_readonly("current", [](const Dataset& d) { return to_numpy(d.current); })
        .def_property_readonly("clean", [](const Dataset& d) { return to_numpy(d.clean); })
        .def_property_readonly("noisy", [](const Dataset& d) { return to_numpy(d.noisy); })
        .def("__len__", &Dataset::size);
    m.def("generate_dataset", &generate_dataset, py::arg("label"), py::arg("signal"), py::arg("soc"),
          py::arg("theta_true"), py::arg("params") = ParameterSet{}, py::arg("noise") = NoiseSpec{},
          py::arg("seed") = 1, py::arg("nodes") = NodeCounts{}, py::call_guard<py::gil_scoped_release>());
    m.def("write_dataset", &write_dataset, py::arg("path"), py::arg("data"));
    m.def("read_dataset", &read_dataset, py::arg("path"));

    // inference-bayes
    py::class_<GammaPrior>(m, "GammaPrior")
        .def_readonly("shape", &GammaPrior::shape)
        .def_readonly("scale", &GammaPrior::scale);
    m.def("fit_gamma_prior", &fit_gamma_prior, py::arg("mode"), py::arg("p99_value") = 100.0,
          py::arg("probability") = 0.99);
    py::class_<PriorSpec>(m, "PriorSpec")
        .def_readonly("negative_diffusivity", &PriorSpec::negative_diffusivity)
        .def_readonly("positive_diffusivity", &PriorSpec::positive_diffusivity)
        .def_readonly("electrolyte_diffusivity", &PriorSpec::electrolyte_diffusivity)
        .def_readonly("beta_alpha", &PriorSpec::beta_alpha)
        .def_readonly("beta_beta", &PriorSpec::beta_beta);
    m.def("default_priors", &default_priors, py::arg("truth"), py::arg("p99_value") = 100.0);
    m.def("log_prior", [](const std::array<double, 5>& s, const PriorSpec& p) { return log_prior(ThetaVector(s), p); },
          py::arg("scaled"), py::arg("priors"));

    py::class_<RamhSettings>(m, "RamhSettings")
        .def(py::init<>())
        .def_readwrite("target_acceptance", &RamhSettings::target_acceptance)
        .def_readwrite("gamma", &RamhSettings::gamma)
        .def_readwrite("dimension_scaled", &RamhSettings::dimension_scaled)
        .def_readwrite("adapt", &RamhSettings::adapt);
    m.def(
        "run_ramh",
        [](const std::function<double(const Eigen::VectorXd&)>& log_density, const Eigen::VectorXd& start,
           const Eigen::MatrixXd& initial_factor, std::size_t iterations, std::uint64_t seed,
           const RamhSettings& settings) {
            auto r = run_ramh(log_density, start, initial_factor, iterations, seed, settings);
            py::dict out;
            out["samples"] = r.samples;
            out["accepted"] = std::vector<int>(r.accepted.begin(), r.accepted.end());
            out["final_factor"] = r.final_factor;
            return out;
        },
        py::arg("log_density"), py::arg("start"), py::arg("initial_factor"), py::arg("iterations"),
        py::arg("seed"), py::arg("settings") = RamhSettings{});

    py::enum_<ChainStart>(m, "ChainStart").value("prior", ChainStart::prior).value("optimized", ChainStart::optimized);
    py::class_<ChainConfig>(m, "ChainConfig")
        .def(py::init<>())
        .def_readwrite("iterations", &ChainConfig::iterations)
        .def_readwrite("burn_in", &ChainConfig::burn_in)
        .def_readwrite("seed", &ChainConfig::seed)
        .def_readwrite("initial_covariance", &ChainConfig::initial_covariance)
        .def_readwrite("ramh", &ChainConfig::ramh)
        .def_readwrite("start", &ChainConfig::start)
        .def_readwrite("start_candidates", &ChainConfig::start_candidates)
        .def_readwrite("start_refinements", &ChainConfig::start_refinements);
    py::class_<Chain>(m, "Chain")
        .def_readonly("samples", &Chain::samples)
        .def_property_readonly("accepted",
                               [](const Chain& c) { return std::vector<int>(c.accepted.begin(), c.accepted.end()); })
        .def_readonly("burn_in", &Chain::burn_in)
        .def_readonly("seed", &Chain::seed)
        .def_readonly("dataset", &Chain::dataset)
        .def("acceptance_rate", &Chain::acceptance_rate, py::arg("start") = 0)
        .def("__len__", &Chain::size);
    m.def("run_chain", &run_chain, py::arg("config"), py::arg("data"), py::arg("params"), py::arg("priors"),
          py::call_guard<py::gil_scoped_release>());
    m.def("write_chain", &write_chain, py::arg("path"), py::arg("chain"));
    m.def("read_chain", &read_chain, py::arg("path"));
    m.def("reported_samples", &reported_samples, py::arg("scaled"));

    py::class_<PosteriorSummary>(m, "PosteriorSummary")
        .def_readonly("mmse", &PosteriorSummary::mmse)
        .def_readonly("std", &PosteriorSummary::std)
        .def_readonly("acceptance_rate", &PosteriorSummary::acceptance_rate)
        .def_readonly("samples", &PosteriorSummary::samples);
    m.def("summarize", &summarize, py::arg("chain"), py::arg("burn_in"), py::arg("bins") = 50);

    // inference-freq
    py::class_<MleResult>(m, "MleResult")
        .def_property_readonly("theta", [](const MleResult& r) { return r.theta.values(); })
        .def_readonly("rss", &MleResult::rss)
        .def_readonly("evaluations", &MleResult::evaluations)
        .def_readonly("converged", &MleResult::converged);
    py::class_<FimResult>(m, "FimResult")
        .def_property_readonly("theta", [](const FimResult& r) { return r.theta.values(); })
        .def_readonly("fim", &FimResult::fim)
        .def_readonly("covariance", &FimResult::covariance)
        .def_readonly("sigma", &FimResult::sigma)
        .def_readonly("identifiable", &FimResult::identifiable)
        .def_readonly("diagnosis", &FimResult::diagnosis)
        .def_readonly("converged", &FimResult::converged);
    m.def(
        "mle",
        [](const Dataset& data, const std::array<double, 5>& start, const ParameterSet& params, double fd_step) {
            VoltageResiduals residuals(data, params);
            MleResult estimate;
            try {
                estimate = mle(residuals, ThetaVector(start));
            } catch (const MleNotConverged& e) {
                estimate = e.best();
            }
            return fisher_analysis(residuals, estimate, fd_step);
        },
        py::arg("data"), py::arg("start"), py::arg("params") = ParameterSet{}, py::arg("fd_step") = 1e-4,
        "Simplex MLE from a scaled start followed by Fisher analysis", py::call_guard<py::gil_scoped_release>());
    m.def("crlb",
          [](const Eigen::MatrixXd& fim) {
              auto c = crlb(fim);
              return py::make_tuple(c.covariance, c.sigma);
          },
          py::arg("fim"));

    // cli-level study
    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("output_dir", &ExperimentConfig::output_dir)
        .def_readwrite("seed", &ExperimentConfig::seed)
        .def_readwrite("points", &ExperimentConfig::points)
        .def_readwrite("wide_point", &ExperimentConfig::wide_point)
        .def_readwrite("local_signal", &ExperimentConfig::local_signal)
        .def_readwrite("wide_signal", &ExperimentConfig::wide_signal)
        .def_readwrite("noise", &ExperimentConfig::noise)
        .def_readwrite("mcmc", &ExperimentConfig::mcmc)
        .def_readwrite("histogram_bins", &ExperimentConfig::histogram_bins)
        .def_property(
            "kind", [](const ExperimentConfig& c) { return to_string(c.kind); },
            [](ExperimentConfig& c, const std::string& k) { c.kind = parse_experiment_kind(k); })
        .def("validate", &ExperimentConfig::validate)
        .def("truth", &ExperimentConfig::truth)
        .def("format", &format_experiment_config);
    m.def("parse_experiment_config", &parse_experiment_config, py::arg("text"),
          py::arg("base_dir") = std::filesystem::path{});
    m.def("load_experiment_config", &load_experiment_config, py::arg("path"));
    m.def(
        "run_generate",
        [](const ExperimentConfig& c, std::optional<std::string> only, std::size_t workers) {
            return run_generate(c, run_options(std::move(only), workers));
        },
        py::arg("config"), py::arg("only") = py::none(), py::arg("workers") = 1,
        py::call_guard<py::gil_scoped_release>());
    m.def(
        "run_fit",
        [](const ExperimentConfig& c, const std::string& method, std::optional<std::string> only,
           std::size_t workers) { run_fit(c, parse_fit_method(method), run_options(std::move(only), workers)); },
        py::arg("config"), py::arg("method") = "both", py::arg("only") = py::none(), py::arg("workers") = 1,
        py::call_guard<py::gil_scoped_release>());
    m.def(
        "run_summarize",
        [](const ExperimentConfig& c, std::optional<std::string> only, std::optional<std::size_t> bins) {
            return format_summary_text(run_summarize(c, run_options(std::move(only), 1), bins));
        },
        py::arg("config"), py::arg("only") = py::none(), py::arg("bins") = py::none(),
        "Writes the summary files and returns the text table", py::call_guard<py::gil_scoped_release>());
}

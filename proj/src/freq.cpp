#include "spme/freq.hpp"

#include "spme/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace spme {

namespace {

constexpr Eigen::Index kPhysical = 4;

Eigen::VectorXd to_scaled(const Eigen::VectorXd& u) {
    Eigen::VectorXd s(kPhysical);
    for (Eigen::Index i = 0; i < 3; ++i) s(i) = std::exp(u(i));
    // Saturated logits stay inside the open interval.
    constexpr double lo = std::numeric_limits<double>::min();
    s(3) = std::clamp(1.0 / (1.0 + std::exp(-u(3))), lo, std::nextafter(1.0, 0.0));
    return s;
}

ThetaVector theta_from(const Eigen::VectorXd& scaled, double log_noise) {
    return ThetaVector({scaled(0), scaled(1), scaled(2), scaled(3), log_noise});
}

MleResult make_result(VoltageResiduals& residuals, const NelderMeadResult& r, std::size_t iterations,
                      std::size_t evaluations) {
    MleResult out;
    out.rss = r.value;
    const double variance =
        std::max(r.value / static_cast<double>(residuals.data().size()), std::numeric_limits<double>::min());
    out.theta = theta_from(to_scaled(r.x), std::log(variance));
    out.iterations = iterations;
    out.evaluations = evaluations;
    out.converged = r.converged;
    return out;
}

}  // namespace

MleResult mle(VoltageResiduals& residuals, const ThetaVector& init, const MleOptions& options) {
    ThetaVector probe = init;
    probe[ThetaVector::log_noise] = 0.0;
    if (!probe.valid()) throw std::invalid_argument("MLE start outside the parameter support");

    Eigen::VectorXd u(kPhysical);
    for (Eigen::Index i = 0; i < 3; ++i) u(i) = std::log(init[static_cast<std::size_t>(i)]);
    const double t = init[ThetaVector::transference];
    u(3) = std::log(t / (1.0 - t));

    const Objective objective = [&](const Eigen::VectorXd& x) {
        return residuals.residual_sum_of_squares(theta_from(to_scaled(x), 0.0).to_physical());
    };
    std::size_t iterations = 0, evaluations = 0;
    NelderMeadResult r;
    for (int pass = 0; pass <= std::max(options.restarts, 0); ++pass) {
        r = nelder_mead(objective, u, options.simplex, to_scaled);
        iterations += r.iterations;
        evaluations += r.evaluations;
        if (!r.converged) {
            throw MleNotConverged(fmt::format("simplex not converged after {} evaluations", evaluations),
                                  make_result(residuals, r, iterations, evaluations));
        }
        u = r.x;
    }
    return make_result(residuals, r, iterations, evaluations);
}

ThetaVector random_mle_start(const ThetaVector& truth, std::mt19937_64& rng, double fraction) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    ThetaVector out = truth;
    for (std::size_t i = 0; i < 4; ++i) out[i] = truth[i] * (1.0 + fraction * unit(rng));
    constexpr double margin = 1e-6;
    out[ThetaVector::transference] = std::clamp(out[ThetaVector::transference], margin, 1.0 - margin);
    return out;
}

Eigen::MatrixXd jacobian_fd(const VectorFunction& f, const Eigen::VectorXd& theta, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    Eigen::MatrixXd jac;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        const double h = theta(i) != 0.0 ? step * std::abs(theta(i)) : step;
        Eigen::VectorXd plus = theta, minus = theta;
        plus(i) += h;
        minus(i) -= h;
        const Eigen::VectorXd fp = f(plus);
        const Eigen::VectorXd fm = f(minus);
        if (!fp.allFinite() || !fm.allFinite() || fp.size() != fm.size()) {
            throw DomainError(fmt::format("non-finite model output perturbing coordinate {}", i));
        }
        if (i == 0) jac.resize(fp.size(), theta.size());
        jac.col(i) = (fp - fm) / (2.0 * h);
    }
    return jac;
}

Eigen::MatrixXd fisher_information(const Eigen::MatrixXd& jacobian, double noise_variance, std::size_t n,
                                   bool include_noise) {
    if (!(noise_variance > 0.0)) throw std::invalid_argument("noise variance must be positive");
    const Eigen::Index p = jacobian.cols();
    const Eigen::Index d = include_noise ? p + 1 : p;
    Eigen::MatrixXd fim = Eigen::MatrixXd::Zero(d, d);
    const Eigen::MatrixXd block = jacobian.transpose() * jacobian / noise_variance;
    fim.topLeftCorner(p, p) = 0.5 * (block + block.transpose());
    if (include_noise) fim(p, p) = static_cast<double>(n) / (2.0 * noise_variance * noise_variance);
    return fim;
}

Crlb crlb(const Eigen::MatrixXd& fim, double max_condition, const std::vector<std::string>& labels) {
    if (fim.rows() != fim.cols() || fim.rows() == 0) throw std::invalid_argument("FIM must be square");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(fim, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    const Eigen::Index last = s.size() - 1;
    const double condition = s(last) > 0.0 ? s(0) / s(last) : std::numeric_limits<double>::infinity();
    if (!(condition <= max_condition)) {
        const Eigen::VectorXd v = svd.matrixV().col(last);
        std::string direction;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const auto name = static_cast<std::size_t>(i) < labels.size() ? labels[static_cast<std::size_t>(i)]
                                                                         : fmt::format("p{}", i);
            direction += fmt::format("{}{:+.4f} {}", i ? " " : "", v(i), name);
        }
        throw NonIdentifiableError(
            fmt::format("Fisher information condition number {:.3g}; null direction {}", condition, direction));
    }
    Crlb out;
    const Eigen::MatrixXd inv = svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
    out.covariance = 0.5 * (inv + inv.transpose());
    out.sigma = out.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    return out;
}

FimResult fisher_analysis(VoltageResiduals& residuals, const MleResult& estimate, double step) {
    const std::size_t n = residuals.data().size();
    const double log_noise = estimate.theta[ThetaVector::log_noise];
    const VectorFunction voltage = [&](const Eigen::VectorXd& scaled) {
        const auto& v = residuals.simulate(theta_from(scaled, log_noise).to_physical());
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    Eigen::VectorXd centre(kPhysical);
    for (Eigen::Index i = 0; i < kPhysical; ++i) centre(i) = estimate.theta[static_cast<std::size_t>(i)];
    FimResult out;
    out.dataset = residuals.data().label;
    out.theta = estimate.theta;
    out.rss = estimate.rss;
    out.iterations = estimate.iterations;
    out.evaluations = estimate.evaluations;
    out.converged = estimate.converged;

    // An estimate at the edge of the support has no central-difference
    // stencil; report it instead of failing the run.
    Eigen::MatrixXd jac;
    try {
        jac = jacobian_fd(voltage, centre, step);
    } catch (const std::exception& e) {
        out.identifiable = false;
        out.diagnosis = std::string("Jacobian not available at the estimate: ") + e.what();
        out.sigma = Eigen::VectorXd::Constant(kPhysical + 1, std::numeric_limits<double>::infinity());
        return out;
    }

    // Noise coordinate in reported units.
    const double variance = std::exp(log_noise);
    Eigen::MatrixXd fim = fisher_information(jac, variance, n);
    fim(kPhysical, kPhysical) *= reported_noise_unit * reported_noise_unit;
    out.fim = fim;
    try {
        auto c = crlb(fim, 1e12, {parameter_labels.begin(), parameter_labels.end()});
        out.covariance = std::move(c.covariance);
        out.sigma = std::move(c.sigma);
    } catch (const NonIdentifiableError& e) {
        out.identifiable = false;
        out.diagnosis = e.what();
        out.sigma = Eigen::VectorXd::Constant(fim.rows(), std::numeric_limits<double>::infinity());
    }
    return out;
}

namespace {

std::string format_row(const Eigen::MatrixXd& m, Eigen::Index row) {
    std::vector<double> v(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) v[static_cast<std::size_t>(j)] = m(row, j);
    return io::format_double_list(v);
}

Eigen::MatrixXd read_matrix(const io::IniDocument& doc, const std::string& section) {
    const auto s = doc.find(section);
    if (s == doc.end()) return {};
    Eigen::MatrixXd m;
    for (std::size_t i = 0;; ++i) {
        const auto it = s->second.find(fmt::format("row{}", i));
        if (it == s->second.end()) break;
        const auto v = io::parse_double_list(it->second);
        if (i == 0) m.resize(0, static_cast<Eigen::Index>(v.size()));
        if (static_cast<Eigen::Index>(v.size()) != m.cols()) throw ConfigError(section + ": ragged matrix");
        m.conservativeResize(m.rows() + 1, Eigen::NoChange);
        for (std::size_t j = 0; j < v.size(); ++j) m(m.rows() - 1, static_cast<Eigen::Index>(j)) = v[j];
    }
    return m;
}

}  // namespace

void write_fim_result(const std::filesystem::path& path, const FimResult& result) {
    io::IniDocument doc;
    auto& head = doc["result"];
    head["dataset"] = result.dataset;
    head["identifiable"] = result.identifiable ? "true" : "false";
    if (!result.diagnosis.empty()) head["diagnosis"] = result.diagnosis;
    std::vector<double> theta(result.theta.values().begin(), result.theta.values().end());
    head["theta_scaled"] = io::format_double_list(theta);

    const auto rep = reported(result.theta);
    for (std::size_t i = 0; i < rep.size(); ++i) {
        doc["theta_mle"][parameter_labels[i]] = io::format_double(rep[i]);
        if (static_cast<Eigen::Index>(i) < result.sigma.size()) {
            doc["sigma_crlb"][parameter_labels[i]] = io::format_double(result.sigma(static_cast<Eigen::Index>(i)));
        }
    }
    auto& opt = doc["optimizer"];
    opt["rss"] = io::format_double(result.rss);
    opt["iterations"] = std::to_string(result.iterations);
    opt["evaluations"] = std::to_string(result.evaluations);
    opt["converged"] = result.converged ? "true" : "false";
    for (Eigen::Index i = 0; i < result.fim.rows(); ++i) doc["fim"][fmt::format("row{}", i)] = format_row(result.fim, i);
    for (Eigen::Index i = 0; i < result.covariance.rows(); ++i) {
        doc["covariance"][fmt::format("row{}", i)] = format_row(result.covariance, i);
    }
    io::write_text_atomic(path, io::format_ini(doc));
}

FimResult read_fim_result(const std::filesystem::path& path) {
    const auto doc = io::parse_ini(io::read_text(path));
    auto get = [&](const std::string& section, const std::string& key) -> const std::string& {
        const auto s = doc.find(section);
        if (s == doc.end() || !s->second.contains(key)) throw ConfigError(path.string() + ": missing " + section + "." + key);
        return s->second.at(key);
    };
    auto flag = [&](const std::string& section, const std::string& key) {
        const auto& v = get(section, key);
        if (v != "true" && v != "false") throw ConfigError(path.string() + ": " + key + " must be true or false");
        return v == "true";
    };
    FimResult r;
    r.dataset = get("result", "dataset");
    r.identifiable = flag("result", "identifiable");
    if (doc.at("result").contains("diagnosis")) r.diagnosis = doc.at("result").at("diagnosis");
    const auto theta = io::parse_double_list(get("result", "theta_scaled"));
    if (theta.size() != ThetaVector::size) throw ConfigError(path.string() + ": theta_scaled needs 5 values");
    for (std::size_t i = 0; i < theta.size(); ++i) r.theta[i] = theta[i];
    r.sigma.resize(ThetaVector::size);
    for (std::size_t i = 0; i < ThetaVector::size; ++i) {
        r.sigma(static_cast<Eigen::Index>(i)) = io::parse_double(get("sigma_crlb", parameter_labels[i]));
    }
    r.rss = io::parse_double(get("optimizer", "rss"));
    r.iterations = static_cast<std::size_t>(io::parse_integer(get("optimizer", "iterations")));
    r.evaluations = static_cast<std::size_t>(io::parse_integer(get("optimizer", "evaluations")));
    r.converged = flag("optimizer", "converged");
    r.fim = read_matrix(doc, "fim");
    r.covariance = read_matrix(doc, "covariance");
    return r;
}

}  // namespace spme

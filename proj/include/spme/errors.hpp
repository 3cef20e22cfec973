#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spme {

/// Input outside the mathematical domain of a model relation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A simulation left the admissible state space (surface stoichiometry
/// outside [0, 1] or non-positive electrolyte concentration).
class SimulationError : public std::runtime_error {
public:
    SimulationError(std::size_t step, const std::string& what)
        : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative solver stopped before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fisher information is singular or numerically rank deficient.
class NonIdentifiableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace spme

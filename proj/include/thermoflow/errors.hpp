#pragma once

#include <stdexcept>
#include <string>

namespace thermoflow {

/// Argument outside the mathematical domain of a model law (e.g. zero flow).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Parameter set or run configuration violates an invariant.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Iterative solver failed to converge.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A closed-loop run produced a non-finite state.
class SimulationAborted : public std::runtime_error {
public:
    SimulationAborted(const std::string& what, double time)
        : std::runtime_error(what + " at t = " + std::to_string(time) + " s"), time_(time) {}

    [[nodiscard]] double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace thermoflow

#pragma once

#include <stdexcept>
#include <string>

namespace meltsim {

// Failure classes. The CLI maps each onto its own exit status.

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature ran out of panels before meeting its tolerance.
class QuadratureError : public SimulationError {
public:
    QuadratureError(const std::string& what, double best_estimate, double achieved_error)
        : SimulationError(what), best_estimate_(best_estimate), achieved_error_(achieved_error) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double achieved_error() const noexcept { return achieved_error_; }

private:
    double best_estimate_;
    double achieved_error_;
};

/// The melting isotherm reached the edge of the search box.
class SearchBoxClipped : public SimulationError {
public:
    using SimulationError::SimulationError;
};

} // namespace meltsim

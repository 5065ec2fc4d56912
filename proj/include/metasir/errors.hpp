#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace metasir {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
/// Carries the best estimate reached and its error bound.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, std::complex<double> partial, double error_bound)
        : std::runtime_error(what), partial_(partial), error_bound_(error_bound)
    {
    }

    std::complex<double> partial_estimate() const noexcept { return partial_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    std::complex<double> partial_;
    double error_bound_;
};

/// Moments describe a (near) point mass; no Beta shape exists.
class DegenerateDistributionError : public std::runtime_error {
public:
    DegenerateDistributionError(const std::string& what, double mean)
        : std::runtime_error(what), mean_(mean)
    {
    }

    /// Location of the point mass the caller may fall back to.
    double mean() const noexcept { return mean_; }

private:
    double mean_;
};

/// A moment was requested as a number but the defining integral diverges.
class DivergentMomentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace metasir

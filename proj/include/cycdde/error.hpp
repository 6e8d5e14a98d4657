#pragma once

#include <stdexcept>
#include <string>

namespace cycdde {

/// Invalid arguments or parameters (bad sizes, wrong signs, malformed input).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A query outside the region where an object is defined (time out of range,
/// negative argument to a Hill function, zero state for V).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical procedure failed (no convergence, rank deficiency mismatch, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Integration blew up: some component exceeded the divergence threshold.
class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, double time)
        : NumericalError(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace cycdde

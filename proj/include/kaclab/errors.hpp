#pragma once
#include <stdexcept>
#include <string>

namespace kaclab {

// Bad parameters handed to a library call (maps to exit code 2 in the CLI).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ScheduleOutOfRange : ParameterError {
    int min_N;
    ScheduleOutOfRange(const std::string& msg, int minN) : ParameterError(msg), min_N(minN) {}
};

// Numerical failures are exit code 1.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridTooSmall : NumericalError {
    double suggested_rho_max, suggested_t_max;
    GridTooSmall(const std::string& msg, double rho, double t)
        : NumericalError(msg), suggested_rho_max(rho), suggested_t_max(t) {}
};

}  // namespace kaclab

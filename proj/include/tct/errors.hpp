#ifndef TCT_ERRORS_HPP
#define TCT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tct {

// Error taxonomy used across the library. All carry a plain message;
// SolverError additionally records the last residual reached.

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ArgumentError : std::invalid_argument {
    explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct DimensionError : std::invalid_argument {
    explicit DimensionError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct SolverError : std::runtime_error {
    double residual;
    SolverError(const std::string& msg, double res)
        : std::runtime_error(msg + " (residual=" + std::to_string(res) + ")"), residual(res) {}
};

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularityError : std::runtime_error {
    explicit SingularityError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace tct

#endif

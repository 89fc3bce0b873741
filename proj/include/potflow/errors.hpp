#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace potflow {

// Base of every error raised by the library. `kind()` is a stable tag used in
// run manifests.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define POTFLOW_ERROR_TYPE(Name, tag)                                         \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(tag, what) {}         \
    };

POTFLOW_ERROR_TYPE(DomainError, "domain")
POTFLOW_ERROR_TYPE(CavitationError, "cavitation")
POTFLOW_ERROR_TYPE(ConstructionError, "construction")
POTFLOW_ERROR_TYPE(MeshError, "mesh")
POTFLOW_ERROR_TYPE(RangeError, "range")
POTFLOW_ERROR_TYPE(ExtrapolationError, "extrapolation")
POTFLOW_ERROR_TYPE(SubsonicityError, "subsonicity")
POTFLOW_ERROR_TYPE(ChokingError, "choking")
POTFLOW_ERROR_TYPE(UsageError, "usage")
POTFLOW_ERROR_TYPE(InsufficientDataError, "insufficient_data")
POTFLOW_ERROR_TYPE(FormatError, "format")

#undef POTFLOW_ERROR_TYPE

// Iterative solver failure; carries the residual (or update/energy) history.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> history)
        : Error("convergence", what), history_(std::move(history)) {}
    const std::vector<double>& history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

// Parse or validation failure of a scenario file. Holds every violation found.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

}  // namespace potflow

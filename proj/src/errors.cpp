#include "potflow/errors.hpp"

namespace potflow {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
    std::string out = "invalid configuration:";
    for (const auto& s : v) out += "\n  " + s;
    return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error("config", join_violations(violations)), violations_(std::move(violations)) {}

}  // namespace potflow

#pragma once

// Batch runs of a scenario: solve, analyses, artifacts, manifest.

#include <string>
#include <vector>

#include "potflow/config.hpp"

namespace potflow {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunError {
    std::string stage;
    std::string kind;  // Error::kind()
    std::string message;
};

struct RunOptions {
    int workers = 0;            // recorded in the manifest; 0 = runtime default
    std::string timestamp;      // empty: current UTC time
    std::string output_dir;     // overrides output.directory when non-empty
};

struct RunResult {
    std::vector<CheckResult> checks;
    std::vector<RunError> errors;
    std::string directory;
    int exit_code = 0;          // 0 iff every check passed and nothing failed
};

// Writes into the output directory:
//   field.dump     converged base state (if enabled and the solve succeeded)
//   rates.csv      far-field windows (rate analysis)
//   study.csv      study records
//   manifest.txt   config echo, version, diagnostics, checks, status
// Artifacts produced before a failure are kept.
RunResult run(const ScenarioConfig& cfg, const RunOptions& opt = {});

// Offline fit between two field dumps on the same grid: D(T) of a against b.
RateFit rates_between(const std::string& field_a, const std::string& field_b, const std::vector<double>& T_list,
                      RateModel model);

void write_rates_csv(const RateFit& fit, const std::string& path);

}  // namespace potflow

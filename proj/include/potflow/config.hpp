#pragma once

// Scenario files: sectioned key = value text (see docs/formats.md).

#include <string>
#include <vector>

#include "potflow/analysis.hpp"

namespace potflow {

enum class Analysis { uniform, rate, low_mach, truncation, uniqueness };
std::string to_string(Analysis a);

// What far_field_rate compares against.
//   uniform:   constant axial speed (m0 / area, or q-bar at the achieved flux)
//   cylinder:  solve_cylinder_reference on the same grid
enum class ReferenceKind { uniform, cylinder };
std::string to_string(ReferenceKind r);

struct StudyConfig {
    std::vector<Analysis> analyses;
    RateModel model = RateModel::exponential;
    ReferenceKind reference = ReferenceKind::uniform;
    std::vector<double> T_list;
    Window window{-2.0, 2.0};
    std::vector<double> eps_list;
    std::vector<double> L_list;
    std::vector<InitKind> inits{InitKind::incompressible, InitKind::uniform, InitKind::scaled};
    double min_rate = 0.0;      // rate check: fitted rate >= min_rate (> 0 when exponential)
    double min_r2 = 0.95;
    double uniform_tol = 1e-8;  // uniform check: max |u - u_exact|
    double unique_tol = 1e-7;
    double flux_tol = 1e-6;

    bool wants(Analysis a) const;
};

struct OutputConfig {
    std::string directory = "out";
    bool field_dump = true;
};

struct ScenarioConfig {
    std::string path;
    std::string name;  // file stem
    Scenario scenario;
    std::string force_table;  // path of a tabulated force, if any
    StudyConfig study;
    OutputConfig output;
    // Every key with its effective value (defaults filled), section order.
    std::vector<std::pair<std::string, std::string>> echo;
};

// Parses and validates. Throws ConfigError listing every violation; parse
// errors carry the line number.
ScenarioConfig load_config(const std::string& path);

// 64-bit FNV-1a of the canonical echo, as 16 hex digits.
std::string scenario_hash(const ScenarioConfig& cfg);

}  // namespace potflow

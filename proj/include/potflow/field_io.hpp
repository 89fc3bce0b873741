#pragma once

// Plain-text structured-grid dumps (docs/formats.md). Numbers are written
// in shortest round-trip decimal form, so read(write(x)) is bitwise exact.

#include <map>
#include <string>
#include <vector>

#include "potflow/force_field.hpp"
#include "potflow/solvers.hpp"

namespace potflow {

// Decimal text that parses back to the identical double.
std::string format_double(double v);
double parse_double(const std::string& s);

struct FieldDump {
    std::string kind;  // "field", "mesh" or "force"
    MeridianMesh mesh;
    std::vector<std::pair<std::string, std::vector<double>>> blocks;  // in file order
    std::vector<std::pair<std::string, std::string>> footer;

    const std::vector<double>& block(const std::string& name) const;  // FormatError if absent
    const std::string* footer_value(const std::string& key) const;
};

void write_mesh(const MeridianMesh& mesh, const std::string& path);
void write_field(const FlowState& state, const std::string& path);
void write_force_table(const ForceTable& table, const std::string& path);

// Throws FormatError for malformed or truncated files (naming what is
// missing) and for a grid that differs from `expected` when given.
FieldDump read_dump(const std::string& path, const MeridianMesh* expected = nullptr);

// FlowState arrays from a field dump (derived fields are taken from the
// file, not recomputed).
FlowState read_field(const std::string& path, const MeridianMesh* expected = nullptr);

ForceTable read_force_table(const std::string& path);

}  // namespace potflow

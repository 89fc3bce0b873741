#pragma once

// Conservative external force F = grad phi_f, described by its potential.

#include <memory>
#include <string>
#include <vector>

#include "potflow/geometry.hpp"

namespace potflow {

enum class ForceKind { zero, radial_static, decaying_perturbation, tabulated };
std::string to_string(ForceKind k);
ForceKind force_kind_from_string(const std::string& s);

// Nodal values of phi_f on a structured meridian grid (uniform s and z).
struct ForceTable {
    MeridianMesh grid;
    std::vector<double> values;
};

struct ForceBounds {
    double sup_abs = 0.0;   // sup |phi_f|
    double inf = 0.0;       // inf phi_f (used for the truncation plateau)
    double sup_grad = 0.0;  // sup |grad phi_f|
};

struct Gradient {
    double dr = 0.0;
    double dz = 0.0;
};

// phi_f(r, z) =
//   zero:                   0
//   radial_static:          R g(r)
//   decaying_perturbation:  R g(r) + A g(r) (1 + S(z - K))^-b1
//   tabulated:              bilinear interpolation in (s, z) of a table
// with g(r) = r^2 on [0, 1], a C^2 quartic cap on [1, 2], constant beyond.
class ForceField {
public:
    ForceField() = default;

    static ForceField zero();
    static ForceField radial_static(double radial_amplitude);
    static ForceField decaying(double radial_amplitude, double amplitude, double b1, double K);
    static ForceField tabulated(ForceTable table);

    ForceKind kind() const { return kind_; }
    double radial_amplitude() const { return radial_; }
    double amplitude() const { return amplitude_; }
    double b1() const { return b1_; }
    double K() const { return K_; }
    const ForceBounds& bounds() const { return bounds_; }
    const ForceTable* table() const { return table_.get(); }

    // z-independent part phi-bar(r) (zero for tabulated fields).
    ForceField radial_part() const;
    bool depends_on_z() const;

    double eval(double r, double z) const;
    Gradient grad(double r, double z) const;

private:
    void compute_bounds();
    double eval_table(double r, double z, Gradient* grad) const;

    ForceKind kind_ = ForceKind::zero;
    double radial_ = 0.0;
    double amplitude_ = 0.0;
    double b1_ = 0.0;
    double K_ = 0.0;
    ForceBounds bounds_;
    std::shared_ptr<const ForceTable> table_;
};

double radial_shape(double r);
double radial_shape_d1(double r);
inline constexpr double kRadialShapeMax = 13.0 / 6.0;

}  // namespace potflow

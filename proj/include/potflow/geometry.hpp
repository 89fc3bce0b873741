#pragma once

// Nozzle/obstacle profiles in the meridian plane and the boundary-fitted
// structured mesh of the truncated domain |z| < L.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace potflow {

enum class ProfileKind { cylinder, flat_beyond_K, algebraic };
enum class Symmetry { axisymmetric, planar };

std::string to_string(ProfileKind k);
std::string to_string(Symmetry s);
ProfileKind profile_kind_from_string(const std::string& s);
Symmetry symmetry_from_string(const std::string& s);

struct ProfileParams {
    ProfileKind kind = ProfileKind::cylinder;
    double amplitude = 0.0;  // wall perturbation A
    double a1 = 0.0;         // algebraic decay exponent
    double K = 0.0;          // far-field onset station
    bool obstacle = false;
    double obstacle_height = 0.0;
    double L1 = 0.0;
    double L2 = 0.0;
};

// Outer wall f1(z) and obstacle f2(z) (zero outside [L1, L2]).
//
//   cylinder:       f1 = 1
//   flat_beyond_K:  f1 = 1 + A (1 - x^2)^3, x = z - (K - 1), on [K-2, K]
//   algebraic:      f1 = 1 + A (1 + S(z - K))^-a1
//   obstacle bump:  f2 = h cos^2(pi (z - zc) / (L2 - L1)) on [L1, L2]
//
// S is a C^3 smooth ramp with S(x) = 0 for x <= -1 and S(x) = x for x >= 1,
// so the algebraic law is exact for z >= K + 1.
class NozzleProfile {
public:
    NozzleProfile() = default;
    explicit NozzleProfile(const ProfileParams& p) : p_(p) {}

    const ProfileParams& params() const { return p_; }

    double f1(double z) const;
    double f1_d1(double z) const;
    double f1_d2(double z) const;
    double f2(double z) const;
    double f2_d1(double z) const;
    bool in_obstacle_band(double z) const { return p_.obstacle && z > p_.L1 && z < p_.L2; }

    // Constant C with 1/C <= f1 <= C, f2 <= C, 1/C <= f1 - f2 <= C,
    // estimated on a dense sample.
    double bound_constant() const;

    // Envelope constant of sum_k |z^k d^k (f1 - 1)| <= C z^-a1 for z > K + 1
    // (algebraic kind only).
    double decay_envelope_constant() const;

private:
    ProfileParams p_;
};

// Validates the parameters and returns the profile. Throws ConstructionError
// naming the violated bound.
NozzleProfile build_profile(const ProfileParams& params);

// Smooth ramp used by the algebraic profile and the decaying force.
double smooth_ramp(double x);
double smooth_ramp_d1(double x);
double smooth_ramp_d2(double x);

enum class BoundaryTag { inlet, outlet, outer_wall, obstacle_wall, axis };
std::string to_string(BoundaryTag t);

struct BoundaryEdge {
    BoundaryTag tag;
    std::size_t n0;
    std::size_t n1;
};

// Structured (n_s + 1) x (n_z + 1) node grid. Node (i, j) sits on station j
// (z_j = -L + j h_z) at transverse parameter s_i = i / n_s:
//   r = f2(z_j) + s_i (f1(z_j) - f2(z_j)).
// Storage is station-major: node index = j (n_s + 1) + i.
class MeridianMesh {
public:
    MeridianMesh() = default;

    // Rebuilds a mesh from raw node coordinates (e.g. a field dump).
    static MeridianMesh from_nodes(std::size_t n_s, std::size_t n_z, Symmetry symmetry, double L,
                                   std::vector<double> r, std::vector<double> z,
                                   std::optional<NozzleProfile> profile = std::nullopt);

    std::size_t n_s() const { return n_s_; }
    std::size_t n_z() const { return n_z_; }
    std::size_t node_count() const { return (n_s_ + 1) * (n_z_ + 1); }
    std::size_t cell_count() const { return n_s_ * n_z_; }
    double half_length() const { return L_; }
    double h_z() const { return 2.0 * L_ / static_cast<double>(n_z_); }
    Symmetry symmetry() const { return symmetry_; }
    const std::optional<NozzleProfile>& profile() const { return profile_; }

    std::size_t node(std::size_t i, std::size_t j) const { return j * (n_s_ + 1) + i; }
    std::size_t cell(std::size_t i, std::size_t j) const { return j * n_s_ + i; }
    const std::vector<double>& r() const { return r_; }
    const std::vector<double>& z() const { return z_; }
    double station_z(std::size_t j) const { return z_[node(0, j)]; }

    // Symmetry weight of the measure: 2 pi r (axisymmetric) or 1 (planar).
    double weight(double r) const;

    const std::vector<BoundaryEdge>& boundary() const { return boundary_; }

    // Nearest station to t; throws RangeError outside [-L, L].
    std::size_t snap_station(double t) const;

    // Weighted measure of the cross section at the station nearest to t.
    double section_area(double t) const;
    double section_area_at(std::size_t j) const;

    // Jacobian determinant of cell (i, j) at its four corners, minimum.
    double min_cell_jacobian(std::size_t i, std::size_t j) const;

    // Same node grid, same symmetry; used to check dumps and references.
    bool same_topology(const MeridianMesh& other) const {
        return n_s_ == other.n_s_ && n_z_ == other.n_z_ && symmetry_ == other.symmetry_;
    }

private:
    void finalize();

    std::size_t n_s_ = 0;
    std::size_t n_z_ = 0;
    double L_ = 0.0;
    Symmetry symmetry_ = Symmetry::axisymmetric;
    std::vector<double> r_;
    std::vector<double> z_;
    std::optional<NozzleProfile> profile_;
    std::vector<BoundaryEdge> boundary_;
};

// Throws ConstructionError for bad arguments and MeshError for a degenerate
// cell (reporting the cell).
MeridianMesh build_mesh(const NozzleProfile& profile, double L, std::size_t n_s, double h_z,
                        Symmetry symmetry);

}  // namespace potflow

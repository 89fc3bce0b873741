#include "potflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "potflow/errors.hpp"

namespace potflow {

std::string to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::cylinder: return "cylinder";
        case ProfileKind::flat_beyond_K: return "flat_beyond_K";
        case ProfileKind::algebraic: return "algebraic";
    }
    return "?";
}

std::string to_string(Symmetry s) {
    return s == Symmetry::axisymmetric ? "axisymmetric" : "planar";
}

std::string to_string(BoundaryTag t) {
    switch (t) {
        case BoundaryTag::inlet: return "inlet";
        case BoundaryTag::outlet: return "outlet";
        case BoundaryTag::outer_wall: return "outer_wall";
        case BoundaryTag::obstacle_wall: return "obstacle_wall";
        case BoundaryTag::axis: return "axis";
    }
    return "?";
}

ProfileKind profile_kind_from_string(const std::string& s) {
    if (s == "cylinder") return ProfileKind::cylinder;
    if (s == "flat_beyond_K") return ProfileKind::flat_beyond_K;
    if (s == "algebraic") return ProfileKind::algebraic;
    throw DomainError("unknown profile kind '" + s + "'");
}

Symmetry symmetry_from_string(const std::string& s) {
    if (s == "axisymmetric") return Symmetry::axisymmetric;
    if (s == "planar") return Symmetry::planar;
    throw DomainError("unknown symmetry '" + s + "'");
}

// S'' = (15/16)(1 - x^2)^2 on [-1, 1]; S(-1) = S'(-1) = 0.
double smooth_ramp(double x) {
    if (x <= -1.0) return 0.0;
    if (x >= 1.0) return x;
    const double x2 = x * x;
    return 15.0 / 16.0 * (x2 / 2.0 - x2 * x2 / 6.0 + x2 * x2 * x2 / 30.0 + 8.0 * x / 15.0) +
           5.0 / 32.0;
}

double smooth_ramp_d1(double x) {
    if (x <= -1.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double x2 = x * x;
    return 15.0 / 16.0 * (x - 2.0 * x2 * x / 3.0 + x2 * x2 * x / 5.0 + 8.0 / 15.0);
}

double smooth_ramp_d2(double x) {
    if (x <= -1.0 || x >= 1.0) return 0.0;
    const double u = 1.0 - x * x;
    return 15.0 / 16.0 * u * u;
}

double NozzleProfile::f1(double z) const {
    switch (p_.kind) {
        case ProfileKind::cylinder: return 1.0;
        case ProfileKind::flat_beyond_K: {
            const double x = z - (p_.K - 1.0);
            if (std::abs(x) >= 1.0) return 1.0;
            const double u = 1.0 - x * x;
            return 1.0 + p_.amplitude * u * u * u;
        }
        case ProfileKind::algebraic:
            return 1.0 + p_.amplitude * std::pow(1.0 + smooth_ramp(z - p_.K), -p_.a1);
    }
    return 1.0;
}

double NozzleProfile::f1_d1(double z) const {
    switch (p_.kind) {
        case ProfileKind::cylinder: return 0.0;
        case ProfileKind::flat_beyond_K: {
            const double x = z - (p_.K - 1.0);
            if (std::abs(x) >= 1.0) return 0.0;
            const double u = 1.0 - x * x;
            return -6.0 * p_.amplitude * x * u * u;
        }
        case ProfileKind::algebraic: {
            const double x = z - p_.K;
            const double base = 1.0 + smooth_ramp(x);
            return -p_.a1 * p_.amplitude * std::pow(base, -p_.a1 - 1.0) * smooth_ramp_d1(x);
        }
    }
    return 0.0;
}

double NozzleProfile::f1_d2(double z) const {
    switch (p_.kind) {
        case ProfileKind::cylinder: return 0.0;
        case ProfileKind::flat_beyond_K: {
            const double x = z - (p_.K - 1.0);
            if (std::abs(x) >= 1.0) return 0.0;
            const double u = 1.0 - x * x;
            return p_.amplitude * (-6.0 * u * u + 24.0 * x * x * u);
        }
        case ProfileKind::algebraic: {
            const double x = z - p_.K;
            const double base = 1.0 + smooth_ramp(x);
            const double s1 = smooth_ramp_d1(x);
            return p_.amplitude * (p_.a1 * (p_.a1 + 1.0) * std::pow(base, -p_.a1 - 2.0) * s1 * s1 -
                                   p_.a1 * std::pow(base, -p_.a1 - 1.0) * smooth_ramp_d2(x));
        }
    }
    return 0.0;
}

double NozzleProfile::f2(double z) const {
    if (!p_.obstacle || z <= p_.L1 || z >= p_.L2) return 0.0;
    const double c = std::cos(std::numbers::pi * (z - 0.5 * (p_.L1 + p_.L2)) / (p_.L2 - p_.L1));
    return p_.obstacle_height * c * c;
}

double NozzleProfile::f2_d1(double z) const {
    if (!p_.obstacle || z <= p_.L1 || z >= p_.L2) return 0.0;
    const double k = std::numbers::pi / (p_.L2 - p_.L1);
    return -p_.obstacle_height * k * std::sin(2.0 * k * (z - 0.5 * (p_.L1 + p_.L2)));
}

double NozzleProfile::bound_constant() const {
    const double lo = std::min({p_.K, p_.L1, 0.0}) - 10.0;
    const double hi = std::max({p_.K, p_.L2, 0.0}) + 200.0;
    double c = 1.0;
    // extrema the sample could straddle: f1 - 1 peaks at A, f2 at the obstacle height
    if (p_.kind != ProfileKind::cylinder) c = std::max({c, 1.0 + p_.amplitude, 1.0 / (1.0 + p_.amplitude)});
    if (p_.obstacle) c = std::max(c, 1.0 / (1.0 - p_.obstacle_height));
    const int n = 20000;
    for (int k = 0; k <= n; ++k) {
        const double z = lo + (hi - lo) * k / n;
        const double a = f1(z), b = f2(z);
        c = std::max({c, a, 1.0 / a, b, a - b, 1.0 / (a - b)});
    }
    return c;
}

double NozzleProfile::decay_envelope_constant() const {
    if (p_.kind != ProfileKind::algebraic) return 0.0;
    double c = 0.0;
    for (int k = 0; k <= 4000; ++k) {
        const double z = p_.K + 1.0 + 0.05 * k;
        const double s = std::abs(f1(z) - 1.0) + std::abs(z * f1_d1(z)) + std::abs(z * z * f1_d2(z));
        c = std::max(c, s * std::pow(z, p_.a1));
    }
    return c;
}

NozzleProfile build_profile(const ProfileParams& p) {
    auto fail = [](const std::string& what) { throw ConstructionError("NozzleProfile: " + what); };
    switch (p.kind) {
        case ProfileKind::cylinder: break;
        case ProfileKind::flat_beyond_K:
            if (!(p.amplitude > -0.5)) fail("amplitude > -1/2 required so that f1 >= 1/2");
            break;
        case ProfileKind::algebraic:
            if (!(p.a1 > 0.0)) fail("a1 > 0 required");
            if (!(p.amplitude > -0.5)) fail("amplitude > -1/2 required so that f1 >= 1/2");
            break;
    }
    NozzleProfile profile(p);
    if (p.obstacle) {
        if (!(p.L2 > p.L1)) fail("obstacle band needs L1 < L2");
        if (!(p.obstacle_height > 0.0)) fail("obstacle height must be positive");
        double min_gap = 1e300;
        for (int k = 0; k <= 400; ++k) {
            const double z = p.L1 + (p.L2 - p.L1) * k / 400.0;
            min_gap = std::min(min_gap, profile.f1(z) - profile.f2(z));
        }
        if (!(min_gap >= 0.1)) fail("f1 - f2 >= 0.1 required on [L1, L2] (obstacle too tall)");
    }
    return profile;
}

double MeridianMesh::weight(double r) const {
    return symmetry_ == Symmetry::axisymmetric ? 2.0 * std::numbers::pi * r : 1.0;
}

std::size_t MeridianMesh::snap_station(double t) const {
    const double slack = 1e-12 * std::max(1.0, L_);
    if (!(t >= -L_ - slack && t <= L_ + slack)) {
        std::ostringstream os;
        os << "station t=" << t << " outside [-L, L] with L=" << L_;
        throw RangeError(os.str());
    }
    const double x = (t + L_) / h_z();
    const auto j = static_cast<long>(std::lround(x));
    return static_cast<std::size_t>(std::clamp<long>(j, 0, static_cast<long>(n_z_)));
}

double MeridianMesh::section_area_at(std::size_t j) const {
    double outer, inner;
    if (profile_) {
        const double z = station_z(j);
        outer = profile_->f1(z);
        inner = profile_->f2(z);
    } else {
        outer = r_[node(n_s_, j)];
        inner = r_[node(0, j)];
    }
    if (symmetry_ == Symmetry::axisymmetric) return std::numbers::pi * (outer * outer - inner * inner);
    return outer - inner;
}

double MeridianMesh::section_area(double t) const { return section_area_at(snap_station(t)); }

double MeridianMesh::min_cell_jacobian(std::size_t i, std::size_t j) const {
    const std::size_t n[4] = {node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)};
    double m = 1e300;
    // Corner k: edges to the next and previous corner (counter-clockwise in
    // (s, z) parameter space).
    for (int k = 0; k < 4; ++k) {
        const std::size_t a = n[k], b = n[(k + 1) % 4], c = n[(k + 3) % 4];
        const double e1r = r_[b] - r_[a], e1z = z_[b] - z_[a];
        const double e2r = r_[c] - r_[a], e2z = z_[c] - z_[a];
        m = std::min(m, e1r * e2z - e1z * e2r);
    }
    return m;
}

void MeridianMesh::finalize() {
    for (std::size_t j = 0; j < n_z_; ++j) {
        for (std::size_t i = 0; i < n_s_; ++i) {
            const double jac = min_cell_jacobian(i, j);
            if (!(jac > 0.0)) {
                std::ostringstream os;
                os << "degenerate cell (i=" << i << ", j=" << j << ") with Jacobian " << jac;
                throw MeshError(os.str());
            }
        }
    }
    boundary_.clear();
    for (std::size_t i = 0; i < n_s_; ++i) {
        boundary_.push_back({BoundaryTag::inlet, node(i, 0), node(i + 1, 0)});
        boundary_.push_back({BoundaryTag::outlet, node(i, n_z_), node(i + 1, n_z_)});
    }
    for (std::size_t j = 0; j < n_z_; ++j) {
        boundary_.push_back({BoundaryTag::outer_wall, node(n_s_, j), node(n_s_, j + 1)});
        const std::size_t a = node(0, j), b = node(0, j + 1);
        const bool on_obstacle = r_[a] > 0.0 || r_[b] > 0.0;
        boundary_.push_back({on_obstacle ? BoundaryTag::obstacle_wall : BoundaryTag::axis, a, b});
    }
}

MeridianMesh MeridianMesh::from_nodes(std::size_t n_s, std::size_t n_z, Symmetry symmetry, double L,
                                      std::vector<double> r, std::vector<double> z,
                                      std::optional<NozzleProfile> profile) {
    MeridianMesh m;
    m.n_s_ = n_s;
    m.n_z_ = n_z;
    m.L_ = L;
    m.symmetry_ = symmetry;
    if (r.size() != m.node_count() || z.size() != m.node_count())
        throw MeshError("node arrays do not match the declared dimensions");
    m.r_ = std::move(r);
    m.z_ = std::move(z);
    m.profile_ = std::move(profile);
    m.finalize();
    return m;
}

MeridianMesh build_mesh(const NozzleProfile& profile, double L, std::size_t n_s, double h_z,
                        Symmetry symmetry) {
    const auto& p = profile.params();
    if (p.obstacle && !(L > std::max(std::abs(p.L1), std::abs(p.L2)) + 2.0))
        throw ConstructionError("build_mesh: L > max(|L1|, |L2|) + 2 required");
    if (!(L > 0.0)) throw ConstructionError("build_mesh: L must be positive");
    if (n_s < 4) throw ConstructionError("build_mesh: n_s >= 4 required");
    if (!(h_z > 0.0)) throw ConstructionError("build_mesh: h_z > 0 required");

    const auto n_z = static_cast<std::size_t>(std::max(1.0, std::round(2.0 * L / h_z)));
    std::vector<double> r((n_s + 1) * (n_z + 1)), z(r.size());
    for (std::size_t j = 0; j <= n_z; ++j) {
        const double zj = -L + 2.0 * L * static_cast<double>(j) / static_cast<double>(n_z);
        const double outer = profile.f1(zj), inner = profile.f2(zj);
        for (std::size_t i = 0; i <= n_s; ++i) {
            const double s = static_cast<double>(i) / static_cast<double>(n_s);
            const std::size_t k = j * (n_s + 1) + i;
            r[k] = i == n_s ? outer : inner + s * (outer - inner);
            z[k] = zj;
        }
    }
    return MeridianMesh::from_nodes(n_s, n_z, symmetry, L, std::move(r), std::move(z), profile);
}

}  // namespace potflow

#include <doctest.h>

#include <cmath>
#include <set>

#include "potflow/errors.hpp"
#include "potflow/geometry.hpp"

using namespace potflow;

namespace {

ProfileParams algebraic(double A, double a1, double K) {
    ProfileParams p;
    p.kind = ProfileKind::algebraic;
    p.amplitude = A;
    p.a1 = a1;
    p.K = K;
    return p;
}

ProfileParams bump(double h, double L1, double L2) {
    ProfileParams p;
    p.obstacle = true;
    p.obstacle_height = h;
    p.L1 = L1;
    p.L2 = L2;
    return p;
}

}  // namespace

TEST_CASE("cylinder profile") {
    const NozzleProfile p = build_profile(ProfileParams{});
    for (double z = -20; z <= 20; z += 0.37) {
        CHECK(p.f1(z) == 1.0);
        CHECK(p.f2(z) == 0.0);
    }
}

TEST_CASE("algebraic profile value and decay envelope") {
    const NozzleProfile p = build_profile(algebraic(0.2, 2.0, 5.0));
    CHECK(std::abs(p.f1(10.0) - 1.0) == doctest::Approx(0.2 * std::pow(6.0, -2.0)).epsilon(1e-13));
    CHECK(std::abs(p.f1(10.0) - 1.0) == doctest::Approx(0.00556).epsilon(1e-3));
    // exact law beyond K + 1 and its derivatives
    for (double z = 6.0; z < 60.0; z += 1.3) {
        const double x = 1.0 + (z - 5.0);
        CHECK(p.f1(z) - 1.0 == doctest::Approx(0.2 * std::pow(x, -2.0)).epsilon(1e-12));
        CHECK(p.f1_d1(z) == doctest::Approx(-0.4 * std::pow(x, -3.0)).epsilon(1e-12));
        CHECK(p.f1_d2(z) == doctest::Approx(1.2 * std::pow(x, -4.0)).epsilon(1e-12));
    }
    // |z^k d^k (f1 - 1)| <= C z^-a1 for k = 0, 1, 2
    const double C = p.decay_envelope_constant();
    for (double z = 6.5; z < 200.0; z *= 1.1) {
        const double env = C * std::pow(z, -2.0);
        CHECK(std::abs(p.f1(z) - 1.0) <= env);
        CHECK(std::abs(z * p.f1_d1(z)) <= env);
        CHECK(std::abs(z * z * p.f1_d2(z)) <= env);
        // centred second differences obey the same envelope
        const double h = 1e-3;
        const double d2 = (p.f1(z + h) - 2 * p.f1(z) + p.f1(z - h)) / (h * h);
        CHECK(std::abs(z * z * d2) <= 1.001 * env);
    }
    // smoothness across the ramp
    for (double z = 3.0; z < 7.0; z += 0.01) {
        const double h = 1e-5;
        CHECK(p.f1_d1(z) == doctest::Approx((p.f1(z + h) - p.f1(z - h)) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("flat-beyond-K profile is flat downstream") {
    ProfileParams q;
    q.kind = ProfileKind::flat_beyond_K;
    q.amplitude = 0.3;
    q.K = 2.0;
    const NozzleProfile p = build_profile(q);
    for (double z = 2.0; z < 40.0; z += 0.7) CHECK(p.f1(z) == 1.0);
    for (double z = -40.0; z <= 0.0; z += 0.7) CHECK(p.f1(z) == 1.0);
    CHECK(p.f1(1.0) == doctest::Approx(1.3));
}

TEST_CASE("bump obstacle") {
    const NozzleProfile p = build_profile(bump(0.3, -1.0, 1.0));
    CHECK(p.f2(-1.0) == 0.0);
    CHECK(p.f2(1.0) == 0.0);
    double mx = 0.0;
    for (double z = -1.0; z <= 1.0; z += 1e-3) {
        mx = std::max(mx, p.f2(z));
        CHECK(p.f1(z) - p.f2(z) >= 0.7 - 1e-15);
    }
    CHECK(mx == doctest::Approx(0.3).epsilon(1e-6));
    // vanishes C^1 at the ends
    CHECK(std::abs(p.f2_d1(-1.0)) < 1e-12);
    CHECK(std::abs(p.f2_d1(1.0)) < 1e-12);
    const double C = p.bound_constant();
    CHECK(C >= 1.0 / 0.7);
}

TEST_CASE("profile construction errors name the bound") {
    auto msg = [](const ProfileParams& p) {
        try {
            build_profile(p);
        } catch (const ConstructionError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(msg(algebraic(0.2, -1.0, 0.0)).find("a1") != std::string::npos);
    CHECK(msg(algebraic(-0.7, 2.0, 0.0)).find("1/2") != std::string::npos);
    CHECK(msg(bump(1.2, -1.0, 1.0)).find("f1 - f2") != std::string::npos);
    CHECK_THROWS_AS(build_profile(bump(0.3, 1.0, -1.0)), ConstructionError);
}

TEST_CASE("cylinder mesh") {
    const MeridianMesh m = build_mesh(build_profile(ProfileParams{}), 10.0, 4, 0.5, Symmetry::axisymmetric);
    CHECK(m.n_s() + 1 == 5);
    CHECK(m.n_z() + 1 == 41);
    CHECK(m.node_count() == 205);
    const double j0 = m.min_cell_jacobian(0, 0);
    CHECK(j0 > 0.0);
    for (std::size_t j = 0; j < m.n_z(); ++j)
        for (std::size_t i = 0; i < m.n_s(); ++i) CHECK(m.min_cell_jacobian(i, j) == doctest::Approx(j0).epsilon(1e-12));
    for (double t : {-10.0, -3.3, 0.0, 7.0, 10.0}) CHECK(m.section_area(t) == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK_THROWS_AS(m.section_area(10.5), RangeError);
    CHECK_THROWS_AS(m.section_area(-11.0), RangeError);
}

TEST_CASE("planar and annular section areas") {
    const MeridianMesh pl = build_mesh(build_profile(ProfileParams{}), 10.0, 4, 0.5, Symmetry::planar);
    CHECK(pl.section_area(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    const MeridianMesh m = build_mesh(build_profile(bump(0.3, -1.0, 1.0)), 10.0, 8, 0.25, Symmetry::axisymmetric);
    CHECK(m.section_area(0.0) == doctest::Approx(M_PI * (1.0 - 0.09)).epsilon(1e-12));
    CHECK(m.section_area(0.0) == doctest::Approx(2.8588).epsilon(1e-4));
    // annular cells at the band centre
    const std::size_t j = m.snap_station(0.0);
    CHECK(m.r()[m.node(0, j)] == doctest::Approx(0.3));
    // refinement leaves areas unchanged
    const MeridianMesh f = build_mesh(build_profile(bump(0.3, -1.0, 1.0)), 10.0, 16, 0.125, Symmetry::axisymmetric);
    for (double t : {-0.5, 0.0, 0.25, 3.0}) CHECK(std::abs(f.section_area(t) - m.section_area(t)) < 1e-12);
}

TEST_CASE("algebraic mesh has positive Jacobians and the mapped node layout") {
    const NozzleProfile p = build_profile(algebraic(0.2, 2.0, 2.0));
    const MeridianMesh m = build_mesh(p, 30.0, 8, 0.25, Symmetry::axisymmetric);
    for (std::size_t j = 0; j < m.n_z(); ++j)
        for (std::size_t i = 0; i < m.n_s(); ++i) CHECK(m.min_cell_jacobian(i, j) > 0.0);
    for (std::size_t j = 0; j <= m.n_z(); j += 7)
        for (std::size_t i = 0; i <= m.n_s(); ++i) {
            const double z = m.station_z(j);
            CHECK(m.r()[m.node(i, j)] == doctest::Approx(p.f2(z) + (double(i) / m.n_s()) * (p.f1(z) - p.f2(z))));
            CHECK(m.z()[m.node(i, j)] == z);
        }
}

TEST_CASE("boundary tags are complete and disjoint") {
    const MeridianMesh m = build_mesh(build_profile(bump(0.3, -1.0, 1.0)), 5.0, 4, 0.25, Symmetry::axisymmetric);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::size_t counts[5] = {};
    for (const auto& e : m.boundary()) {
        CHECK(seen.insert({std::min(e.n0, e.n1), std::max(e.n0, e.n1)}).second);
        ++counts[static_cast<int>(e.tag)];
    }
    CHECK(counts[static_cast<int>(BoundaryTag::inlet)] == m.n_s());
    CHECK(counts[static_cast<int>(BoundaryTag::outlet)] == m.n_s());
    CHECK(counts[static_cast<int>(BoundaryTag::outer_wall)] == m.n_z());
    // inner side: obstacle wall inside the band, axis elsewhere
    CHECK(counts[static_cast<int>(BoundaryTag::obstacle_wall)] + counts[static_cast<int>(BoundaryTag::axis)] == m.n_z());
    CHECK(counts[static_cast<int>(BoundaryTag::obstacle_wall)] == 8);
    CHECK(seen.size() == 2 * (m.n_s() + m.n_z()));
}

TEST_CASE("mesh construction guards") {
    const NozzleProfile p = build_profile(bump(0.3, -1.0, 1.0));
    CHECK_THROWS_AS(build_mesh(p, 2.5, 8, 0.25, Symmetry::axisymmetric), ConstructionError);
    CHECK_THROWS_AS(build_mesh(p, 10.0, 3, 0.25, Symmetry::axisymmetric), ConstructionError);
    CHECK_THROWS_AS(build_mesh(p, 10.0, 8, 0.0, Symmetry::axisymmetric), ConstructionError);
    // degenerate node data is reported
    std::vector<double> r(4 * 3, 0.0), z(4 * 3, 0.0);
    CHECK_THROWS_AS(MeridianMesh::from_nodes(3, 2, Symmetry::planar, 1.0, r, z), MeshError);
}

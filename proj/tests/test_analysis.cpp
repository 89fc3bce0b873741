#include <doctest.h>

#include <cmath>
#include <cstring>

#include "potflow/analysis.hpp"
#include "potflow/errors.hpp"

using namespace potflow;

namespace {

Scenario bump_scenario(double eps, double L = 10.0) {
    Scenario sc;
    sc.profile.obstacle = true;
    sc.profile.obstacle_height = 0.3;
    sc.profile.L1 = -1.0;
    sc.profile.L2 = 1.0;
    sc.L = L;
    sc.n_s = 8;
    sc.h_z = 0.25;
    sc.gas.epsilon = eps;
    sc.force = ForceField::radial_static(0.5);
    sc.solver.linear_tol = 1e-13;
    sc.solver.picard_tol = 1e-12;
    return sc;
}

}  // namespace

TEST_CASE("synthetic rate recovery") {
    std::vector<double> T, De, Da;
    for (double t = 2.0; t <= 12.0; t += 1.0) {
        T.push_back(t);
        De.push_back(3.0 * std::exp(-0.5 * t));
        Da.push_back(std::pow(t, -2.0));
    }
    const RateFit e = fit_rate(T, De, RateModel::exponential);
    CHECK(e.rate == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(e.prefactor == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(e.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    const RateFit a = fit_rate(T, Da, RateModel::algebraic);
    CHECK(a.rate == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(a.prefactor == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(a.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.r_squared <= 1.0);
}

TEST_CASE("least squares needs three distinct abscissae") {
    CHECK_THROWS_AS(least_squares({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), InsufficientDataError);
    CHECK_THROWS_AS(least_squares({1.0, 2.0}, {1.0, 2.0}), InsufficientDataError);
    const LinearFit f = least_squares({0.0, 1.0, 2.0, 3.0}, {1.0, 3.1, 4.9, 7.0});
    CHECK(f.slope == doctest::Approx(1.98).epsilon(1e-12));
    CHECK(f.half_width > 0.0);
    CHECK(f.r_squared > 0.99);
    CHECK(f.r_squared <= 1.0);
    CHECK(rate_model_from_string(to_string(RateModel::algebraic)) == RateModel::algebraic);
    CHECK_THROWS(rate_model_from_string("power"));
}

TEST_CASE("mass flux") {
    Scenario cyl;
    cyl.gas.epsilon = 0.0;
    cyl.L = 5.0;
    cyl.n_s = 4;
    cyl.h_z = 0.5;
    cyl.solver.linear_tol = 1e-13;
    const FlowState s = solve_scenario(cyl, scenario_discretization(cyl));
    for (double t : {-4.5, -1.0, 0.0, 2.5, 4.5}) CHECK(mass_flux(s, t) == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK_THROWS_AS(mass_flux(s, 5.5), RangeError);

    const Scenario sc = bump_scenario(0.2);
    const FlowState b = solve_scenario(sc, scenario_discretization(sc));
    CHECK(flux_deviation(b, 10) < 1e-6);
    CHECK(flux_deviation(b, 10) < 1e-10);
    const double out = mass_flux(b, sc.L);
    CHECK(std::memcmp(&out, &b.achieved_flux, sizeof out) == 0);
}

TEST_CASE("far-field rate guards and floor") {
    Scenario cyl;
    cyl.gas.epsilon = 0.0;
    cyl.L = 10.0;
    cyl.n_s = 4;
    cyl.h_z = 0.5;
    cyl.solver.linear_tol = 1e-13;
    const FlowState s = solve_scenario(cyl, scenario_discretization(cyl));
    // exact uniform flow: every window is below the floor
    try {
        far_field_rate(s, VelocityReference::constant(1.0), {2.0, 4.0, 6.0}, RateModel::exponential);
        FAIL("expected InsufficientDataError");
    } catch (const InsufficientDataError&) {
    }
    CHECK_THROWS_AS(far_field_rate(s, VelocityReference::constant(1.0), {2.0, 4.0, 9.5}, RateModel::exponential),
                    RangeError);
    CHECK_THROWS_AS(far_field_rate(s, VelocityReference::constant(1.0), {2.0, 4.0}, RateModel::exponential),
                    InsufficientDataError);

    // a perturbed field: D(T) measured in both norms, windows increasing, used ones above the floor
    const RateFit f = far_field_rate(s, VelocityReference::constant(1.01), {2.0, 4.0, 6.0}, RateModel::exponential);
    REQUIRE(f.windows.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(f.windows[k].d_linf == doctest::Approx(0.01).epsilon(1e-9));
        CHECK(f.windows[k].d_l2 == doctest::Approx(0.01 * std::sqrt(M_PI)).epsilon(1e-9));
        CHECK(f.windows[k].used);
        CHECK(f.windows[k].d_linf > 10.0 * f.floor);
        if (k) CHECK(f.windows[k].T > f.windows[k - 1].T);
    }
    CHECK(f.r_squared >= 0.0);
    CHECK(f.r_squared <= 1.0);
}

TEST_CASE("flat-downstream nozzle: windowed deviation decreases in T") {
    Scenario sc;
    sc.profile.kind = ProfileKind::flat_beyond_K;
    sc.profile.amplitude = 0.3;
    sc.profile.K = 0.0;
    sc.gas.epsilon = 0.0;
    sc.L = 12.0;
    sc.n_s = 8;
    sc.h_z = 0.25;
    sc.solver.linear_tol = 1e-13;
    const FlowState s = solve_scenario(sc, scenario_discretization(sc));
    const RateFit f = far_field_rate(s, VelocityReference::constant(1.0), {1.0, 2.0, 3.0, 4.0, 5.0}, RateModel::exponential);
    for (std::size_t k = 1; k < f.windows.size(); ++k) CHECK(f.windows[k].d_l2 < f.windows[k - 1].d_l2);
    CHECK(f.rate > 0.0);
    CHECK(f.r_squared > 0.99);
}

TEST_CASE("low-Mach study") {
    Scenario sc = bump_scenario(0.0, 8.0);
    const StudyReport rep = low_mach_study(sc, {0.2, 0.1, 0.05, 0.025}, {-3.0, 3.0});
    CHECK(rep.records.size() == 4);
    CHECK(rep.velocity_fit.slope == doctest::Approx(2.0).epsilon(0.1));
    CHECK(rep.density_fit.slope == doctest::Approx(2.0).epsilon(0.1));
    CHECK(rep.pass);
    CHECK_THROWS_AS(low_mach_study(sc, {0.1, 0.1, 0.1}, {-3.0, 3.0}), InsufficientDataError);
    CHECK_THROWS_AS(low_mach_study(sc, {0.1, 0.05}, {-3.0, 3.0}), InsufficientDataError);
}

TEST_CASE("truncation study on the cylinder and its guards") {
    Scenario cyl;
    cyl.n_s = 4;
    cyl.h_z = 0.5;
    cyl.gas.epsilon = 0.1;
    cyl.solver.linear_tol = 1e-13;
    cyl.solver.picard_tol = 1e-12;
    const StudyReport rep = truncation_study(cyl, {8.0, 12.0, 16.0}, {-2.0, 2.0});
    REQUIRE(rep.records.size() == 3);
    for (const auto& r : rep.records) CHECK(r.velocity_metric <= 1e-11);
    CHECK(rep.records.back().velocity_metric == 0.0);
    CHECK_THROWS_AS(truncation_study(cyl, {8.0, 12.0, 16.0}, {-2.5, 2.0}), RangeError);
    CHECK_THROWS_AS(truncation_study(cyl, {8.0, 16.0, 12.0}, {-1.0, 1.0}), UsageError);
    CHECK_THROWS_AS(truncation_study(cyl, {8.0, 16.0}, {-1.0, 1.0}), InsufficientDataError);
}

TEST_CASE("uniqueness probes") {
    const Scenario sc = bump_scenario(0.2);
    const auto disc = scenario_discretization(sc);
    CHECK(uniqueness_probe(sc, disc, InitKind::incompressible, InitKind::incompressible) == 0.0);
    CHECK(uniqueness_probe(sc, disc, InitKind::incompressible, InitKind::uniform) < 1e-7);
    CHECK(uniqueness_probe(sc, disc, InitKind::incompressible, InitKind::scaled) < 1e-7);
    for (InitKind k : {InitKind::incompressible, InitKind::uniform, InitKind::scaled})
        CHECK(init_kind_from_string(to_string(k)) == k);
}

TEST_CASE("pressure and Bernoulli") {
    Scenario cyl;
    cyl.gas.epsilon = 0.0;
    cyl.L = 5.0;
    cyl.n_s = 4;
    cyl.h_z = 0.5;
    cyl.solver.linear_tol = 1e-13;
    const FlowState s = solve_scenario(cyl, scenario_discretization(cyl));
    for (double p : bernoulli_and_pressure(s).pressure) CHECK(std::abs(p) < 1e-12);

    const Scenario sc = bump_scenario(0.2);
    const FlowState c = solve_scenario(sc, scenario_discretization(sc));
    CHECK(bernoulli_and_pressure(c).max_bernoulli_residual < 1e-10);

    Scenario inc = bump_scenario(0.0);
    inc.force = ForceField::zero();
    const FlowState b = solve_scenario(inc, scenario_discretization(inc));
    const auto& m = b.mesh();
    // wall streamline: first cell column over the obstacle
    std::size_t jp = 0, jq = 0;
    double pmin = 1e300, qmax = 0.0;
    for (std::size_t j = 0; j < m.n_z(); ++j) {
        const std::size_t c = m.cell(0, j);
        const double q = std::hypot(b.u_r[c], b.u_z[c]);
        if (b.pressure[c] < pmin) pmin = b.pressure[c], jp = j;
        if (q > qmax) qmax = q, jq = j;
    }
    CHECK(jp == jq);
    CHECK(std::abs(b.disc->center(m.cell(0, jp)).z) < 1.0);
    // inlet section average is the gauge zero
    double avg = 0.0, w = 0.0;
    for (std::size_t i = 0; i < m.n_s(); ++i) {
        const std::size_t c = m.cell(i, 0);
        avg += b.disc->cell_measure(c) * b.pressure[c];
        w += b.disc->cell_measure(c);
    }
    CHECK(std::abs(avg / w) < 1e-12);
}

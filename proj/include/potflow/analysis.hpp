#pragma once

// Verification harness: mass flux, far-field rate fits, low-Mach and
// truncation studies, uniqueness probes.

#include <string>
#include <vector>

#include "potflow/solvers.hpp"

namespace potflow {

// Everything needed to rebuild and solve one configuration.
struct Scenario {
    ProfileParams profile;
    double L = 10.0;
    std::size_t n_s = 8;
    double h_z = 0.25;
    Symmetry symmetry = Symmetry::axisymmetric;
    GasModel gas;
    ForceField force;
    double m0 = 3.141592653589793;
    SolverConfig solver;
};

DiscretizationPtr scenario_discretization(const Scenario& sc, double L);
inline DiscretizationPtr scenario_discretization(const Scenario& sc) { return scenario_discretization(sc, sc.L); }
// Compressible solve when gas.epsilon > 0, incompressible otherwise.
FlowState solve_scenario(const Scenario& sc, DiscretizationPtr disc, const FlowState* init = nullptr);

// Axial window (z0, z1); cells whose centre lies strictly inside are used.
struct Window {
    double z0 = 0.0;
    double z1 = 0.0;
};

// Weighted flux through the station nearest to t (Galerkin layer flux).
// Throws RangeError outside [-L, L].
double mass_flux(const FlowState& state, double t);

// max_{t1,t2} |flux(t1) - flux(t2)| / |achieved_flux| over `count` evenly
// spaced stations (including both ends).
double flux_deviation(const FlowState& state, std::size_t count = 10);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double half_width = 0.0;  // 95% confidence half-width of the slope
    std::size_t points = 0;
};
// Least squares y = intercept + slope x. Throws InsufficientDataError with
// fewer than 3 distinct abscissae.
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

enum class RateModel { exponential, algebraic };
std::string to_string(RateModel m);
RateModel rate_model_from_string(const std::string& s);

struct RateWindow {
    double T = 0.0;
    double d_l2 = 0.0;
    double d_linf = 0.0;
    bool used = false;  // false: below the floor
};

struct RateFit {
    RateModel model = RateModel::exponential;
    double rate = 0.0;       // decay rate (exponential) or exponent (algebraic)
    double prefactor = 0.0;  // D ~ C exp(-rate T) or C T^-rate
    double r_squared = 0.0;
    double half_width = 0.0;
    double floor = 0.0;
    std::vector<RateWindow> windows;
    std::vector<std::string> warnings;
};

// Fit of D(T) by the given model (no floor).
RateFit fit_rate(const std::vector<double>& T, const std::vector<double>& D, RateModel model);

// Reference velocity: a constant (u_r, u_z) or a state on the same grid
// topology (compared cell by cell).
struct VelocityReference {
    double u_r = 0.0;
    double u_z = 0.0;
    const FlowState* state = nullptr;

    static VelocityReference constant(double axial_speed) { return {0.0, axial_speed, nullptr}; }
    static VelocityReference field(const FlowState& s) { return {0.0, 0.0, &s}; }
};

// Windowed distances D(T) on (T, T+1) in L-infinity (fitted) and L2
// (reported). Windows with D below 10x the solver tolerance are flagged and
// excluded. Throws RangeError for windows outside the mesh or before K + 1,
// InsufficientDataError with fewer than 3 usable windows.
RateFit far_field_rate(const FlowState& state, const VelocityReference& ref, const std::vector<double>& T_list,
                       RateModel model);

struct StudyRecord {
    double parameter = 0.0;
    double velocity_metric = 0.0;
    double density_metric = 0.0;
    bool accepted = true;
    std::string note;
};

struct StudyReport {
    std::string description;
    std::vector<StudyRecord> records;
    LinearFit velocity_fit;
    LinearFit density_fit;
    bool has_fit = false;
    double target = 0.0;
    double tolerance = 0.0;
    double floor = 0.0;
    bool pass = false;
    std::vector<std::string> notes;
};

// Delta(eps) = ||grad phi^eps - grad phi-bar||_inf and ||rho^eps - 1||_inf on
// the window; log-log slopes against eps (target 2, tolerance 0.2). Rejected
// eps values are recorded as choked and excluded.
StudyReport low_mach_study(const Scenario& sc, const std::vector<double>& eps_list, const Window& window);

// delta(L) = ||grad phi_L - grad phi_{L_max}||_inf on the window for each
// L < L_max. Passes if delta strictly decreases and stays above the floor.
StudyReport truncation_study(const Scenario& sc, const std::vector<double>& L_list, const Window& window);

enum class InitKind { incompressible, uniform, scaled };
std::string to_string(InitKind k);
InitKind init_kind_from_string(const std::string& s);
// Initial state for the compressible solve: the incompressible solution,
// uniform flow at q-bar, or 1.5 x the incompressible potential.
FlowState initial_state(const Scenario& sc, DiscretizationPtr disc, InitKind kind);

// max over the mesh of |grad phi_a - grad phi_b| for two initialisations.
double uniqueness_probe(const Scenario& sc, DiscretizationPtr disc, InitKind a, InitKind b);

// Maximum |u_a - u_b| over cells of two states on the same grid topology
// (restricted to the window when given).
double max_velocity_difference(const FlowState& a, const FlowState& b, const Window* window = nullptr);

struct PressureReport {
    std::vector<double> pressure;
    double max_bernoulli_residual = 0.0;
};
PressureReport bernoulli_and_pressure(const FlowState& state);

}  // namespace potflow

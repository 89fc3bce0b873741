#pragma once

// Finite-element solves of the truncated incompressible and compressible
// problems on Omega_L, plus the cylinder background states.
//
// Weak form (frozen coefficient a, weight w):
//   sum_cells a w grad(phi) . grad(psi) = int_{Sigma_L} g psi w,
//   phi = 0 on the inlet, natural slip on walls and axis.

#include <functional>
#include <string>
#include <vector>

#include "potflow/discretization.hpp"
#include "potflow/force_field.hpp"
#include "potflow/gas_model.hpp"
#include "potflow/linear_solver.hpp"

namespace potflow {

struct SolverConfig {
    double linear_tol = 1e-12;
    double picard_tol = 1e-10;
    int max_picard = 200;
    double damping = 1.0;
    int max_linear = 50000;
    double inlet_potential = 0.0;  // Dirichlet datum (gauge)
    bool allow_truncation = false; // return truncated states instead of throwing

    // Throws DomainError naming the violated bound.
    void validate() const;
};

struct SolverDiagnostics {
    int picard_iterations = 0;
    int linear_iterations = 0;
    std::vector<double> update_history;
    std::vector<double> energy_history;  // J relative to the initial iterate
    int damping_halvings = 0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double outlet_speed = 0.0;           // q_out of the outlet datum
    double max_mach = 0.0;
    double max_bernoulli_residual = 0.0;
    bool truncation_active = false;
    double linear_tol = 0.0;
    double picard_tol = 0.0;
};

struct FlowState {
    DiscretizationPtr disc;
    GasModel gas;                        // epsilon = 0 for incompressible states
    ForceField force;
    bool compressible = false;
    double m0 = 0.0;
    double inlet_potential = 0.0;

    std::vector<double> potential;       // nodal
    std::vector<double> u_r, u_z;        // per cell (centre)
    std::vector<double> rho, mach, pressure;
    std::vector<unsigned char> truncated;
    std::vector<double> quad_density;    // coefficient at quadrature points
    double achieved_flux = 0.0;
    SolverDiagnostics diag;

    const MeridianMesh& mesh() const { return disc->mesh(); }
    // Solver floor used by the analyses: max(linear_tol, picard_tol).
    double tolerance() const;
};

// Recomputes every derived field (velocity, density, Mach, pressure,
// flags, quadrature coefficients, achieved flux) from `state.potential`.
void finalize_state(FlowState& state);

// Builds a state from nodal values (e.g. an initial guess or a dump).
FlowState state_from_potential(DiscretizationPtr disc, const GasModel& gas, const ForceField& force,
                               bool compressible, double m0, std::vector<double> potential,
                               double inlet_potential = 0.0);

FlowState solve_incompressible(DiscretizationPtr disc, double m0, const SolverConfig& cfg = {});

// Damped Picard (Kacanov) iteration from `init` (default: incompressible
// solution). Throws SubsonicityError if the truncation is active at
// convergence, ConvergenceError at the iteration cap, ChokingError if no
// subsonic outlet datum exists.
FlowState solve_compressible(DiscretizationPtr disc, const GasModel& gas, const ForceField& force,
                             double m0, const FlowState* init = nullptr, const SolverConfig& cfg = {});

// eps^-4 [ sum (G(|grad phi|^2) - G(|grad base|^2) - grad base . grad(phi - base)) ]
// with the outlet correction of the flux datum; 1/2 int |grad(phi - base)|^2
// when eps = 0. Throws UsageError for mismatched meshes.
double discrete_energy(const FlowState& state, const FlowState& base);

// Galerkin flux through station j (see docs/formats.md for the convention):
// the discrete weak form tested with the step function of stations >= j.
double station_flux(const FlowState& state, std::size_t j);

// Speed q with sum_k w_k rho(q^2, phi_k) q = m0 on the subsonic branch.
struct UniformSpeed {
    double speed = 0.0;
    double ceiling = 0.0;  // flux at the smallest critical speed
    double residual = 0.0;
};
UniformSpeed solve_uniform_speed(const GasModel& gas, const std::vector<double>& phi,
                                 const std::vector<double>& weights, double m0);

struct UniformCylinderState {
    double q_bar = 0.0;
    double ceiling = 0.0;
    double residual = 0.0;
    std::vector<double> r;    // Gauss nodes on [0, 1]
    std::vector<double> rho;  // rho(q_bar^2, phi_bar(r))
};
// Throws UsageError if the force depends on z, ChokingError above the sonic
// flux limit.
UniformCylinderState uniform_cylinder_state(const GasModel& gas, const ForceField& radial_force,
                                            double m0, Symmetry symmetry = Symmetry::axisymmetric);

// Compressible solve on the f1 = 1, obstacle-free mesh with the same L,
// n_s, h_z and symmetry as `like`.
FlowState solve_cylinder_reference(const MeridianMesh& like, const GasModel& gas,
                                   const ForceField& force, double m0, const SolverConfig& cfg = {});

// Potential q (z + L) of uniform axial flow.
std::vector<double> uniform_potential(const Discretization& disc, double speed);

// Generic linear problem with unit coefficient, used for manufactured
// solutions: int w grad phi . grad psi = int w f psi + int_{boundary} w g psi,
// phi = dirichlet on the inlet. `flux` receives (r, z, n_r, n_z) and is
// applied on every boundary except the inlet.
struct LinearProblem {
    std::function<double(double, double)> source;
    std::function<double(double, double, double, double)> flux;
    std::function<double(double, double)> dirichlet;
};
std::vector<double> solve_linear_problem(const Discretization& disc, const LinearProblem& problem,
                                         const SolverConfig& cfg, CgStats* stats = nullptr);

// Per-cell (u_r, u_z) at cell centres.
void cell_velocities(const Discretization& disc, const std::vector<double>& potential,
                     std::vector<double>& u_r, std::vector<double>& u_z);

}  // namespace potflow

#pragma once

// Polytropic gas closures for the scaled potential-flow model
//
//   p = (rho^gamma - 1) / eps^2,   h~(rho) = gamma rho^(gamma-1) / (gamma-1),
//   |u|^2/2 + (h~(rho) - h~(1)) / eps^2 = phi_f        (Bernoulli),
//
// together with the subsonic truncation rho^ that keeps the potential
// operator uniformly elliptic. All functions are pure.

#include <limits>

namespace potflow {

struct GasModel {
    double gamma = 1.4;
    double epsilon = 0.1;    // compressibility parameter, 0 = incompressible
    double theta = 0.9;      // truncation Mach threshold
    double epsilon0 = 0.5;   // truncation reference parameter

    // Throws DomainError naming the violated bound.
    void validate() const;
};

struct DensityEval {
    double rho = 1.0;
    double drho_dG = 0.0;    // d rho / d(|u|^2)
    double drho_dphi = 0.0;  // d rho / d phi_f
    bool truncated = false;
};

namespace gas {

inline constexpr double kNoSonicBarrier = std::numeric_limits<double>::infinity();

double pressure_law(const GasModel& gas, double rho);     // p~(rho) = rho^gamma
double pressure_law_d1(const GasModel& gas, double rho);  // p~'(rho)
double pressure_law_d2(const GasModel& gas, double rho);  // p~''(rho)

double enthalpy(const GasModel& gas, double rho);
double enthalpy_inverse(const GasModel& gas, double h);

// rho^eps(G, phi_f) from Bernoulli. Throws CavitationError past vacuum.
DensityEval density_from_bernoulli(double G, double phi_f, const GasModel& gas);

// Speed at which the Bernoulli-consistent Mach number equals theta at
// compressibility eps: mu sqrt(2 (phi_f + h~(1)/eps^2)). Returns
// kNoSonicBarrier when eps = 0.
double threshold_speed(double theta, double phi_f, double gamma, double eps);
double critical_speed(double theta, double phi_f, const GasModel& gas);

double mach(double speed, double rho, const GasModel& gas);
double sound_speed(double rho, const GasModel& gas);

// (p~(rho) - p~(1)) / eps^2 without cancellation. Requires eps > 0; the
// incompressible pressure comes from the Bernoulli law instead.
double scaled_pressure(double rho, const GasModel& gas);

// (h^eps(rho) - h^eps(1)) evaluated without cancellation.
double scaled_enthalpy_difference(double rho, const GasModel& gas);

// Knot speeds of the truncation: q_lo = q°_theta, q_hi = q°_{(theta+1)/2},
// both evaluated at eps0 (the infimum over eps in (0, eps0]).
struct TruncationKnots {
    double q_lo = 0.0;
    double q_hi = 0.0;
};
TruncationKnots truncation_knots(double phi_f, const GasModel& gas);

// Plateau value of q^ = sup_x ((q°_{(theta+1)/2})^2 - 2 phi_f), given the
// infimum of phi_f over the domain.
double truncation_plateau(const GasModel& gas, double phi_lower);

// The modified squared-speed variable q^(q^2, phi_f) and its partials.
struct ModifiedSpeed {
    double value = 0.0;
    double d_dq = 0.0;    // d q^ / d|q|
    double d_dphi = 0.0;  // d q^ / d phi_f
    bool truncated = false;
};
ModifiedSpeed modified_speed(double G, double phi_f, const GasModel& gas, double phi_lower);

// rho^eps with the subsonic truncation. Identical (bitwise) to
// density_from_bernoulli for sqrt(G) <= q°_theta. `phi_lower` is the
// infimum of the force potential over the domain.
DensityEval truncated_density(double G, double phi_f, const GasModel& gas,
                              double phi_lower = 0.0);

// rho^ - 1 without cancellation (small for small eps).
double truncated_density_deficit(double G, double phi_f, const GasModel& gas, double phi_lower = 0.0);

// Coefficient of the linearised operator along the flow direction,
// rho + 2 G drho/dG. Positive iff the operator is elliptic.
inline double streamwise_coefficient(const DensityEval& d, double G) {
    return d.rho + 2.0 * d.drho_dG * G;
}

}  // namespace gas
}  // namespace potflow

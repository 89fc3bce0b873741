#include "potflow/gas_model.hpp"

#include <cmath>
#include <string>

#include "potflow/errors.hpp"

namespace potflow {

void GasModel::validate() const {
    if (!(gamma > 1.0)) throw DomainError("GasModel: gamma > 1 required, got " + std::to_string(gamma));
    if (!(theta > 0.0 && theta < 1.0))
        throw DomainError("GasModel: 0 < theta < 1 required, got " + std::to_string(theta));
    if (!(epsilon0 > 0.0 && epsilon0 < 1.0))
        throw DomainError("GasModel: 0 < epsilon0 < 1 required, got " + std::to_string(epsilon0));
    if (!(epsilon >= 0.0 && epsilon <= epsilon0))
        throw DomainError("GasModel: 0 <= epsilon <= epsilon0 required, got epsilon=" +
                          std::to_string(epsilon));
}

namespace gas {

namespace {

double theta_mu_squared(double theta, double gamma) {
    const double t = (gamma - 1.0) * theta * theta;
    return t / (2.0 + t);
}

// rho = (1 + y)^(1/(gamma-1)) with y the scaled enthalpy increment.
DensityEval density_from_increment(double y, double eps, double gamma) {
    if (!(1.0 + y > 0.0)) {
        throw CavitationError("density: enthalpy argument nonpositive (state beyond vacuum)");
    }
    DensityEval out;
    out.rho = std::exp(std::log1p(y) / (gamma - 1.0));
    out.drho_dG = -eps * eps * out.rho / (2.0 * gamma * (1.0 + y));
    out.drho_dphi = -2.0 * out.drho_dG;
    return out;
}

}  // namespace

double pressure_law(const GasModel& gas, double rho) { return std::pow(rho, gas.gamma); }

double pressure_law_d1(const GasModel& gas, double rho) {
    return gas.gamma * std::pow(rho, gas.gamma - 1.0);
}

double pressure_law_d2(const GasModel& gas, double rho) {
    return gas.gamma * (gas.gamma - 1.0) * std::pow(rho, gas.gamma - 2.0);
}

double enthalpy(const GasModel& gas, double rho) {
    if (!(rho > 0.0)) throw DomainError("enthalpy: density must be positive");
    return gas.gamma * std::pow(rho, gas.gamma - 1.0) / (gas.gamma - 1.0);
}

double enthalpy_inverse(const GasModel& gas, double h) {
    if (!(h > 0.0)) throw DomainError("enthalpy_inverse: enthalpy must be positive (vacuum)");
    return std::pow((gas.gamma - 1.0) * h / gas.gamma, 1.0 / (gas.gamma - 1.0));
}

DensityEval density_from_bernoulli(double G, double phi_f, const GasModel& gas) {
    const double eps2 = gas.epsilon * gas.epsilon;
    const double y = eps2 * (gas.gamma - 1.0) * (2.0 * phi_f - G) / (2.0 * gas.gamma);
    return density_from_increment(y, gas.epsilon, gas.gamma);
}

double threshold_speed(double theta, double phi_f, double gamma, double eps) {
    if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("threshold speed: theta must lie in (0,1]");
    if (eps == 0.0) return kNoSonicBarrier;
    const double h1 = gamma / ((gamma - 1.0) * eps * eps);
    if (!(phi_f + h1 > 0.0)) throw DomainError("threshold speed: phi_f + h(1) must be positive");
    return std::sqrt(theta_mu_squared(theta, gamma) * 2.0 * (phi_f + h1));
}

double critical_speed(double theta, double phi_f, const GasModel& gas) {
    return threshold_speed(theta, phi_f, gas.gamma, gas.epsilon);
}

double sound_speed(double rho, const GasModel& gas) {
    if (gas.epsilon == 0.0) return kNoSonicBarrier;
    return std::sqrt(pressure_law_d1(gas, rho)) / gas.epsilon;
}

double mach(double speed, double rho, const GasModel& gas) {
    if (!(rho > 0.0) || speed < 0.0) throw DomainError("mach: need rho > 0 and speed >= 0");
    return gas.epsilon * speed / std::sqrt(pressure_law_d1(gas, rho));
}

double scaled_pressure(double rho, const GasModel& gas) {
    if (!(gas.epsilon > 0.0)) throw DomainError("scaled_pressure: epsilon must be positive");
    return std::expm1(gas.gamma * std::log(rho)) / (gas.epsilon * gas.epsilon);
}

double scaled_enthalpy_difference(double rho, const GasModel& gas) {
    if (!(gas.epsilon > 0.0)) throw DomainError("scaled_enthalpy_difference: epsilon must be positive");
    return gas.gamma / (gas.gamma - 1.0) * std::expm1((gas.gamma - 1.0) * std::log(rho)) /
           (gas.epsilon * gas.epsilon);
}

TruncationKnots truncation_knots(double phi_f, const GasModel& gas) {
    return {threshold_speed(gas.theta, phi_f, gas.gamma, gas.epsilon0),
            threshold_speed(0.5 * (gas.theta + 1.0), phi_f, gas.gamma, gas.epsilon0)};
}

double truncation_plateau(const GasModel& gas, double phi_lower) {
    // (q°_hi)^2 - 2 phi = 2 mu^2 h0 - 2 (1 - mu^2) phi is largest at inf phi.
    const double mu2 = theta_mu_squared(0.5 * (gas.theta + 1.0), gas.gamma);
    const double h0 = gas.gamma / ((gas.gamma - 1.0) * gas.epsilon0 * gas.epsilon0);
    return 2.0 * mu2 * h0 - 2.0 * (1.0 - mu2) * phi_lower;
}

// Exponent of the blend drop (larger: sharper drop, max slope ratio nearer 1).
constexpr double kBlendPower = 24.0;

ModifiedSpeed modified_speed(double G, double phi_f, const GasModel& gas, double phi_lower) {
    const double q = std::sqrt(G);
    const TruncationKnots k = truncation_knots(phi_f, gas);
    ModifiedSpeed out;
    if (q <= k.q_lo) {
        out.value = G - 2.0 * phi_f;
        out.d_dq = 2.0 * q;
        out.d_dphi = -2.0;
        return out;
    }
    out.truncated = true;
    const double plateau = truncation_plateau(gas, phi_lower);
    if (q >= k.q_hi) {
        out.value = plateau;
        return out;
    }

    // Blend: d q^/dq = 2 q sigma(t), t = (q - q_lo) / w on [q_lo, q_hi], with
    // sigma = (1 + b t)(1 - t^p). sigma(0) = 1 and sigma(1) = 0 make q^ C^1;
    // b is fixed by q^(q_hi) = plateau. The sharp drop keeps max sigma near 1,
    // so rho^ + 2 G rho^_G stays positive up to eps = eps0.
    constexpr double p = kBlendPower;
    const double mu2_lo = theta_mu_squared(gas.theta, gas.gamma);
    const double mu2_hi = theta_mu_squared(0.5 * (gas.theta + 1.0), gas.gamma);
    const double ql = k.q_lo;
    const double w = k.q_hi - k.q_lo;
    const double t = (q - ql) / w;
    const double v0 = ql * ql - 2.0 * phi_f;
    const double R = plateau - v0;

    // M_k(x) = int_0^x s^k (1 - s^p) ds
    auto M = [](int k, double x) { return std::pow(x, k + 1) / (k + 1) - std::pow(x, k + 1 + p) / (k + 1 + p); };
    const double M0 = M(0, 1.0), M1 = M(1, 1.0), M2 = M(2, 1.0);
    const double N = R / w - 2.0 * ql * M0 - 2.0 * w * M1;
    const double D = 2.0 * ql * M1 + 2.0 * w * M2;
    const double b = N / D;

    // int_0^t 2 (ql + w s)(1 + b s)(1 - s^p) ds, expanded in moments
    const double m0t = M(0, t), m1t = M(1, t), m2t = M(2, t);
    const double F = 2.0 * (ql * m0t + (w + b * ql) * m1t + b * w * m2t);
    const double sigma = (1.0 + b * t) * (1.0 - std::pow(t, p));
    out.value = v0 + w * F;
    out.d_dq = 2.0 * q * sigma;

    // phi_f moves the knots: d q_lo/d phi = mu_lo^2 / q_lo, same for q_hi.
    const double dql = mu2_lo / ql;
    const double dw = mu2_hi / k.q_hi - dql;
    const double dv0 = 2.0 * mu2_lo - 2.0;
    const double dN = (-dv0 * w - R * dw) / (w * w) - 2.0 * dql * M0 - 2.0 * dw * M1;
    const double dD = 2.0 * dql * M1 + 2.0 * dw * M2;
    const double db = (dN * D - N * dD) / (D * D);
    const double dt = -(dql + t * dw) / w;
    const double dF = 2.0 * (dql * (m0t + b * m1t) + dw * (m1t + b * m2t) + db * (ql * m1t + w * m2t));
    out.d_dphi = dv0 + dw * F + w * dF + w * (2.0 * q * sigma) * dt;
    return out;
}

DensityEval truncated_density(double G, double phi_f, const GasModel& gas, double phi_lower) {
    const TruncationKnots k = truncation_knots(phi_f, gas);
    if (std::sqrt(G) <= k.q_lo) return density_from_bernoulli(G, phi_f, gas);

    const ModifiedSpeed qh = modified_speed(G, phi_f, gas, phi_lower);
    const double eps2 = gas.epsilon * gas.epsilon;
    const double y = -eps2 * (gas.gamma - 1.0) * qh.value / (2.0 * gas.gamma);
    if (!(1.0 + y > 0.0)) {
        throw CavitationError("truncated density: plateau lies beyond vacuum; force potential too large");
    }
    DensityEval out;
    out.rho = std::exp(std::log1p(y) / (gas.gamma - 1.0));
    const double drho_dqh = -eps2 * out.rho / (2.0 * gas.gamma * (1.0 + y));
    out.drho_dG = drho_dqh * qh.d_dq / (2.0 * std::sqrt(G));
    out.drho_dphi = drho_dqh * qh.d_dphi;
    out.truncated = true;
    return out;
}

double truncated_density_deficit(double G, double phi_f, const GasModel& gas, double phi_lower) {
    const double eps2 = gas.epsilon * gas.epsilon;
    const TruncationKnots k = truncation_knots(phi_f, gas);
    const double qh = std::sqrt(G) <= k.q_lo ? G - 2.0 * phi_f : modified_speed(G, phi_f, gas, phi_lower).value;
    const double y = -eps2 * (gas.gamma - 1.0) * qh / (2.0 * gas.gamma);
    if (!(1.0 + y > 0.0)) throw CavitationError("density: enthalpy argument nonpositive (state beyond vacuum)");
    return std::expm1(std::log1p(y) / (gas.gamma - 1.0));
}

}  // namespace gas
}  // namespace potflow

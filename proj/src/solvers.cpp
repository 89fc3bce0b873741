#include "potflow/solvers.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "potflow/errors.hpp"
#include "potflow/kernels.hpp"

namespace potflow {

namespace {

using boost::math::quadrature::gauss;

struct OutletDatum {
    double speed = 0.0;
    double area = 0.0;          // sum of edge weights, |Sigma_L|
    std::vector<double> g;      // flux density per outlet edge point
};

double phi_lower_of(const ForceField& force) { return std::min(0.0, force.bounds().inf); }

OutletDatum outlet_datum(const Discretization& disc, const GasModel& gas, const ForceField& force,
                         double m0) {
    const auto& pts = disc.edge_points(BoundaryTag::outlet);
    std::vector<double> phi(pts.size()), w(pts.size());
    OutletDatum out;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        phi[k] = force.eval(pts[k].r, pts[k].z);
        w[k] = pts[k].wlen;
        out.area += w[k];
    }
    out.g.resize(pts.size());
    if (gas.epsilon == 0.0) {
        out.speed = m0 / out.area;
        std::fill(out.g.begin(), out.g.end(), out.speed);
        return out;
    }
    out.speed = solve_uniform_speed(gas, phi, w, m0).speed;
    for (std::size_t k = 0; k < pts.size(); ++k)
        out.g[k] = gas::density_from_bernoulli(out.speed * out.speed, phi[k], gas).rho * out.speed;
    return out;
}

std::vector<double> outlet_load(const Discretization& disc, const OutletDatum& datum) {
    std::vector<double> b(disc.node_count(), 0.0);
    const auto& pts = disc.edge_points(BoundaryTag::outlet);
    for (std::size_t k = 0; k < pts.size(); ++k) {
        b[pts[k].node0] += pts[k].wlen * datum.g[k] * pts[k].N0;
        b[pts[k].node1] += pts[k].wlen * datum.g[k] * pts[k].N1;
    }
    return b;
}

std::vector<double> force_at_quads(const Discretization& disc, const ForceField& force) {
    std::vector<double> out(disc.quads().size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = force.eval(disc.quads()[k].r, disc.quads()[k].z);
    return out;
}

kernels::DensityKernelArgs density_args(const GasModel& gas, const ForceField& force) {
    return {gas.gamma, gas.epsilon, gas.theta, gas.epsilon0, phi_lower_of(force)};
}

// int_b^a (rho^(s) - 1) ds, split at the truncation knots.
double deficit_integral(double b, double a, double phi, const GasModel& gas, double phi_lower) {
    if (a == b) return 0.0;
    const double sign = a > b ? 1.0 : -1.0;
    const double lo = std::min(a, b), hi = std::max(a, b);
    const auto knots = gas::truncation_knots(phi, gas);
    double cuts[4] = {lo, 0.0, 0.0, hi};
    int n = 1;
    for (double k : {knots.q_lo * knots.q_lo, knots.q_hi * knots.q_hi})
        if (k > lo && k < hi) cuts[n++] = k;
    cuts[n] = hi;
    auto f = [&](double s) { return gas::truncated_density_deficit(s, phi, gas, phi_lower); };
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += gauss<double, 10>::integrate(f, cuts[i], cuts[i + 1]);
    return sign * sum;
}

// Energy of phi relative to base. With `linear` the first-order term
// grad(base).grad(d) is included and the outlet load is g itself, giving
// E(phi) - E(base) exactly; otherwise the outlet load is g - m0/|Sigma|.
double energy_between(const Discretization& disc, const GasModel& gas, const ForceField& force,
                      const std::vector<double>& phi_q, const std::vector<double>& phi,
                      const std::vector<double>& base, const OutletDatum& datum, double m0, bool linear,
                      double* noise = nullptr) {
    const std::size_t nq = disc.quads().size();
    std::vector<double> ga(2 * nq), gb(2 * nq);
    kernels::quad_gradients_serial(disc, phi, ga);
    kernels::quad_gradients_serial(disc, base, gb);
    const bool comp = gas.epsilon > 0.0;
    const double lower = phi_lower_of(force);
    double sum = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < nq; ++k) {
        const double wdet = disc.quads()[k].wdet;
        const double dr = ga[2 * k] - gb[2 * k], dz = ga[2 * k + 1] - gb[2 * k + 1];
        const double a = ga[2 * k] * ga[2 * k] + ga[2 * k + 1] * ga[2 * k + 1];
        const double b = gb[2 * k] * gb[2 * k] + gb[2 * k + 1] * gb[2 * k + 1];
        double e = 0.5 * (dr * dr + dz * dz);
        if (comp) e += 0.5 * deficit_integral(b, a, phi_q[k], gas, lower);
        if (linear) e += gb[2 * k] * dr + gb[2 * k + 1] * dz;
        sum += wdet * e;
        scale += wdet * (a + std::abs(phi_q[k]) + 1.0);
    }
    const auto& pts = disc.edge_points(BoundaryTag::outlet);
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const double load = linear ? datum.g[k] : datum.g[k] - m0 / datum.area;
        const double d = pts[k].N0 * (phi[pts[k].node0] - base[pts[k].node0]) +
                         pts[k].N1 * (phi[pts[k].node1] - base[pts[k].node1]);
        sum -= pts[k].wlen * load * d;
    }
    const double s = comp ? 1.0 / std::pow(gas.epsilon, 4) : 1.0;
    if (noise) *noise = 64.0 * DBL_EPSILON * scale * s;
    return sum * s;
}

double l2(const std::vector<double>& v) { return std::sqrt(kernels::dot(v, v)); }

void require_positive_flux(double m0) {
    if (!(m0 > 0.0)) throw DomainError("mass flux m0 must be positive");
}

// Finalises from a zero-datum potential, then applies the gauge offset.
void finalize_zero_datum(FlowState& s, std::vector<double> phi0) {
    const double datum = s.inlet_potential;
    s.potential = std::move(phi0);
    s.inlet_potential = 0.0;
    finalize_state(s);
    s.inlet_potential = datum;
    if (datum != 0.0)
        for (double& v : s.potential) v += datum;
}

CgStats linear_solve(const Discretization& disc, const std::vector<double>& coef, std::vector<double> b,
                     std::vector<double>& x, const SolverConfig& cfg) {
    CsrMatrix A = disc.pattern();
    kernels::assemble_stiffness(disc, coef, A);
    const auto& inlet = disc.inlet_nodes();
    const std::vector<double> zeros(inlet.size(), 0.0);
    apply_dirichlet(A, b, inlet, zeros, true);
    for (std::size_t n : inlet) x[n] = 0.0;
    return solve_pcg(A, b, x, cfg.linear_tol, cfg.max_linear);
}

}  // namespace

void SolverConfig::validate() const {
    if (!(linear_tol > 0.0)) throw DomainError("SolverConfig: linear_tol > 0 required");
    if (!(picard_tol > 0.0)) throw DomainError("SolverConfig: picard_tol > 0 required");
    if (max_picard < 1) throw DomainError("SolverConfig: max_picard >= 1 required");
    if (max_linear < 1) throw DomainError("SolverConfig: max_linear >= 1 required");
    if (!(damping > 0.0 && damping <= 1.0)) throw DomainError("SolverConfig: damping in (0, 1] required");
}

double FlowState::tolerance() const { return std::max(diag.linear_tol, diag.picard_tol); }

void cell_velocities(const Discretization& disc, const std::vector<double>& potential,
                     std::vector<double>& u_r, std::vector<double>& u_z) {
    const std::size_t nc = disc.cell_count();
    u_r.assign(nc, 0.0);
    u_z.assign(nc, 0.0);
    for (std::size_t c = 0; c < nc; ++c) {
        const auto& nodes = disc.cell_nodes(c);
        const QuadPoint& p = disc.center(c);
        for (int a = 1; a < 4; ++a) {
            const double v = potential[nodes[a]] - potential[nodes[0]];
            u_r[c] += p.dN_dr[a] * v;
            u_z[c] += p.dN_dz[a] * v;
        }
    }
}

void finalize_state(FlowState& s) {
    const Discretization& disc = *s.disc;
    const std::size_t nc = disc.cell_count(), nq = disc.quads().size();
    std::vector<double> phi0 = s.potential;
    if (s.inlet_potential != 0.0)
        for (double& v : phi0) v -= s.inlet_potential;
    cell_velocities(disc, phi0, s.u_r, s.u_z);

    const bool comp = s.compressible && s.gas.epsilon > 0.0;
    s.rho.assign(nc, 1.0);
    s.mach.assign(nc, 0.0);
    s.pressure.assign(nc, 0.0);
    s.truncated.assign(nc, 0);
    s.quad_density.assign(nq, 1.0);
    s.diag.max_mach = 0.0;
    s.diag.max_bernoulli_residual = 0.0;
    s.diag.truncation_active = false;

    if (comp) {
        std::vector<double> grads(2 * nq);
        kernels::quad_gradients(disc, phi0, grads);
        const auto phi_q = force_at_quads(disc, s.force);
        std::vector<unsigned char> tq(nq, 0);
        kernels::density_coefficients(density_args(s.gas, s.force), grads, phi_q, s.quad_density, tq);
        const double lower = phi_lower_of(s.force);
        for (std::size_t c = 0; c < nc; ++c) {
            const QuadPoint& p = disc.center(c);
            const double G = s.u_r[c] * s.u_r[c] + s.u_z[c] * s.u_z[c];
            const double phi_f = s.force.eval(p.r, p.z);
            const DensityEval d = gas::truncated_density(G, phi_f, s.gas, lower);
            s.rho[c] = d.rho;
            bool t = d.truncated;
            for (int q = 0; q < kGaussPerCell; ++q) t = t || tq[c * kGaussPerCell + q];
            s.truncated[c] = t ? 1 : 0;
            s.diag.truncation_active = s.diag.truncation_active || t;
            s.mach[c] = gas::mach(std::sqrt(G), d.rho, s.gas);
            s.pressure[c] = gas::scaled_pressure(d.rho, s.gas);
            s.diag.max_mach = std::max(s.diag.max_mach, s.mach[c]);
            if (!d.truncated) {
                const double res = 0.5 * G + gas::scaled_enthalpy_difference(d.rho, s.gas) - phi_f;
                s.diag.max_bernoulli_residual = std::max(s.diag.max_bernoulli_residual, std::abs(res));
            }
        }
    } else {
        // p = phi_f - |u|^2/2 + C, C fixing the inlet section average at 0.
        double avg = 0.0, meas = 0.0;
        for (std::size_t c = 0; c < nc; ++c) {
            const QuadPoint& p = disc.center(c);
            s.pressure[c] = s.force.eval(p.r, p.z) - 0.5 * (s.u_r[c] * s.u_r[c] + s.u_z[c] * s.u_z[c]);
        }
        for (std::size_t i = 0; i < disc.mesh().n_s(); ++i) {
            const std::size_t c = disc.mesh().cell(i, 0);
            avg += disc.cell_measure(c) * s.pressure[c];
            meas += disc.cell_measure(c);
        }
        const double C = meas > 0.0 ? -avg / meas : 0.0;
        for (double& p : s.pressure) p += C;
    }
    s.achieved_flux = station_flux(s, disc.mesh().n_z());
}

double station_flux(const FlowState& s, std::size_t j) {
    const Discretization& disc = *s.disc;
    const MeridianMesh& mesh = disc.mesh();
    if (j > mesh.n_z()) throw RangeError("station index outside the mesh");
    const std::size_t layer = j == 0 ? 0 : j - 1;
    double flux = 0.0;
    for (std::size_t i = 0; i < mesh.n_s(); ++i) {
        const std::size_t c = mesh.cell(i, layer);
        const auto& nodes = disc.cell_nodes(c);
        for (int q = 0; q < kGaussPerCell; ++q) {
            const QuadPoint& p = disc.quad(c, q);
            double gr = 0.0, gz = 0.0;
            for (int a = 1; a < 4; ++a) {
                const double v = s.potential[nodes[a]] - s.potential[nodes[0]];
                gr += p.dN_dr[a] * v;
                gz += p.dN_dz[a] * v;
            }
            const double coef = s.quad_density.empty() ? 1.0 : s.quad_density[c * kGaussPerCell + q];
            flux += coef * p.wdet * (gr * (p.dN_dr[2] + p.dN_dr[3]) + gz * (p.dN_dz[2] + p.dN_dz[3]));
        }
    }
    return flux;
}

FlowState state_from_potential(DiscretizationPtr disc, const GasModel& gas, const ForceField& force,
                               bool compressible, double m0, std::vector<double> potential,
                               double inlet_potential) {
    if (potential.size() != disc->node_count()) throw UsageError("potential size does not match the mesh");
    FlowState s;
    s.disc = std::move(disc);
    s.gas = gas;
    if (!compressible) s.gas.epsilon = 0.0;
    s.force = force;
    s.compressible = compressible;
    s.m0 = m0;
    s.inlet_potential = inlet_potential;
    s.potential = std::move(potential);
    finalize_state(s);
    return s;
}

std::vector<double> uniform_potential(const Discretization& disc, double speed) {
    const MeridianMesh& mesh = disc.mesh();
    std::vector<double> phi(mesh.node_count());
    for (std::size_t k = 0; k < phi.size(); ++k) phi[k] = speed * (mesh.z()[k] + mesh.half_length());
    return phi;
}

FlowState solve_incompressible(DiscretizationPtr disc, double m0, const SolverConfig& cfg) {
    cfg.validate();
    require_positive_flux(m0);
    GasModel gas;
    gas.epsilon = 0.0;
    const OutletDatum datum = outlet_datum(*disc, gas, ForceField::zero(), m0);
    std::vector<double> x(disc->node_count(), 0.0);
    const std::vector<double> coef(disc->quads().size(), 1.0);
    const CgStats st = linear_solve(*disc, coef, outlet_load(*disc, datum), x, cfg);

    FlowState s;
    s.disc = std::move(disc);
    s.gas = gas;
    s.force = ForceField::zero();
    s.m0 = m0;
    s.inlet_potential = cfg.inlet_potential;
    s.diag.linear_iterations = st.iterations;
    s.diag.lambda_min = st.lambda_min;
    s.diag.lambda_max = st.lambda_max;
    s.diag.outlet_speed = datum.speed;
    s.diag.linear_tol = cfg.linear_tol;
    s.diag.picard_tol = 0.0;
    finalize_zero_datum(s, std::move(x));
    return s;
}

FlowState solve_compressible(DiscretizationPtr disc, const GasModel& gas, const ForceField& force,
                             double m0, const FlowState* init, const SolverConfig& cfg) {
    cfg.validate();
    gas.validate();
    require_positive_flux(m0);
    if (gas.epsilon == 0.0) {
        FlowState s = solve_incompressible(disc, m0, cfg);
        s.gas = gas;
        s.force = force;
        s.compressible = true;
        s.diag.picard_iterations = 1;
        s.diag.picard_tol = cfg.picard_tol;
        SolverConfig zero_datum = cfg;
        zero_datum.inlet_potential = 0.0;
        finalize_zero_datum(s, solve_incompressible(disc, m0, zero_datum).potential);
        return s;
    }

    const Discretization& D = *disc;
    std::vector<double> phi;
    if (init) {
        if (!init->disc || !init->mesh().same_topology(D.mesh()))
            throw UsageError("initial state lives on a different mesh");
        phi = init->potential;
        if (init->inlet_potential != 0.0)
            for (double& v : phi) v -= init->inlet_potential;
    } else {
        SolverConfig zero_datum = cfg;
        zero_datum.inlet_potential = 0.0;
        phi = solve_incompressible(disc, m0, zero_datum).potential;
    }
    for (std::size_t n : D.inlet_nodes()) phi[n] = 0.0;

    const OutletDatum datum = outlet_datum(D, gas, force, m0);
    const std::vector<double> load = outlet_load(D, datum);
    const std::vector<double> phi_q = force_at_quads(D, force);
    const auto args = density_args(gas, force);
    const std::size_t nq = D.quads().size();
    std::vector<double> grads(2 * nq), coef(nq);
    std::vector<unsigned char> tq(nq);

    const std::vector<double> phi_start = phi;
    SolverDiagnostics diag;
    diag.linear_tol = cfg.linear_tol;
    diag.picard_tol = cfg.picard_tol;
    diag.outlet_speed = datum.speed;
    double J = 0.0;
    diag.energy_history.push_back(J);

    bool converged = false;
    for (int it = 1; it <= cfg.max_picard; ++it) {
        kernels::quad_gradients(D, phi, grads);
        kernels::density_coefficients(args, grads, phi_q, coef, tq);
        std::vector<double> x = phi;
        const CgStats st = linear_solve(D, coef, load, x, cfg);
        diag.linear_iterations += st.iterations;
        diag.lambda_min = st.lambda_min;
        diag.lambda_max = st.lambda_max;

        std::vector<double> d(phi.size());
        for (std::size_t k = 0; k < d.size(); ++k) d[k] = x[k] - phi[k];
        double omega = cfg.damping;
        std::vector<double> cand(phi.size());
        double J_new = 0.0;
        for (int halvings = 0;; ++halvings) {
            for (std::size_t k = 0; k < d.size(); ++k) cand[k] = phi[k] + omega * d[k];
            double noise = 0.0;
            J_new = energy_between(D, gas, force, phi_q, cand, phi_start, datum, m0, true, &noise);
            if (J_new <= J + 1e-10 * std::max(1.0, std::abs(J)) + noise || halvings >= 10) break;
            omega *= 0.5;
            ++diag.damping_halvings;
        }
        phi = cand;
        J = J_new;
        const double update = l2(d) / std::max(l2(phi), DBL_MIN);
        diag.update_history.push_back(update);
        diag.energy_history.push_back(J);
        diag.picard_iterations = it;
        if (update < cfg.picard_tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "Picard: no convergence in " << cfg.max_picard << " iterations (last update "
           << diag.update_history.back() << ")";
        throw ConvergenceError(os.str(), diag.update_history);
    }

    FlowState s;
    s.disc = std::move(disc);
    s.gas = gas;
    s.force = force;
    s.compressible = true;
    s.m0 = m0;
    s.inlet_potential = cfg.inlet_potential;
    s.diag = diag;
    finalize_zero_datum(s, std::move(phi));
    if (s.diag.truncation_active && !cfg.allow_truncation) {
        std::ostringstream os;
        os << "truncation active at convergence (eps=" << gas.epsilon << ", max Mach " << s.diag.max_mach
           << "); the truncated solution does not solve the physical problem";
        throw SubsonicityError(os.str());
    }
    return s;
}

double discrete_energy(const FlowState& state, const FlowState& base) {
    if (!state.disc || !base.disc || !state.mesh().same_topology(base.mesh()))
        throw UsageError("discrete_energy: state and base live on different meshes");
    const Discretization& D = *state.disc;
    const GasModel gas = state.compressible ? state.gas : GasModel{state.gas.gamma, 0.0};
    const OutletDatum datum = outlet_datum(D, gas, state.force, state.m0);
    std::vector<double> a = state.potential, b = base.potential;
    for (double& v : a) v -= state.inlet_potential;
    for (double& v : b) v -= base.inlet_potential;
    return energy_between(D, gas, state.force, force_at_quads(D, state.force), a, b, datum, state.m0, false);
}

UniformSpeed solve_uniform_speed(const GasModel& gas, const std::vector<double>& phi,
                                 const std::vector<double>& weights, double m0) {
    require_positive_flux(m0);
    double total = 0.0;
    for (double w : weights) total += w;
    UniformSpeed out;
    if (gas.epsilon == 0.0) {
        out.speed = m0 / total;
        out.ceiling = std::numeric_limits<double>::infinity();
        return out;
    }
    double q_max = std::numeric_limits<double>::infinity();
    for (double p : phi) q_max = std::min(q_max, gas::critical_speed(1.0, p, gas));
    auto flux = [&](double q, double* dflux) {
        double f = 0.0, df = 0.0;
        for (std::size_t k = 0; k < phi.size(); ++k) {
            const DensityEval d = gas::density_from_bernoulli(q * q, phi[k], gas);
            f += weights[k] * d.rho * q;
            df += weights[k] * gas::streamwise_coefficient(d, q * q);
        }
        if (dflux) *dflux = df;
        return f;
    };
    out.ceiling = flux(q_max, nullptr);
    if (m0 >= out.ceiling) {
        std::ostringstream os;
        os << "requested flux " << m0 << " is not below the sonic flux limit " << out.ceiling;
        throw ChokingError(os.str());
    }
    // Safeguarded Newton on the increasing branch [0, q_max].
    double lo = 0.0, hi = q_max;
    double q = std::min(m0 / total, 0.5 * (lo + hi));
    for (int it = 0; it < 200; ++it) {
        double df = 0.0;
        const double F = flux(q, &df) - m0;
        if (F > 0.0) hi = q; else lo = q;
        if (std::abs(F) <= 1e-15 * m0 || hi - lo <= 4.0 * DBL_EPSILON * hi) break;
        double next = q - F / df;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        q = next;
    }
    out.speed = q;
    out.residual = flux(q, nullptr) - m0;
    return out;
}

UniformCylinderState uniform_cylinder_state(const GasModel& gas, const ForceField& radial_force, double m0,
                                            Symmetry symmetry) {
    if (radial_force.depends_on_z())
        throw UsageError("uniform_cylinder_state: the force must be independent of z");
    constexpr int N = 64;
    const auto& x = gauss<double, N>::abscissa();
    const auto& wt = gauss<double, N>::weights();
    std::vector<double> r, phi, w;
    // Nodes on [-1, 1] mapped to [0, 1]; the tables hold the nonnegative half.
    for (std::size_t k = 0; k < x.size(); ++k) {
        for (int sgn : {-1, 1}) {
            if (sgn < 0 && x[k] == 0.0) continue;
            const double rr = 0.5 * (1.0 + sgn * x[k]);
            const double ww = 0.5 * wt[k] * (symmetry == Symmetry::axisymmetric ? 2.0 * std::numbers::pi * rr : 1.0);
            r.push_back(rr);
            w.push_back(ww);
            phi.push_back(radial_force.eval(rr, 0.0));
        }
    }
    const UniformSpeed u = solve_uniform_speed(gas, phi, w, m0);
    UniformCylinderState out;
    out.q_bar = u.speed;
    out.ceiling = u.ceiling;
    out.residual = u.residual;
    std::vector<std::size_t> order(r.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r[a] < r[b]; });
    for (std::size_t k : order) {
        out.r.push_back(r[k]);
        out.rho.push_back(gas.epsilon == 0.0 ? 1.0
                                             : gas::density_from_bernoulli(u.speed * u.speed, phi[k], gas).rho);
    }
    return out;
}

FlowState solve_cylinder_reference(const MeridianMesh& like, const GasModel& gas, const ForceField& force,
                                   double m0, const SolverConfig& cfg) {
    const NozzleProfile cyl = build_profile(ProfileParams{});
    auto disc = discretize(build_mesh(cyl, like.half_length(), like.n_s(), like.h_z(), like.symmetry()));
    if (gas.epsilon == 0.0) {
        FlowState s = solve_incompressible(disc, m0, cfg);
        return s;
    }
    return solve_compressible(disc, gas, force, m0, nullptr, cfg);
}

std::vector<double> solve_linear_problem(const Discretization& disc, const LinearProblem& problem,
                                         const SolverConfig& cfg, CgStats* stats) {
    cfg.validate();
    const std::size_t nn = disc.node_count();
    std::vector<double> b(nn, 0.0);
    for (std::size_t c = 0; c < disc.cell_count(); ++c) {
        const auto& nodes = disc.cell_nodes(c);
        for (int q = 0; q < kGaussPerCell; ++q) {
            const QuadPoint& p = disc.quad(c, q);
            const double f = problem.source ? problem.source(p.r, p.z) : 0.0;
            // Shape values at Gauss points: corner a is nearest to point a.
            const double g = 1.0 / std::sqrt(3.0);
            const double xi[4] = {-g, g, g, -g}, eta[4] = {-g, -g, g, g};
            const double cx[4] = {-1, 1, 1, -1}, cy[4] = {-1, -1, 1, 1};
            for (int a = 0; a < 4; ++a) {
                const double N = 0.25 * (1 + cx[a] * xi[q]) * (1 + cy[a] * eta[q]);
                b[nodes[a]] += p.wdet * f * N;
            }
        }
    }
    if (problem.flux) {
        for (BoundaryTag tag : {BoundaryTag::outlet, BoundaryTag::outer_wall, BoundaryTag::obstacle_wall,
                                BoundaryTag::axis}) {
            for (const EdgePoint& e : disc.edge_points(tag)) {
                const double g = problem.flux(e.r, e.z, e.n_r, e.n_z);
                b[e.node0] += e.wlen * g * e.N0;
                b[e.node1] += e.wlen * g * e.N1;
            }
        }
    }
    CsrMatrix A = disc.pattern();
    const std::vector<double> coef(disc.quads().size(), 1.0);
    kernels::assemble_stiffness(disc, coef, A);
    const auto& inlet = disc.inlet_nodes();
    std::vector<double> values(inlet.size(), 0.0);
    std::vector<double> x(nn, 0.0);
    for (std::size_t k = 0; k < inlet.size(); ++k) {
        const std::size_t n = inlet[k];
        values[k] = problem.dirichlet ? problem.dirichlet(disc.mesh().r()[n], disc.mesh().z()[n]) : 0.0;
        x[n] = values[k];
    }
    apply_dirichlet(A, b, inlet, values, true);
    const CgStats st = solve_pcg(A, b, x, cfg.linear_tol, cfg.max_linear);
    if (stats) *stats = st;
    return x;
}

}  // namespace potflow

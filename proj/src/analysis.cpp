#include "potflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "potflow/errors.hpp"

namespace potflow {

namespace {

bool in_window(double z, const Window& w) { return z > w.z0 && z < w.z1; }

double profile_K(const MeridianMesh& mesh) {
    if (!mesh.profile()) return -std::numeric_limits<double>::infinity();
    const ProfileParams& p = mesh.profile()->params();
    if (p.kind == ProfileKind::cylinder) return -std::numeric_limits<double>::infinity();
    return p.K;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

DiscretizationPtr scenario_discretization(const Scenario& sc, double L) {
    return discretize(build_mesh(build_profile(sc.profile), L, sc.n_s, sc.h_z, sc.symmetry));
}

FlowState solve_scenario(const Scenario& sc, DiscretizationPtr disc, const FlowState* init) {
    if (sc.gas.epsilon > 0.0) return solve_compressible(std::move(disc), sc.gas, sc.force, sc.m0, init, sc.solver);
    return solve_incompressible(std::move(disc), sc.m0, sc.solver);
}

double mass_flux(const FlowState& state, double t) {
    return station_flux(state, state.mesh().snap_station(t));
}

double flux_deviation(const FlowState& state, std::size_t count) {
    const std::size_t nz = state.mesh().n_z();
    count = std::max<std::size_t>(2, count);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t j = 1 + (nz - 1) * k / (count - 1);
        const double f = station_flux(state, j);
        lo = std::min(lo, f);
        hi = std::max(hi, f);
    }
    return (hi - lo) / std::abs(state.achieved_flux);
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw UsageError("least_squares: size mismatch");
    const std::set<double> distinct(x.begin(), x.end());
    if (distinct.size() < 3)
        throw InsufficientDataError("least squares needs at least 3 distinct abscissae, got " +
                                    std::to_string(distinct.size()));
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.points = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - f.intercept - f.slope * x[i];
        sse += e * e;
    }
    f.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
    if (n > 2) {
        const boost::math::students_t dist(static_cast<double>(n - 2));
        const double tq = boost::math::quantile(boost::math::complement(dist, 0.025));
        f.half_width = tq * std::sqrt(sse / static_cast<double>(n - 2) / sxx);
    }
    return f;
}

std::string to_string(RateModel m) { return m == RateModel::exponential ? "exponential" : "algebraic"; }

RateModel rate_model_from_string(const std::string& s) {
    if (s == "exponential") return RateModel::exponential;
    if (s == "algebraic") return RateModel::algebraic;
    throw UsageError("unknown rate model '" + s + "'");
}

RateFit fit_rate(const std::vector<double>& T, const std::vector<double>& D, RateModel model) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < T.size(); ++i) {
        if (!(D[i] > 0.0)) throw DomainError("fit_rate: distances must be positive");
        if (model == RateModel::algebraic && !(T[i] > 0.0)) throw DomainError("fit_rate: algebraic fit needs T > 0");
        x.push_back(model == RateModel::exponential ? T[i] : std::log(T[i]));
        y.push_back(std::log(D[i]));
    }
    const LinearFit lf = least_squares(x, y);
    RateFit f;
    f.model = model;
    f.rate = -lf.slope;
    f.prefactor = std::exp(lf.intercept);
    f.r_squared = lf.r_squared;
    f.half_width = lf.half_width;
    for (std::size_t i = 0; i < T.size(); ++i) f.windows.push_back({T[i], 0.0, D[i], true});
    return f;
}

RateFit far_field_rate(const FlowState& state, const VelocityReference& ref, const std::vector<double>& T_list,
                       RateModel model) {
    const Discretization& D = *state.disc;
    const MeridianMesh& mesh = D.mesh();
    if (ref.state && !ref.state->mesh().same_topology(mesh))
        throw UsageError("far_field_rate: reference state lives on a different grid");
    const double L = mesh.half_length(), K = profile_K(mesh);
    for (std::size_t i = 0; i < T_list.size(); ++i) {
        const double T = T_list[i];
        if (T < -L || T + 1.0 > L) throw RangeError("window (" + fmt(T) + ", " + fmt(T + 1) + ") leaves the mesh");
        if (T < K + 1.0) throw RangeError("window at T=" + fmt(T) + " starts before K+1=" + fmt(K + 1.0));
        if (i > 0 && !(T > T_list[i - 1])) throw UsageError("window stations must be strictly increasing");
    }
    double tol = state.tolerance();
    if (ref.state) tol = std::max(tol, ref.state->tolerance());

    RateFit out;
    out.model = model;
    out.floor = 10.0 * tol;
    for (double T : T_list) {
        RateWindow w;
        w.T = T;
        double sum = 0.0;
        for (std::size_t c = 0; c < D.cell_count(); ++c) {
            const double z = D.center(c).z;
            if (!(z > T && z < T + 1.0)) continue;
            const double ur = ref.state ? ref.state->u_r[c] : ref.u_r;
            const double uz = ref.state ? ref.state->u_z[c] : ref.u_z;
            const double dr = state.u_r[c] - ur, dz = state.u_z[c] - uz;
            const double d2 = dr * dr + dz * dz;
            w.d_linf = std::max(w.d_linf, std::sqrt(d2));
            sum += D.cell_measure(c) * d2;
        }
        w.d_l2 = std::sqrt(sum);
        w.used = w.d_linf >= out.floor;
        if (!w.used) out.warnings.push_back("window T=" + fmt(T) + " below floor (D=" + fmt(w.d_linf) + ")");
        out.windows.push_back(w);
    }
    std::vector<double> T, Dv;
    for (const auto& w : out.windows) {
        if (!w.used) continue;
        T.push_back(w.T);
        Dv.push_back(w.d_linf);
    }
    if (T.size() < 3)
        throw InsufficientDataError("far-field fit: only " + std::to_string(T.size()) +
                                    " windows above the floor " + fmt(out.floor));
    const RateFit f = fit_rate(T, Dv, model);
    out.rate = f.rate;
    out.prefactor = f.prefactor;
    out.r_squared = f.r_squared;
    out.half_width = f.half_width;
    return out;
}

double max_velocity_difference(const FlowState& a, const FlowState& b, const Window* window) {
    if (!a.mesh().same_topology(b.mesh())) throw UsageError("states live on different grids");
    double m = 0.0;
    for (std::size_t c = 0; c < a.u_r.size(); ++c) {
        if (window && !in_window(a.disc->center(c).z, *window)) continue;
        m = std::max(m, std::hypot(a.u_r[c] - b.u_r[c], a.u_z[c] - b.u_z[c]));
    }
    return m;
}

StudyReport low_mach_study(const Scenario& sc, const std::vector<double>& eps_list, const Window& window) {
    if (eps_list.size() < 3) throw InsufficientDataError("low-Mach study needs at least 3 epsilon values");
    StudyReport rep;
    rep.description = "low-Mach limit: slope of log ||u^eps - u-bar||_inf and log ||rho^eps - 1||_inf vs log eps";
    rep.target = 2.0;
    rep.tolerance = 0.2;
    auto disc = scenario_discretization(sc);
    const FlowState base = solve_incompressible(disc, sc.m0, sc.solver);
    std::vector<double> x, yv, yr;
    for (double eps : eps_list) {
        StudyRecord r;
        r.parameter = eps;
        Scenario s = sc;
        s.gas.epsilon = eps;
        try {
            const FlowState st = solve_compressible(disc, s.gas, s.force, s.m0, &base, s.solver);
            rep.floor = std::max(rep.floor, 10.0 * st.tolerance());
            r.velocity_metric = max_velocity_difference(st, base, &window);
            for (std::size_t c = 0; c < st.rho.size(); ++c)
                if (in_window(disc->center(c).z, window))
                    r.density_metric = std::max(r.density_metric, std::abs(st.rho[c] - 1.0));
            x.push_back(std::log(eps));
            yv.push_back(std::log(r.velocity_metric));
            yr.push_back(std::log(r.density_metric));
        } catch (const SubsonicityError& e) {
            r.accepted = false;
            r.note = std::string("choked: ") + e.what();
        } catch (const ChokingError& e) {
            r.accepted = false;
            r.note = std::string("choked: ") + e.what();
        }
        if (!r.accepted) rep.notes.push_back("eps=" + fmt(eps) + " excluded (" + r.note + ")");
        rep.records.push_back(r);
    }
    rep.velocity_fit = least_squares(x, yv);
    rep.density_fit = least_squares(x, yr);
    rep.has_fit = true;
    rep.pass = std::abs(rep.velocity_fit.slope - rep.target) <= rep.tolerance &&
               std::abs(rep.density_fit.slope - rep.target) <= rep.tolerance;
    return rep;
}

StudyReport truncation_study(const Scenario& sc, const std::vector<double>& L_list, const Window& window) {
    if (L_list.size() < 3) throw InsufficientDataError("truncation study needs at least 3 lengths");
    for (std::size_t i = 1; i < L_list.size(); ++i)
        if (!(L_list[i] > L_list[i - 1])) throw UsageError("truncation study: L values must increase");
    const double quarter = 0.25 * L_list.front();
    if (!(window.z0 >= -quarter && window.z1 <= quarter && window.z0 < window.z1))
        throw RangeError("window must lie inside |z| < L_min/4 = " + fmt(quarter));

    StudyReport rep;
    rep.description = "truncation stability: ||u_L - u_Lmax||_inf on a fixed interior window";
    std::vector<FlowState> states;
    for (double L : L_list) states.push_back(solve_scenario(sc, scenario_discretization(sc, L)));
    const FlowState& ref = states.back();
    const double h = ref.mesh().h_z();
    for (const auto& s : states) rep.floor = std::max(rep.floor, 10.0 * s.tolerance());

    for (std::size_t k = 0; k < states.size(); ++k) {
        const FlowState& s = states[k];
        if (s.mesh().n_s() != ref.mesh().n_s() || std::abs(s.mesh().h_z() - h) > 1e-12 * h)
            throw UsageError("truncation study: meshes must share n_s and h_z");
        const auto shift = static_cast<std::size_t>(std::llround((ref.mesh().half_length() - s.mesh().half_length()) / h));
        StudyRecord r;
        r.parameter = L_list[k];
        const std::size_t ns = s.mesh().n_s();
        for (std::size_t j = 0; j < s.mesh().n_z(); ++j) {
            for (std::size_t i = 0; i < ns; ++i) {
                const std::size_t c = s.mesh().cell(i, j), cr = ref.mesh().cell(i, j + shift);
                const double z = s.disc->center(c).z;
                if (!in_window(z, window)) continue;
                if (std::abs(z - ref.disc->center(cr).z) > 1e-9)
                    throw UsageError("truncation study: stations do not align across lengths");
                r.velocity_metric = std::max(r.velocity_metric,
                                             std::hypot(s.u_r[c] - ref.u_r[cr], s.u_z[c] - ref.u_z[cr]));
            }
        }
        rep.records.push_back(r);
    }

    bool decreasing = true, above = true;
    std::vector<double> x, y;
    for (std::size_t k = 0; k + 1 < rep.records.size(); ++k) {
        const double d = rep.records[k].velocity_metric;
        if (k > 0 && !(d < rep.records[k - 1].velocity_metric)) decreasing = false;
        if (!(d > rep.floor)) {
            above = false;
            rep.notes.push_back("delta(L=" + fmt(rep.records[k].parameter) + ")=" + fmt(d) + " is not above the floor " +
                                fmt(rep.floor));
        } else {
            x.push_back(rep.records[k].parameter);
            y.push_back(std::log(d));
        }
    }
    if (!decreasing) rep.notes.push_back("delta(L) is not strictly decreasing");
    try {
        rep.velocity_fit = least_squares(x, y);
        rep.has_fit = true;
    } catch (const InsufficientDataError&) {
        rep.notes.push_back("exponential fit in L skipped: fewer than 3 lengths above the floor");
    }
    rep.pass = decreasing && above;
    return rep;
}

std::string to_string(InitKind k) {
    switch (k) {
        case InitKind::incompressible: return "incompressible";
        case InitKind::uniform: return "uniform";
        case InitKind::scaled: return "scaled";
    }
    return "?";
}

InitKind init_kind_from_string(const std::string& s) {
    if (s == "incompressible") return InitKind::incompressible;
    if (s == "uniform") return InitKind::uniform;
    if (s == "scaled") return InitKind::scaled;
    throw UsageError("unknown initialisation '" + s + "'");
}

FlowState initial_state(const Scenario& sc, DiscretizationPtr disc, InitKind kind) {
    FlowState inc = solve_incompressible(disc, sc.m0, sc.solver);
    std::vector<double> phi = inc.potential;
    for (double& v : phi) v -= inc.inlet_potential;
    switch (kind) {
        case InitKind::incompressible: break;
        case InitKind::uniform: {
            const double q = sc.gas.epsilon > 0.0
                                 ? uniform_cylinder_state(sc.gas, sc.force.radial_part(), sc.m0, sc.symmetry).q_bar
                                 : sc.m0 / disc->mesh().section_area_at(0);
            phi = uniform_potential(*disc, q);
            break;
        }
        case InitKind::scaled:
            for (double& v : phi) v *= 1.5;
            break;
    }
    return state_from_potential(disc, sc.gas, sc.force, sc.gas.epsilon > 0.0, sc.m0, std::move(phi));
}

double uniqueness_probe(const Scenario& sc, DiscretizationPtr disc, InitKind a, InitKind b) {
    const FlowState ia = initial_state(sc, disc, a);
    const FlowState sa = solve_scenario(sc, disc, &ia);
    if (a == b) return max_velocity_difference(sa, solve_scenario(sc, disc, &ia));
    const FlowState ib = initial_state(sc, disc, b);
    const FlowState sb = solve_scenario(sc, disc, &ib);
    return max_velocity_difference(sa, sb);
}

PressureReport bernoulli_and_pressure(const FlowState& state) {
    PressureReport rep;
    rep.pressure = state.pressure;
    if (!(state.compressible && state.gas.epsilon > 0.0)) return rep;
    const Discretization& D = *state.disc;
    for (std::size_t c = 0; c < D.cell_count(); ++c) {
        if (state.truncated[c]) continue;
        const QuadPoint& p = D.center(c);
        const double G = state.u_r[c] * state.u_r[c] + state.u_z[c] * state.u_z[c];
        const double res = 0.5 * G + gas::scaled_enthalpy_difference(state.rho[c], state.gas) - state.force.eval(p.r, p.z);
        rep.max_bernoulli_residual = std::max(rep.max_bernoulli_residual, std::abs(res));
    }
    return rep;
}

}  // namespace potflow

// Acceptance run: one PASS/FAIL line per criterion.
//   acceptance [N ...]    run the listed criteria (default: all)

#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "mms.hpp"
#include "oracles.hpp"
#include "potflow/analysis.hpp"
#include "potflow/config.hpp"
#include "potflow/errors.hpp"

using namespace potflow;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

ScenarioConfig scenario(const std::string& name) {
    return load_config(std::string(POTFLOW_SCENARIO_DIR) + "/" + name + ".ini");
}

// Converged base states, solved once per process.
const FlowState& base_state(const std::string& name) {
    static std::map<std::string, FlowState> cache;
    auto it = cache.find(name);
    if (it == cache.end()) {
        const Scenario sc = scenario(name).scenario;
        it = cache.emplace(name, solve_scenario(sc, scenario_discretization(sc))).first;
    }
    return it->second;
}

double max_velocity_error(const FlowState& s, double q) {
    double e = 0.0;
    for (std::size_t c = 0; c < s.u_z.size(); ++c) e = std::max({e, std::abs(s.u_z[c] - q), std::abs(s.u_r[c])});
    return e;
}

RateFit scenario_rate(const std::string& name) {
    const ScenarioConfig cfg = scenario(name);
    const Scenario& sc = cfg.scenario;
    const FlowState& s = base_state(name);
    if (cfg.study.reference == ReferenceKind::cylinder) {
        const FlowState ref = solve_cylinder_reference(s.mesh(), sc.gas, sc.force, sc.m0, sc.solver);
        return far_field_rate(s, VelocityReference::field(ref), cfg.study.T_list, cfg.study.model);
    }
    double q = sc.m0 / (sc.symmetry == Symmetry::axisymmetric ? M_PI : 1.0);
    if (sc.gas.epsilon > 0.0)
        q = uniform_cylinder_state(sc.gas, sc.force.radial_part(), s.achieved_flux, sc.symmetry).q_bar;
    return far_field_rate(s, VelocityReference::constant(q), cfg.study.T_list, cfg.study.model);
}

std::string describe(const RateFit& f) {
    return fmt::format("{} rate {:.4f} +- {:.4f}, r2 {:.5f}", to_string(f.model), f.rate, f.half_width, f.r_squared);
}

Outcome algebraic_floor(const std::string& name, double floor) {
    const RateFit f = scenario_rate(name);
    return {f.rate >= floor && f.r_squared > 0.95, fmt::format("{}: {} (need >= {}, r2 > 0.95)", name, describe(f), floor)};
}

// Scenarios whose base solve is expected to converge.
const std::vector<std::string> kConverging = {
    "cylinder_exact",    "cylinder_compressible", "flat_exponential", "flat_exponential_incompressible",
    "incompressible_a1_2", "compressible_a1_2",   "force_decay",      "low_mach",
    "uniqueness_bump",   "truncation_flat"};

Outcome low_mach() {
    const ScenarioConfig cfg = scenario("low_mach");
    const auto t0 = std::chrono::steady_clock::now();
    const StudyReport rep = low_mach_study(cfg.scenario, cfg.study.eps_list, cfg.study.window);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= 300.0;
    const bool v = std::abs(rep.velocity_fit.slope - 2.0) <= 0.2, d = std::abs(rep.density_fit.slope - 2.0) <= 0.2;
    return {v && d && in_time,
            fmt::format("velocity slope {:.4f}, density slope {:.4f} (target 2 +- 0.2), runtime {:.1f} s (limit 300 s)",
                        rep.velocity_fit.slope, rep.density_fit.slope, secs)};
}

Outcome cylinder() {
    const double inc = max_velocity_error(base_state("cylinder_exact"), 1.0);
    const ScenarioConfig cfg = scenario("cylinder_compressible");
    const double qb = oracle::q_bar(cfg.scenario.m0, cfg.scenario.gas.gamma, cfg.scenario.gas.epsilon);
    const double comp = max_velocity_error(base_state("cylinder_compressible"), qb);
    return {inc < 1e-10 && comp < 1e-8,
            fmt::format("incompressible max error {:.3e} (limit 1e-10); compressible vs oracle q-bar {:.10f}: {:.3e} "
                        "(limit 1e-8)",
                        inc, qb, comp)};
}

Outcome exponential() {
    const RateFit a = scenario_rate("flat_exponential_incompressible");
    const RateFit b = scenario_rate("flat_exponential");
    const auto ok = [](const RateFit& f) { return f.rate > 0.0 && f.r_squared > 0.99; };
    return {ok(a) && ok(b), fmt::format("incompressible: {}; eps=0.1: {}", describe(a), describe(b))};
}

Outcome conservation() {
    double worst = 0.0;
    std::string where;
    for (const auto& name : kConverging) {
        const double d = flux_deviation(base_state(name), 10);
        if (d >= worst) worst = d, where = name;
    }
    // the low-Mach sweep states as well
    const ScenarioConfig cfg = scenario("low_mach");
    for (double eps : cfg.study.eps_list) {
        Scenario sc = cfg.scenario;
        sc.gas.epsilon = eps;
        const double d = flux_deviation(solve_scenario(sc, scenario_discretization(sc)), 10);
        if (d >= worst) worst = d, where = fmt::format("low_mach eps={}", eps);
    }
    return {worst < 1e-6, fmt::format("max section-flux deviation {:.3e} ({}) over {} runs (limit 1e-6)", worst, where,
                                      kConverging.size() + cfg.study.eps_list.size())};
}

Outcome uniqueness() {
    double worst = 0.0;
    std::string detail;
    for (const std::string name : {"uniqueness_bump", "force_decay", "compressible_a1_2"}) {
        const Scenario sc = scenario(name).scenario;
        const auto disc = scenario_discretization(sc);
        for (InitKind k : {InitKind::uniform, InitKind::scaled}) {
            const double d = uniqueness_probe(sc, disc, InitKind::incompressible, k);
            worst = std::max(worst, d);
            detail += fmt::format("{} {}: {:.2e}; ", name, to_string(k), d);
        }
    }
    return {worst < 1e-7, detail + "limit 1e-7"};
}

Outcome truncation() {
    const ScenarioConfig cfg = scenario("truncation_flat");
    const StudyReport rep = truncation_study(cfg.scenario, cfg.study.L_list, cfg.study.window);
    std::string d;
    for (std::size_t k = 0; k + 1 < rep.records.size(); ++k)
        d += fmt::format("delta(L={}) = {:.3e}; ", rep.records[k].parameter, rep.records[k].velocity_metric);
    d += fmt::format("solver floor {:.1e}", rep.floor);
    for (const auto& n : rep.notes) d += "; " + n;
    return {rep.pass, d};
}

Outcome discretization_health() {
    const auto planar = mms::orders(mms::velocity_errors(Symmetry::planar, {8, 16, 32, 64}));
    const auto axi = mms::orders(mms::velocity_errors(Symmetry::axisymmetric, {16, 32, 64, 128}));
    bool mms_ok = true;
    for (double o : planar) mms_ok = mms_ok && o >= 1.9;
    for (std::size_t k = 1; k < axi.size(); ++k) mms_ok = mms_ok && axi[k] > axi[k - 1];
    mms_ok = mms_ok && axi.back() >= 1.9;

    bool flags = true;
    std::size_t runs = 0;
    double max_mach = 0.0;
    auto inspect = [&](const FlowState& s) {
        if (!s.compressible || s.gas.epsilon > 0.2) return;
        ++runs;
        max_mach = std::max(max_mach, s.diag.max_mach);
        flags = flags && s.diag.max_mach < 1.0 && !s.diag.truncation_active;
    };
    for (const auto& name : kConverging) inspect(base_state(name));
    const ScenarioConfig cfg = scenario("low_mach");
    for (double eps : cfg.study.eps_list) {
        Scenario sc = cfg.scenario;
        sc.gas.epsilon = eps;
        inspect(solve_scenario(sc, scenario_discretization(sc)));
    }
    return {mms_ok && flags,
            fmt::format("MMS orders planar {:.3f}, {:.3f}, {:.3f}; axisymmetric {:.3f}, {:.3f}, {:.3f}; "
                        "{} compressible runs with eps <= 0.2: max Mach {:.4f}, truncation {}",
                        planar[0], planar[1], planar[2], axi[0], axi[1], axi[2], runs, max_mach,
                        flags ? "inactive" : "ACTIVE")};
}

struct Criterion {
    const char* title;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::map<int, Criterion> criteria = {
        {1, {"low-Mach limit", low_mach}},
        {2, {"exact cylinder recovery", cylinder}},
        {3, {"exponential far-field rate", exponential}},
        {4, {"incompressible algebraic rate", [] { return algebraic_floor("incompressible_a1_2", 1.7); }}},
        {5, {"compressible rate toward the cylinder state", [] { return algebraic_floor("compressible_a1_2", 0.7); }}},
        {6, {"force-decay rate", [] { return algebraic_floor("force_decay", 1.2); }}},
        {7, {"conservation", conservation}},
        {8, {"uniqueness", uniqueness}},
        {9, {"truncation stability", truncation}},
        {10, {"discretization health", discretization_health}},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    if (selected.empty())
        for (const auto& [n, c] : criteria) selected.push_back(n);

    int failed = 0;
    for (int n : selected) {
        const auto it = criteria.find(n);
        if (it == criteria.end()) {
            std::cerr << "acceptance: no criterion " << n << '\n';
            return 2;
        }
        Outcome o;
        try {
            o = it->second.run();
        } catch (const Error& e) {
            o = {false, fmt::format("{} error: {}", e.kind(), e.what())};
        }
        failed += o.pass ? 0 : 1;
        std::cout << fmt::format("criterion {:>2} {} {}: {}", n, o.pass ? "PASS" : "FAIL", it->second.title, o.detail)
                  << std::endl;
    }
    return failed == 0 ? 0 : 1;
}

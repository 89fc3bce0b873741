#include "potflow/run.hpp"

#include <fmt/format.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "potflow/errors.hpp"
#include "potflow/field_io.hpp"

namespace potflow {

namespace {

std::string now_utc() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Far-field section area of the straight nozzle: pi (axisymmetric) or 1.
double unit_section_area(Symmetry s) { return s == Symmetry::axisymmetric ? 3.141592653589793 : 1.0; }

class Recorder {
public:
    explicit Recorder(RunResult& r) : r_(r) {}

    void check(const std::string& name, bool pass, const std::string& detail) {
        r_.checks.push_back({name, pass, detail});
    }

    // Runs one stage; a library error becomes a failed check plus an error entry.
    template <class F>
    bool stage(const std::string& name, F f) {
        try {
            f();
            return true;
        } catch (const Error& e) {
            r_.errors.push_back({name, e.kind(), e.what()});
            check(name, false, fmt::format("{} error: {}", e.kind(), e.what()));
        } catch (const std::exception& e) {
            r_.errors.push_back({name, "internal", e.what()});
            check(name, false, fmt::format("internal error: {}", e.what()));
        }
        return false;
    }

private:
    RunResult& r_;
};

void write_manifest(const ScenarioConfig& cfg, const RunOptions& opt, const RunResult& res,
                    const FlowState* base, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot open '" + path + "' for writing");
    os << "potflow-manifest 1\n";
    os << "scenario = " << cfg.name << '\n';
    os << "hash = " << scenario_hash(cfg) << '\n';
    os << "code_version = " << POTFLOW_VERSION << '\n';
    os << "timestamp = " << (opt.timestamp.empty() ? now_utc() : opt.timestamp) << '\n';
    os << "workers = " << opt.workers << '\n';
    os << "[config]\n";
    for (const auto& [k, v] : cfg.echo) os << k << " = " << v << '\n';
    os << "[diagnostics]\n";
    if (base) {
        const auto& d = base->diag;
        os << "compressible = " << (base->compressible ? "true" : "false") << '\n';
        os << "picard_iterations = " << d.picard_iterations << '\n';
        os << "linear_iterations = " << d.linear_iterations << '\n';
        os << "damping_halvings = " << d.damping_halvings << '\n';
        os << fmt::format("final_update = {:.3e}\n", d.update_history.empty() ? 0.0 : d.update_history.back());
        os << fmt::format("lambda_min = {:.6e}\nlambda_max = {:.6e}\n", d.lambda_min, d.lambda_max);
        os << fmt::format("outlet_speed = {:.12g}\n", d.outlet_speed);
        os << fmt::format("achieved_flux = {:.12g}\n", base->achieved_flux);
        os << fmt::format("max_mach = {:.9f}\n", d.max_mach);
        os << "truncation_active = " << (d.truncation_active ? "true" : "false") << '\n';
        os << fmt::format("max_bernoulli_residual = {:.3e}\n", d.max_bernoulli_residual);
    }
    os << "[errors]\n";
    for (const auto& e : res.errors) os << "error = " << e.stage << ": " << e.kind << ": " << e.message << '\n';
    os << "[checks]\n";
    for (const auto& c : res.checks) os << "check " << c.name << ' ' << (c.pass ? "PASS" : "FAIL") << ' ' << c.detail << '\n';
    os << "status = " << (res.exit_code == 0 ? "PASS" : "FAIL") << '\n';
}

void append_study(std::ofstream& os, const std::string& study, const StudyReport& rep) {
    for (const auto& r : rep.records)
        os << fmt::format("{},{:.17g},{:.10e},{:.10e},{},{}\n", study, r.parameter, r.velocity_metric,
                          r.density_metric, r.accepted ? 1 : 0, r.note);
}

std::string study_detail(const StudyReport& rep) {
    std::string s;
    if (rep.has_fit)
        s = fmt::format("velocity slope {:.4f} +- {:.4f}, density slope {:.4f} +- {:.4f}, target {} +- {}",
                        rep.velocity_fit.slope, rep.velocity_fit.half_width, rep.density_fit.slope,
                        rep.density_fit.half_width, rep.target, rep.tolerance);
    for (const auto& n : rep.notes) s += (s.empty() ? "" : "; ") + n;
    return s;
}

}  // namespace

void write_rates_csv(const RateFit& fit, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot open '" + path + "' for writing");
    os << "T,D_L2,D_Linf,used\n";
    for (const auto& w : fit.windows)
        os << fmt::format("{:.17g},{:.10e},{:.10e},{}\n", w.T, w.d_l2, w.d_linf, w.used ? 1 : 0);
}

RunResult run(const ScenarioConfig& cfg, const RunOptions& opt) {
    namespace fs = std::filesystem;
    RunResult res;
    Recorder rec(res);
    const Scenario& sc = cfg.scenario;
    const StudyConfig& st = cfg.study;
    const bool compressible = sc.gas.epsilon > 0.0;

    res.directory = opt.output_dir.empty() ? cfg.output.directory : opt.output_dir;
    fs::create_directories(res.directory);
    const fs::path dir(res.directory);
    std::ofstream study_csv(dir / "study.csv");
    study_csv << "study,parameter,velocity_metric,density_metric,accepted,note\n";

    std::optional<FlowState> base;
    DiscretizationPtr disc;
    rec.stage("solve", [&] {
        disc = scenario_discretization(sc);
        base = solve_scenario(sc, disc);
    });

    if (base) {
        if (cfg.output.field_dump) rec.stage("field_dump", [&] { write_field(*base, (dir / "field.dump").string()); });
        const double dev = flux_deviation(*base);
        rec.check("conservation", dev < st.flux_tol,
                  fmt::format("section flux deviation {:.3e} (limit {:.0e})", dev, st.flux_tol));
        if (compressible) {
            const auto& d = base->diag;
            rec.check("subsonic", d.max_mach < 1.0 && !d.truncation_active,
                      fmt::format("max Mach {:.6f}, truncation {}", d.max_mach,
                                  d.truncation_active ? "active" : "inactive"));
            const PressureReport pr = bernoulli_and_pressure(*base);
            rec.check("bernoulli", pr.max_bernoulli_residual < 1e-10,
                      fmt::format("max Bernoulli residual {:.3e}", pr.max_bernoulli_residual));
        }

        if (st.wants(Analysis::uniform)) {
            rec.stage("uniform", [&] {
                double q = 0.0;
                if (compressible) q = uniform_cylinder_state(sc.gas, sc.force, sc.m0, sc.symmetry).q_bar;
                else q = sc.m0 / base->mesh().section_area_at(0);
                double err = 0.0;
                for (std::size_t c = 0; c < base->u_z.size(); ++c)
                    err = std::max({err, std::abs(base->u_z[c] - q), std::abs(base->u_r[c])});
                rec.check("uniform", err < st.uniform_tol,
                          fmt::format("max |u - (0, {:.10f})| = {:.3e} (limit {:.0e})", q, err, st.uniform_tol));
            });
        }

        if (st.wants(Analysis::rate)) {
            rec.stage("rate", [&] {
                std::optional<FlowState> ref_state;
                VelocityReference ref;
                std::string ref_text;
                if (st.reference == ReferenceKind::cylinder) {
                    ref_state = solve_cylinder_reference(base->mesh(), sc.gas, sc.force, sc.m0, sc.solver);
                    ref = VelocityReference::field(*ref_state);
                    ref_text = "cylinder solve";
                } else {
                    double q = sc.m0 / unit_section_area(sc.symmetry);
                    if (compressible)
                        q = uniform_cylinder_state(sc.gas, sc.force.radial_part(), base->achieved_flux, sc.symmetry).q_bar;
                    ref = VelocityReference::constant(q);
                    ref_text = fmt::format("uniform {:.10f}", q);
                }
                const RateFit fit = far_field_rate(*base, ref, st.T_list, st.model);
                write_rates_csv(fit, (dir / "rates.csv").string());
                const bool pass = fit.rate > 0.0 && fit.rate >= st.min_rate && fit.r_squared > st.min_r2;
                std::string detail = fmt::format("{} rate {:.4f} +- {:.4f} (min {}), r2 {:.5f} (min {}), reference {}",
                                                 to_string(fit.model), fit.rate, fit.half_width, st.min_rate,
                                                 fit.r_squared, st.min_r2, ref_text);
                for (const auto& w : fit.warnings) detail += "; " + w;
                rec.check("rate", pass, detail);
            });
        }

        if (st.wants(Analysis::uniqueness)) {
            for (std::size_t k = 1; k < st.inits.size(); ++k) {
                const std::string name = "uniqueness_" + to_string(st.inits[0]) + "_" + to_string(st.inits[k]);
                rec.stage(name, [&] {
                    const double d = uniqueness_probe(sc, disc, st.inits[0], st.inits[k]);
                    study_csv << fmt::format("uniqueness,{},{:.10e},0,1,{} vs {}\n", k, d, to_string(st.inits[0]),
                                             to_string(st.inits[k]));
                    rec.check(name, d < st.unique_tol,
                              fmt::format("max |grad phi_a - grad phi_b| = {:.3e} (limit {:.0e})", d, st.unique_tol));
                });
            }
        }
    }

    if (st.wants(Analysis::low_mach)) {
        rec.stage("low_mach", [&] {
            const StudyReport rep = low_mach_study(sc, st.eps_list, st.window);
            append_study(study_csv, "low_mach", rep);
            rec.check("low_mach", rep.pass, study_detail(rep));
        });
    }
    if (st.wants(Analysis::truncation)) {
        rec.stage("truncation", [&] {
            const StudyReport rep = truncation_study(sc, st.L_list, st.window);
            append_study(study_csv, "truncation", rep);
            rec.check("truncation", rep.pass, study_detail(rep) + fmt::format("; floor {:.3e}", rep.floor));
        });
    }
    study_csv.close();

    bool ok = res.errors.empty();
    for (const auto& c : res.checks) ok = ok && c.pass;
    res.exit_code = ok ? 0 : 1;
    write_manifest(cfg, opt, res, base ? &*base : nullptr, (dir / "manifest.txt").string());
    return res;
}

RateFit rates_between(const std::string& field_a, const std::string& field_b, const std::vector<double>& T_list,
                      RateModel model) {
    const FlowState a = read_field(field_a);
    const FlowState b = read_field(field_b, &a.mesh());
    return far_field_rate(a, VelocityReference::field(b), T_list, model);
}

}  // namespace potflow

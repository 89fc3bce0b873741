// potflow: run, validate and post-process nozzle-flow scenarios.

#include <CLI11.hpp>
#include <omp.h>

#include <cstdlib>
#include <iostream>

#include "potflow/errors.hpp"
#include "potflow/field_io.hpp"
#include "potflow/run.hpp"

using namespace potflow;

namespace {

// POTFLOW_WORKERS bounds the OpenMP team; unset or invalid keeps the default.
int configure_workers() {
    const char* env = std::getenv("POTFLOW_WORKERS");
    if (env) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
        else std::cerr << "potflow: ignoring POTFLOW_WORKERS='" << env << "'\n";
    }
    return omp_get_max_threads();
}

void print_config_error(const ConfigError& e) {
    std::cerr << "potflow: invalid configuration\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Subsonic potential flow in nozzles: solver and verification harness"};
    app.set_version_flag("--version", std::string(POTFLOW_VERSION));
    app.require_subcommand(1);

    std::string config_path, out_dir, timestamp;
    auto* run_cmd = app.add_subcommand("run", "solve a scenario, run its analyses and write artifacts");
    run_cmd->add_option("config", config_path, "scenario file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("-o,--output", out_dir, "output directory (overrides output.directory)");
    run_cmd->add_option("--timestamp", timestamp, "manifest timestamp (default: current UTC time)");

    auto* check_cmd = app.add_subcommand("check", "validate a scenario file without solving");
    check_cmd->add_option("config", config_path, "scenario file")->required()->check(CLI::ExistingFile);

    std::string field_a, field_b, model_name = "algebraic", csv_path;
    std::vector<double> T_list;
    auto* rates_cmd = app.add_subcommand("rates", "far-field rate fit of field A against field B");
    rates_cmd->add_option("field_a", field_a, "field dump")->required()->check(CLI::ExistingFile);
    rates_cmd->add_option("field_b", field_b, "reference field dump")->required()->check(CLI::ExistingFile);
    rates_cmd->add_option("-T,--windows", T_list, "window starts T (at least 3)")->required()->delimiter(',');
    rates_cmd->add_option("-m,--model", model_name, "exponential or algebraic")
        ->check(CLI::IsMember({"exponential", "algebraic"}));
    rates_cmd->add_option("--csv", csv_path, "write the windows as rates.csv");

    CLI11_PARSE(app, argc, argv);
    const int workers = configure_workers();

    try {
        if (*check_cmd) {
            const ScenarioConfig cfg = load_config(config_path);
            std::cout << "ok " << cfg.name << " hash " << scenario_hash(cfg) << '\n';
            for (const auto& [k, v] : cfg.echo) std::cout << "  " << k << " = " << v << '\n';
            return 0;
        }
        if (*run_cmd) {
            const ScenarioConfig cfg = load_config(config_path);
            RunOptions opt;
            opt.workers = workers;
            opt.timestamp = timestamp;
            opt.output_dir = out_dir;
            const RunResult res = run(cfg, opt);
            for (const auto& c : res.checks)
                std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
            std::cout << "artifacts in " << res.directory << '\n';
            return res.exit_code;
        }
        if (*rates_cmd) {
            const RateFit fit = rates_between(field_a, field_b, T_list, rate_model_from_string(model_name));
            std::cout << "T,D_L2,D_Linf,used\n";
            for (const auto& w : fit.windows)
                std::cout << format_double(w.T) << ',' << format_double(w.d_l2) << ',' << format_double(w.d_linf)
                          << ',' << (w.used ? 1 : 0) << '\n';
            std::cout << "model " << to_string(fit.model) << " rate " << fit.rate << " prefactor " << fit.prefactor
                      << " r2 " << fit.r_squared << '\n';
            for (const auto& w : fit.warnings) std::cout << "warning: " << w << '\n';
            if (!csv_path.empty()) write_rates_csv(fit, csv_path);
            return 0;
        }
    } catch (const ConfigError& e) {
        print_config_error(e);
        return 2;
    } catch (const Error& e) {
        std::cerr << "potflow: " << e.kind() << " error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

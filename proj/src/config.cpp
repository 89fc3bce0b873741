#include "potflow/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <sstream>

#include "potflow/errors.hpp"
#include "potflow/field_io.hpp"

namespace potflow {

std::string to_string(Analysis a) {
    switch (a) {
        case Analysis::uniform: return "uniform";
        case Analysis::rate: return "rate";
        case Analysis::low_mach: return "low_mach";
        case Analysis::truncation: return "truncation";
        case Analysis::uniqueness: return "uniqueness";
    }
    return "?";
}

std::string to_string(ReferenceKind r) { return r == ReferenceKind::uniform ? "uniform" : "cylinder"; }

bool StudyConfig::wants(Analysis a) const { return std::find(analyses.begin(), analyses.end(), a) != analyses.end(); }

namespace {

namespace pt = boost::property_tree;

const std::vector<std::pair<std::string, std::vector<std::string>>> kSchema = {
    {"geometry", {"profile", "amplitude", "a1", "K", "obstacle", "obstacle_height", "L1", "L2", "L", "n_s", "h_z",
                  "symmetry"}},
    {"gas", {"gamma", "epsilon", "eps_list", "theta", "epsilon0"}},
    {"force", {"kind", "radial_amplitude", "amplitude", "b1", "K", "table"}},
    {"flow", {"m0"}},
    {"solver", {"linear_tol", "picard_tol", "max_picard", "damping", "max_linear", "inlet_potential"}},
    {"study", {"analyses", "model", "reference", "T_list", "window", "L_list", "inits", "min_rate", "min_r2",
               "uniform_tol", "unique_tol", "flux_tol"}},
    {"output", {"directory", "field_dump"}},
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t"), e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Typed access with defaults; conversion failures are collected.
class Reader {
public:
    Reader(const pt::ptree& tree, std::vector<std::string>& errors, ScenarioConfig& cfg)
        : tree_(tree), errors_(errors), cfg_(cfg) {}

    const std::string* raw(const std::string& key) const {
        const auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
        if (!v) return nullptr;
        store_.push_back(trim(*v));
        return &store_.back();
    }

    double number(const std::string& key, double fallback) {
        const std::string* v = raw(key);
        double out = fallback;
        if (v) {
            try {
                out = parse_double(*v);
            } catch (const FormatError&) {
                errors_.push_back(key + ": not a number '" + *v + "'");
            }
        }
        echo(key, format_double(out));
        return out;
    }

    long integer(const std::string& key, long fallback) {
        const std::string* v = raw(key);
        long out = fallback;
        if (v) {
            std::size_t used = 0;
            try {
                out = std::stol(*v, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != v->size()) errors_.push_back(key + ": not an integer '" + *v + "'");
        }
        echo(key, std::to_string(out));
        return out;
    }

    bool boolean(const std::string& key, bool fallback) {
        const std::string* v = raw(key);
        bool out = fallback;
        if (v) {
            if (*v == "true" || *v == "1" || *v == "yes") out = true;
            else if (*v == "false" || *v == "0" || *v == "no") out = false;
            else errors_.push_back(key + ": expected true or false, got '" + *v + "'");
        }
        echo(key, out ? "true" : "false");
        return out;
    }

    std::string text(const std::string& key, const std::string& fallback) {
        const std::string* v = raw(key);
        const std::string out = v ? *v : fallback;
        echo(key, out);
        return out;
    }

    std::vector<double> numbers(const std::string& key) {
        const std::string* v = raw(key);
        std::vector<double> out;
        if (v) {
            for (const auto& item : split_list(*v)) {
                try {
                    out.push_back(parse_double(item));
                } catch (const FormatError&) {
                    errors_.push_back(key + ": not a number '" + item + "'");
                }
            }
        }
        std::string joined;
        for (std::size_t k = 0; k < out.size(); ++k) joined += (k ? ", " : "") + format_double(out[k]);
        echo(key, joined);
        return out;
    }

    // Enumerated value via a from_string function that throws on unknown names.
    template <class E, class F>
    E choice(const std::string& key, E fallback, F from_string, const std::string& options) {
        const std::string* v = raw(key);
        E out = fallback;
        if (v) {
            try {
                out = from_string(*v);
            } catch (const Error&) {
                errors_.push_back(key + ": unknown value '" + *v + "' (expected " + options + ")");
            }
        }
        echo(key, to_string(out));
        return out;
    }

    void echo(const std::string& key, const std::string& value) { cfg_.echo.emplace_back(key, value); }

private:
    const pt::ptree& tree_;
    std::vector<std::string>& errors_;
    ScenarioConfig& cfg_;
    mutable std::deque<std::string> store_;
};

Analysis analysis_from_string(const std::string& s) {
    for (Analysis a : {Analysis::uniform, Analysis::rate, Analysis::low_mach, Analysis::truncation,
                       Analysis::uniqueness})
        if (to_string(a) == s) return a;
    throw UsageError("unknown analysis '" + s + "'");
}

ReferenceKind reference_from_string(const std::string& s) {
    if (s == "uniform") return ReferenceKind::uniform;
    if (s == "cylinder") return ReferenceKind::cylinder;
    throw UsageError("unknown reference '" + s + "'");
}

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t k = 1; k < v.size(); ++k)
        if (!(v[k] > v[k - 1])) return false;
    return true;
}

// Runs `f`, turning a library error into a violation.
template <class F>
void check(std::vector<std::string>& errors, const std::string& where, F f) {
    try {
        f();
    } catch (const Error& e) {
        errors.push_back(where + ": " + e.what());
    }
}

}  // namespace

ScenarioConfig load_config(const std::string& path) {
    pt::ptree tree;
    try {
        pt::read_ini(path, tree);
    } catch (const pt::ini_parser_error& e) {
        std::ostringstream os;
        if (e.line() > 0) os << e.filename() << ":" << e.line() << ": " << e.message();
        else os << e.filename() << ": " << e.message();
        throw ConfigError({os.str()});
    }

    std::vector<std::string> errors;
    for (const auto& [section, body] : tree) {
        const auto it = std::find_if(kSchema.begin(), kSchema.end(), [&](const auto& s) { return s.first == section; });
        if (it == kSchema.end()) {
            if (body.empty() && !body.data().empty()) errors.push_back("key '" + section + "' outside any section");
            else errors.push_back("unknown section [" + section + "]");
            continue;
        }
        for (const auto& kv : body) {
            if (std::find(it->second.begin(), it->second.end(), kv.first) == it->second.end())
                errors.push_back("unknown key " + section + "." + kv.first);
        }
    }

    ScenarioConfig cfg;
    cfg.path = path;
    cfg.name = std::filesystem::path(path).stem().string();
    Reader in(tree, errors, cfg);
    Scenario& sc = cfg.scenario;

    ProfileParams& p = sc.profile;
    p.kind = in.choice("geometry.profile", ProfileKind::cylinder, profile_kind_from_string,
                       "cylinder, flat_beyond_K, algebraic");
    p.amplitude = in.number("geometry.amplitude", 0.0);
    p.a1 = in.number("geometry.a1", p.kind == ProfileKind::algebraic ? 2.0 : 0.0);
    p.K = in.number("geometry.K", 0.0);
    p.obstacle = in.boolean("geometry.obstacle", false);
    p.obstacle_height = in.number("geometry.obstacle_height", 0.0);
    p.L1 = in.number("geometry.L1", 0.0);
    p.L2 = in.number("geometry.L2", 0.0);
    sc.L = in.number("geometry.L", 10.0);
    const long n_s = in.integer("geometry.n_s", 8);
    sc.n_s = n_s > 0 ? static_cast<std::size_t>(n_s) : 0;
    sc.h_z = in.number("geometry.h_z", 0.25);
    sc.symmetry = in.choice("geometry.symmetry", Symmetry::axisymmetric, symmetry_from_string, "axisymmetric, planar");

    sc.gas.gamma = in.number("gas.gamma", 1.4);
    sc.gas.epsilon = in.number("gas.epsilon", 0.0);
    sc.gas.theta = in.number("gas.theta", 0.9);
    sc.gas.epsilon0 = in.number("gas.epsilon0", 0.5);
    cfg.study.eps_list = in.numbers("gas.eps_list");

    const ForceKind fk = in.choice("force.kind", ForceKind::zero, force_kind_from_string,
                                   "zero, radial_static, decaying_perturbation, tabulated");
    const double fR = in.number("force.radial_amplitude", 0.0);
    const double fA = in.number("force.amplitude", 0.0);
    const double fb1 = in.number("force.b1", 1.5);
    const double fK = in.number("force.K", p.K);
    cfg.force_table = in.text("force.table", "");

    sc.m0 = in.number("flow.m0", sc.symmetry == Symmetry::planar ? 1.0 : 3.141592653589793);

    SolverConfig& so = sc.solver;
    so.linear_tol = in.number("solver.linear_tol", so.linear_tol);
    so.picard_tol = in.number("solver.picard_tol", so.picard_tol);
    so.max_picard = static_cast<int>(in.integer("solver.max_picard", so.max_picard));
    so.damping = in.number("solver.damping", so.damping);
    so.max_linear = static_cast<int>(in.integer("solver.max_linear", so.max_linear));
    so.inlet_potential = in.number("solver.inlet_potential", so.inlet_potential);

    StudyConfig& st = cfg.study;
    {
        const std::string* v = in.raw("study.analyses");
        std::string joined;
        if (v) {
            for (const auto& item : split_list(*v)) {
                try {
                    const Analysis a = analysis_from_string(item);
                    if (!st.wants(a)) st.analyses.push_back(a);
                } catch (const Error&) {
                    errors.push_back("study.analyses: unknown analysis '" + item +
                                     "' (expected uniform, rate, low_mach, truncation, uniqueness)");
                }
            }
        }
        for (std::size_t k = 0; k < st.analyses.size(); ++k) joined += (k ? ", " : "") + to_string(st.analyses[k]);
        in.echo("study.analyses", joined);
    }
    st.model = in.choice("study.model", RateModel::exponential, rate_model_from_string, "exponential, algebraic");
    st.reference = in.choice("study.reference", ReferenceKind::uniform, reference_from_string, "uniform, cylinder");
    st.T_list = in.numbers("study.T_list");
    {
        const std::string* v = in.raw("study.window");
        std::vector<double> w = in.numbers("study.window");
        if (v && w.size() != 2) errors.push_back("study.window: expected two values z0, z1");
        if (w.size() == 2) st.window = {w[0], w[1]};
        cfg.echo.back().second = format_double(st.window.z0) + ", " + format_double(st.window.z1);
    }
    st.L_list = in.numbers("study.L_list");
    {
        const std::string* v = in.raw("study.inits");
        if (v) {
            st.inits.clear();
            for (const auto& item : split_list(*v)) {
                try {
                    st.inits.push_back(init_kind_from_string(item));
                } catch (const Error&) {
                    errors.push_back("study.inits: unknown initialisation '" + item +
                                     "' (expected incompressible, uniform, scaled)");
                }
            }
        }
        std::string joined;
        for (std::size_t k = 0; k < st.inits.size(); ++k) joined += (k ? ", " : "") + to_string(st.inits[k]);
        in.echo("study.inits", joined);
    }
    st.min_rate = in.number("study.min_rate", 0.0);
    st.min_r2 = in.number("study.min_r2", st.model == RateModel::exponential ? 0.99 : 0.95);
    st.uniform_tol = in.number("study.uniform_tol", sc.gas.epsilon > 0.0 ? 1e-8 : 1e-10);
    st.unique_tol = in.number("study.unique_tol", 1e-7);
    st.flux_tol = in.number("study.flux_tol", 1e-6);

    cfg.output.directory = in.text("output.directory", "out/" + cfg.name);
    cfg.output.field_dump = in.boolean("output.field_dump", true);

    // Module invariants.
    check(errors, "geometry", [&] { build_profile(p); });
    check(errors, "geometry", [&] { scenario_discretization(sc); });
    check(errors, "gas", [&] { sc.gas.validate(); });
    for (double e : st.eps_list) {
        check(errors, "gas.eps_list", [&] {
            GasModel g = sc.gas;
            g.epsilon = e;
            g.validate();
        });
    }
    check(errors, "solver", [&] { so.validate(); });
    if (!(sc.m0 > 0.0)) errors.push_back("flow.m0: mass flux must be positive");
    check(errors, "force", [&] {
        switch (fk) {
            case ForceKind::zero: sc.force = ForceField::zero(); break;
            case ForceKind::radial_static: sc.force = ForceField::radial_static(fR); break;
            case ForceKind::decaying_perturbation: sc.force = ForceField::decaying(fR, fA, fb1, fK); break;
            case ForceKind::tabulated: {
                if (cfg.force_table.empty()) throw UsageError("tabulated force needs force.table");
                std::filesystem::path tp(cfg.force_table);
                if (tp.is_relative()) tp = std::filesystem::path(path).parent_path() / tp;
                sc.force = ForceField::tabulated(read_force_table(tp.string()));
                break;
            }
        }
    });

    if (st.analyses.empty()) errors.push_back("study.analyses: at least one analysis required");
    if (st.wants(Analysis::uniform) && p.kind != ProfileKind::cylinder)
        errors.push_back("study.analyses: uniform check needs geometry.profile = cylinder");
    if (st.wants(Analysis::uniform) && p.obstacle)
        errors.push_back("study.analyses: uniform check needs a nozzle without obstacle");
    if (st.wants(Analysis::rate)) {
        if (st.T_list.size() < 3) errors.push_back("study.T_list: rate analysis needs at least 3 windows");
        if (!strictly_increasing(st.T_list)) errors.push_back("study.T_list: windows must be strictly increasing");
        for (double T : st.T_list)
            if (T < p.K + 1.0 || T + 1.0 > sc.L) {
                errors.push_back("study.T_list: window (" + format_double(T) + ", " + format_double(T + 1.0) +
                                 ") must lie beyond K + 1 and inside the mesh");
                break;
            }
    }
    if (st.wants(Analysis::low_mach)) {
        if (st.eps_list.size() < 3) errors.push_back("gas.eps_list: low_mach analysis needs at least 3 values");
        if (!(st.window.z1 > st.window.z0)) errors.push_back("study.window: z1 > z0 required");
    }
    if (st.wants(Analysis::truncation)) {
        if (st.L_list.size() < 3) errors.push_back("study.L_list: truncation analysis needs at least 3 values");
        if (!strictly_increasing(st.L_list)) errors.push_back("study.L_list: values must be strictly increasing");
        if (!st.L_list.empty()) {
            const double quarter = st.L_list.front() / 4.0;
            if (!(st.window.z0 >= -quarter && st.window.z1 <= quarter))
                errors.push_back("study.window: truncation window must lie inside |z| < L_min / 4");
        }
        for (double L : st.L_list) {
            Scenario s2 = sc;
            check(errors, "study.L_list", [&] { scenario_discretization(s2, L); });
        }
    }
    if (st.wants(Analysis::rate) && st.reference == ReferenceKind::cylinder && !(sc.gas.epsilon > 0.0))
        errors.push_back("study.reference: cylinder reference needs gas.epsilon > 0 (use uniform)");
    if (st.wants(Analysis::uniqueness)) {
        if (st.inits.size() < 2) errors.push_back("study.inits: uniqueness needs at least 2 initialisations");
        if (!(sc.gas.epsilon > 0.0)) errors.push_back("study.analyses: uniqueness needs gas.epsilon > 0");
    }
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return cfg;
}

std::string scenario_hash(const ScenarioConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto feed = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
    };
    for (const auto& [k, v] : cfg.echo) {
        if (k == "output.directory") continue;
        feed(k);
        feed("=");
        feed(v);
        feed("\n");
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace potflow

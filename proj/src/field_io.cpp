#include "potflow/field_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "potflow/errors.hpp"

namespace potflow {

namespace {

constexpr const char* kFieldBlocks[] = {"potential", "u_r", "u_z", "rho", "mach", "pressure", "truncated",
                                        "quad_density"};

void put_header(std::ostream& os, const std::string& kind, const MeridianMesh& mesh) {
    os << "potflow-" << kind << " 1\n";
    os << "dims " << mesh.n_s() << ' ' << mesh.n_z() << '\n';
    os << "symmetry " << to_string(mesh.symmetry()) << '\n';
    os << "half_length " << format_double(mesh.half_length()) << '\n';
    if (mesh.profile()) {
        const ProfileParams& p = mesh.profile()->params();
        os << "profile " << to_string(p.kind) << ' ' << format_double(p.amplitude) << ' ' << format_double(p.a1)
           << ' ' << format_double(p.K) << ' ' << (p.obstacle ? 1 : 0) << ' ' << format_double(p.obstacle_height)
           << ' ' << format_double(p.L1) << ' ' << format_double(p.L2) << '\n';
    } else {
        os << "profile none\n";
    }
    os << "nodes " << mesh.node_count() << '\n';
    for (std::size_t k = 0; k < mesh.node_count(); ++k)
        os << format_double(mesh.r()[k]) << ' ' << format_double(mesh.z()[k]) << '\n';
}

template <class V>
void put_block(std::ostream& os, const std::string& name, const V& values) {
    os << "block " << name << ' ' << values.size() << '\n';
    for (const auto& v : values) os << format_double(static_cast<double>(v)) << '\n';
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot open '" + path + "' for writing");
    return os;
}

class LineReader {
public:
    LineReader(std::istream& is, std::string path) : is_(is), path_(std::move(path)) {}

    // Next line; throws FormatError naming `expect` at end of file.
    std::string next(const std::string& expect) {
        std::string line;
        if (!std::getline(is_, line)) throw FormatError(path_ + ": truncated file, missing " + expect);
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    }
    bool next_optional(std::string& line) {
        if (!std::getline(is_, line)) return false;
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw FormatError(path_ + ":" + std::to_string(line_no_) + ": " + what);
    }

private:
    std::istream& is_;
    std::string path_;
    int line_no_ = 0;
};

std::vector<std::string> words(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    for (std::string w; is >> w;) out.push_back(w);
    return out;
}

std::size_t parse_count(LineReader& in, const std::string& s) {
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) in.fail("bad count '" + s + "'");
    return v;
}

double parse_number(LineReader& in, const std::string& s) {
    try {
        return parse_double(s);
    } catch (const FormatError&) {
        in.fail("bad number '" + s + "'");
    }
}

std::vector<std::string> expect_keyword(LineReader& in, const std::string& keyword, std::size_t n_args) {
    const auto w = words(in.next("'" + keyword + "' line"));
    if (w.empty() || w[0] != keyword) in.fail("expected '" + keyword + "'");
    if (w.size() != n_args + 1) in.fail("'" + keyword + "' takes " + std::to_string(n_args) + " values");
    return w;
}

bool same_nodes(const MeridianMesh& a, const MeridianMesh& b) {
    return a.same_topology(b) && a.r() == b.r() && a.z() == b.z();
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    if (b != e && *b == '+') ++b;
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e || b == e) throw FormatError("bad number '" + s + "'");
    return v;
}

const std::vector<double>& FieldDump::block(const std::string& name) const {
    for (const auto& [n, v] : blocks)
        if (n == name) return v;
    throw FormatError("dump has no block '" + name + "'");
}

const std::string* FieldDump::footer_value(const std::string& key) const {
    for (const auto& [k, v] : footer)
        if (k == key) return &v;
    return nullptr;
}

void write_mesh(const MeridianMesh& mesh, const std::string& path) {
    auto os = open_out(path);
    put_header(os, "mesh", mesh);
    os << "footer\nend\n";
}

void write_force_table(const ForceTable& table, const std::string& path) {
    auto os = open_out(path);
    put_header(os, "force", table.grid);
    put_block(os, "phi_f", table.values);
    os << "footer\nend\n";
}

void write_field(const FlowState& s, const std::string& path) {
    auto os = open_out(path);
    put_header(os, "field", s.mesh());
    put_block(os, "potential", s.potential);
    put_block(os, "u_r", s.u_r);
    put_block(os, "u_z", s.u_z);
    put_block(os, "rho", s.rho);
    put_block(os, "mach", s.mach);
    put_block(os, "pressure", s.pressure);
    put_block(os, "truncated", s.truncated);
    put_block(os, "quad_density", s.quad_density);
    const auto& d = s.diag;
    os << "footer\n";
    os << "compressible = " << (s.compressible ? 1 : 0) << '\n';
    os << "gamma = " << format_double(s.gas.gamma) << '\n';
    os << "epsilon = " << format_double(s.gas.epsilon) << '\n';
    os << "theta = " << format_double(s.gas.theta) << '\n';
    os << "epsilon0 = " << format_double(s.gas.epsilon0) << '\n';
    os << "force_kind = " << to_string(s.force.kind()) << '\n';
    os << "force_radial_amplitude = " << format_double(s.force.radial_amplitude()) << '\n';
    os << "force_amplitude = " << format_double(s.force.amplitude()) << '\n';
    os << "force_b1 = " << format_double(s.force.b1()) << '\n';
    os << "force_K = " << format_double(s.force.K()) << '\n';
    os << "m0 = " << format_double(s.m0) << '\n';
    os << "achieved_flux = " << format_double(s.achieved_flux) << '\n';
    os << "inlet_potential = " << format_double(s.inlet_potential) << '\n';
    os << "linear_tol = " << format_double(d.linear_tol) << '\n';
    os << "picard_tol = " << format_double(d.picard_tol) << '\n';
    os << "picard_iterations = " << d.picard_iterations << '\n';
    os << "linear_iterations = " << d.linear_iterations << '\n';
    os << "damping_halvings = " << d.damping_halvings << '\n';
    os << "outlet_speed = " << format_double(d.outlet_speed) << '\n';
    os << "max_mach = " << format_double(d.max_mach) << '\n';
    os << "max_bernoulli_residual = " << format_double(d.max_bernoulli_residual) << '\n';
    os << "truncation_active = " << (d.truncation_active ? 1 : 0) << '\n';
    os << "lambda_min = " << format_double(d.lambda_min) << '\n';
    os << "lambda_max = " << format_double(d.lambda_max) << '\n';
    os << "end\n";
}

FieldDump read_dump(const std::string& path, const MeridianMesh* expected) {
    std::ifstream is(path);
    if (!is) throw FormatError("cannot open '" + path + "'");
    LineReader in(is, path);
    FieldDump out;

    const auto magic = words(in.next("header"));
    if (magic.size() != 2 || magic[0].rfind("potflow-", 0) != 0) in.fail("not a potflow dump");
    out.kind = magic[0].substr(8);
    if (out.kind != "field" && out.kind != "mesh" && out.kind != "force") in.fail("unknown dump kind '" + out.kind + "'");
    if (magic[1] != "1") in.fail("unsupported format version " + magic[1]);

    const auto dims = expect_keyword(in, "dims", 2);
    const std::size_t n_s = parse_count(in, dims[1]), n_z = parse_count(in, dims[2]);
    const auto sym = expect_keyword(in, "symmetry", 1);
    Symmetry symmetry;
    try {
        symmetry = symmetry_from_string(sym[1]);
    } catch (const Error&) {
        in.fail("unknown symmetry '" + sym[1] + "'");
    }
    const double L = parse_number(in, expect_keyword(in, "half_length", 1)[1]);

    std::optional<NozzleProfile> profile;
    const auto pw = words(in.next("'profile' line"));
    if (pw.empty() || pw[0] != "profile") in.fail("expected 'profile'");
    if (!(pw.size() == 2 && pw[1] == "none")) {
        if (pw.size() != 9) in.fail("'profile' takes 8 values or 'none'");
        ProfileParams p;
        try {
            p.kind = profile_kind_from_string(pw[1]);
        } catch (const Error&) {
            in.fail("unknown profile kind '" + pw[1] + "'");
        }
        p.amplitude = parse_number(in, pw[2]);
        p.a1 = parse_number(in, pw[3]);
        p.K = parse_number(in, pw[4]);
        p.obstacle = pw[5] == "1";
        p.obstacle_height = parse_number(in, pw[6]);
        p.L1 = parse_number(in, pw[7]);
        p.L2 = parse_number(in, pw[8]);
        profile = NozzleProfile(p);
    }

    const std::size_t count = parse_count(in, expect_keyword(in, "nodes", 1)[1]);
    if (count != (n_s + 1) * (n_z + 1)) in.fail("node count does not match dims");
    std::vector<double> r(count), z(count);
    for (std::size_t k = 0; k < count; ++k) {
        const auto w = words(in.next("node " + std::to_string(k) + " of " + std::to_string(count)));
        if (w.size() != 2) in.fail("node line needs r and z");
        r[k] = parse_number(in, w[0]);
        z[k] = parse_number(in, w[1]);
    }
    out.mesh = MeridianMesh::from_nodes(n_s, n_z, symmetry, L, std::move(r), std::move(z), profile);
    if (expected && !same_nodes(out.mesh, *expected)) {
        std::ostringstream os;
        os << path << ": mesh mismatch: dump grid is " << n_s << "x" << n_z << ", expected " << expected->n_s()
           << "x" << expected->n_z();
        if (out.mesh.same_topology(*expected)) os << " with different node coordinates";
        throw FormatError(os.str());
    }

    bool in_footer = false, ended = false;
    std::string line;
    while (in.next_optional(line)) {
        const auto w = words(line);
        if (w.empty()) continue;
        if (w[0] == "end") {
            ended = true;
            break;
        }
        if (in_footer) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) in.fail("footer line needs 'key = value'");
            auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t"), e = s.find_last_not_of(" \t");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            out.footer.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
            continue;
        }
        if (w[0] == "footer") {
            in_footer = true;
            continue;
        }
        if (w[0] != "block" || w.size() != 3) in.fail("expected 'block <name> <count>', 'footer' or 'end'");
        const std::size_t n = parse_count(in, w[2]);
        std::vector<double> values(n);
        for (std::size_t k = 0; k < n; ++k) {
            const auto v = words(in.next("value " + std::to_string(k) + " of block '" + w[1] + "' (" +
                                         std::to_string(n) + " values)"));
            if (v.size() != 1) in.fail("block lines hold one value");
            values[k] = parse_number(in, v[0]);
        }
        out.blocks.emplace_back(w[1], std::move(values));
    }
    if (!ended) throw FormatError(path + ": truncated file, missing 'end'");

    if (out.kind == "field") {
        for (const char* name : kFieldBlocks) {
            bool found = false;
            for (const auto& b : out.blocks) found = found || b.first == name;
            if (!found) throw FormatError(path + ": missing block '" + name + "'");
        }
    } else if (out.kind == "force") {
        const auto& v = out.block("phi_f");
        if (v.size() != out.mesh.node_count()) throw FormatError(path + ": block 'phi_f' has the wrong length");
    }
    return out;
}

FlowState read_field(const std::string& path, const MeridianMesh* expected) {
    FieldDump dump = read_dump(path, expected);
    if (dump.kind != "field") throw FormatError(path + ": not a field dump");
    auto num = [&](const std::string& key, double fallback) {
        const std::string* v = dump.footer_value(key);
        return v ? parse_double(*v) : fallback;
    };
    FlowState s;
    s.disc = discretize(dump.mesh);
    const std::size_t nn = s.disc->node_count(), nc = s.disc->cell_count();
    auto take = [&](const std::string& name, std::size_t n) {
        const auto& v = dump.block(name);
        if (v.size() != n) throw FormatError(path + ": block '" + name + "' has the wrong length");
        return v;
    };
    s.potential = take("potential", nn);
    s.u_r = take("u_r", nc);
    s.u_z = take("u_z", nc);
    s.rho = take("rho", nc);
    s.mach = take("mach", nc);
    s.pressure = take("pressure", nc);
    const auto tr = take("truncated", nc);
    s.truncated.assign(tr.begin(), tr.end());
    s.quad_density = take("quad_density", nc * kGaussPerCell);

    s.compressible = num("compressible", 0.0) != 0.0;
    s.gas.gamma = num("gamma", s.gas.gamma);
    s.gas.epsilon = num("epsilon", 0.0);
    s.gas.theta = num("theta", s.gas.theta);
    s.gas.epsilon0 = num("epsilon0", s.gas.epsilon0);
    const std::string* fk = dump.footer_value("force_kind");
    const ForceKind kind = fk ? force_kind_from_string(*fk) : ForceKind::zero;
    const double R = num("force_radial_amplitude", 0.0);
    switch (kind) {
        case ForceKind::radial_static: s.force = ForceField::radial_static(R); break;
        case ForceKind::decaying_perturbation:
            s.force = ForceField::decaying(R, num("force_amplitude", 0.0), num("force_b1", 1.0), num("force_K", 0.0));
            break;
        default: s.force = ForceField::zero(); break;
    }
    s.m0 = num("m0", 0.0);
    s.achieved_flux = num("achieved_flux", 0.0);
    s.inlet_potential = num("inlet_potential", 0.0);
    s.diag.linear_tol = num("linear_tol", 0.0);
    s.diag.picard_tol = num("picard_tol", 0.0);
    s.diag.picard_iterations = static_cast<int>(num("picard_iterations", 0.0));
    s.diag.linear_iterations = static_cast<int>(num("linear_iterations", 0.0));
    s.diag.damping_halvings = static_cast<int>(num("damping_halvings", 0.0));
    s.diag.outlet_speed = num("outlet_speed", 0.0);
    s.diag.max_mach = num("max_mach", 0.0);
    s.diag.max_bernoulli_residual = num("max_bernoulli_residual", 0.0);
    s.diag.truncation_active = num("truncation_active", 0.0) != 0.0;
    s.diag.lambda_min = num("lambda_min", 0.0);
    s.diag.lambda_max = num("lambda_max", 0.0);
    return s;
}

ForceTable read_force_table(const std::string& path) {
    FieldDump dump = read_dump(path);
    if (dump.kind != "force") throw FormatError(path + ": not a force table");
    ForceTable t;
    t.values = dump.block("phi_f");
    t.grid = std::move(dump.mesh);
    return t;
}

}  // namespace potflow

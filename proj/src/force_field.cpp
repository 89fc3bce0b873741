#include "potflow/force_field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "potflow/errors.hpp"

namespace potflow {

namespace {
constexpr double kRadialShapeSlopeMax = 2.11;  // sup |g'|, attained on the cap near r = 1.11
}

std::string to_string(ForceKind k) {
    switch (k) {
        case ForceKind::zero: return "zero";
        case ForceKind::radial_static: return "radial_static";
        case ForceKind::decaying_perturbation: return "decaying_perturbation";
        case ForceKind::tabulated: return "tabulated";
    }
    return "?";
}

ForceKind force_kind_from_string(const std::string& s) {
    if (s == "zero") return ForceKind::zero;
    if (s == "radial_static") return ForceKind::radial_static;
    if (s == "decaying_perturbation") return ForceKind::decaying_perturbation;
    if (s == "tabulated") return ForceKind::tabulated;
    throw DomainError("unknown force kind '" + s + "'");
}

double radial_shape(double r) {
    if (r <= 1.0) return r * r;
    if (r >= 2.0) return kRadialShapeMax;
    const double t = r - 1.0;
    return 1.0 + t * (2.0 + t * (1.0 + t * (-10.0 / 3.0 + 1.5 * t)));
}

double radial_shape_d1(double r) {
    if (r <= 1.0) return 2.0 * r;
    if (r >= 2.0) return 0.0;
    const double t = r - 1.0;
    return 2.0 + t * (2.0 + t * (-10.0 + 6.0 * t));
}

ForceField ForceField::zero() { return ForceField{}; }

ForceField ForceField::radial_static(double radial_amplitude) {
    ForceField f;
    f.kind_ = ForceKind::radial_static;
    f.radial_ = radial_amplitude;
    f.compute_bounds();
    return f;
}

ForceField ForceField::decaying(double radial_amplitude, double amplitude, double b1, double K) {
    if (!(b1 > 0.0)) throw DomainError("ForceField: b1 > 0 required");
    ForceField f;
    f.kind_ = ForceKind::decaying_perturbation;
    f.radial_ = radial_amplitude;
    f.amplitude_ = amplitude;
    f.b1_ = b1;
    f.K_ = K;
    f.compute_bounds();
    return f;
}

ForceField ForceField::tabulated(ForceTable table) {
    if (table.values.size() != table.grid.node_count())
        throw DomainError("ForceField: table size does not match its grid");
    ForceField f;
    f.kind_ = ForceKind::tabulated;
    f.table_ = std::make_shared<const ForceTable>(std::move(table));
    f.compute_bounds();
    return f;
}

ForceField ForceField::radial_part() const {
    switch (kind_) {
        case ForceKind::radial_static:
        case ForceKind::decaying_perturbation: return radial_static(radial_);
        default: return zero();
    }
}

bool ForceField::depends_on_z() const {
    return kind_ == ForceKind::tabulated ||
           (kind_ == ForceKind::decaying_perturbation && amplitude_ != 0.0);
}

void ForceField::compute_bounds() {
    switch (kind_) {
        case ForceKind::zero: bounds_ = {}; break;
        case ForceKind::radial_static:
        case ForceKind::decaying_perturbation: {
            // Decay factor lies in (0, 1] and g in [0, 13/6].
            const double R = radial_, A = amplitude_;
            bounds_.sup_abs = (std::abs(R) + std::abs(A)) * kRadialShapeMax;
            bounds_.inf = (std::min(0.0, R) + std::min(0.0, A)) * kRadialShapeMax;
            const double gr = (std::abs(R) + std::abs(A)) * kRadialShapeSlopeMax;
            const double gz = std::abs(A) * kRadialShapeMax * b1_;
            bounds_.sup_grad = std::hypot(gr, gz);
            break;
        }
        case ForceKind::tabulated: {
            const auto& v = table_->values;
            const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
            bounds_.inf = *lo;
            bounds_.sup_abs = std::max(std::abs(*lo), std::abs(*hi));
            const auto& g = table_->grid;
            double sup_grad = 0.0;
            for (std::size_t j = 0; j < g.n_z(); ++j) {
                for (std::size_t i = 0; i < g.n_s(); ++i) {
                    const double rc = 0.25 * (g.r()[g.node(i, j)] + g.r()[g.node(i + 1, j)] +
                                              g.r()[g.node(i, j + 1)] + g.r()[g.node(i + 1, j + 1)]);
                    const double zc = 0.5 * (g.station_z(j) + g.station_z(j + 1));
                    Gradient gr;
                    eval_table(rc, zc, &gr);
                    sup_grad = std::max(sup_grad, std::hypot(gr.dr, gr.dz));
                }
            }
            bounds_.sup_grad = sup_grad;
            break;
        }
    }
}

double ForceField::eval(double r, double z) const {
    switch (kind_) {
        case ForceKind::zero: return 0.0;
        case ForceKind::radial_static: return radial_ * radial_shape(r);
        case ForceKind::decaying_perturbation: {
            const double decay = std::pow(1.0 + smooth_ramp(z - K_), -b1_);
            return (radial_ + amplitude_ * decay) * radial_shape(r);
        }
        case ForceKind::tabulated: return eval_table(r, z, nullptr);
    }
    return 0.0;
}

Gradient ForceField::grad(double r, double z) const {
    switch (kind_) {
        case ForceKind::zero: return {};
        case ForceKind::radial_static: return {radial_ * radial_shape_d1(r), 0.0};
        case ForceKind::decaying_perturbation: {
            const double x = z - K_;
            const double base = 1.0 + smooth_ramp(x);
            const double decay = std::pow(base, -b1_);
            const double ddecay = -b1_ * decay / base * smooth_ramp_d1(x);
            return {(radial_ + amplitude_ * decay) * radial_shape_d1(r),
                    amplitude_ * ddecay * radial_shape(r)};
        }
        case ForceKind::tabulated: {
            Gradient g;
            eval_table(r, z, &g);
            return g;
        }
    }
    return {};
}

double ForceField::eval_table(double r, double z, Gradient* grad) const {
    const MeridianMesh& g = table_->grid;
    const auto& v = table_->values;
    const double h = g.h_z();
    const double z0 = g.station_z(0);
    const double tol = 1e-12 * std::max(1.0, g.half_length());
    const double t = (z - z0) / h;
    if (!(t >= -tol && t <= static_cast<double>(g.n_z()) + tol)) {
        std::ostringstream os;
        os << "tabulated force: z=" << z << " outside the table";
        throw ExtrapolationError(os.str());
    }
    const auto j = std::min<std::size_t>(static_cast<std::size_t>(std::max(0.0, std::floor(t))),
                                         g.n_z() - 1);
    const double ft = std::clamp(t - static_cast<double>(j), 0.0, 1.0);

    const double rin0 = g.r()[g.node(0, j)], rin1 = g.r()[g.node(0, j + 1)];
    const double rout0 = g.r()[g.node(g.n_s(), j)], rout1 = g.r()[g.node(g.n_s(), j + 1)];
    const double rin = rin0 + ft * (rin1 - rin0);
    const double width = (rout0 - rin0) + ft * ((rout1 - rin1) - (rout0 - rin0));
    const double s = (r - rin) / width;
    if (!(s >= -1e-12 && s <= 1.0 + 1e-12)) {
        std::ostringstream os;
        os << "tabulated force: (r=" << r << ", z=" << z << ") outside the table";
        throw ExtrapolationError(os.str());
    }
    const double si = std::clamp(s, 0.0, 1.0) * static_cast<double>(g.n_s());
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(std::floor(si)), g.n_s() - 1);
    const double fs = si - static_cast<double>(i);

    const double v00 = v[g.node(i, j)], v10 = v[g.node(i + 1, j)];
    const double v01 = v[g.node(i, j + 1)], v11 = v[g.node(i + 1, j + 1)];
    const double val = (1 - fs) * (1 - ft) * v00 + fs * (1 - ft) * v10 + (1 - fs) * ft * v01 + fs * ft * v11;
    if (grad) {
        const double n_s = static_cast<double>(g.n_s());
        const double dv_ds = ((1 - ft) * (v10 - v00) + ft * (v11 - v01)) * n_s;
        const double dv_dt = (1 - fs) * (v01 - v00) + fs * (v11 - v10);
        const double dr_dt = (rin1 - rin0) + s * ((rout1 - rin1) - (rout0 - rin0));
        grad->dr = dv_ds / width;
        grad->dz = (dv_dt - grad->dr * dr_dt) / h;
    }
    return val;
}

}  // namespace potflow

#include "potflow/discretization.hpp"

#include <cmath>

#include "potflow/errors.hpp"

namespace potflow {

namespace {

constexpr double kXi[4] = {-1.0, 1.0, 1.0, -1.0};
constexpr double kEta[4] = {-1.0, -1.0, 1.0, 1.0};

QuadPoint eval_point(const MeridianMesh& mesh, const std::array<std::size_t, 4>& nodes, double xi,
                     double eta) {
    double dN_dxi[4], dN_deta[4], N[4];
    for (int a = 0; a < 4; ++a) {
        N[a] = 0.25 * (1.0 + kXi[a] * xi) * (1.0 + kEta[a] * eta);
        dN_dxi[a] = 0.25 * kXi[a] * (1.0 + kEta[a] * eta);
        dN_deta[a] = 0.25 * kEta[a] * (1.0 + kXi[a] * xi);
    }
    double r = 0, z = 0, r_xi = 0, r_eta = 0, z_xi = 0, z_eta = 0;
    for (int a = 0; a < 4; ++a) {
        const double ra = mesh.r()[nodes[a]], za = mesh.z()[nodes[a]];
        r += N[a] * ra;
        z += N[a] * za;
        r_xi += dN_dxi[a] * ra;
        r_eta += dN_deta[a] * ra;
        z_xi += dN_dxi[a] * za;
        z_eta += dN_deta[a] * za;
    }
    const double det = r_xi * z_eta - r_eta * z_xi;
    if (!(det > 0.0)) throw MeshError("nonpositive Jacobian at a quadrature point");
    QuadPoint p;
    p.r = r;
    p.z = z;
    p.wdet = mesh.weight(r) * det;
    for (int a = 0; a < 4; ++a) {
        p.dN_dr[a] = (z_eta * dN_dxi[a] - z_xi * dN_deta[a]) / det;
        p.dN_dz[a] = (-r_eta * dN_dxi[a] + r_xi * dN_deta[a]) / det;
    }
    return p;
}

}  // namespace

Discretization::Discretization(MeridianMesh mesh) : mesh_(std::move(mesh)) {
    const std::size_t ns = mesh_.n_s(), nz = mesh_.n_z();
    const std::size_t nc = mesh_.cell_count();
    cell_nodes_.resize(nc);
    quad_.resize(nc * kGaussPerCell);
    center_.resize(nc);
    const double g = 1.0 / std::sqrt(3.0);
    for (std::size_t j = 0; j < nz; ++j) {
        for (std::size_t i = 0; i < ns; ++i) {
            const std::size_t c = mesh_.cell(i, j);
            cell_nodes_[c] = {mesh_.node(i, j), mesh_.node(i + 1, j), mesh_.node(i + 1, j + 1),
                              mesh_.node(i, j + 1)};
            for (int q = 0; q < kGaussPerCell; ++q)
                quad_[c * kGaussPerCell + q] = eval_point(mesh_, cell_nodes_[c], kXi[q] * g, kEta[q] * g);
            center_[c] = eval_point(mesh_, cell_nodes_[c], 0.0, 0.0);
            colors_[(i % 2) + 2 * (j % 2)].push_back(c);
        }
    }

    // 9-point pattern; neighbour indices come out sorted because storage is
    // station-major.
    const std::size_t nn = mesh_.node_count();
    pattern_.n = nn;
    pattern_.row_ptr.assign(nn + 1, 0);
    for (std::size_t j = 0; j <= nz; ++j) {
        for (std::size_t i = 0; i <= ns; ++i) {
            const std::size_t row = mesh_.node(i, j);
            for (int dj = -1; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    const long ii = static_cast<long>(i) + di, jj = static_cast<long>(j) + dj;
                    if (ii < 0 || jj < 0 || ii > static_cast<long>(ns) || jj > static_cast<long>(nz)) continue;
                    pattern_.col.push_back(mesh_.node(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj)));
                }
            }
            pattern_.row_ptr[row + 1] = pattern_.col.size();
        }
    }
    pattern_.val.assign(pattern_.col.size(), 0.0);

    slots_.resize(nc * 16);
    for (std::size_t c = 0; c < nc; ++c) {
        for (int a = 0; a < 4; ++a) {
            const std::size_t row = cell_nodes_[c][a];
            for (int b = 0; b < 4; ++b) {
                const std::size_t colv = cell_nodes_[c][b];
                std::size_t k = pattern_.row_ptr[row];
                while (pattern_.col[k] != colv) ++k;
                slots_[c * 16 + a * 4 + b] = k;
            }
        }
    }

    // Boundary edge quadrature with outward normals.
    for (const auto& e : mesh_.boundary()) {
        const double r0 = mesh_.r()[e.n0], z0 = mesh_.z()[e.n0];
        const double r1 = mesh_.r()[e.n1], z1 = mesh_.z()[e.n1];
        const double len = std::hypot(r1 - r0, z1 - z0);
        double nr = (z1 - z0) / len, nzv = -(r1 - r0) / len;
        // Orient away from the interior: the edge's neighbouring interior
        // node lies on the inner side.
        double ir = 0.0, iz = 0.0;
        switch (e.tag) {
            case BoundaryTag::inlet: ir = mesh_.r()[e.n0 + (ns + 1)]; iz = mesh_.z()[e.n0 + (ns + 1)]; break;
            case BoundaryTag::outlet: ir = mesh_.r()[e.n0 - (ns + 1)]; iz = mesh_.z()[e.n0 - (ns + 1)]; break;
            case BoundaryTag::outer_wall: ir = mesh_.r()[e.n0 - 1]; iz = mesh_.z()[e.n0 - 1]; break;
            default: ir = mesh_.r()[e.n0 + 1]; iz = mesh_.z()[e.n0 + 1]; break;
        }
        if ((ir - r0) * nr + (iz - z0) * nzv > 0.0) {
            nr = -nr;
            nzv = -nzv;
        }
        for (double t : {0.5 * (1.0 - g), 0.5 * (1.0 + g)}) {
            EdgePoint p;
            p.r = r0 + t * (r1 - r0);
            p.z = z0 + t * (z1 - z0);
            p.wlen = mesh_.weight(p.r) * 0.5 * len;
            p.n_r = nr;
            p.n_z = nzv;
            p.node0 = e.n0;
            p.node1 = e.n1;
            p.N0 = 1.0 - t;
            p.N1 = t;
            edge_points_[static_cast<int>(e.tag)].push_back(p);
        }
    }
    for (std::size_t i = 0; i <= ns; ++i) inlet_nodes_.push_back(mesh_.node(i, 0));
}

double Discretization::cell_measure(std::size_t c) const {
    double m = 0.0;
    for (int q = 0; q < kGaussPerCell; ++q) m += quad(c, q).wdet;
    return m;
}

DiscretizationPtr discretize(MeridianMesh mesh) {
    return std::make_shared<const Discretization>(std::move(mesh));
}

}  // namespace potflow

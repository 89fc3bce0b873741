#pragma once

// Bilinear (Q1) isoparametric elements on the meridian mesh with 2x2 Gauss
// quadrature. Every integrand carries the symmetry weight w(r).

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include "potflow/geometry.hpp"

namespace potflow {

inline constexpr int kGaussPerCell = 4;

struct QuadPoint {
    double r = 0.0;
    double z = 0.0;
    double wdet = 0.0;                  // w(r) |J| (Gauss weights are 1)
    std::array<double, 4> dN_dr{};      // shape-function gradients
    std::array<double, 4> dN_dz{};
};

// Point of a boundary edge quadrature (2-point Gauss along the segment).
struct EdgePoint {
    double r = 0.0;
    double z = 0.0;
    double wlen = 0.0;                  // w(r) |e| / 2
    double n_r = 0.0;                   // outward unit normal
    double n_z = 0.0;
    std::size_t node0 = 0;
    std::size_t node1 = 0;
    double N0 = 0.0;                    // shape values of the two edge nodes
    double N1 = 0.0;
};

// Compressed sparse rows with the 9-point pattern of the structured grid.
struct CsrMatrix {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> col;
    std::vector<double> val;
    // Non-empty: centred storage for operators that annihilate constants,
    // y_i = shift_i x_i + sum_{j != i} a_ij (x_j - x_i). The diagonal entry
    // is then implied by the row sum and rounding no longer scales with |x|.
    std::vector<double> shift;
};

class Discretization {
public:
    explicit Discretization(MeridianMesh mesh);

    const MeridianMesh& mesh() const { return mesh_; }
    std::size_t node_count() const { return mesh_.node_count(); }
    std::size_t cell_count() const { return mesh_.cell_count(); }

    // Local node order: (i,j), (i+1,j), (i+1,j+1), (i,j+1).
    const std::array<std::size_t, 4>& cell_nodes(std::size_t c) const { return cell_nodes_[c]; }
    const QuadPoint& quad(std::size_t c, int q) const { return quad_[c * kGaussPerCell + q]; }
    const std::vector<QuadPoint>& quads() const { return quad_; }
    // Cell-centre evaluation (xi = eta = 0).
    const QuadPoint& center(std::size_t c) const { return center_[c]; }
    // Sum of w |J| over the cell's quadrature points.
    double cell_measure(std::size_t c) const;

    const CsrMatrix& pattern() const { return pattern_; }
    // Position in CsrMatrix::val of the local entry (a, b) of cell c.
    std::size_t slot(std::size_t c, int a, int b) const { return slots_[c * 16 + a * 4 + b]; }
    // Cells grouped so that no two cells of a colour share a node.
    const std::array<std::vector<std::size_t>, 4>& colors() const { return colors_; }

    const std::vector<EdgePoint>& edge_points(BoundaryTag tag) const {
        return edge_points_[static_cast<int>(tag)];
    }
    const std::vector<std::size_t>& inlet_nodes() const { return inlet_nodes_; }

private:
    MeridianMesh mesh_;
    std::vector<std::array<std::size_t, 4>> cell_nodes_;
    std::vector<QuadPoint> quad_;
    std::vector<QuadPoint> center_;
    CsrMatrix pattern_;
    std::vector<std::size_t> slots_;
    std::array<std::vector<std::size_t>, 4> colors_;
    std::array<std::vector<EdgePoint>, 5> edge_points_;
    std::vector<std::size_t> inlet_nodes_;
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;
DiscretizationPtr discretize(MeridianMesh mesh);

}  // namespace potflow

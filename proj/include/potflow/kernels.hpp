#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a serial reference
// (`*_serial`) used by the tests and the benchmark. The parallel versions
// produce bitwise identical results for any thread count: assembly walks
// colour classes of non-overlapping cells, and reductions sum fixed-size
// blocks in a fixed order.

#include <cstddef>
#include <span>
#include <vector>

#include "potflow/discretization.hpp"

namespace potflow::kernels {

// Gradient of the nodal field at every quadrature point: out[2k], out[2k+1]
// hold (d/dr, d/dz) at point k = c * 4 + q.
void quad_gradients(const Discretization& disc, std::span<const double> phi, std::span<double> out);
void quad_gradients_serial(const Discretization& disc, std::span<const double> phi, std::span<double> out);

// Weighted stiffness sum_q coef[q] w|J| grad N_a . grad N_b into A.val
// (A must carry disc.pattern()). `coef` has one entry per quadrature point.
void assemble_stiffness(const Discretization& disc, std::span<const double> coef, CsrMatrix& A);
void assemble_stiffness_serial(const Discretization& disc, std::span<const double> coef, CsrMatrix& A);

// Centred storage (A.shift non-empty) is honoured; see CsrMatrix.
void spmv(const CsrMatrix& A, std::span<const double> x, std::span<double> y);
void spmv_serial(const CsrMatrix& A, std::span<const double> x, std::span<double> y);

// Blocked, order-fixed dot product.
double dot(std::span<const double> a, std::span<const double> b);
double dot_serial(std::span<const double> a, std::span<const double> b);

// Truncated density coefficient at every quadrature point from squared
// speeds G and force values phi_f. `truncated` receives 1 where the
// truncation branch was active.
struct DensityKernelArgs {
    double gamma, epsilon, theta, epsilon0, phi_lower;
};
void density_coefficients(const DensityKernelArgs& gas, std::span<const double> grads,
                          std::span<const double> phi_f, std::span<double> rho,
                          std::span<unsigned char> truncated);
void density_coefficients_serial(const DensityKernelArgs& gas, std::span<const double> grads,
                                 std::span<const double> phi_f, std::span<double> rho,
                                 std::span<unsigned char> truncated);

// Worker count used by the OpenMP kernels (1 when built without OpenMP).
int worker_count();
void set_worker_count(int n);

}  // namespace potflow::kernels

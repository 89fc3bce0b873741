#pragma once

#include <span>
#include <vector>

#include "potflow/discretization.hpp"

namespace potflow {

struct CgStats {
    int iterations = 0;
    double relative_residual = 0.0;
    std::vector<double> history;  // relative residual per iteration
    // Extreme eigenvalues of the Jacobi-preconditioned operator, estimated
    // from the CG (Lanczos) coefficients. Diagnostics only.
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    // tol was below the attainable relative residual ~ eps ||A|| ||x|| / ||b||;
    // the solve stopped there instead.
    bool at_rounding_floor = false;
};

// Fixes x_k = value_k for the listed rows while keeping A symmetric:
// constrained rows/columns become identity, the eliminated column terms move
// to b. With `centred`, A must have zero row sums (stiffness of a
// constant-preserving operator) and is switched to centred storage.
void apply_dirichlet(CsrMatrix& A, std::vector<double>& b, std::span<const std::size_t> rows,
                     std::span<const double> values, bool centred = false);

// Jacobi-preconditioned conjugate gradients, starting from x. Stops when
// ||r|| <= max(tol, 8 eps (||A|| ||x|| + ||b||) / ||b||) ||b||. Throws ConvergenceError (with the residual history) on
// stagnation or when max_iter is exhausted.
CgStats solve_pcg(const CsrMatrix& A, std::span<const double> b, std::span<double> x, double tol,
                  int max_iter);

// Smallest and largest eigenvalue of a symmetric tridiagonal matrix by Sturm
// bisection.
std::pair<double, double> tridiagonal_extreme_eigenvalues(std::span<const double> diag,
                                                          std::span<const double> off);

}  // namespace potflow

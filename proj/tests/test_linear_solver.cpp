#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "potflow/errors.hpp"
#include "potflow/kernels.hpp"
#include "potflow/linear_solver.hpp"

using namespace potflow;

namespace {

// 1D Laplacian with a positive diagonal shift, n x n.
CsrMatrix tridiagonal(std::size_t n, double shift) {
    CsrMatrix A;
    A.n = n;
    A.row_ptr.push_back(0);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) A.col.push_back(i - 1), A.val.push_back(-1.0);
        A.col.push_back(i), A.val.push_back(2.0 + shift);
        if (i + 1 < n) A.col.push_back(i + 1), A.val.push_back(-1.0);
        A.row_ptr.push_back(A.col.size());
    }
    return A;
}

Eigen::MatrixXd dense(const CsrMatrix& A) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(A.n, A.n);
    for (std::size_t i = 0; i < A.n; ++i)
        for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) M(i, A.col[k]) = A.val[k];
    return M;
}

}  // namespace

TEST_CASE("pcg matches a dense solve") {
    const CsrMatrix A = tridiagonal(200, 0.01);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> b(A.n), x(A.n, 0.0);
    for (auto& v : b) v = u(rng);
    const CgStats st = solve_pcg(A, b, x, 1e-12, 5000);
    CHECK(st.relative_residual <= 1e-12);
    CHECK(st.history.size() == static_cast<std::size_t>(st.iterations));
    const Eigen::VectorXd xe = dense(A).ldlt().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), A.n));
    for (std::size_t i = 0; i < A.n; ++i) CHECK(x[i] == doctest::Approx(xe[i]).epsilon(1e-9).scale(xe.norm()));
    // Lanczos estimates bracket the spectrum of D^-1 A
    const Eigen::VectorXd ev = (dense(A) / (2.01)).selfadjointView<Eigen::Lower>().eigenvalues();
    CHECK(st.lambda_max <= ev.maxCoeff() * (1 + 1e-8));
    CHECK(st.lambda_max == doctest::Approx(ev.maxCoeff()).epsilon(1e-2));
    CHECK(st.lambda_min >= ev.minCoeff() * (1 - 1e-8));
}

TEST_CASE("pcg reports non-convergence with its history") {
    const CsrMatrix A = tridiagonal(400, 0.0);
    std::vector<double> b(A.n, 1.0), x(A.n, 0.0);
    try {
        solve_pcg(A, b, x, 1e-14, 5);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.history().size() == 5);
    }
}

TEST_CASE("tridiagonal eigenvalues by bisection") {
    const std::vector<double> d{4.0, 1.0, -2.0, 3.5, 0.25};
    const std::vector<double> off{0.5, -1.5, 2.0, 0.1};
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(5, 5);
    for (int i = 0; i < 5; ++i) M(i, i) = d[i];
    for (int i = 0; i < 4; ++i) M(i, i + 1) = M(i + 1, i) = off[i];
    const Eigen::VectorXd ev = M.selfadjointView<Eigen::Lower>().eigenvalues();
    const auto [lo, hi] = tridiagonal_extreme_eigenvalues(d, off);
    CHECK(lo == doctest::Approx(ev.minCoeff()).epsilon(1e-12));
    CHECK(hi == doctest::Approx(ev.maxCoeff()).epsilon(1e-12));
}

TEST_CASE("dirichlet elimination keeps symmetry and the solution, centred or not") {
    ProfileParams p;
    const auto disc = discretize(build_mesh(build_profile(p), 4.0, 4, 0.5, Symmetry::axisymmetric));
    std::vector<double> coef(disc->cell_count() * kGaussPerCell, 1.0);
    CsrMatrix K = disc->pattern();
    kernels::assemble_stiffness(*disc, coef, K);
    const auto& rows = disc->inlet_nodes();
    const std::vector<double> values(rows.size(), 5.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> b0(K.n);
    for (auto& v : b0) v = u(rng);
    // dense oracle: eliminate by hand
    Eigen::MatrixXd M = dense(K);
    Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(b0.data(), K.n);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        M.row(rows[k]).setZero();
        M(rows[k], rows[k]) = 1.0;
        rhs[rows[k]] = values[k];
    }
    const Eigen::VectorXd xe = M.fullPivLu().solve(rhs);

    for (bool centred : {false, true}) {
        CAPTURE(centred);
        CsrMatrix A = K;
        std::vector<double> b = b0, x(K.n, 0.0);
        apply_dirichlet(A, b, rows, values, centred);
        CHECK(A.shift.empty() == !centred);
        CHECK(b[rows[0]] == 5.0);
        solve_pcg(A, b, x, 1e-13, 10000);
        for (std::size_t i = 0; i < K.n; ++i) CHECK(x[i] == doctest::Approx(xe[i]).epsilon(1e-9).scale(1.0));
        std::vector<double> y1(K.n), y2(K.n), e1(K.n, 0.0), e2(K.n, 0.0);
        // symmetry: e_i^T A e_j == e_j^T A e_i on a sample of pairs
        for (std::size_t i : {std::size_t(0), std::size_t(7), std::size_t(12)}) {
            for (std::size_t j : {std::size_t(1), std::size_t(8), std::size_t(13)}) {
                std::fill(e1.begin(), e1.end(), 0.0);
                std::fill(e2.begin(), e2.end(), 0.0);
                e1[i] = 1.0;
                e2[j] = 1.0;
                kernels::spmv(A, e1, y1);
                kernels::spmv(A, e2, y2);
                CHECK(y1[j] == doctest::Approx(y2[i]).epsilon(1e-13).scale(1.0));
            }
        }
    }
}

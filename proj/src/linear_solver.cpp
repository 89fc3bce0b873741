#include "potflow/linear_solver.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>

#include "potflow/errors.hpp"
#include "potflow/kernels.hpp"

namespace potflow {

void apply_dirichlet(CsrMatrix& A, std::vector<double>& b, std::span<const std::size_t> rows,
                     std::span<const double> values, bool centred) {
    std::vector<char> fixed(A.n, 0);
    std::vector<double> value(A.n, 0.0);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        fixed[rows[k]] = 1;
        value[rows[k]] = values[k];
    }
    if (centred) A.shift.assign(A.n, 0.0);
    for (std::size_t i = 0; i < A.n; ++i) {
        for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            const std::size_t j = A.col[k];
            if (centred && !fixed[i] && fixed[j] && i != j) A.shift[i] -= A.val[k];
            if (fixed[i]) {
                A.val[k] = (i == j) ? 1.0 : 0.0;
            } else if (fixed[j]) {
                b[i] -= A.val[k] * value[j];
                A.val[k] = 0.0;
            }
        }
        if (fixed[i]) b[i] = value[i];
        if (centred && fixed[i]) A.shift[i] = 1.0;
    }
}

std::pair<double, double> tridiagonal_extreme_eigenvalues(std::span<const double> diag,
                                                          std::span<const double> off) {
    const std::size_t n = diag.size();
    if (n == 0) return {0.0, 0.0};
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < n; ++i) {
        const double rad = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(off[i]) : 0.0);
        lo = std::min(lo, diag[i] - rad);
        hi = std::max(hi, diag[i] + rad);
    }
    // Number of eigenvalues below x (Sturm sequence).
    auto count_below = [&](double x) {
        std::size_t count = 0;
        double d = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double o2 = i > 0 ? off[i - 1] * off[i - 1] : 0.0;
            d = diag[i] - x - (i > 0 ? o2 / d : 0.0);
            if (d == 0.0) d = 1e-300;
            if (d < 0.0) ++count;
        }
        return count;
    };
    auto kth = [&](std::size_t k) {
        double a = lo, b = hi;
        for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, std::abs(b)); ++it) {
            const double m = 0.5 * (a + b);
            if (count_below(m) > k) b = m; else a = m;
        }
        return 0.5 * (a + b);
    };
    return {kth(0), kth(n - 1)};
}

namespace {

// || |A| |x| + |b| ||_2 with |A||x| taken in the storage's own form.
double product_magnitude(const CsrMatrix& A, std::span<const double> x, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < A.n; ++i) {
        double row = std::abs(b[i]);
        if (A.shift.empty()) {
            for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) row += std::abs(A.val[k] * x[A.col[k]]);
        } else {
            row += std::abs(A.shift[i] * x[i]);
            for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
                if (A.col[k] != i) row += std::abs(A.val[k] * (x[A.col[k]] - x[i]));
        }
        sum += row * row;
    }
    return std::sqrt(sum);
}

}  // namespace

CgStats solve_pcg(const CsrMatrix& A, std::span<const double> b, std::span<double> x, double tol,
                  int max_iter) {
    const std::size_t n = A.n;
    CgStats stats;
    std::vector<double> inv_diag(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        double d = A.shift.empty() ? 0.0 : A.shift[i];
        for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            if (A.shift.empty()) {
                if (A.col[k] == i) d = A.val[k];
            } else if (A.col[k] != i) {
                d -= A.val[k];
            }
        }
        if (d > 0.0) inv_diag[i] = 1.0 / d;
    }
    const double bnorm = std::sqrt(kernels::dot(b, b));
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return stats;
    }

    std::vector<double> r(n), z(n), p(n), Ap(n);
    std::vector<double> alphas, betas;
    auto residual = [&] {
        kernels::spmv(A, x, r);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
        return std::sqrt(kernels::dot(r, r)) / bnorm;
    };

    double res = residual();
    double best = res;
    int since_best = 0;
    int restarts = 0;
    const int stall_window = std::max(500, static_cast<int>(std::sqrt(static_cast<double>(n))) * 20);
    // Relative residual attainable in floating point: rounding of b - A x.
    auto rounding_floor = [&] { return 8.0 * DBL_EPSILON * product_magnitude(A, x, b) / bnorm; };
    double target = std::max(tol, rounding_floor());
    constexpr int kFloorEvery = 32;

    while (true) {
        for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        p = z;
        double rz = kernels::dot(r, z);
        while (res > target) {
            if (stats.iterations >= max_iter) {
                std::ostringstream os;
                os << "PCG: iteration cap " << max_iter << " reached at relative residual " << res;
                throw ConvergenceError(os.str(), stats.history);
            }
            kernels::spmv(A, p, Ap);
            const double pAp = kernels::dot(p, Ap);
            if (!(pAp > 0.0)) throw ConvergenceError("PCG: operator not positive definite", stats.history);
            const double alpha = rz / pAp;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * Ap[i];
            }
            res = std::sqrt(kernels::dot(r, r)) / bnorm;
            ++stats.iterations;
            if (stats.iterations % kFloorEvery == 0) target = std::max(tol, rounding_floor());
            stats.history.push_back(res);
            for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
            const double rz_new = kernels::dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
            if (alphas.size() < 400) {
                alphas.push_back(alpha);
                betas.push_back(beta);
            }
            if (res < best * 0.999) {
                best = res;
                since_best = 0;
            } else if (++since_best > stall_window) {
                std::ostringstream os;
                os << "PCG: stagnated at relative residual " << res << " (target " << tol << ")";
                throw ConvergenceError(os.str(), stats.history);
            }
        }
        // Guard against drift of the recursive residual.
        const double true_res = residual();
        target = std::max(tol, rounding_floor());
        if (true_res <= 10.0 * target || restarts >= 3) {
            res = true_res;
            break;
        }
        res = true_res;
        ++restarts;
    }
    stats.relative_residual = res;
    stats.at_rounding_floor = target > tol;

    if (!alphas.empty()) {
        const std::size_t m = alphas.size();
        std::vector<double> diag(m), off(m > 1 ? m - 1 : 0);
        for (std::size_t k = 0; k < m; ++k) {
            diag[k] = 1.0 / alphas[k] + (k > 0 ? betas[k - 1] / alphas[k - 1] : 0.0);
            if (k + 1 < m) off[k] = std::sqrt(betas[k]) / alphas[k];
        }
        std::tie(stats.lambda_min, stats.lambda_max) = tridiagonal_extreme_eigenvalues(diag, off);
    }
    return stats;
}

}  // namespace potflow

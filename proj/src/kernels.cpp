#include "potflow/kernels.hpp"

#include <algorithm>

#include "potflow/errors.hpp"
#include "potflow/gas_model.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace potflow::kernels {

namespace {

constexpr std::size_t kDotBlock = 2048;

inline void cell_gradients(const Discretization& disc, std::size_t c, std::span<const double> phi,
                           std::span<double> out) {
    const auto& nodes = disc.cell_nodes(c);
    // Differences to node 0: the shape gradients sum to zero, so this is
    // the same gradient without rounding proportional to |phi|.
    const double v[4] = {0.0, phi[nodes[1]] - phi[nodes[0]], phi[nodes[2]] - phi[nodes[0]],
                         phi[nodes[3]] - phi[nodes[0]]};
    for (int q = 0; q < kGaussPerCell; ++q) {
        const QuadPoint& p = disc.quad(c, q);
        double gr = 0.0, gz = 0.0;
        for (int a = 0; a < 4; ++a) {
            gr += p.dN_dr[a] * v[a];
            gz += p.dN_dz[a] * v[a];
        }
        const std::size_t k = c * kGaussPerCell + q;
        out[2 * k] = gr;
        out[2 * k + 1] = gz;
    }
}

inline void cell_stiffness(const Discretization& disc, std::size_t c, std::span<const double> coef,
                           CsrMatrix& A) {
    double local[16] = {};
    for (int q = 0; q < kGaussPerCell; ++q) {
        const QuadPoint& p = disc.quad(c, q);
        const double s = coef[c * kGaussPerCell + q] * p.wdet;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                local[a * 4 + b] += s * (p.dN_dr[a] * p.dN_dr[b] + p.dN_dz[a] * p.dN_dz[b]);
    }
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) A.val[disc.slot(c, a, b)] += local[a * 4 + b];
}

inline double density_at(const DensityKernelArgs& g, double G, double phi, unsigned char& truncated) {
    const GasModel gas{g.gamma, g.epsilon, g.theta, g.epsilon0};
    const DensityEval d = gas::truncated_density(G, phi, gas, g.phi_lower);
    truncated = d.truncated ? 1 : 0;
    return d.rho;
}

inline double row_product(const CsrMatrix& A, std::span<const double> x, std::size_t i) {
    double s = 0.0;
    if (A.shift.empty()) {
        for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) s += A.val[k] * x[A.col[k]];
        return s;
    }
    const double xi = x[i];
    for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
        if (A.col[k] != i) s += A.val[k] * (x[A.col[k]] - xi);
    return s + A.shift[i] * xi;
}

}  // namespace

int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_worker_count(int n) {
#ifdef _OPENMP
    omp_set_num_threads(std::max(1, n));
#else
    (void)n;
#endif
}

void quad_gradients(const Discretization& disc, std::span<const double> phi, std::span<double> out) {
    const auto nc = static_cast<long>(disc.cell_count());
#pragma omp parallel for schedule(static)
    for (long c = 0; c < nc; ++c) cell_gradients(disc, static_cast<std::size_t>(c), phi, out);
}

void quad_gradients_serial(const Discretization& disc, std::span<const double> phi, std::span<double> out) {
    for (std::size_t c = 0; c < disc.cell_count(); ++c) cell_gradients(disc, c, phi, out);
}

void assemble_stiffness(const Discretization& disc, std::span<const double> coef, CsrMatrix& A) {
    std::fill(A.val.begin(), A.val.end(), 0.0);
    for (const auto& colour : disc.colors()) {
        const auto n = static_cast<long>(colour.size());
#pragma omp parallel for schedule(static)
        for (long k = 0; k < n; ++k) cell_stiffness(disc, colour[static_cast<std::size_t>(k)], coef, A);
    }
}

// Same colour order as the parallel version, so the sums agree bitwise.
void assemble_stiffness_serial(const Discretization& disc, std::span<const double> coef, CsrMatrix& A) {
    std::fill(A.val.begin(), A.val.end(), 0.0);
    for (const auto& colour : disc.colors())
        for (std::size_t c : colour) cell_stiffness(disc, c, coef, A);
}

void spmv(const CsrMatrix& A, std::span<const double> x, std::span<double> y) {
    const auto n = static_cast<long>(A.n);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) y[i] = row_product(A, x, static_cast<std::size_t>(i));
}

void spmv_serial(const CsrMatrix& A, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < A.n; ++i) y[i] = row_product(A, x, i);
}

double dot(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    const std::size_t nb = (n + kDotBlock - 1) / kDotBlock;
    std::vector<double> partial(nb, 0.0);
    const auto nbl = static_cast<long>(nb);
#pragma omp parallel for schedule(static)
    for (long blk = 0; blk < nbl; ++blk) {
        const std::size_t lo = static_cast<std::size_t>(blk) * kDotBlock;
        const std::size_t hi = std::min(n, lo + kDotBlock);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
        partial[static_cast<std::size_t>(blk)] = s;
    }
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

double dot_serial(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t lo = 0; lo < a.size(); lo += kDotBlock) {
        double p = 0.0;
        for (std::size_t i = lo; i < std::min(a.size(), lo + kDotBlock); ++i) p += a[i] * b[i];
        s += p;
    }
    return s;
}

void density_coefficients(const DensityKernelArgs& gas, std::span<const double> grads,
                          std::span<const double> phi_f, std::span<double> rho,
                          std::span<unsigned char> truncated) {
    const auto n = static_cast<long>(rho.size());
    int failed = 0;
#pragma omp parallel for schedule(static) reduction(| : failed)
    for (long k = 0; k < n; ++k) {
        const double gr = grads[2 * k], gz = grads[2 * k + 1];
        try {
            rho[k] = density_at(gas, gr * gr + gz * gz, phi_f[k], truncated[k]);
        } catch (const Error&) {
            failed = 1;
        }
    }
    if (failed) throw CavitationError("density: enthalpy argument nonpositive at a quadrature point");
}

void density_coefficients_serial(const DensityKernelArgs& gas, std::span<const double> grads,
                                 std::span<const double> phi_f, std::span<double> rho,
                                 std::span<unsigned char> truncated) {
    for (std::size_t k = 0; k < rho.size(); ++k) {
        const double gr = grads[2 * k], gz = grads[2 * k + 1];
        rho[k] = density_at(gas, gr * gr + gz * gz, phi_f[k], truncated[k]);
    }
}

}  // namespace potflow::kernels

// Serial reference vs OpenMP kernels on a bump-nozzle mesh.
//   bench_kernels --benchmark_filter=assemble

#include <benchmark/benchmark.h>

#include <random>

#include "potflow/analysis.hpp"
#include "potflow/kernels.hpp"

using namespace potflow;

namespace {

DiscretizationPtr mesh_for(std::size_t n_s) {
    ProfileParams p;
    p.obstacle = true;
    p.obstacle_height = 0.3;
    p.L1 = -1.0;
    p.L2 = 1.0;
    return discretize(build_mesh(build_profile(p), 20.0, n_s, 1.0 / n_s, Symmetry::axisymmetric));
}

std::vector<double> random_vector(std::size_t n, double lo, double hi) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

template <bool Parallel>
void BM_QuadGradients(benchmark::State& st) {
    const auto disc = mesh_for(static_cast<std::size_t>(st.range(0)));
    const auto phi = random_vector(disc->node_count(), -1.0, 1.0);
    std::vector<double> out(2 * disc->quads().size());
    for (auto _ : st) {
        if (Parallel) kernels::quad_gradients(*disc, phi, out);
        else kernels::quad_gradients_serial(*disc, phi, out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(disc->cell_count()));
}

template <bool Parallel>
void BM_Assemble(benchmark::State& st) {
    const auto disc = mesh_for(static_cast<std::size_t>(st.range(0)));
    const auto coef = random_vector(disc->quads().size(), 0.5, 1.5);
    CsrMatrix A = disc->pattern();
    for (auto _ : st) {
        if (Parallel) kernels::assemble_stiffness(*disc, coef, A);
        else kernels::assemble_stiffness_serial(*disc, coef, A);
        benchmark::DoNotOptimize(A.val.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(disc->cell_count()));
}

template <bool Parallel>
void BM_Spmv(benchmark::State& st) {
    const auto disc = mesh_for(static_cast<std::size_t>(st.range(0)));
    CsrMatrix A = disc->pattern();
    kernels::assemble_stiffness(*disc, std::vector<double>(disc->quads().size(), 1.0), A);
    const auto x = random_vector(A.n, -1.0, 1.0);
    std::vector<double> y(A.n);
    for (auto _ : st) {
        if (Parallel) kernels::spmv(A, x, y);
        else kernels::spmv_serial(A, x, y);
        benchmark::DoNotOptimize(y.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(A.col.size()));
}

template <bool Parallel>
void BM_Dot(benchmark::State& st) {
    const auto a = random_vector(static_cast<std::size_t>(st.range(0)), -1.0, 1.0);
    const auto b = random_vector(a.size(), -1.0, 1.0);
    for (auto _ : st) benchmark::DoNotOptimize(Parallel ? kernels::dot(a, b) : kernels::dot_serial(a, b));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void BM_Density(benchmark::State& st) {
    const auto disc = mesh_for(static_cast<std::size_t>(st.range(0)));
    const std::size_t nq = disc->quads().size();
    const auto grads = random_vector(2 * nq, -1.5, 1.5);
    const auto phi_f = random_vector(nq, 0.0, 0.5);
    std::vector<double> rho(nq);
    std::vector<unsigned char> tr(nq);
    const kernels::DensityKernelArgs gas{1.4, 0.2, 0.9, 0.5, 0.0};
    for (auto _ : st) {
        if (Parallel) kernels::density_coefficients(gas, grads, phi_f, rho, tr);
        else kernels::density_coefficients_serial(gas, grads, phi_f, rho, tr);
        benchmark::DoNotOptimize(rho.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(nq));
}

void BM_CompressibleSolve(benchmark::State& st) {
    Scenario sc;
    sc.profile.obstacle = true;
    sc.profile.obstacle_height = 0.3;
    sc.profile.L1 = -1.0;
    sc.profile.L2 = 1.0;
    sc.L = 10.0;
    sc.n_s = static_cast<std::size_t>(st.range(0));
    sc.h_z = 0.25;
    sc.gas.epsilon = 0.2;
    sc.force = ForceField::radial_static(0.5);
    const auto disc = scenario_discretization(sc);
    for (auto _ : st) benchmark::DoNotOptimize(solve_scenario(sc, disc).achieved_flux);
}

}  // namespace

BENCHMARK(BM_QuadGradients<false>)->Arg(16)->Arg(64);
BENCHMARK(BM_QuadGradients<true>)->Arg(16)->Arg(64);
BENCHMARK(BM_Assemble<false>)->Arg(16)->Arg(64);
BENCHMARK(BM_Assemble<true>)->Arg(16)->Arg(64);
BENCHMARK(BM_Spmv<false>)->Arg(16)->Arg(64);
BENCHMARK(BM_Spmv<true>)->Arg(16)->Arg(64);
BENCHMARK(BM_Dot<false>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_Dot<true>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_Density<false>)->Arg(16)->Arg(64);
BENCHMARK(BM_Density<true>)->Arg(16)->Arg(64);
BENCHMARK(BM_CompressibleSolve)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

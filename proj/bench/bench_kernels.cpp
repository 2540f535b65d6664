#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "hm/kernels.hpp"
#include "hm/solver.hpp"

namespace {

const hm::DiscreteOperator& op(int N) {
  static std::vector<std::pair<int, hm::DiscreteOperator>> cache;
  for (auto& [n, o] : cache)
    if (n == N) return o;
  hm::GridParams p;
  p.Nx = N;
  p.Nt = N;
  cache.emplace_back(N, hm::assemble(hm::build_grid(p), [](const hm::Vec&, const hm::Vec&) {
                       return hm::Mat(hm::Mat::Identity(3, 3));
                     }));
  return cache.back().second;
}

std::vector<double> random_vector(size_t n) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

void BM_spmv_parallel(benchmark::State& state) {
  const hm::Csr& A = op(state.range(0)).A;
  std::vector<double> x = random_vector(A.cols), y(A.rows);
  for (auto _ : state) {
    hm::kernels::spmv(A, x.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * A.nnz());
}

void BM_spmv_serial(benchmark::State& state) {
  const hm::Csr& A = op(state.range(0)).A;
  std::vector<double> x = random_vector(A.cols), y(A.rows);
  for (auto _ : state) {
    hm::kernels::serial::spmv(A, x.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * A.nnz());
}

void BM_dot_parallel(benchmark::State& state) {
  std::vector<double> x = random_vector(state.range(0)), y = random_vector(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hm::kernels::dot(x.data(), y.data(), x.size()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_dot_serial(benchmark::State& state) {
  std::vector<double> x = random_vector(state.range(0)), y = random_vector(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hm::kernels::serial::dot(x.data(), y.data(), x.size()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_solve(benchmark::State& state) {
  const hm::DiscreteOperator& o = op(state.range(0));
  std::vector<double> data(o.grid.boundary_cells);
  for (int i = 0; i < o.grid.boundary_cells; ++i) data[i] = o.grid.boundary_x(i) > 0.0 ? 1.0 : 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(hm::solve_dirichlet(o, data).values.data());
}

}  // namespace

BENCHMARK(BM_spmv_parallel)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_spmv_serial)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_dot_parallel)->Arg(1 << 12)->Arg(1 << 18);
BENCHMARK(BM_dot_serial)->Arg(1 << 12)->Arg(1 << 18);
BENCHMARK(BM_solve)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

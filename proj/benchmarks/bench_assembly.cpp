#include "sgfem/analysis.hpp"
#include "sgfem/assembly.hpp"

#include <benchmark/benchmark.h>

using namespace sgfem;

static void BM_BuildBasis(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const Mesh m = unit_mesh(dim, 2);
  int c = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ElementBasis::build(m, c));
    c = (c + 1) % static_cast<int>(m.num_cells());
  }
}
BENCHMARK(BM_BuildBasis)->Arg(2)->Arg(3);

static void BM_LocalStiffness(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const Mesh m = unit_mesh(dim, 2);
  const ElementBasis b = ElementBasis::build(m, 0);
  MaterialParams p;
  p.iota = 1e-2;
  Eigen::MatrixXd k;
  for (auto _ : state) {
    local_stiffness(b, p, dim == 2 ? 6 : 8, k);
    benchmark::DoNotOptimize(k.data());
  }
}
BENCHMARK(BM_LocalStiffness)->Arg(2)->Arg(3);

static void BM_GlobalAssembly(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const Mesh m = unit_mesh(dim, static_cast<int>(state.range(1)));
  const DofMap d(m);
  MaterialParams p;
  p.iota = 1e-2;
  const auto u = smooth_example(dim);
  for (auto _ : state) benchmark::DoNotOptimize(assemble(m, d, p, u.get()).A.nonZeros());
  state.counters["cells"] = static_cast<double>(m.num_cells());
}
BENCHMARK(BM_GlobalAssembly)->Args({2, 32})->Args({3, 8})->Unit(benchmark::kMillisecond);

static void BM_Solve(benchmark::State& state) {
  const Mesh m = generate_unit_square(static_cast<int>(state.range(0)));
  const DofMap d(m);
  MaterialParams p;
  p.iota = 1e-2;
  const SparseSystem sys = assemble(m, d, p, smooth_example(2).get());
  SolveOptions o;
  o.method = state.range(1) == 0 ? SolverMethod::Direct : SolverMethod::CG;
  for (auto _ : state) benchmark::DoNotOptimize(solve(sys, o).data());
}
BENCHMARK(BM_Solve)->Args({32, 0})->Args({32, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

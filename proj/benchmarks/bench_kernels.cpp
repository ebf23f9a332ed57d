#include <cmath>

#include <benchmark/benchmark.h>

#include "logsp/fiber.hpp"
#include "logsp/functionals.hpp"
#include "logsp/solver.hpp"

using namespace logsp;

namespace {

Field bump(const Grid2D& g) {
  return Field::sample(g, [](double x, double y) { return std::exp(-(x - 0.2) * (x - 0.2) - 0.7 * y * y); });
}

std::size_t side(const benchmark::State& st) { return static_cast<std::size_t>(st.range(0)); }

}  // namespace

static void BM_KernelTable(benchmark::State& st) {
  const Grid2D g = make_grid(side(st), 8.0);
  for (auto _ : st) {
    LogKernelTable t(g);
    benchmark::DoNotOptimize(t.weight(KernelKind::Log, 0, 0));
  }
}
BENCHMARK(BM_KernelTable)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_LogConvolution(benchmark::State& st) {
  const Grid2D g = make_grid(side(st), 8.0);
  const LogKernelTable t(g);
  const Field u = bump(g);
  const Field rho = hadamard(u, u);
  for (auto _ : st) benchmark::DoNotOptimize(log_convolution(rho, t));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_LogConvolution)->Arg(64)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);

static void BM_SpectralLaplacian(benchmark::State& st) {
  const Grid2D g = make_grid(side(st), 8.0);
  const Field u = bump(g);
  for (auto _ : st) benchmark::DoNotOptimize(spectral_laplacian(u));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_SpectralLaplacian)->Arg(64)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);

static void BM_Rescale(benchmark::State& st) {
  const Grid2D g = make_grid(side(st), 8.0);
  const Field u = bump(g);
  const auto interp = st.range(1) == 0 ? Interpolation::Cubic : Interpolation::Spectral;
  for (auto _ : st) benchmark::DoNotOptimize(rescale_field(u, 1.3, interp));
}
BENCHMARK(BM_Rescale)->ArgsProduct({{128, 256}, {0, 1}})->ArgNames({"n", "spectral"})->Unit(benchmark::kMicrosecond);

static void BM_EvalBreakdown(benchmark::State& st) {
  const Grid2D g = make_grid(side(st), 8.0);
  const LogKernelTable t(g);
  const StatePair s(bump(g), bump(g), {2.5, 1.0, 1.0, 1.0, 1.0, 1.0});
  for (auto _ : st) benchmark::DoNotOptimize(eval_breakdown(s, t));
}
BENCHMARK(BM_EvalBreakdown)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

static void BM_Gradient(benchmark::State& st) {
  const Grid2D g = make_grid(side(st), 8.0);
  const LogKernelTable t(g);
  const StatePair s(bump(g), bump(g), {2.5, 1.0, 1.0, 1.0, 1.0, 1.0});
  for (auto _ : st) benchmark::DoNotOptimize(l2_gradient(s, t));
}
BENCHMARK(BM_Gradient)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

static void BM_GroundSolveThm1i(benchmark::State& st) {
  const Grid2D g = make_grid(side(st), 8.0);
  for (auto _ : st) benchmark::DoNotOptimize(solve_ground({2.5, -1.0, -1.0, 0.5, 1.0, 1.0}, g));
}
BENCHMARK(BM_GroundSolveThm1i)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond)->Iterations(3);

static void BM_FiberRoots(benchmark::State& st) {
  FiberProfile p;
  p.A = 1.0;
  p.B = 1.0;
  p.C = 0.1;
  p.q = 3.0;
  for (auto _ : st) benchmark::DoNotOptimize(fiber_roots(p));
}
BENCHMARK(BM_FiberRoots);

BENCHMARK_MAIN();

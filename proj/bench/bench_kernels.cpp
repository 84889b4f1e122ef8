// Serial reference vs OpenMP for the two data-parallel kernels.

#include <benchmark/benchmark.h>

#include <vector>

#include "nelson/closedform.hpp"
#include "nelson/kernels.hpp"
#include "nelson/nelson_sim.hpp"
#include "nelson/states.hpp"

namespace {

using namespace nelson;

EnsembleSpec ensemble_spec(std::size_t paths) {
  EnsembleSpec s;
  s.n_paths = paths;
  s.initial = InitialLaw::delta(0.7);
  s.times = {0.5, 1.0};
  s.dt = 0.01;
  s.diffusion = 0.5;
  s.seed = 11;
  s.rate_scale = 1.0;
  s.grid = Grid1D(-5.0, 5.0, 401);
  return s;
}

void BM_EnsembleSerial(benchmark::State& st) {
  const auto drift = DriftField::from_state(StationaryState(1, OscillatorParams{}));
  const auto plan = kernels::plan_ensemble(drift, ensemble_spec(static_cast<std::size_t>(st.range(0))));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::ensemble_serial(plan));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_EnsembleOmp(benchmark::State& st) {
  const auto drift = DriftField::from_state(StationaryState(1, OscillatorParams{}));
  const auto plan = kernels::plan_ensemble(drift, ensemble_spec(static_cast<std::size_t>(st.range(0))));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::ensemble_omp(plan));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

struct PropagateCase {
  Grid1D grid;
  std::vector<double> rho;
  std::vector<double> out;
  TransitionKernel kernel = ou_transition(1.0, 0.5);

  explicit PropagateCase(std::size_t n) : grid(-5.0, 5.0, n), rho(n), out(n) {
    const OscillatorParams p;
    for (std::size_t i = 0; i < n; ++i) rho[i] = StationaryState(1, p).density(grid.x(i));
  }
};

void BM_PropagateSerial(benchmark::State& st) {
  PropagateCase c(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    kernels::propagate_serial(c.kernel, c.grid, c.rho, 0.0, 0.5, c.out);
    benchmark::DoNotOptimize(c.out.data());
  }
}

void BM_PropagateOmp(benchmark::State& st) {
  PropagateCase c(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    kernels::propagate_omp(c.kernel, c.grid, c.rho, 0.0, 0.5, c.out);
    benchmark::DoNotOptimize(c.out.data());
  }
}

}  // namespace

BENCHMARK(BM_EnsembleSerial)->Arg(1 << 14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleOmp)->Arg(1 << 14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PropagateSerial)->Arg(401)->Arg(1601)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PropagateOmp)->Arg(401)->Arg(1601)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

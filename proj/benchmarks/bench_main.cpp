#include <benchmark/benchmark.h>

#include <string>

#include "rydkcm/cluster_model.hpp"
#include "rydkcm/kcm.hpp"
#include "rydkcm/master_equation.hpp"
#include "rydkcm/single_atom.hpp"
#include "rydkcm/trajectory.hpp"

using namespace rydkcm;

namespace {

SystemConfig chain(int n) {
  SystemConfig c;
  c.n_sites = n;
  c.omega_e = 1.0;
  c.omega_r = 0.03;
  c.delta_r = 3.0;
  c.interaction_strength = 3.0;
  c.boundary = Boundary::periodic;
  return c;
}

std::string defects(int n) {
  std::string p(n, 'g');
  p[0] = 'r';
  if (n > 5) p[5] = 'r';
  return p;
}

// One trajectory of length 100 with the fixed-step scheme.
void BM_TrajectoryFixed(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto cfg = chain(n);
  cfg.time_step = 0.01;
  cfg.record_jumps = false;
  const auto grid = uniform_grid(100.0, 11);
  std::uint64_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_trajectory(cfg, defects(n), grid, 1, 0, k++));
}
BENCHMARK(BM_TrajectoryFixed)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

// Long-time trajectory with waiting-time jumps and sector pruning.
void BM_TrajectoryWaitingTime(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto cfg = chain(n);
  cfg.mcwf_mode = McwfMode::waiting_time;
  cfg.time_step = 0.5;
  cfg.prune_threshold = 1e-3;
  cfg.record_jumps = false;
  const auto grid = uniform_grid(1000.0, 11);
  std::uint64_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_trajectory(cfg, defects(n), grid, 1, 0, k++));
}
BENCHMARK(BM_TrajectoryWaitingTime)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_MasterEquation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto cfg = chain(n);
  const auto rho0 = pure_density(product_state(defects(n), HamiltonianMode::three_level));
  const auto grid = uniform_grid(50.0, 11);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_master_equation(cfg, rho0, grid));
}
BENCHMARK(BM_MasterEquation)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_BlochSteadyState(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(bloch_steady_state(1.0, 0.03));
}
BENCHMARK(BM_BlochSteadyState);

void BM_ReducedSpectrum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::string p(n, 'g');
  p[n / 2] = 'r';
  const auto h = build_reduced_hamiltonian(enumerate_subspace(n, p), 0.03);
  for (auto _ : state) benchmark::DoNotOptimize(spectrum(h));
}
BENCHMARK(BM_ReducedSpectrum)->Arg(9)->Arg(14)->Arg(20)->Unit(benchmark::kMicrosecond);

void BM_Ctmc(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::string p(n, '0');
  p[n / 2] = '1';
  const auto init = SpinConfig::from_pattern(p);
  const KcmParams params{0.25, Constraint::one_sfm};
  std::uint64_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_ctmc(init, params, 100.0, 3, k++));
}
BENCHMARK(BM_Ctmc)->Arg(16)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_KcmExact(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Eigen::VectorXd p0 = Eigen::VectorXd::Zero(1 << n);
  p0(1) = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(exact_rate_equation(p0, n, Boundary::periodic, KcmParams{0.25, Constraint::one_sfm}, {1.0, 10.0}));
}
BENCHMARK(BM_KcmExact)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

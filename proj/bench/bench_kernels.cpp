// Serial reference paths against the OpenMP kernels. Arg(0) = serial,
// Arg(1) = parallel; the results themselves are bit-identical.

#include <benchmark/benchmark.h>

#include <cmath>

#include "aninorm/bilinear.hpp"
#include "aninorm/model_io.hpp"
#include "aninorm/montecarlo.hpp"
#include "aninorm/norm.hpp"

using namespace aninorm;

namespace {

const CtStateSpace& example() {
  static const CtStateSpace sys =
      std::get<CtStateSpace>(read_model(ANINORM_MODELS_DIR "/example_lcti.json"));
  return sys;
}

const TimeScale kT(0.1890);

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

// Quadrature of the worst-case density at a = 1.2264: poles near the circle
// switch the rule to clustered Gauss-Legendre panels.
void BM_RmsGain(benchmark::State& state) {
  const AnisotropicNormSolution sol = anisotropic_norm(example(), kT, 1.2264);
  const SpectralDensity S(RationalDt{worst_case_filter(example(), kT, sol).discrete()});
  const PhiGrid grid(static_cast<std::size_t>(state.range(1)), mode(state));
  for (auto _ : state) benchmark::DoNotOptimize(rms_gain(example(), S, kT, grid));
}
BENCHMARK(BM_RmsGain)->ArgsProduct({{0, 1}, {4096, 16384}})->Unit(benchmark::kMillisecond);

void BM_MeanAnisotropy(benchmark::State& state) {
  const CtStateSpace shaping = example();
  const CtStateSpace filter(shaping.A(), shaping.B(), shaping.B().transpose(),
                            MatrixXd::Identity(3, 3));
  const SpectralDensity S(RationalCt{filter});
  const PhiGrid grid(static_cast<std::size_t>(state.range(1)), mode(state));
  for (auto _ : state) benchmark::DoNotOptimize(mean_anisotropy(S, kT, grid));
}
BENCHMARK(BM_MeanAnisotropy)->ArgsProduct({{0, 1}, {4096, 16384}})->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
  std::vector<double> levels;
  for (int k = 0; k <= 16; ++k) levels.push_back(0.25 * k);
  for (auto _ : state) benchmark::DoNotOptimize(sweep(example(), kT, levels, mode(state)));
}
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
  const AnisotropicNormSolution sol = anisotropic_norm(example(), kT, 1.2264);
  const WorstCaseFilter wc = worst_case_filter(example(), kT, sol);
  const DtStateSpace dt = to_discrete(example(), kT);
  SimConfig cfg;
  cfg.steps = 100'000;
  cfg.burn_in = 1'000;
  cfg.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_dt(dt, wc, cfg));
}
BENCHMARK(BM_MonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Norm(benchmark::State& state) {
  const DtStateSpace dt = to_discrete(example(), kT);
  for (auto _ : state) benchmark::DoNotOptimize(anisotropic_norm_dt(dt, 1.2264));
}
BENCHMARK(BM_Norm)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

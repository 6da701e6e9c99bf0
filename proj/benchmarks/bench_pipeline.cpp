#include <benchmark/benchmark.h>

#include <diracweyl/diracweyl.hpp>

using namespace diracweyl;

namespace {

PotentialProfile constant_potential() {
  return PotentialProfile::constant(Matrix::Constant(1, 1, 0.5), 16.0, 256);
}

const WeylSamples& samples() {
  static const WeylSamples w = weyl_line(constant_potential(), 1.0, 200.0, 1601);
  return w;
}

}  // namespace

static void BM_WeylPoint(benchmark::State& state) {
  const PotentialProfile v = PotentialProfile::constant(Matrix::Constant(1, 1, 0.5), 16.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(weyl_point_unchecked(v, cd(1.0, 1.0)).phi);
}
BENCHMARK(BM_WeylPoint)->Arg(256)->Arg(1024)->Arg(4096);

static void BM_WeylLine(benchmark::State& state) {
  const PotentialProfile v = constant_potential();
  DirectOptions o;
  o.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(weyl_line(v, 1.0, 200.0, 1601, o).values().data());
}
BENCHMARK(BM_WeylLine)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_Transform(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(phi1_from_weyl(samples(), 2.0, n, TransformOptions::round_trip()).phi1.size());
  }
}
BENCHMARK(BM_Transform)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_AssembleFactorize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Phi1Profile phi = phi1_from_weyl(samples(), 2.0, n, TransformOptions::round_trip());
  const AccelerantKernel k(phi);
  for (auto _ : state) benchmark::DoNotOptimize(factorize(assemble_S(k, 2.0)).matrix().data());
}
BENCHMARK(BM_AssembleFactorize)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_InvertAll(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Phi1Profile phi = phi1_from_weyl(samples(), 2.0, n, TransformOptions::round_trip());
  for (auto _ : state) benchmark::DoNotOptimize(invert(phi, Procedure::all).procedures.size());
}
BENCHMARK(BM_InvertAll)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

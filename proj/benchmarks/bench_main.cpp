// Microbenchmarks for the hot paths: the per-sweep updates at realistic
// problem sizes, the mixture-size series, optimal transport, and binning.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "tensorclust/ingest.hpp"
#include "tensorclust/mfm.hpp"
#include "tensorclust/postprocess.hpp"
#include "tensorclust/rng.hpp"
#include "tensorclust/sampler.hpp"
#include "tensorclust/simbench.hpp"

using namespace tensorclust;

namespace {

struct SweepFixture {
  GibbsSampler sampler;
  ModelState state;
  Rng rng;

  explicit SweepFixture(int design)
      : sampler(generate_design(DesignSpec::design(design), 7), SamplerConfig{}),
        rng(11) {
    state = sampler.init_state(rng);
    for (int i = 0; i < 10; ++i) sampler.sweep(state, rng);  // settle K near its mode
  }
};

void BM_LabelUpdate(benchmark::State& state) {
  static SweepFixture fix(2);
  for (auto _ : state) {
    fix.sampler.update_labels(fix.state, 1, fix.rng);
    benchmark::DoNotOptimize(fix.state.dir[0].labels.data());
  }
}
BENCHMARK(BM_LabelUpdate);

void BM_FullSweepDesign1(benchmark::State& state) {
  static SweepFixture fix(1);
  for (auto _ : state) {
    fix.sampler.sweep(fix.state, fix.rng);
    benchmark::DoNotOptimize(fix.state.log_posterior);
  }
}
BENCHMARK(BM_FullSweepDesign1);

void BM_FullSweepDesign2(benchmark::State& state) {
  static SweepFixture fix(2);
  for (auto _ : state) {
    fix.sampler.sweep(fix.state, fix.rng);
    benchmark::DoNotOptimize(fix.state.log_posterior);
  }
}
BENCHMARK(BM_FullSweepDesign2);

void BM_LogVn(benchmark::State& state) {
  MfmConfig cfg;
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    for (int t = 1; t <= std::min(n, 10); ++t) {
      benchmark::DoNotOptimize(log_vn(t, n, cfg));
    }
  }
}
BENCHMARK(BM_LogVn)->Arg(50)->Arg(200);

void BM_Wasserstein(benchmark::State& state) {
  Rng rng(3);
  const int atoms = static_cast<int>(state.range(0));
  auto make = [&] {
    MixingMeasure g;
    const std::vector<double> alpha(static_cast<std::size_t>(atoms), 1.0);
    const Eigen::VectorXd w = rng.dirichlet(alpha);
    for (int j = 0; j < atoms; ++j) {
      g.weights.push_back(w[j]);
      Eigen::VectorXd atom(11);
      for (int q = 0; q < 11; ++q) atom[q] = rng.normal();
      g.atoms.push_back(atom);
    }
    return g;
  };
  const MixingMeasure a = make();
  const MixingMeasure b = make();
  for (auto _ : state) {
    benchmark::DoNotOptimize(wasserstein(a, b));
  }
}
BENCHMARK(BM_Wasserstein)->Arg(3)->Arg(8);

void BM_PolarBin(benchmark::State& state) {
  const PartitionScheme scheme;
  Rng rng(5);
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < 1024; ++i) {
    pts.emplace_back(rng.uniform() * scheme.court_width, rng.uniform() * scheme.court_height);
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [x, y] = pts[i++ & 1023];
    benchmark::DoNotOptimize(polar_bin(x, y, scheme));
  }
}
BENCHMARK(BM_PolarBin);

}  // namespace

BENCHMARK_MAIN();

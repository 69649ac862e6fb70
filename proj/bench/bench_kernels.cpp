#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "isospec/kernels.hpp"

using namespace isospec::kernels;

namespace {

std::vector<double> noise(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// range(0): problem size, range(1): 0 serial, otherwise OpenMP with that many threads
bool use_omp(benchmark::State& s) {
  if (s.range(1) == 0) return false;
  omp_set_num_threads(static_cast<int>(s.range(1)));
  return true;
}

void BM_PairwiseSum(benchmark::State& s) {
  auto x = noise(s.range(0));
  bool par = use_omp(s);
  for (auto _ : s) benchmark::DoNotOptimize(par ? omp::pairwise_sum(x) : serial::pairwise_sum(x));
  s.SetItemsProcessed(s.iterations() * s.range(0));
}

void BM_LatticeStep(benchmark::State& s) {
  auto L = make_lattice(2, s.range(0));
  LatticeStep step;
  step.lattice = &L;
  step.active = s.range(0) - 1;
  step.shifts = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  std::vector<double> w(4, 0.25), in = noise(L.cells()), out(L.cells());
  bool par = use_omp(s);
  for (auto _ : s) {
    if (par) {
      omp::lattice_step(step, w, in, out);
    } else {
      serial::lattice_step(step, w, in, out);
    }
    benchmark::ClobberMemory();
  }
  s.SetItemsProcessed(s.iterations() * L.cells());
}

void BM_Gather(benchmark::State& s) {
  Stencil st;
  st.targets = s.range(0);
  st.width = 4;
  std::mt19937_64 rng(2);
  for (std::size_t i = 0; i < st.targets * st.width; ++i) st.source.push_back(rng() % st.targets);
  std::vector<double> w(4, 0.25), in = noise(st.targets), out(st.targets);
  bool par = use_omp(s);
  for (auto _ : s) {
    if (par) {
      omp::gather(st, w, in, out);
    } else {
      serial::gather(st, w, in, out);
    }
    benchmark::ClobberMemory();
  }
  s.SetItemsProcessed(s.iterations() * st.targets);
}

void BM_TwistedIntegral(benchmark::State& s) {
  TwistedWalk walk;
  walk.steps = static_cast<int>(s.range(0));
  walk.moves = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
  walk.weights = {0.25, 0.25, 0.25, 0.25};
  auto rule = graded_theta_rule(8, 16);
  bool par = use_omp(s);
  for (auto _ : s) {
    auto r = par ? omp::twisted_integral(walk, rule) : serial::twisted_integral(walk, rule);
    benchmark::DoNotOptimize(r.norm.data());
  }
}

void BM_BlockSpectra(benchmark::State& s) {
  BlockFamily f;
  f.block_size = s.range(0);
  f.off_diagonal.assign(f.block_size - 1, 0.5);
  auto d = noise(f.block_size * 256);
  for (std::size_t b = 0; b < 256; ++b) {
    f.diagonals.emplace_back(d.begin() + b * f.block_size, d.begin() + (b + 1) * f.block_size);
    f.multiplicity.push_back(1);
  }
  bool par = use_omp(s);
  for (auto _ : s) {
    auto r = par ? omp::block_spectra(f) : serial::block_spectra(f);
    benchmark::DoNotOptimize(r.data());
  }
}

void flavours(benchmark::internal::Benchmark* b, std::vector<std::int64_t> sizes) {
  int max_threads = omp_get_num_procs();
  for (auto n : sizes) {
    b->Args({n, 0});
    for (int t = 1; t <= max_threads; t *= 2) b->Args({n, t});
  }
}

}  // namespace

BENCHMARK(BM_PairwiseSum)->Apply([](auto* b) { flavours(b, {1 << 16, 1 << 22}); });
BENCHMARK(BM_LatticeStep)->Apply([](auto* b) { flavours(b, {200, 1000}); });
BENCHMARK(BM_Gather)->Apply([](auto* b) { flavours(b, {1 << 16, 1 << 20}); });
BENCHMARK(BM_TwistedIntegral)->Apply([](auto* b) { flavours(b, {25, 50}); })->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BlockSpectra)->Apply([](auto* b) { flavours(b, {64, 256}); })->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

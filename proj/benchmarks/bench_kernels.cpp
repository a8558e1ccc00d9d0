// Microbenchmarks for the hot kernels: Khatri-Rao rows, mode-view
// construction, row gradient/Hessian assembly, power iteration, and a full
// one-mode solver sweep. Shared fixture: a 60x70x80 rank-5 synthetic tensor
// at 30% density (~100k observed entries), built once.

#include <benchmark/benchmark.h>

#include <cstddef>
#include <vector>

#include "ntc/factor_set.hpp"
#include "ntc/matrix.hpp"
#include "ntc/mode_view.hpp"
#include "ntc/nmc.hpp"
#include "ntc/rng.hpp"
#include "ntc/sparse_tensor.hpp"
#include "ntc/synth.hpp"

namespace {

const ntc::SparseTensor& fixture_tensor() {
  static const ntc::SparseTensor t = [] {
    ntc::SynthSpec spec;
    spec.dims = {60, 70, 80};
    spec.rank = 5;
    spec.density = 0.3;
    spec.noise_sigma = 0.05;
    spec.seed = 1;
    return ntc::synth_generate(spec).observed;
  }();
  return t;
}

const std::vector<ntc::ModeView>& fixture_views() {
  static const std::vector<ntc::ModeView> v = ntc::build_mode_views(fixture_tensor());
  return v;
}

ntc::FactorSet fixture_factors(std::size_t rank) {
  return ntc::FactorSet::random_uniform(fixture_tensor().dims(), rank, ntc::RngStream(7));
}

// Row of mode 0 with the most observed entries; the worst-case slice.
std::size_t densest_row(const ntc::ModeView& view) {
  std::size_t best = 0;
  for (std::size_t p = 1; p < view.slice_count(); ++p)
    if (view.slice_nnz(p) > view.slice_nnz(best)) best = p;
  return best;
}

}  // namespace

static void BM_kr_row(benchmark::State& state) {
  const auto rank = static_cast<std::size_t>(state.range(0));
  const auto factors = fixture_factors(rank);
  const auto& view = fixture_views()[0];
  std::vector<double> out(rank);
  std::size_t t = 0;
  const std::size_t n = view.values.size();
  for (auto _ : state) {
    ntc::kr_row(factors, 0, view.entry_others(t), out);
    benchmark::DoNotOptimize(out.data());
    if (++t == n) t = 0;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_kr_row)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

static void BM_build_mode_views(benchmark::State& state) {
  const auto& t = fixture_tensor();
  for (auto _ : state) {
    auto views = ntc::build_mode_views(t);
    benchmark::DoNotOptimize(views);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(t.nnz()));
  state.counters["nnz"] = static_cast<double>(t.nnz());
}
BENCHMARK(BM_build_mode_views)->Unit(benchmark::kMillisecond);

static void BM_row_gradient(benchmark::State& state) {
  const auto rank = static_cast<std::size_t>(state.range(0));
  const auto factors = fixture_factors(rank);
  const auto& view = fixture_views()[0];
  const std::size_t row = densest_row(view);
  const auto sampled = ntc::sample_row(view, row, 1.0, ntc::RngStream(0));
  ntc::RowWorkspace ws;
  ws.resize(rank);
  const auto y = factors.factors[0].row(row);
  for (auto _ : state) {
    ntc::row_gradient(view, sampled, factors, 0, y, 1e-3, ws);
    benchmark::DoNotOptimize(ws.grad.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(sampled.blocksize()));
  state.counters["block"] = static_cast<double>(sampled.blocksize());
}
BENCHMARK(BM_row_gradient)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

static void BM_row_hessian(benchmark::State& state) {
  const auto rank = static_cast<std::size_t>(state.range(0));
  const auto factors = fixture_factors(rank);
  const auto& view = fixture_views()[0];
  const std::size_t row = densest_row(view);
  const auto sampled = ntc::sample_row(view, row, 1.0, ntc::RngStream(0));
  ntc::Matrix h(rank, rank);
  for (auto _ : state) {
    ntc::row_hessian(view, sampled, factors, 0, 1e-3, h);
    benchmark::DoNotOptimize(h.data().data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(sampled.blocksize()));
}
BENCHMARK(BM_row_hessian)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

static void BM_power_method(benchmark::State& state) {
  const auto rank = static_cast<std::size_t>(state.range(0));
  const auto factors = fixture_factors(rank);
  const auto& view = fixture_views()[0];
  const auto sampled = ntc::sample_row(view, densest_row(view), 1.0, ntc::RngStream(0));
  ntc::Matrix h(rank, rank);
  ntc::row_hessian(view, sampled, factors, 0, 1e-3, h);
  for (auto _ : state) {
    double l = ntc::power_method(h, 30, 1e-6);
    benchmark::DoNotOptimize(l);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_power_method)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

// One full mode-0 update (sample + gradient + Hessian + power + step for
// every row). Args: {rank, threads}. items/s counts observed entries.
static void BM_s_nmc_sweep(benchmark::State& state) {
  const auto rank = static_cast<std::size_t>(state.range(0));
  const auto base = fixture_factors(rank);
  const auto& view = fixture_views()[0];
  ntc::NmcConfig cfg;
  cfg.lambda = 1e-3;
  cfg.c = 0.5;
  cfg.max_inner = 1;
  cfg.threads = static_cast<int>(state.range(1));
  std::int64_t accessed = 0;
  for (auto _ : state) {
    state.PauseTiming();
    ntc::FactorSet factors = base;
    state.ResumeTiming();
    ntc::SnmcStats stats;
    ntc::s_nmc(view, factors, 0, base.factors[0], cfg, ntc::RngStream(3), &stats);
    benchmark::DoNotOptimize(factors.factors[0].data().data());
    accessed += static_cast<std::int64_t>(stats.entries_accessed);
  }
  state.SetItemsProcessed(accessed);
}
BENCHMARK(BM_s_nmc_sweep)
    ->Unit(benchmark::kMillisecond)
    ->Args({10, 1})
    ->Args({10, 2})
    ->Args({30, 1})
    ->Args({30, 2})
    ->Args({50, 1})
    ->Args({50, 2});

BENCHMARK_MAIN();

#include "ntc/ao.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "ntc/metrics.hpp"
#include "ntc/mode_view.hpp"

namespace ntc {

namespace {

// Root-stream domains; synth.cpp owns tags 4..6 so a generator and a
// solver sharing one seed still draw from unrelated substreams.
constexpr std::uint64_t kTagInit = 1;   // factor initialization domain
constexpr std::uint64_t kTagSweep = 2;  // per-(sweep, mode) solver domain

// True when the last three recorded steps each moved rel_error by < tol.
// NaN rel_error (metrics disabled) never satisfies the comparison.
bool plateau(const std::vector<MetricsRecord>& h, double tol) {
  if (h.size() < 4) return false;
  for (std::size_t t = h.size() - 3; t < h.size(); ++t)
    if (!(std::abs(h[t].rel_error - h[t - 1].rel_error) < tol)) return false;
  return true;
}

}  // namespace

void AoConfig::validate() const {
  if (rank == 0) throw std::invalid_argument("AoConfig: rank must be positive");
  if (!(max_epochs >= 0.0))
    throw std::invalid_argument("AoConfig: max_epochs must be >= 0");
  if (!(term_tol >= 0.0)) throw std::invalid_argument("AoConfig: term_tol must be >= 0");
  if (metrics_every < 1)
    throw std::invalid_argument("AoConfig: metrics_every must be >= 1");
  nmc().validate();  // lambda, c, max_inner, power and threading parameters
}

NmcConfig AoConfig::nmc() const {
  NmcConfig n;
  n.lambda = lambda;
  n.c = c;
  n.max_inner = max_inner;
  n.power_iters = power_iters;
  n.power_tol = power_tol;
  n.threads = threads;
  n.chunk = chunk;
  return n;
}

double epoch_fraction(std::uint64_t entries_accessed, std::size_t omega_size) {
  if (omega_size == 0)
    throw std::invalid_argument("epoch_fraction: empty observation set");
  return static_cast<double>(entries_accessed) / static_cast<double>(omega_size);
}

bool term_cond(const std::vector<MetricsRecord>& history, const AoConfig& cfg) {
  if (history.empty())
    throw std::invalid_argument("term_cond: needs at least one record");
  if (history.back().epoch >= cfg.max_epochs) return true;
  return plateau(history, cfg.term_tol);
}

RngStream sweep_stream(std::uint64_t seed, std::uint64_t sweep, int mode) {
  return RngStream(seed).fork(kTagSweep).fork(sweep).fork(
      static_cast<std::uint64_t>(mode));
}

FactorSet initial_factors(std::span<const std::size_t> dims, std::size_t rank,
                          std::uint64_t seed) {
  return FactorSet::random_uniform(dims, rank, RngStream(seed).fork(kTagInit));
}

AoResult ao_ntc(const SparseTensor& tensor, FactorSet init, const AoConfig& cfg,
                const SweepObserver& observer) {
  cfg.validate();
  if (init.rank != cfg.rank)
    throw std::invalid_argument("ao_ntc: init rank differs from configured rank");
  if (!init.shapes_match(tensor))
    throw std::invalid_argument("ao_ntc: init factor shapes do not match tensor");
  if (!init.all_nonnegative())
    throw std::invalid_argument("ao_ntc: init factors must be nonnegative");

  const std::size_t order = tensor.order();
  const std::vector<ModeView> views = build_mode_views(tensor);
  const NmcConfig ncfg = cfg.nmc();

  AoResult out{std::move(init), {}};
  FactorSet& f = out.factors;

  std::uint64_t accessed = 0;
  const auto t0 = std::chrono::steady_clock::now();

  auto push_record = [&]() {
    MetricsRecord r;
    r.entries_accessed = accessed;
    r.epoch = epoch_fraction(accessed, tensor.nnz());
    r.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cfg.eval_metrics) {
      r.objective = objective(tensor, f, cfg.lambda);
      r.rel_error = relative_error(tensor, f);
      if (!std::isfinite(r.objective))
        throw std::runtime_error("ao_ntc: objective diverged (non-finite)");
    }
    out.history.push_back(r);
    if (observer) observer(r, f);
  };

  push_record();  // epoch 0: state before the first sweep

  bool last_recorded = true;
  for (std::uint64_t k = 0;; ++k) {
    // Budget checked on the live counter so thinned recording (metrics_every
    // > 1) cannot overshoot; identical to term_cond(history, cfg) whenever
    // the latest sweep was recorded.
    if (epoch_fraction(accessed, tensor.nnz()) >= cfg.max_epochs) break;
    if (plateau(out.history, cfg.term_tol)) break;

    SnmcStats st;
    for (std::size_t i = 0; i < order; ++i)
      s_nmc(views[i], f, static_cast<int>(i), f.factors[i], ncfg,
            sweep_stream(cfg.seed, k, static_cast<int>(i)), &st);

    if (st.entries_accessed == 0) break;  // every blocksize floored to 0; no progress possible
    accessed += st.entries_accessed;
    last_recorded = ((k + 1) % static_cast<std::uint64_t>(cfg.metrics_every) == 0);
    if (last_recorded) push_record();
  }
  if (!last_recorded) push_record();
  return out;
}

}  // namespace ntc

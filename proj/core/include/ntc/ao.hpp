#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "ntc/metrics.hpp"
#include "ntc/nmc.hpp"

namespace ntc {

struct AoConfig {
  std::size_t rank = 1;
  double lambda = 1e-3;  // > 0
  double c = 1.0;        // sampling fraction in (0, 1]
  int max_inner = 1;
  double max_epochs = 100.0;  // fractional budget; 0 runs no sweep
  double term_tol = 0.0;      // 0 disables the plateau rule
  std::uint64_t seed = 0;
  int threads = 1;
  int chunk = 0;
  int power_iters = 30;
  double power_tol = 1e-6;
  bool eval_metrics = true;  // objective/rel_error per record; off for benchmarking
  int metrics_every = 1;     // record every k-th sweep (final sweep always recorded)

  void validate() const;
  NmcConfig nmc() const;
};

struct MetricsRecord {
  double epoch = 0.0;  // entries_accessed / |Omega|, fractional
  double objective = std::numeric_limits<double>::quiet_NaN();
  double rel_error = std::numeric_limits<double>::quiet_NaN();
  double wall_seconds = 0.0;  // monotonic clock around the sweep loop only
  std::uint64_t entries_accessed = 0;
};

// Fractional epochs: one epoch is |Omega| accumulated entry accesses. A
// full sweep at sampling fraction c costs about N*c epochs.
double epoch_fraction(std::uint64_t entries_accessed, std::size_t omega_size);

// True when the epoch budget is exhausted or the relative error moved by
// less than term_tol over each of the last 3 sweeps. Needs >= 1 record.
bool term_cond(const std::vector<MetricsRecord>& history, const AoConfig& cfg);

// Substream used for sweep k's mode-i subproblem; exposed so a run can be
// replayed mode by mode through s_nmc.
RngStream sweep_stream(std::uint64_t seed, std::uint64_t sweep, int mode);

// The U[0,1] initial factors for a completion run with this seed.
FactorSet initial_factors(std::span<const std::size_t> dims, std::size_t rank,
                          std::uint64_t seed);

using SweepObserver = std::function<void(const MetricsRecord&, const FactorSet&)>;

struct AoResult {
  FactorSet factors;
  std::vector<MetricsRecord> history;
};

// Alternating optimization over the modes: sweep k updates mode i by
// solving its matrix-completion subproblem against the implicit Khatri-Rao
// operand built from the already-updated factors of modes < i and the
// previous factors of modes > i. One metrics record precedes the first
// sweep and one follows each sweep (subject to metrics_every); terminates
// per term_cond, or early if a whole sweep accessed zero entries (every
// blocksize floored to zero; no further progress is possible).
AoResult ao_ntc(const SparseTensor& tensor, FactorSet init, const AoConfig& cfg,
                const SweepObserver& observer = {});

}  // namespace ntc

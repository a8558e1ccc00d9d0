#pragma once

#include <cstdint>
#include <vector>

#include "ntc/factor_set.hpp"
#include "ntc/matrix.hpp"
#include "ntc/mode_view.hpp"
#include "ntc/rng.hpp"

namespace ntc {

struct NmcConfig {
  double lambda = 1e-3;  // > 0: strong convexity; the momentum formula degenerates at 0
  double c = 1.0;        // sampling fraction in (0, 1]
  int max_inner = 1;     // inner iterations per call; 0 returns a_init unchanged
  int power_iters = 30;
  double power_tol = 1e-6;
  int threads = 1;
  int chunk = 0;  // 0: static contiguous row partition; >0: dynamic, this chunk size

  void validate() const;  // throws std::invalid_argument
};

// Mini-batch for one row of the matrix variable: local entry offsets into
// the row's slice of the ModeView. blocksize() == floor(c * slice_nnz);
// an empty pick list means the row is skipped this iteration.
struct SampledRow {
  std::size_t row = 0;
  std::vector<std::uint32_t> picks;

  std::size_t blocksize() const { return picks.size(); }
};

// Per-row scratch reused across iterations by one worker.
struct RowWorkspace {
  std::vector<double> w, z, grad;  // -sum x_e k_e; sum (y.k_e) k_e; w + z + lambda y
  Matrix hessian;                  // sum k_e k_e^T + lambda I
  double lipschitz = 0.0;          // step L for the row (power estimate + margin)
  double beta = 0.0;               // (sqrt(L) - sqrt(lambda)) / (sqrt(L) + sqrt(lambda))
  std::vector<double> kr;          // k_e scratch
  std::vector<double> a_prev;      // row of A before the step, for the momentum update
  std::vector<std::uint32_t> perm; // Fisher-Yates scratch

  void resize(std::size_t rank);
};

// Uniform without-replacement sample of floor(c * slice_nnz) entries via
// partial Fisher-Yates over the slice's entry list. c == 1 returns the full
// slice in slice order and consumes no randomness, so full-batch runs are
// seed-independent.
SampledRow sample_row(const ModeView& view, std::size_t row, double c, RngStream rng);

// Fills ws.w, ws.z, ws.grad for the sampled row, gradient taken at y_row.
// Cost O(blocksize * rank) plus one kr_row per pick.
void row_gradient(const ModeView& view, const SampledRow& sampled, const FactorSet& factors,
                  int mode, std::span<const double> y_row, double lambda, RowWorkspace& ws);

// h = sum_e k_e k_e^T + lambda I, symmetric PD for lambda > 0.
void row_hessian(const ModeView& view, const SampledRow& sampled, const FactorSet& factors,
                 int mode, double lambda, Matrix& h);

// Largest eigenvalue of a symmetric PSD matrix: power iteration started
// from the normalized all-ones vector, stopping when the Rayleigh quotient
// moves by less than tol (relative) or after max_iters rounds. Returns the
// raw final Rayleigh quotient; callers add their own safety margin.
// Throws std::invalid_argument on non-finite input.
double power_method(const Matrix& h, int max_iters, double tol);

// Projected accelerated step:
//   a_new = (y_row - grad / lipschitz)_+
//   beta  = (sqrt(L) - sqrt(lambda)) / (sqrt(L) + sqrt(lambda))
//   y_new = a_new + beta * (a_new - a_prev)
// y_new may alias y_row. Returns beta. Throws unless lipschitz >= lambda > 0.
double row_step(std::span<const double> y_row, std::span<const double> a_prev,
                std::span<const double> grad, double lipschitz, double lambda,
                std::span<double> a_new, std::span<double> y_new);

struct SnmcStats {
  std::uint64_t entries_accessed = 0;  // sum of blocksizes over rows and iterations
};

// Accelerated stochastic gradient for one nonnegative matrix completion
// subproblem, rows updated independently and in parallel:
//   A_0 = Y_0 = a_init; for l < max_inner, for every row p:
//   sample, gradient at Y_l(p,:), sampled Hessian, power-method L_p
//   (inflated by 1% so 1/L_p never overshoots), projected step, momentum.
// Rows with blocksize 0 keep both their A and Y rows. Updates
// factors.factors[mode] and factors.momentum[mode] in place and returns the
// final factor. Results are bitwise identical for any thread count or
// schedule: the (iteration, row) substream is derived from `rng` alone.
// Aborts with a diagnostic if a row produces non-finite values.
const Matrix& s_nmc(const ModeView& view, FactorSet& factors, int mode,
                    const Matrix& a_init, const NmcConfig& cfg, RngStream rng,
                    SnmcStats* stats = nullptr);

}  // namespace ntc

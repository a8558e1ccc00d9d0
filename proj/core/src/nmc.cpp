#include "ntc/nmc.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ntc {

void NmcConfig::validate() const {
  if (!(lambda > 0.0))
    throw std::invalid_argument("NmcConfig: lambda must be > 0");
  if (!(c > 0.0 && c <= 1.0))
    throw std::invalid_argument("NmcConfig: c must be in (0, 1]");
  if (max_inner < 0) throw std::invalid_argument("NmcConfig: max_inner must be >= 0");
  if (power_iters < 1) throw std::invalid_argument("NmcConfig: power_iters must be >= 1");
  if (!(power_tol > 0.0)) throw std::invalid_argument("NmcConfig: power_tol must be > 0");
  if (threads < 1) throw std::invalid_argument("NmcConfig: threads must be >= 1");
  if (chunk < 0) throw std::invalid_argument("NmcConfig: chunk must be >= 0");
}

void RowWorkspace::resize(std::size_t rank) {
  w.assign(rank, 0.0);
  z.assign(rank, 0.0);
  grad.assign(rank, 0.0);
  hessian = Matrix(rank, rank);
  kr.assign(rank, 0.0);
  a_prev.assign(rank, 0.0);
}

namespace {

std::size_t blocksize_for(double c, std::size_t slice_nnz) {
  if (c >= 1.0) return slice_nnz;
  const auto b = static_cast<std::size_t>(std::floor(c * static_cast<double>(slice_nnz)));
  return b > slice_nnz ? slice_nnz : b;
}

// Partial Fisher-Yates over the slice's entry list. c == 1 keeps slice
// order and consumes no randomness, so full-batch runs are seed-independent.
void sample_into(const ModeView& view, std::size_t row, double c, RngStream rng,
                 SampledRow& out, std::vector<std::uint32_t>& perm) {
  const std::size_t n = view.slice_nnz(row);
  const std::size_t b = blocksize_for(c, n);
  out.row = row;
  out.picks.clear();
  if (b == 0) return;
  out.picks.resize(b);
  if (c >= 1.0) {
    for (std::size_t t = 0; t < n; ++t) out.picks[t] = static_cast<std::uint32_t>(t);
    return;
  }
  perm.resize(n);
  for (std::size_t t = 0; t < n; ++t) perm[t] = static_cast<std::uint32_t>(t);
  for (std::size_t j = 0; j < b; ++j) {
    const std::size_t r = j + static_cast<std::size_t>(rng.next_below(n - j));
    std::swap(perm[j], perm[r]);
    out.picks[j] = perm[j];
  }
}

// One pass over the picks. k_e is evaluated once per entry and fed to every
// requested accumulator, so the standalone ops and the fused solver path
// produce bitwise-identical sums.
void accumulate_row(const ModeView& view, const SampledRow& s, const FactorSet& f,
                    int mode, const double* y_row, double lambda, double* w, double* z,
                    double* grad, Matrix* h, double* kr_buf) {
  const std::size_t rank = f.rank;
  const std::size_t base = view.offsets[s.row];

  if (w) {
    std::fill_n(w, rank, 0.0);
    std::fill_n(z, rank, 0.0);
  }
  if (h) {
    for (std::size_t r = 0; r < rank; ++r)
      for (std::size_t q = 0; q < rank; ++q) (*h)(r, q) = (r == q) ? lambda : 0.0;
  }

  std::span<double> kr_span{kr_buf, rank};
  for (std::uint32_t pick : s.picks) {
    const std::size_t t = base + pick;
    kr_row(f, mode, view.entry_others(t), kr_span);
    if (w) {
      const double x = view.values[t];
      double dot = 0.0;
      for (std::size_t r = 0; r < rank; ++r) dot += y_row[r] * kr_buf[r];
      for (std::size_t r = 0; r < rank; ++r) w[r] -= x * kr_buf[r];
      for (std::size_t r = 0; r < rank; ++r) z[r] += dot * kr_buf[r];
    }
    if (h) {
      for (std::size_t r = 0; r < rank; ++r)
        for (std::size_t q = r; q < rank; ++q) (*h)(r, q) += kr_buf[r] * kr_buf[q];
    }
  }
  if (h) {
    for (std::size_t r = 0; r < rank; ++r)
      for (std::size_t q = 0; q < r; ++q) (*h)(r, q) = (*h)(q, r);
  }
  if (grad) {
    for (std::size_t r = 0; r < rank; ++r) grad[r] = w[r] + z[r] + lambda * y_row[r];
  }
}

}  // namespace

SampledRow sample_row(const ModeView& view, std::size_t row, double c, RngStream rng) {
  if (row >= view.slice_count()) throw std::out_of_range("sample_row: row out of range");
  if (!(c > 0.0 && c <= 1.0))
    throw std::invalid_argument("sample_row: c must be in (0, 1]");
  SampledRow out;
  std::vector<std::uint32_t> perm;
  sample_into(view, row, c, rng, out, perm);
  return out;
}

void row_gradient(const ModeView& view, const SampledRow& sampled, const FactorSet& factors,
                  int mode, std::span<const double> y_row, double lambda,
                  RowWorkspace& ws) {
  if (y_row.size() != factors.rank)
    throw std::invalid_argument("row_gradient: y_row length must equal rank");
  if (ws.w.size() != factors.rank) ws.resize(factors.rank);
  accumulate_row(view, sampled, factors, mode, y_row.data(), lambda, ws.w.data(),
                 ws.z.data(), ws.grad.data(), nullptr, ws.kr.data());
}

void row_hessian(const ModeView& view, const SampledRow& sampled, const FactorSet& factors,
                 int mode, double lambda, Matrix& h) {
  if (!(lambda > 0.0)) throw std::invalid_argument("row_hessian: lambda must be > 0");
  if (h.rows() != factors.rank || h.cols() != factors.rank)
    h = Matrix(factors.rank, factors.rank);
  std::vector<double> kr_buf(factors.rank);
  accumulate_row(view, sampled, factors, mode, nullptr, lambda, nullptr, nullptr,
                 nullptr, &h, kr_buf.data());
}

double power_method(const Matrix& h, int max_iters, double tol) {
  const std::size_t n = h.rows();
  if (n == 0 || h.cols() != n)
    throw std::invalid_argument("power_method: square matrix required");
  if (max_iters < 1) throw std::invalid_argument("power_method: max_iters must be >= 1");
  if (!h.all_finite())
    throw std::invalid_argument("power_method: non-finite entries in matrix");

  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> u(n);
  double rq = 0.0, rq_prev = 0.0;

  for (int it = 0; it < max_iters; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      auto hrow = h.row(i);
      for (std::size_t j = 0; j < n; ++j) s += hrow[j] * v[j];
      u[i] = s;
    }
    double num = 0.0, unorm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += v[i] * u[i];
      unorm2 += u[i] * u[i];
    }
    rq = num;  // v is unit
    if (unorm2 == 0.0) return 0.0;  // v in the null space; PSD => lambda_max estimate 0
    if (it > 0 && std::abs(rq - rq_prev) <= tol * std::abs(rq)) break;
    rq_prev = rq;
    const double inv = 1.0 / std::sqrt(unorm2);
    for (std::size_t i = 0; i < n; ++i) v[i] = u[i] * inv;
  }
  return rq;
}

double row_step(std::span<const double> y_row, std::span<const double> a_prev,
                std::span<const double> grad, double lipschitz, double lambda,
                std::span<double> a_new, std::span<double> y_new) {
  if (!(lambda > 0.0)) throw std::invalid_argument("row_step: lambda must be > 0");
  if (!(lipschitz >= lambda))
    throw std::invalid_argument("row_step: step constant below lambda");
  const std::size_t rank = y_row.size();
  if (a_prev.size() != rank || grad.size() != rank || a_new.size() != rank ||
      y_new.size() != rank)
    throw std::invalid_argument("row_step: length mismatch");

  const double inv_l = 1.0 / lipschitz;
  const double sl = std::sqrt(lipschitz), sm = std::sqrt(lambda);
  const double beta = (sl - sm) / (sl + sm);

  for (std::size_t r = 0; r < rank; ++r) {
    const double a = y_row[r] - inv_l * grad[r];
    a_new[r] = a > 0.0 ? a : 0.0;
  }
  // y_row is dead here, so y_new may alias it.
  for (std::size_t r = 0; r < rank; ++r)
    y_new[r] = a_new[r] + beta * (a_new[r] - a_prev[r]);
  return beta;
}

const Matrix& s_nmc(const ModeView& view, FactorSet& factors, int mode,
                    const Matrix& a_init, const NmcConfig& cfg, RngStream rng,
                    SnmcStats* stats) {
  cfg.validate();
  if (mode < 0 || static_cast<std::size_t>(mode) >= factors.order())
    throw std::invalid_argument("s_nmc: mode out of range");
  const std::size_t rows = view.slice_count();
  const std::size_t rank = factors.rank;
  if (a_init.rows() != rows || a_init.cols() != rank)
    throw std::invalid_argument("s_nmc: a_init shape mismatch");
  if (!a_init.all_nonnegative())
    throw std::invalid_argument("s_nmc: a_init must be nonnegative");

  Matrix& a = factors.factors[mode];
  Matrix& y = factors.momentum[mode];
  a = a_init;  // A_0 = Y_0 = A_*, momentum reset at every call
  y = a_init;

  std::uint64_t accessed = 0;
  std::atomic<bool> failed{false};
  std::string diag;

  omp_set_schedule(cfg.chunk > 0 ? omp_sched_dynamic : omp_sched_static,
                   cfg.chunk > 0 ? cfg.chunk : 0);

#pragma omp parallel num_threads(cfg.threads) default(shared)
  {
    RowWorkspace ws;
    ws.resize(rank);
    SampledRow sampled;

    for (int l = 0; l < cfg.max_inner; ++l) {
#pragma omp for schedule(runtime) reduction(+ : accessed)
      for (std::int64_t pi = 0; pi < static_cast<std::int64_t>(rows); ++pi) {
        if (failed.load(std::memory_order_relaxed)) continue;
        const auto p = static_cast<std::size_t>(pi);
        try {
          sample_into(view, p, cfg.c, rng.fork(l).fork(p), sampled, ws.perm);
          if (sampled.blocksize() == 0) continue;  // skip the row, A and Y untouched
          accessed += sampled.blocksize();

          auto y_row = y.row(p);
          auto a_row = a.row(p);
          std::copy(a_row.begin(), a_row.end(), ws.a_prev.begin());

          accumulate_row(view, sampled, factors, mode, y_row.data(), cfg.lambda,
                         ws.w.data(), ws.z.data(), ws.grad.data(), &ws.hessian,
                         ws.kr.data());
          for (double g : ws.grad)
            if (!std::isfinite(g))
              throw std::runtime_error("s_nmc: non-finite gradient at row " +
                                       std::to_string(p + 1) + " (mode " +
                                       std::to_string(mode + 1) + ")");

          const double est = power_method(ws.hessian, cfg.power_iters, cfg.power_tol);
          ws.lipschitz = est * 1.01;  // margin: 1/L must not overshoot the true constant
          ws.beta = row_step(y_row, ws.a_prev, ws.grad, ws.lipschitz, cfg.lambda,
                             a_row, y_row);
        } catch (const std::exception& ex) {
          bool expected = false;
          if (failed.compare_exchange_strong(expected, true)) {
#pragma omp critical(ntc_snmc_diag)
            diag = ex.what();
          }
        }
      }
      // implicit barrier between inner iterations
    }
  }

  if (failed.load()) throw std::runtime_error(diag);
  if (stats) stats->entries_accessed += accessed;
  return a;
}

}  // namespace ntc

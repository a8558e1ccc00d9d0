#pragma once

#include "ntc/matrix.hpp"
#include "ntc/rng.hpp"
#include "ntc/sparse_tensor.hpp"

namespace ntc {

// The N nonnegative factor matrices (I_i x R) of a rank-R CPD model plus
// their companion momentum matrices of the same shapes. Momentum entries
// may go negative; factor entries must stay >= 0.
struct FactorSet {
  std::size_t rank = 0;
  std::vector<Matrix> factors;
  std::vector<Matrix> momentum;

  static FactorSet zeros(std::span<const std::size_t> dims, std::size_t rank);
  // i.i.d. U[0,1] entries, one substream per mode.
  static FactorSet random_uniform(std::span<const std::size_t> dims, std::size_t rank,
                                  RngStream base);

  std::size_t order() const { return factors.size(); }
  bool shapes_match(const SparseTensor& t) const;
  bool all_nonnegative() const;
};

// One row of the Khatri-Rao product of all factors except `mode`: the
// Hadamard product of the other factors' rows picked by `others` (ascending
// mode order, `mode` skipped). Writes rank values into `out`.
void kr_row(const FactorSet& f, int mode, std::span<const coord_t> others,
            std::span<double> out);
std::vector<double> kr_row(const FactorSet& f, int mode, std::span<const coord_t> others);

// Model value sum_r prod_n U^(n)(i_n, r) at one cell (0-based index).
double cpd_value(const FactorSet& f, std::span<const coord_t> index);

}  // namespace ntc

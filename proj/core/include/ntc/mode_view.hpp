#pragma once

#include "ntc/sparse_tensor.hpp"

namespace ntc {

// Per-mode grouping of the observed entries by slice index. Slice p is
// exactly the nonzero support of row p of the mode-i unfolding, in
// lexicographic order of the remaining coordinates, so the dense unfolding
// never has to exist. CSR-style layout: entry t carries its value and the
// N-1 other-mode coordinates (ascending mode order, the view's mode
// skipped). Read-only after construction; safe for concurrent readers.
struct ModeView {
  int mode = 0;   // 0-based
  int order = 0;  // N
  std::vector<std::size_t> offsets;  // slice p = entries [offsets[p], offsets[p+1])
  std::vector<double> values;
  std::vector<coord_t> others;  // (order-1) coords per entry

  std::size_t slice_count() const { return offsets.size() - 1; }
  std::size_t slice_nnz(std::size_t p) const { return offsets[p + 1] - offsets[p]; }

  std::span<const double> slice_values(std::size_t p) const {
    return {values.data() + offsets[p], slice_nnz(p)};
  }
  std::span<const coord_t> entry_others(std::size_t t) const {
    return {others.data() + t * (order - 1), static_cast<std::size_t>(order - 1)};
  }
};

// One view per mode; together they partition the entry set N ways.
std::vector<ModeView> build_mode_views(const SparseTensor& tensor);

}  // namespace ntc

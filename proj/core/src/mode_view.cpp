#include "ntc/mode_view.hpp"

namespace ntc {

// Stable counting sort of the (already lexicographically sorted) entry list
// by the mode's coordinate. Stability makes each slice come out in
// lexicographic order of the remaining coordinates.
std::vector<ModeView> build_mode_views(const SparseTensor& tensor) {
  const std::size_t n = tensor.order();
  const std::size_t nnz = tensor.nnz();

  std::vector<ModeView> views(n);
  for (std::size_t m = 0; m < n; ++m) {
    ModeView& v = views[m];
    v.mode = static_cast<int>(m);
    v.order = static_cast<int>(n);
    v.offsets.assign(tensor.dims()[m] + 1, 0);
    v.values.resize(nnz);
    v.others.resize(nnz * (n - 1));

    for (std::size_t e = 0; e < nnz; ++e)
      ++v.offsets[tensor.index(e)[m] + 1];
    for (std::size_t p = 1; p < v.offsets.size(); ++p)
      v.offsets[p] += v.offsets[p - 1];

    std::vector<std::size_t> cursor(v.offsets.begin(), v.offsets.end() - 1);
    for (std::size_t e = 0; e < nnz; ++e) {
      auto idx = tensor.index(e);
      const std::size_t t = cursor[idx[m]]++;
      v.values[t] = tensor.value(e);
      coord_t* dst = v.others.data() + t * (n - 1);
      for (std::size_t q = 0; q < n; ++q)
        if (q != m) *dst++ = idx[q];
    }
  }
  return views;
}

}  // namespace ntc

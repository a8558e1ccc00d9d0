#include "ntc/sparse_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ntc {

namespace {

std::string format_index_1based(std::span<const coord_t> idx) {
  std::ostringstream os;
  os << "(";
  for (std::size_t n = 0; n < idx.size(); ++n)
    os << (n ? "," : "") << idx[n] + 1;
  os << ")";
  return os.str();
}

}  // namespace

SparseTensor::SparseTensor(std::vector<std::size_t> dims, std::vector<coord_t> indices,
                           std::vector<double> values)
    : dims_(std::move(dims)) {
  const std::size_t n = dims_.size();
  if (n < 2) throw std::invalid_argument("SparseTensor: order must be >= 2");
  for (std::size_t d : dims_)
    if (d == 0) throw std::invalid_argument("SparseTensor: dimensions must be positive");
  if (indices.size() != values.size() * n)
    throw std::invalid_argument("SparseTensor: index/value length mismatch");

  const std::size_t nnz = values.size();
  for (std::size_t e = 0; e < nnz; ++e) {
    for (std::size_t m = 0; m < n; ++m)
      if (indices[e * n + m] >= dims_[m])
        throw std::invalid_argument("SparseTensor: index out of bounds at entry " +
                                    std::to_string(e));
    const double v = values[e];
    if (!std::isfinite(v))
      throw std::invalid_argument("SparseTensor: non-finite value at entry " +
                                  std::to_string(e));
    if (v < 0.0)
      throw std::invalid_argument("SparseTensor: negative value at entry " +
                                  std::to_string(e));
  }

  // Canonical lexicographic entry order.
  std::vector<std::size_t> perm(nnz);
  std::iota(perm.begin(), perm.end(), 0);
  auto key = [&](std::size_t e) {
    return std::span<const coord_t>(indices.data() + e * n, n);
  };
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    auto ka = key(a), kb = key(b);
    return std::lexicographical_compare(ka.begin(), ka.end(), kb.begin(), kb.end());
  });

  indices_.resize(indices.size());
  values_.resize(nnz);
  for (std::size_t e = 0; e < nnz; ++e) {
    std::copy_n(indices.data() + perm[e] * n, n, indices_.data() + e * n);
    values_[e] = values[perm[e]];
  }

  for (std::size_t e = 1; e < nnz; ++e) {
    auto prev = index(e - 1), cur = index(e);
    if (std::equal(prev.begin(), prev.end(), cur.begin()))
      throw std::invalid_argument("SparseTensor: duplicate index " +
                                  format_index_1based(cur));
  }
}

double SparseTensor::observed_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

}  // namespace ntc

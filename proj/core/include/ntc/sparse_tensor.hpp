#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ntc {

using coord_t = std::uint32_t;

// N-way COO store of the observed entries (the set Omega with the values of
// the data tensor; an entry's presence is the 0/1 mask). Coordinates are
// 0-based internally; the .tns format and every user-facing index are
// 1-based. Construction sorts entries lexicographically and rejects
// out-of-range, duplicate, negative, and non-finite input, so downstream
// code can rely on a canonical, validated entry list. An explicit entry
// with value 0 is observed data, not a hole.
class SparseTensor {
public:
  // indices: nnz * order coordinates, 0-based, entry-major.
  SparseTensor(std::vector<std::size_t> dims, std::vector<coord_t> indices,
               std::vector<double> values);

  std::size_t order() const { return dims_.size(); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const coord_t> index(std::size_t e) const {
    return {indices_.data() + e * order(), order()};
  }
  double value(std::size_t e) const { return values_[e]; }

  std::span<const coord_t> indices() const { return indices_; }
  std::span<const double> values() const { return values_; }

  // ||M ⊛ X||_F over the observed entries.
  double observed_norm() const;

private:
  std::vector<std::size_t> dims_;
  std::vector<coord_t> indices_;
  std::vector<double> values_;
};

}  // namespace ntc

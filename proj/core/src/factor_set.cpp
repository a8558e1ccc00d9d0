#include "ntc/factor_set.hpp"

#include <stdexcept>

namespace ntc {

FactorSet FactorSet::zeros(std::span<const std::size_t> dims, std::size_t rank) {
  if (rank == 0) throw std::invalid_argument("FactorSet: rank must be positive");
  FactorSet f;
  f.rank = rank;
  for (std::size_t d : dims) {
    f.factors.emplace_back(d, rank);
    f.momentum.emplace_back(d, rank);
  }
  return f;
}

FactorSet FactorSet::random_uniform(std::span<const std::size_t> dims, std::size_t rank,
                                    RngStream base) {
  FactorSet f = zeros(dims, rank);
  for (std::size_t m = 0; m < f.order(); ++m) {
    RngStream s = base.fork(m);
    for (double& v : f.factors[m].data()) v = s.next_double();
    f.momentum[m] = f.factors[m];
  }
  return f;
}

bool FactorSet::shapes_match(const SparseTensor& t) const {
  if (order() != t.order()) return false;
  for (std::size_t m = 0; m < order(); ++m)
    if (factors[m].rows() != t.dims()[m] || factors[m].cols() != rank) return false;
  return true;
}

bool FactorSet::all_nonnegative() const {
  for (const Matrix& u : factors)
    if (!u.all_nonnegative()) return false;
  return true;
}

void kr_row(const FactorSet& f, int mode, std::span<const coord_t> others,
            std::span<double> out) {
  const std::size_t n = f.order();
  if (others.size() != n - 1)
    throw std::invalid_argument("kr_row: expected order-1 coordinates");
  const std::size_t rank = f.rank;

  std::size_t pos = 0;
  bool first = true;
  for (std::size_t m = 0; m < n; ++m) {
    if (static_cast<int>(m) == mode) continue;
    const coord_t i = others[pos++];
    if (i >= f.factors[m].rows())
      throw std::out_of_range("kr_row: coordinate out of bounds");
    auto row = f.factors[m].row(i);
    if (first) {
      for (std::size_t r = 0; r < rank; ++r) out[r] = row[r];
      first = false;
    } else {
      for (std::size_t r = 0; r < rank; ++r) out[r] *= row[r];
    }
  }
}

std::vector<double> kr_row(const FactorSet& f, int mode, std::span<const coord_t> others) {
  std::vector<double> out(f.rank);
  kr_row(f, mode, others, out);
  return out;
}

double cpd_value(const FactorSet& f, std::span<const coord_t> index) {
  const std::size_t n = f.order();
  if (index.size() != n) throw std::invalid_argument("cpd_value: bad index arity");
  for (std::size_t m = 0; m < n; ++m)
    if (index[m] >= f.factors[m].rows())
      throw std::out_of_range("cpd_value: index out of bounds");

  double total = 0.0;
  for (std::size_t r = 0; r < f.rank; ++r) {
    double prod = 1.0;
    for (std::size_t m = 0; m < n; ++m) prod *= f.factors[m](index[m], r);
    total += prod;
  }
  return total;
}

}  // namespace ntc

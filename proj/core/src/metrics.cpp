#include "ntc/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace ntc {

double objective(const SparseTensor& tensor, const FactorSet& factors, double lambda) {
  if (!factors.shapes_match(tensor))
    throw std::invalid_argument("objective: factor shapes do not match tensor");
  if (lambda < 0.0) throw std::invalid_argument("objective: lambda must be >= 0");

  double fit = 0.0;
  for (std::size_t e = 0; e < tensor.nnz(); ++e) {
    const double d = tensor.value(e) - cpd_value(factors, tensor.index(e));
    fit += d * d;
  }
  double reg = 0.0;
  for (const Matrix& u : factors.factors) reg += u.frob_norm_sq();
  return 0.5 * fit + 0.5 * lambda * reg;
}

double relative_error(const SparseTensor& tensor, const FactorSet& factors) {
  if (!factors.shapes_match(tensor))
    throw std::invalid_argument("relative_error: factor shapes do not match tensor");

  double num = 0.0, den = 0.0;
  for (std::size_t e = 0; e < tensor.nnz(); ++e) {
    const double x = tensor.value(e);
    const double d = x - cpd_value(factors, tensor.index(e));
    num += d * d;
    den += x * x;
  }
  if (den == 0.0)
    throw std::domain_error("relative_error: all observed values are zero");
  return std::sqrt(num) / std::sqrt(den);
}

double snr(const SparseTensor& masked_signal, const SparseTensor& masked_noise) {
  if (masked_signal.dims() != masked_noise.dims() ||
      masked_signal.nnz() != masked_noise.nnz())
    throw std::invalid_argument("snr: support sets differ");
  for (std::size_t e = 0; e < masked_signal.nnz(); ++e) {
    auto a = masked_signal.index(e), b = masked_noise.index(e);
    if (!std::equal(a.begin(), a.end(), b.begin()))
      throw std::invalid_argument("snr: support sets differ");
  }

  double sig = 0.0, noise = 0.0;
  for (std::size_t e = 0; e < masked_signal.nnz(); ++e) {
    sig += masked_signal.value(e) * masked_signal.value(e);
    noise += masked_noise.value(e) * masked_noise.value(e);
  }
  if (noise == 0.0) throw std::domain_error("snr: zero noise norm (infinite SNR)");
  return sig / noise;
}

}  // namespace ntc

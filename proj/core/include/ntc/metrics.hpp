#pragma once

#include "ntc/factor_set.hpp"
#include "ntc/sparse_tensor.hpp"

namespace ntc {

// 0.5 * sum_{Omega} (x - model)^2 + (lambda/2) * sum_i ||U^(i)||_F^2.
double objective(const SparseTensor& tensor, const FactorSet& factors, double lambda);

// ||M ⊛ (X - model)||_F / ||M ⊛ X||_F over the observed entries only.
// Throws std::domain_error when every observed value is zero.
double relative_error(const SparseTensor& tensor, const FactorSet& factors);

// ||M ⊛ signal||_F^2 / ||M ⊛ noise||_F^2; the two tensors must have the
// same support. Throws std::domain_error on zero noise norm.
double snr(const SparseTensor& masked_signal, const SparseTensor& masked_noise);

}  // namespace ntc

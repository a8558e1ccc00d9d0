#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ntc/factor_set.hpp"
#include "ntc/sparse_tensor.hpp"

namespace ntc {

// Synthetic low-rank data: true factors i.i.d. U[0,1], observation mask
// either i.i.d. Bernoulli(density) or the support of an existing tensor,
// additive N(0, sigma^2) noise on the observed cells only.
struct SynthSpec {
  std::vector<std::size_t> dims;
  std::size_t rank = 1;      // true rank
  double noise_sigma = 0.0;  // ignored when target_snr is set
  std::optional<double> target_snr;       // derive sigma from the generated signal
  std::optional<double> density;          // (0, 1]
  std::optional<std::string> pattern_from;  // .tns whose support is reused
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthResult {
  SparseTensor observed;
  FactorSet truth;
  double achieved_snr = 0.0;  // +inf marker for noiseless data
  double sigma_used = 0.0;
  std::size_t clamped = 0;  // noisy values that went negative and were clamped to 0
};

// The mask is realized sparsely (geometric-gap walk over the cell space),
// never as a dense tensor. Noisy values are clamped at 0 to respect the
// nonnegative data model; the clamp count is reported. Throws when the
// mask comes out empty.
SynthResult synth_generate(const SynthSpec& spec);

}  // namespace ntc

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ntc/factor_set.hpp"
#include "ntc/sparse_tensor.hpp"

namespace ntc {

// Interleaved RGB, row-major.
struct Image {
  std::size_t width = 0, height = 0;
  std::vector<std::uint8_t> pixels;  // 3 * width * height

  std::size_t pixel_count() const { return width * height; }
  friend bool operator==(const Image&, const Image&) = default;
};

// Binary PPM (P6, maxval 255) only.
Image read_ppm(const std::string& path);
void write_ppm(const Image& img, const std::string& path);

// height x width x 3 tensor with every sample observed, including zeros.
SparseTensor image_to_tensor(const Image& img);

// Observed samples rendered back; holes are 0, values clamped to [0,255]
// and rounded.
Image tensor_to_image(const SparseTensor& tensor);

// Keeps a uniform random floor(keep_fraction * H*W) subset of the pixel
// positions, all 3 channels of a kept pixel together. Drawn from a common
// per-seed permutation, so for a fixed seed the kept set is nested across
// keep fractions and the call is idempotent.
SparseTensor corrupt(const SparseTensor& tensor, double keep_fraction,
                     std::uint64_t seed);

// Dense CPD evaluation of a height x width x 3 model, clamped and rounded.
Image render_model(const FactorSet& factors);

}  // namespace ntc

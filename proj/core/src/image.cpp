#include "ntc/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "ntc/rng.hpp"

namespace ntc {

namespace {

// Next header token: skips whitespace and '#' comments (to end of line).
std::string ppm_token(std::istream& in, const std::string& path) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  if (tok.empty()) throw std::runtime_error("read_ppm: truncated header in " + path);
  return tok;
}

std::size_t ppm_uint(std::istream& in, const std::string& path, const char* what) {
  const std::string tok = ppm_token(in, path);
  std::size_t v = 0;
  for (char c : tok) {
    if (c < '0' || c > '9')
      throw std::runtime_error("read_ppm: bad " + std::string(what) + " '" + tok +
                               "' in " + path);
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  return v;
}

std::uint8_t quantize(double v) {
  const double c = std::min(255.0, std::max(0.0, v));
  return static_cast<std::uint8_t>(std::lround(c));
}

}  // namespace

Image read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_ppm: cannot open " + path);

  if (ppm_token(in, path) != "P6")
    throw std::runtime_error("read_ppm: " + path + " is not binary PPM (P6)");
  Image img;
  img.width = ppm_uint(in, path, "width");
  img.height = ppm_uint(in, path, "height");
  const std::size_t maxval = ppm_uint(in, path, "maxval");
  if (img.width == 0 || img.height == 0)
    throw std::runtime_error("read_ppm: zero dimension in " + path);
  if (maxval != 255)
    throw std::runtime_error("read_ppm: only maxval 255 supported (" + path + ")");
  // The single whitespace byte after maxval was consumed by the tokenizer.

  img.pixels.resize(3 * img.pixel_count());
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (static_cast<std::size_t>(in.gcount()) != img.pixels.size())
    throw std::runtime_error("read_ppm: truncated pixel data in " + path);
  return img;
}

void write_ppm(const Image& img, const std::string& path) {
  if (img.pixels.size() != 3 * img.pixel_count())
    throw std::invalid_argument("write_ppm: pixel buffer size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_ppm: cannot open " + path);
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw std::runtime_error("write_ppm: write failed for " + path);
}

SparseTensor image_to_tensor(const Image& img) {
  if (img.pixels.size() != 3 * img.pixel_count())
    throw std::invalid_argument("image_to_tensor: pixel buffer size mismatch");
  const std::size_t n = img.pixels.size();
  std::vector<coord_t> indices;
  indices.reserve(3 * n);
  std::vector<double> values;
  values.reserve(n);
  std::size_t t = 0;
  for (std::size_t i = 0; i < img.height; ++i)
    for (std::size_t j = 0; j < img.width; ++j)
      for (std::size_t ch = 0; ch < 3; ++ch) {
        indices.push_back(static_cast<coord_t>(i));
        indices.push_back(static_cast<coord_t>(j));
        indices.push_back(static_cast<coord_t>(ch));
        values.push_back(static_cast<double>(img.pixels[t++]));
      }
  return SparseTensor({img.height, img.width, 3}, std::move(indices),
                      std::move(values));
}

Image tensor_to_image(const SparseTensor& tensor) {
  if (tensor.order() != 3 || tensor.dims()[2] != 3)
    throw std::invalid_argument("tensor_to_image: expects an H x W x 3 tensor");
  Image img;
  img.height = tensor.dims()[0];
  img.width = tensor.dims()[1];
  img.pixels.assign(3 * img.pixel_count(), 0);  // holes render black
  for (std::size_t e = 0; e < tensor.nnz(); ++e) {
    const auto ix = tensor.index(e);
    const std::size_t t = (ix[0] * img.width + ix[1]) * 3 + ix[2];
    img.pixels[t] = quantize(tensor.value(e));
  }
  return img;
}

SparseTensor corrupt(const SparseTensor& tensor, double keep_fraction,
                     std::uint64_t seed) {
  if (tensor.order() != 3)
    throw std::invalid_argument("corrupt: expects an H x W x 3 tensor");
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
    throw std::invalid_argument("corrupt: keep_fraction must be in (0, 1]");
  const std::size_t hw = tensor.dims()[0] * tensor.dims()[1];
  const auto keep = static_cast<std::size_t>(
      std::floor(keep_fraction * static_cast<double>(hw)));
  if (keep >= hw) return tensor;

  // Rank pixels by a per-seed bijective hash; the keep smallest survive.
  // Nested across keep fractions by construction.
  std::vector<std::uint64_t> prio(hw);
  for (std::size_t p = 0; p < hw; ++p)
    prio[p] = RngStream::mix(seed ^ static_cast<std::uint64_t>(p));
  std::vector<std::uint32_t> order(hw);
  std::iota(order.begin(), order.end(), 0u);
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep),
                   order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return prio[a] < prio[b]; });
  std::vector<bool> kept(hw, false);
  for (std::size_t j = 0; j < keep; ++j) kept[order[j]] = true;

  const std::size_t width = tensor.dims()[1];
  std::vector<coord_t> indices;
  std::vector<double> values;
  for (std::size_t e = 0; e < tensor.nnz(); ++e) {
    const auto ix = tensor.index(e);
    if (!kept[ix[0] * width + ix[1]]) continue;
    indices.insert(indices.end(), ix.begin(), ix.end());
    values.push_back(tensor.value(e));
  }
  return SparseTensor(tensor.dims(), std::move(indices), std::move(values));
}

Image render_model(const FactorSet& factors) {
  if (factors.order() != 3 || factors.factors[2].rows() != 3)
    throw std::invalid_argument("render_model: expects an H x W x 3 factorization");
  const Matrix& u1 = factors.factors[0];
  const Matrix& u2 = factors.factors[1];
  const Matrix& u3 = factors.factors[2];
  const std::size_t rank = factors.rank;

  Image img;
  img.height = u1.rows();
  img.width = u2.rows();
  img.pixels.resize(3 * img.pixel_count());
  std::size_t t = 0;
  for (std::size_t i = 0; i < img.height; ++i)
    for (std::size_t j = 0; j < img.width; ++j)
      for (std::size_t ch = 0; ch < 3; ++ch) {
        double v = 0.0;
        for (std::size_t r = 0; r < rank; ++r)
          v += u1(i, r) * u2(j, r) * u3(ch, r);
        img.pixels[t++] = quantize(v);
      }
  return img;
}

}  // namespace ntc

#include "ntc/synth.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ntc/rng.hpp"
#include "ntc/tns_io.hpp"

namespace ntc {

namespace {

// Disjoint from the solver driver's root tags (ao.cpp uses 1 and 2): a
// completion run seeded like the generator must not start at the truth.
constexpr std::uint64_t kTagFactors = 4;
constexpr std::uint64_t kTagMask = 5;
constexpr std::uint64_t kTagNoise = 6;

void decode_cell(std::uint64_t lin, const std::vector<std::size_t>& dims,
                 std::vector<coord_t>& out) {
  for (std::size_t m = dims.size(); m-- > 0;) {
    out[m] = static_cast<coord_t>(lin % dims[m]);
    lin /= dims[m];
  }
}

// Bernoulli(p) support over the linear cell space, last mode fastest, via
// geometric gaps; cost is O(nnz), never O(prod dims).
void bernoulli_support(const std::vector<std::size_t>& dims, double p, RngStream rng,
                       std::vector<coord_t>& out) {
  unsigned __int128 total128 = 1;
  for (std::size_t d : dims) total128 *= d;
  if (total128 > (static_cast<unsigned __int128>(1) << 62))
    throw std::invalid_argument("synth_generate: cell space too large for a density mask");
  const auto total = static_cast<std::uint64_t>(total128);

  std::vector<coord_t> cell(dims.size());
  if (p >= 1.0) {
    for (std::uint64_t lin = 0; lin < total; ++lin) {
      decode_cell(lin, dims, cell);
      out.insert(out.end(), cell.begin(), cell.end());
    }
    return;
  }

  const double log1mp = std::log1p(-p);
  std::uint64_t pos = 0;
  bool first = true;
  for (;;) {
    const double u = rng.next_double();        // [0, 1)
    const double g = std::floor(std::log1p(-u) / log1mp);
    if (!(g >= 0.0) || g >= static_cast<double>(total)) break;
    const auto gap = static_cast<std::uint64_t>(g);
    pos = first ? gap : pos + 1 + gap;
    first = false;
    if (pos >= total) break;
    decode_cell(pos, dims, cell);
    out.insert(out.end(), cell.begin(), cell.end());
  }
}

}  // namespace

void SynthSpec::validate() const {
  if (density.has_value() == pattern_from.has_value())
    throw std::invalid_argument(
        "SynthSpec: exactly one of density and pattern_from must be set");
  if (!pattern_from) {
    if (dims.size() < 2)
      throw std::invalid_argument("SynthSpec: at least 2 dimensions required");
    for (std::size_t d : dims)
      if (d == 0) throw std::invalid_argument("SynthSpec: dimensions must be positive");
  }
  if (rank == 0) throw std::invalid_argument("SynthSpec: rank must be positive");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw std::invalid_argument("SynthSpec: noise_sigma must be finite and >= 0");
  if (target_snr && !(*target_snr > 0.0))
    throw std::invalid_argument("SynthSpec: target_snr must be > 0");
  if (density && !(*density > 0.0 && *density <= 1.0))
    throw std::invalid_argument("SynthSpec: density must be in (0, 1]");
}

SynthResult synth_generate(const SynthSpec& spec) {
  spec.validate();

  std::vector<std::size_t> dims = spec.dims;
  std::vector<coord_t> support;
  if (spec.pattern_from) {
    const SparseTensor src = read_tns(*spec.pattern_from);
    if (!dims.empty() && dims != src.dims())
      throw std::invalid_argument("synth_generate: dims conflict with pattern source");
    dims = src.dims();
    support.assign(src.indices().begin(), src.indices().end());
  } else {
    bernoulli_support(dims, *spec.density, RngStream(spec.seed).fork(kTagMask),
                      support);
  }

  const std::size_t order = dims.size();
  const std::size_t nnz = support.size() / order;
  if (nnz == 0) throw std::runtime_error("synth_generate: empty observation mask");

  FactorSet truth = FactorSet::random_uniform(dims, spec.rank,
                                              RngStream(spec.seed).fork(kTagFactors));

  std::vector<double> signal(nnz);
  double sig2 = 0.0;
  for (std::size_t e = 0; e < nnz; ++e) {
    const double s =
        cpd_value(truth, std::span<const coord_t>(support.data() + e * order, order));
    signal[e] = s;
    sig2 += s * s;
  }

  double sigma = spec.noise_sigma;
  if (spec.target_snr) {
    // E||noise||^2 = nnz * sigma^2; choose sigma so the expected SNR matches.
    sigma = std::sqrt(sig2 / (*spec.target_snr * static_cast<double>(nnz)));
  }

  RngStream noise_rng = RngStream(spec.seed).fork(kTagNoise);
  double noise2 = 0.0;
  std::size_t clamped = 0;
  std::vector<double> values(nnz);
  for (std::size_t e = 0; e < nnz; ++e) {
    double v = signal[e];
    if (sigma > 0.0) {
      const double n = sigma * noise_rng.next_gaussian();
      noise2 += n * n;
      v += n;
    }
    if (v < 0.0) {
      v = 0.0;
      ++clamped;
    }
    values[e] = v;
  }

  const double achieved = (sigma > 0.0 && noise2 > 0.0)
                              ? sig2 / noise2
                              : std::numeric_limits<double>::infinity();
  return SynthResult{SparseTensor(std::move(dims), std::move(support), std::move(values)),
                     std::move(truth), achieved, sigma, clamped};
}

}  // namespace ntc

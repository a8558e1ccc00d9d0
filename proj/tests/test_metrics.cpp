#include <doctest.h>

#include <cmath>
#include <vector>

#include "ntc/metrics.hpp"
#include "ntc/rng.hpp"
#include "oracles.hpp"

using ntc::FactorSet;
using ntc::RngStream;
using ntc::SparseTensor;

TEST_SUITE("metrics") {

TEST_CASE("objective of all-zero factors at lambda 0 is half the data energy") {
  RngStream rng(3);
  const auto t = oracle::random_tensor({3, 4, 2}, 0.6, rng);
  const FactorSet z = FactorSet::zeros(t.dims(), 2);
  double energy = 0.0;
  for (std::size_t e = 0; e < t.nnz(); ++e) energy += t.value(e) * t.value(e);
  CHECK(ntc::objective(t, z, 0.0) == doctest::Approx(0.5 * energy).epsilon(1e-14));
}

TEST_CASE("objective vanishes on an exact fit at lambda 0") {
  const FactorSet f = FactorSet::random_uniform(std::vector<std::size_t>{3, 4, 2}, 2,
                                                RngStream(8));
  // observe every cell of the model itself
  std::vector<ntc::coord_t> idx;
  std::vector<double> vals;
  for (ntc::coord_t i = 0; i < 3; ++i)
    for (ntc::coord_t j = 0; j < 4; ++j)
      for (ntc::coord_t k = 0; k < 2; ++k) {
        idx.insert(idx.end(), {i, j, k});
        vals.push_back(ntc::cpd_value(f, std::vector<ntc::coord_t>{i, j, k}));
      }
  const SparseTensor t({3, 4, 2}, idx, vals);
  CHECK(ntc::objective(t, f, 0.0) == doctest::Approx(0.0).epsilon(1e-20));
  CHECK(ntc::relative_error(t, f) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("objective matches a dense masked evaluation with regularization") {
  RngStream rng(19);
  const auto t = oracle::random_tensor({4, 3, 3}, 0.5, rng);
  const FactorSet f = FactorSet::random_uniform(t.dims(), 3, RngStream(20));
  const double lambda = 0.37;

  double fit = 0.0;
  for (std::size_t e = 0; e < t.nnz(); ++e) {
    const double d = t.value(e) - ntc::cpd_value(f, t.index(e));
    fit += d * d;
  }
  double reg = 0.0;
  for (const auto& u : f.factors) reg += u.frob_norm_sq();
  CHECK(ntc::objective(t, f, lambda) ==
        doctest::Approx(0.5 * fit + 0.5 * lambda * reg).epsilon(1e-13));
}

TEST_CASE("relative_error is 1 for all-zero factors and matches the dense form") {
  RngStream rng(5);
  const auto t = oracle::random_tensor({5, 4, 3}, 0.5, rng);
  const FactorSet z = FactorSet::zeros(t.dims(), 2);
  CHECK(ntc::relative_error(t, z) == doctest::Approx(1.0).epsilon(1e-14));

  const FactorSet f = FactorSet::random_uniform(t.dims(), 2, RngStream(6));
  double num = 0.0, den = 0.0;
  for (std::size_t e = 0; e < t.nnz(); ++e) {
    const double d = t.value(e) - ntc::cpd_value(f, t.index(e));
    num += d * d;
    den += t.value(e) * t.value(e);
  }
  CHECK(ntc::relative_error(t, f) ==
        doctest::Approx(std::sqrt(num / den)).epsilon(1e-13));
}

TEST_CASE("relative_error signals when every observed value is zero") {
  const SparseTensor t({2, 2}, {0, 0, 1, 1}, {0.0, 0.0});
  const FactorSet f = FactorSet::zeros(t.dims(), 1);
  CHECK_THROWS_AS(ntc::relative_error(t, f), std::domain_error);
}

TEST_CASE("objective and relative_error tie together at lambda 0") {
  // objective = 0.5 * (||M (*) X||_F * rel_error)^2
  RngStream rng(29);
  const auto t = oracle::random_tensor({4, 4, 4}, 0.4, rng);
  const FactorSet f = FactorSet::random_uniform(t.dims(), 2, RngStream(30));
  const double lhs = ntc::objective(t, f, 0.0);
  const double scaled = t.observed_norm() * ntc::relative_error(t, f);
  CHECK(lhs == doctest::Approx(0.5 * scaled * scaled).epsilon(1e-12));
}

TEST_CASE("objective validates shapes and lambda") {
  RngStream rng(31);
  const auto t = oracle::random_tensor({3, 3}, 0.8, rng);
  const FactorSet wrong = FactorSet::zeros(std::vector<std::size_t>{3, 4}, 2);
  CHECK_THROWS_AS(ntc::objective(t, wrong, 0.1), std::invalid_argument);
  const FactorSet ok = FactorSet::zeros(t.dims(), 2);
  CHECK_THROWS_AS(ntc::objective(t, ok, -0.1), std::invalid_argument);
}

TEST_CASE("snr hand examples") {
  RngStream rng(37);
  const auto sig = oracle::random_tensor({3, 4}, 0.7, rng, 0.0);
  // noise equal to the signal -> 1; half the signal -> 4
  std::vector<double> half(sig.values().begin(), sig.values().end());
  for (double& v : half) v *= 0.5;
  const SparseTensor noise_eq(sig.dims(),
                              {sig.indices().begin(), sig.indices().end()},
                              {sig.values().begin(), sig.values().end()});
  const SparseTensor noise_half(sig.dims(),
                                {sig.indices().begin(), sig.indices().end()}, half);
  CHECK(ntc::snr(sig, noise_eq) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ntc::snr(sig, noise_half) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("snr rejects mismatched supports and zero noise") {
  const SparseTensor sig({2, 2}, {0, 0, 1, 1}, {1.0, 2.0});
  const SparseTensor other({2, 2}, {0, 0, 1, 0}, {1.0, 2.0});
  CHECK_THROWS_AS(ntc::snr(sig, other), std::invalid_argument);
  const SparseTensor zero({2, 2}, {0, 0, 1, 1}, {0.0, 0.0});
  CHECK_THROWS_AS(ntc::snr(sig, zero), std::domain_error);
}

}  // TEST_SUITE

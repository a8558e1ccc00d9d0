#pragma once

// Dense reference implementations used only by the tests. Small instances
// are materialized in full — unfoldings, the Khatri-Rao operand, masked
// gradients, the big Kronecker-structured Hessian — and evaluated with
// Eigen, independently of the library's sparse kernels.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <span>
#include <vector>

#include "ntc/factor_set.hpp"
#include "ntc/rng.hpp"
#include "ntc/sparse_tensor.hpp"

namespace oracle {

inline Eigen::MatrixXd to_eigen(const ntc::Matrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

inline ntc::Matrix from_eigen(const Eigen::MatrixXd& m) {
  ntc::Matrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = m(i, j);
  return out;
}

// Relative Frobenius distance; the standard "within tol relative" measure.
inline double rel_frob(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  const double den = want.norm();
  return (got - want).norm() / (den > 0.0 ? den : 1.0);
}

// Column index of the mode unfolding for a tuple of non-mode coordinates
// (ascending mode order, last one fastest). Any fixed bijection works as
// long as the unfolding and the Khatri-Rao operand share it; the gradient
// and Hessian are invariant under a common column permutation.
inline std::size_t linearize_others(std::span<const ntc::coord_t> others,
                                    std::span<const std::size_t> dims, int mode) {
  std::size_t j = 0, t = 0;
  for (std::size_t n = 0; n < dims.size(); ++n) {
    if (static_cast<int>(n) == mode) continue;
    j = j * dims[n] + others[t++];
  }
  return j;
}

// Mode unfolding X (P x Q), mask M, and the dense Khatri-Rao operand B
// (Q x R) of all factors except `mode`.
struct DenseProblem {
  std::size_t P = 0, Q = 0, R = 0;
  Eigen::MatrixXd X, M, B;
};

inline DenseProblem build_dense(const ntc::SparseTensor& t, const ntc::FactorSet& f,
                                int mode) {
  const auto& dims = t.dims();
  DenseProblem pb;
  pb.P = dims[static_cast<std::size_t>(mode)];
  pb.R = f.rank;
  pb.Q = 1;
  std::vector<std::size_t> omodes;
  for (std::size_t n = 0; n < dims.size(); ++n)
    if (static_cast<int>(n) != mode) {
      pb.Q *= dims[n];
      omodes.push_back(n);
    }

  pb.X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pb.P),
                               static_cast<Eigen::Index>(pb.Q));
  pb.M = pb.X;
  std::vector<ntc::coord_t> others(omodes.size());
  for (std::size_t e = 0; e < t.nnz(); ++e) {
    const auto ix = t.index(e);
    std::size_t pos = 0;
    for (std::size_t n : omodes) others[pos++] = ix[n];
    const auto p = static_cast<Eigen::Index>(ix[static_cast<std::size_t>(mode)]);
    const auto j = static_cast<Eigen::Index>(linearize_others(others, dims, mode));
    pb.X(p, j) = t.value(e);
    pb.M(p, j) = 1.0;
  }

  pb.B = Eigen::MatrixXd(static_cast<Eigen::Index>(pb.Q), static_cast<Eigen::Index>(pb.R));
  std::vector<std::size_t> tup(omodes.size());
  for (std::size_t j = 0; j < pb.Q; ++j) {
    std::size_t rem = j;
    for (std::size_t t2 = omodes.size(); t2-- > 0;) {
      tup[t2] = rem % dims[omodes[t2]];
      rem /= dims[omodes[t2]];
    }
    for (std::size_t r = 0; r < pb.R; ++r) {
      double prod = 1.0;
      for (std::size_t t2 = 0; t2 < omodes.size(); ++t2)
        prod *= f.factors[omodes[t2]](tup[t2], r);
      pb.B(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(r)) = prod;
    }
  }
  return pb;
}

// G = (M .* (A B^T) - M .* X) B + lambda A, rows stacked over p.
inline Eigen::MatrixXd dense_gradient(const DenseProblem& pb, const Eigen::MatrixXd& a,
                                      double lambda) {
  const Eigen::MatrixXd resid =
      pb.M.cwiseProduct(a * pb.B.transpose()) - pb.M.cwiseProduct(pb.X);
  return resid * pb.B + lambda * a;
}

// Full PR x PR Hessian of the masked quadratic in vec(A) (columns stacked):
// (B (x) I_P)^T diag(vec(M)) (B (x) I_P) + lambda I.
inline Eigen::MatrixXd dense_hessian_full(const DenseProblem& pb, double lambda) {
  const std::size_t P = pb.P, Q = pb.Q, R = pb.R;
  Eigen::MatrixXd bkron = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(Q * P),
                                                static_cast<Eigen::Index>(R * P));
  for (std::size_t j = 0; j < Q; ++j)
    for (std::size_t r = 0; r < R; ++r)
      for (std::size_t p = 0; p < P; ++p)
        bkron(static_cast<Eigen::Index>(j * P + p), static_cast<Eigen::Index>(r * P + p)) =
            pb.B(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(r));
  Eigen::VectorXd m(static_cast<Eigen::Index>(Q * P));
  for (std::size_t j = 0; j < Q; ++j)
    for (std::size_t p = 0; p < P; ++p)
      m(static_cast<Eigen::Index>(j * P + p)) =
          pb.M(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(j));
  return bkron.transpose() * m.asDiagonal() * bkron +
         lambda * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(R * P),
                                            static_cast<Eigen::Index>(R * P));
}

// The P-strided diagonal block of the full Hessian belonging to row p.
inline Eigen::MatrixXd hessian_block(const Eigen::MatrixXd& hfull, std::size_t p,
                                     std::size_t P, std::size_t R) {
  Eigen::MatrixXd h(static_cast<Eigen::Index>(R), static_cast<Eigen::Index>(R));
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t s = 0; s < R; ++s)
      h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) =
          hfull(static_cast<Eigen::Index>(r * P + p), static_cast<Eigen::Index>(s * P + p));
  return h;
}

inline double lambda_max(const Eigen::MatrixXd& h) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues().maxCoeff();
}

// Long-run projected gradient on the dense subproblem, row by row, step
// 1 / lambda_max of the exact row Hessian. Strong convexity (lambda > 0)
// gives linear convergence, so iteration counts around 1e5 reach the
// minimizer to machine precision on desk-scale rows.
inline Eigen::MatrixXd pg_minimize(const DenseProblem& pb, double lambda,
                                   const Eigen::MatrixXd& a0, int iters) {
  Eigen::MatrixXd a = a0;
  for (std::size_t p = 0; p < pb.P; ++p) {
    Eigen::MatrixXd h =
        lambda * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(pb.R),
                                           static_cast<Eigen::Index>(pb.R));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pb.R));
    for (std::size_t j = 0; j < pb.Q; ++j) {
      const auto ej = static_cast<Eigen::Index>(j);
      if (pb.M(static_cast<Eigen::Index>(p), ej) == 0.0) continue;
      h += pb.B.row(ej).transpose() * pb.B.row(ej);
      b += pb.X(static_cast<Eigen::Index>(p), ej) * pb.B.row(ej).transpose();
    }
    const double step = 1.0 / lambda_max(h);
    Eigen::VectorXd y = a.row(static_cast<Eigen::Index>(p)).transpose();
    for (int it = 0; it < iters; ++it)
      y = (y - step * (h * y - b)).cwiseMax(0.0);
    a.row(static_cast<Eigen::Index>(p)) = y.transpose();
  }
  return a;
}

// Random sparse tensor over a small dense grid: every cell kept with
// probability density; a kept cell's value is U[0,2), forced to exactly 0
// with probability zero_value_prob (observed zeros are legal data).
inline ntc::SparseTensor random_tensor(const std::vector<std::size_t>& dims,
                                       double density, ntc::RngStream& rng,
                                       double zero_value_prob = 0.0) {
  std::vector<ntc::coord_t> indices;
  std::vector<double> values;
  std::vector<ntc::coord_t> cur(dims.size(), 0);
  for (;;) {
    if (rng.next_double() < density) {
      indices.insert(indices.end(), cur.begin(), cur.end());
      double v = 2.0 * rng.next_double();
      if (zero_value_prob > 0.0 && rng.next_double() < zero_value_prob) v = 0.0;
      values.push_back(v);
    }
    std::size_t m = dims.size();
    while (m-- > 0) {
      if (++cur[m] < dims[m]) break;
      cur[m] = 0;
      if (m == 0) return ntc::SparseTensor(dims, std::move(indices), std::move(values));
    }
  }
}

// || truth - est ||_F / || truth ||_F over the full dense grid.
inline double full_rel_error(const ntc::FactorSet& truth, const ntc::FactorSet& est) {
  std::vector<std::size_t> dims;
  for (const auto& u : truth.factors) dims.push_back(u.rows());
  std::vector<ntc::coord_t> cur(dims.size(), 0);
  double num = 0.0, den = 0.0;
  for (;;) {
    const double tv = ntc::cpd_value(truth, cur);
    const double ev = ntc::cpd_value(est, cur);
    num += (tv - ev) * (tv - ev);
    den += tv * tv;
    std::size_t m = dims.size();
    bool done = false;
    while (m-- > 0) {
      if (++cur[m] < dims[m]) break;
      cur[m] = 0;
      if (m == 0) done = true;
    }
    if (done) break;
  }
  return std::sqrt(num / den);
}

}  // namespace oracle

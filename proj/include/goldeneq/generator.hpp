// Seeded random instance generator for box-constrained affine equilibrium
// problems (the oligopoly benchmark family): Q = U diag(pos) U^T positive
// definite, T = V diag(neg) V^T negative definite with independent random
// orthogonal U, V, and P = Q - T.
//
// Every value is derived from a std::mt19937_64 stream through the fixed
// protocol below, so an instance is a pure function of (dimension, seed,
// ranges) and can be reproduced by any implementation of the same protocol:
//
//   uniform(a, b)   = a + (b - a) * ((next() >> 11) + 0.5) * 2^-53, open interval
//   normal pair     = Box-Muller on two uniforms:
//                     sqrt(-2 ln u1) * (cos, sin)(2 pi u2)
//   normal matrix   = filled column-major, pairwise; an odd tail discards
//                     the second member of its pair
//   orthogonal(m)   = QR of an m x m normal matrix, each column of the Q
//                     factor flipped where diag(R) < 0 (Haar-distributed)
//   draw order      = diag of Q, diag of T, U, V, q, start point
//
// The protocol is named by kRngId and stored in instance files.

#pragma once

#include "goldeneq/problem.hpp"

#include <numbers>
#include <optional>
#include <random>

namespace goldeneq {

inline constexpr const char* kRngId = "goldeneq.mt19937_64.boxmuller.qr-sign.v1";

namespace rng {

// Uniform in the open interval (0, 1); never hits either endpoint.
inline double uniform01(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

inline std::pair<double, double> normal_pair(std::mt19937_64& gen) {
  const double u1 = uniform01(gen);
  const double u2 = uniform01(gen);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

inline Eigen::VectorXd uniform_vector(std::mt19937_64& gen, Eigen::Index n, double lo,
                                      double hi) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(gen, lo, hi);
  return v;
}

inline Eigen::MatrixXd standard_normal_matrix(std::mt19937_64& gen, Eigen::Index rows,
                                              Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  double* data = m.data();  // column-major
  const Eigen::Index total = rows * cols;
  for (Eigen::Index i = 0; i + 1 < total; i += 2) {
    const auto [z0, z1] = normal_pair(gen);
    data[i] = z0;
    data[i + 1] = z1;
  }
  if (total % 2 == 1) data[total - 1] = normal_pair(gen).first;
  return m;
}

}  // namespace rng

// Haar-distributed random orthogonal matrix: QR of a standard normal matrix
// with columns sign-corrected so that diag(R) > 0.
inline Eigen::MatrixXd random_orthogonal(std::mt19937_64& gen, Eigen::Index m) {
  detail::require(m >= 1, "random_orthogonal: dimension must be at least 1");
  const Eigen::MatrixXd a = rng::standard_normal_matrix(gen, m, m);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < m; ++i)
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  return q;
}

struct Interval {
  double lo{};
  double hi{};
};

struct GeneratorConfig {
  Eigen::Index dimension = 1;
  std::uint64_t seed = 0;
  Interval eig_neg{-2.0, 0.0};  // eigenvalues of T, drawn open
  Interval eig_pos{0.0, 2.0};   // eigenvalues of Q, drawn open
  Interval q_range{-2.0, 2.0};
  std::optional<BoxSet> box{};  // defaults to [-2, 5]^m
  Interval start_range{0.0, 1.0};  // x_1 = xbar_0 drawn here
};

inline ProblemInstance generate(const GeneratorConfig& config) {
  const Eigen::Index m = config.dimension;
  detail::require(m >= 1, "generate: dimension must be at least 1");
  detail::require(config.eig_neg.lo < config.eig_neg.hi && config.eig_neg.hi <= 0.0,
                  "generate: eig_neg_range must lie in (-inf, 0)");
  detail::require(config.eig_pos.lo >= 0.0 && config.eig_pos.lo < config.eig_pos.hi,
                  "generate: eig_pos_range must lie in (0, inf)");
  detail::require(config.q_range.lo < config.q_range.hi, "generate: empty q_range");
  detail::require(config.start_range.lo <= config.start_range.hi,
                  "generate: empty start_range");
  BoxSet box = config.box ? *config.box : BoxSet::cube(m, -2.0, 5.0);
  detail::require(box.dim() == m, "generate: box dimension mismatch");

  std::mt19937_64 gen(config.seed);
  const Eigen::VectorXd eig_q =
      rng::uniform_vector(gen, m, config.eig_pos.lo, config.eig_pos.hi);
  const Eigen::VectorXd eig_t =
      rng::uniform_vector(gen, m, config.eig_neg.lo, config.eig_neg.hi);
  const Eigen::MatrixXd u = random_orthogonal(gen, m);
  const Eigen::MatrixXd v = random_orthogonal(gen, m);

  Eigen::MatrixXd qmat = u * eig_q.asDiagonal() * u.transpose();
  qmat = ((qmat + qmat.transpose()) / 2.0).eval();  // exact symmetry
  Eigen::MatrixXd tmat = v * eig_t.asDiagonal() * v.transpose();
  tmat = ((tmat + tmat.transpose()) / 2.0).eval();
  const Eigen::MatrixXd pmat = qmat - tmat;

  const Eigen::VectorXd qvec =
      rng::uniform_vector(gen, m, config.q_range.lo, config.q_range.hi);
  const Eigen::VectorXd start =
      rng::uniform_vector(gen, m, config.start_range.lo, config.start_range.hi);

  return ProblemInstance(AffineBifunction(pmat, qmat, qvec), std::move(box), start, start,
                         config.seed, kRngId);
}

}  // namespace goldeneq

#pragma once

#include "goldeneq/generator.hpp"
#include "goldeneq/problem.hpp"

#include <random>

namespace test_support {

using namespace goldeneq;

// 1-D analytic problem: f(x, y) = x (y - x) on C = [-2, 5]; unique solution 0.
inline ProblemInstance scalar_instance(double x_start = 1.0, double xbar_start = 1.0) {
  Eigen::MatrixXd p(1, 1), q(1, 1);
  p << 1.0;
  q << 0.0;
  Eigen::VectorXd qv = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd xs(1), xb(1);
  xs << x_start;
  xb << xbar_start;
  return ProblemInstance(AffineBifunction(p, q, qv), BoxSet::cube(1, -2.0, 5.0), xs, xb);
}

// 1-D instance with arbitrary (P, Q, q) scalars.
inline ProblemInstance scalar_instance_pqq(double p_val, double q_mat, double q_vec,
                                           double x_start, double xbar_start) {
  Eigen::MatrixXd p(1, 1), q(1, 1);
  p << p_val;
  q << q_mat;
  Eigen::VectorXd qv(1), xs(1), xb(1);
  qv << q_vec;
  xs << x_start;
  xb << xbar_start;
  return ProblemInstance(AffineBifunction(p, q, qv), BoxSet::cube(1, -2.0, 5.0), xs, xb);
}

inline ProblemInstance seeded_instance(Eigen::Index m, std::uint64_t seed) {
  GeneratorConfig config;
  config.dimension = m;
  config.seed = seed;
  return generate(config);
}

inline Eigen::VectorXd sample_in_box(std::mt19937_64& gen, const BoxSet& box) {
  Eigen::VectorXd v(box.dim());
  for (Eigen::Index i = 0; i < box.dim(); ++i)
    v[i] = rng::uniform(gen, box.lower()[i], box.upper()[i]);
  return v;
}

}  // namespace test_support

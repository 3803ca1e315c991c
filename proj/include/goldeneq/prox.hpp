// Euclidean projection onto a box and the prox subproblem
//
//   prox(z) = argmin { lambda f(x, y) + 0.5 ||y - z||^2 : y in C }.
//
// The objective is 1-strongly convex (Q is PSD), so the minimizer is unique
// and characterized by <ybar - z, w - ybar> >= lambda (f(x, ybar) - f(x, w))
// for all w in C.

#pragma once

#include "goldeneq/problem.hpp"

namespace goldeneq {

template <typename Scalar>
struct ProxSettingsT {
  Scalar grad_tolerance = Scalar(1e-12);  // on the unit-step projected-gradient norm
  int max_inner_iterations = 10000;
};

using ProxSettings = ProxSettingsT<double>;

class ProxIterationLimit : public std::runtime_error {
 public:
  ProxIterationLimit(const std::string& what, Eigen::VectorXd best)
      : std::runtime_error(what), best_iterate_(std::move(best)) {}

  const Eigen::VectorXd& best_iterate() const { return best_iterate_; }

 private:
  Eigen::VectorXd best_iterate_;
};

// Componentwise clamp of z into [lower, upper]; this is the Euclidean
// projection onto the box.
template <typename Derived>
VectorX<typename Derived::Scalar> project_box(
    const Eigen::MatrixBase<Derived>& z, const BoxSetT<typename Derived::Scalar>& box) {
  detail::require(z.size() == box.dim(), "project_box: dimension mismatch");
  return z.cwiseMax(box.lower()).cwiseMin(box.upper());
}

/// Minimizes F(y) = lambda f(x, y) + 0.5 ||y - z||^2 over the box by
/// projected gradient with the constant step 2 / (L + mu), where
/// grad F(y) = lambda (2 Q y + (P - Q) x + q) + (y - z), L = 2 lambda ||Q|| + 1
/// and mu = 1. Warm-started from z; stops when
/// ||y - project_box(y - grad F(y))|| <= grad_tolerance. lambda = 0
/// short-circuits to the projection. Throws ProxIterationLimit (carrying the
/// best iterate) when the inner budget is exhausted.
template <typename Scalar>
VectorX<Scalar> prox_step(const AffineBifunctionT<Scalar>& f,
                          const Eigen::Ref<const VectorX<Scalar>>& x,
                          const Eigen::Ref<const VectorX<Scalar>>& z, Scalar lambda,
                          const BoxSetT<Scalar>& box,
                          const ProxSettingsT<Scalar>& settings = {}) {
  const Eigen::Index m = f.dim();
  detail::require(x.size() == m && z.size() == m && box.dim() == m,
                  "prox_step: dimension mismatch");
  detail::require(lambda >= Scalar(0), "prox_step: lambda must be nonnegative");
  detail::require(settings.grad_tolerance > Scalar(0),
                  "prox_step: grad_tolerance must be positive");
  if (lambda == Scalar(0)) return project_box(z, box);

  // grad F(y) = (I + 2 lambda Q) y + shift
  const VectorX<Scalar> shift = lambda * ((f.P() - f.Q()) * x + f.q()) - z;
  const Scalar big_l = Scalar(2) * lambda * f.norm_Q() + Scalar(1);
  const Scalar step = Scalar(2) / (big_l + Scalar(1));

  VectorX<Scalar> y = project_box(z, box);
  VectorX<Scalar> grad(m);
  for (int it = 0; it < settings.max_inner_iterations; ++it) {
    grad.noalias() = (Scalar(2) * lambda) * (f.Q() * y);
    grad += y + shift;
    if ((y - project_box((y - grad).eval(), box)).norm() <= settings.grad_tolerance)
      return y;
    y = project_box((y - step * grad).eval(), box);
  }
  throw ProxIterationLimit(
      "prox_step: projected gradient did not reach tolerance " +
          std::to_string(static_cast<double>(settings.grad_tolerance)) + " within " +
          std::to_string(settings.max_inner_iterations) + " iterations",
      y.template cast<double>());
}

}  // namespace goldeneq

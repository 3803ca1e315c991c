// Domain types for equilibrium problems over boxes with the affine bifunction
//
//   f(x, y) = <P x + Q y + q, y - x>,   Q symmetric PSD, P - Q symmetric,
//
// together with its Lipschitz-type constants c1 = c2 = ||P - Q|| / 2 and the
// strong-pseudomonotonicity modulus gamma = lambda_min(P - Q).

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace goldeneq {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// phi = (1 + sqrt 5) / 2; satisfies phi^2 = phi + 1 and phi - 1 = 1/phi.
template <typename Scalar = double>
inline Scalar golden_ratio() {
  return (Scalar(1) + std::sqrt(Scalar(5))) / Scalar(2);
}

namespace detail {

inline void require(bool condition, const std::string& what) {
  if (!condition) throw std::invalid_argument(what);
}

template <typename Scalar>
Scalar max_asymmetry(const MatrixX<Scalar>& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace detail

// Axis-aligned box { x : lower <= x <= upper } componentwise.
template <typename Scalar>
class BoxSetT {
 public:
  BoxSetT(VectorX<Scalar> lower, VectorX<Scalar> upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    detail::require(lower_.size() == upper_.size(), "box: lower/upper length mismatch");
    detail::require(lower_.size() >= 1, "box: dimension must be at least 1");
    detail::require((lower_.array() <= upper_.array()).all(),
                    "box: lower bound exceeds upper bound");
  }

  static BoxSetT cube(Eigen::Index dim, Scalar lo, Scalar hi) {
    return BoxSetT(VectorX<Scalar>::Constant(dim, lo), VectorX<Scalar>::Constant(dim, hi));
  }

  Eigen::Index dim() const { return lower_.size(); }
  const VectorX<Scalar>& lower() const { return lower_; }
  const VectorX<Scalar>& upper() const { return upper_; }

  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& x, Scalar tol = Scalar(0)) const {
    if (x.size() != dim()) return false;
    return (x.array() >= lower_.array() - tol).all() &&
           (x.array() <= upper_.array() + tol).all();
  }

 private:
  VectorX<Scalar> lower_;
  VectorX<Scalar> upper_;
};

using BoxSet = BoxSetT<double>;

template <typename Scalar>
struct ProblemConstantsT {
  Scalar c1{};     // Lipschitz-type constant, = ||P - Q|| / 2 for the affine bifunction
  Scalar c2{};     // = c1 for the affine bifunction
  Scalar gamma{};  // strong-pseudomonotonicity modulus, = lambda_min(P - Q)
};

using ProblemConstants = ProblemConstantsT<double>;

/// The affine bifunction f(x, y) = <P x + Q y + q, y - x>.
///
/// Construction validates dimensions, symmetry of Q and P - Q (max absolute
/// asymmetry 1e-12) and positive semidefiniteness of Q. The spectral data of
/// Q and P - Q is cached via symmetric eigendecomposition. Strong
/// pseudomonotonicity (gamma > 0) is not required for evaluation; it is
/// enforced by constants() so that degenerate inputs fail where the
/// constants are actually consumed.
template <typename Scalar>
class AffineBifunctionT {
 public:
  static constexpr Scalar kSymmetryTol = Scalar(1e-12);

  AffineBifunctionT(MatrixX<Scalar> P, MatrixX<Scalar> Q, VectorX<Scalar> q)
      : p_(std::move(P)), qmat_(std::move(Q)), qvec_(std::move(q)) {
    const Eigen::Index m = p_.rows();
    detail::require(m >= 1, "bifunction: dimension must be at least 1");
    detail::require(p_.cols() == m && qmat_.rows() == m && qmat_.cols() == m &&
                        qvec_.size() == m,
                    "bifunction: dimension mismatch between P, Q, q");
    detail::require(detail::max_asymmetry(qmat_) <= kSymmetryTol,
                    "bifunction: Q is not symmetric (asymmetry beyond 1e-12)");
    const MatrixX<Scalar> pmq = p_ - qmat_;
    detail::require(detail::max_asymmetry(pmq) <= kSymmetryTol,
                    "bifunction: P - Q is not symmetric (asymmetry beyond 1e-12)");

    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es_q(qmat_, Eigen::EigenvaluesOnly);
    norm_q_ = es_q.eigenvalues().cwiseAbs().maxCoeff();
    detail::require(es_q.eigenvalues().minCoeff() >=
                        -Scalar(1e-10) * std::max(Scalar(1), norm_q_),
                    "bifunction: Q is not positive semidefinite");

    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es_pmq(pmq, Eigen::EigenvaluesOnly);
    gamma_ = es_pmq.eigenvalues().minCoeff();
    norm_pmq_ = es_pmq.eigenvalues().cwiseAbs().maxCoeff();
  }

  Eigen::Index dim() const { return p_.rows(); }
  const MatrixX<Scalar>& P() const { return p_; }
  const MatrixX<Scalar>& Q() const { return qmat_; }
  const VectorX<Scalar>& q() const { return qvec_; }

  // Spectral norm of Q (Lipschitz data for the prox subproblem gradient).
  Scalar norm_Q() const { return norm_q_; }

  /// c1 = c2 = ||P - Q|| / 2 and gamma = lambda_min(P - Q).
  /// Throws when gamma is not positive beyond rounding.
  ProblemConstantsT<Scalar> constants() const {
    detail::require(gamma_ > Scalar(1e-12) * std::max(Scalar(1), norm_pmq_),
                    "bifunction: not strongly pseudomonotone (lambda_min(P - Q) <= 0)");
    const Scalar c = norm_pmq_ / Scalar(2);
    return {c, c, gamma_};
  }

 private:
  MatrixX<Scalar> p_;
  MatrixX<Scalar> qmat_;
  VectorX<Scalar> qvec_;
  Scalar norm_q_{};
  Scalar norm_pmq_{};
  Scalar gamma_{};
};

using AffineBifunction = AffineBifunctionT<double>;

template <typename Scalar, typename DerivedX, typename DerivedY>
Scalar eval(const AffineBifunctionT<Scalar>& f, const Eigen::MatrixBase<DerivedX>& x,
            const Eigen::MatrixBase<DerivedY>& y) {
  detail::require(x.size() == f.dim() && y.size() == f.dim(), "eval: dimension mismatch");
  return (f.P() * x + f.Q() * y + f.q()).dot(y - x);
}

// Gradient of z -> f(y, z) at z = y, i.e. (P + Q) y + q.
template <typename Scalar, typename Derived>
VectorX<Scalar> subgradient_at_diagonal(const AffineBifunctionT<Scalar>& f,
                                        const Eigen::MatrixBase<Derived>& y) {
  detail::require(y.size() == f.dim(), "subgradient_at_diagonal: dimension mismatch");
  return (f.P() + f.Q()) * y + f.q();
}

template <typename Scalar>
ProblemConstantsT<Scalar> derive_constants(const AffineBifunctionT<Scalar>& f) {
  return f.constants();
}

/// A solvable problem: bifunction, feasible box and start points.
/// x_start is x_1 for the fixed-step solver and y_1 for the modified ones;
/// xbar_start is xbar_0 respectively x_0.
template <typename Scalar>
struct ProblemInstanceT {
  ProblemInstanceT(AffineBifunctionT<Scalar> bifunction_in, BoxSetT<Scalar> box_in,
                   VectorX<Scalar> x_start_in, VectorX<Scalar> xbar_start_in,
                   std::uint64_t seed_in = 0, std::string rng_id_in = {})
      : bifunction(std::move(bifunction_in)),
        box(std::move(box_in)),
        x_start(std::move(x_start_in)),
        xbar_start(std::move(xbar_start_in)),
        seed(seed_in),
        rng_id(std::move(rng_id_in)) {
    detail::require(box.dim() == bifunction.dim(), "instance: box dimension mismatch");
    detail::require(x_start.size() == bifunction.dim() &&
                        xbar_start.size() == bifunction.dim(),
                    "instance: start point dimension mismatch");
    detail::require(box.contains(x_start), "instance: x_start outside the box");
  }

  Eigen::Index dim() const { return bifunction.dim(); }

  AffineBifunctionT<Scalar> bifunction;
  BoxSetT<Scalar> box;
  VectorX<Scalar> x_start;
  VectorX<Scalar> xbar_start;
  std::uint64_t seed = 0;
  std::string rng_id;
};

using ProblemInstance = ProblemInstanceT<double>;

}  // namespace goldeneq

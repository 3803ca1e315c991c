// Geometric-rate certificate for the fixed-step golden ratio iteration,
// empirical rate estimation from traces, and the scalar recurrence showing
// that the diminishing-step variant admits no linear rate.
//
// With alpha = 2 lambda gamma the Lyapunov weights r1, r2 > 0 solve
// 1 - alpha - r2 + r1 = 0 and alpha / phi - r1 r2 = 0; epsilon is the
// smallest admissible value of the Lipschitz split (lambda < epsilon phi /
// (4 c1)) plus a guard, and theta = max{epsilon, r2} < 1 is the certified
// per-iteration factor of a_n + r1 a_{n-1} + b_n, where
// a_n = (phi / (phi - 1)) ||xbar_n - x*||^2 and
// b_n = (phi / 2) ||x_n - x_{n-1}||^2.

#pragma once

#include "goldeneq/problem.hpp"
#include "goldeneq/solvers.hpp"

#include <optional>
#include <vector>

namespace goldeneq {

template <typename Scalar>
struct RateCertificateT {
  Scalar alpha{};    // 2 lambda gamma
  Scalar epsilon{};  // in (0, 1)
  Scalar r1{};
  Scalar r2{};
  Scalar theta{};    // max{epsilon, r2}, in (0, 1)
  std::optional<Scalar> M{};  // envelope constant, trace-dependent
};

using RateCertificate = RateCertificateT<double>;

// r2 as a function of alpha: (1 - t + sqrt((t - 1)^2 + 4 t / phi)) / 2.
// Strictly decreasing on [0, inf) with value 1 at t = 0.
template <typename Scalar>
Scalar contraction_root(Scalar t) {
  const Scalar phi = golden_ratio<Scalar>();
  const Scalar disc = std::sqrt((t - Scalar(1)) * (t - Scalar(1)) + Scalar(4) * t / phi);
  return ((Scalar(1) - t) + disc) / Scalar(2);
}

// r1 as a function of alpha: (t - 1 + sqrt((t - 1)^2 + 4 t / phi)) / 2.
template <typename Scalar>
Scalar companion_root(Scalar t) {
  const Scalar phi = golden_ratio<Scalar>();
  const Scalar disc = std::sqrt((t - Scalar(1)) * (t - Scalar(1)) + Scalar(4) * t / phi);
  return ((t - Scalar(1)) + disc) / Scalar(2);
}

/// Certificate (without M) for an admissible fixed step
/// 0 < lambda < phi / (4 max{c1, c2}). epsilon is clamped into (0, 1) as
/// min(1 - 1e-9, 4 lambda c1 / phi + 1e-9), the tightest value the analysis
/// supports up to a guard.
template <typename Scalar>
RateCertificateT<Scalar> rate_certificate(Scalar lambda,
                                          const ProblemConstantsT<Scalar>& constants) {
  const Scalar phi = golden_ratio<Scalar>();
  const Scalar cmax = std::max(constants.c1, constants.c2);
  detail::require(cmax > Scalar(0), "rate_certificate: c1 and c2 must be positive");
  detail::require(constants.gamma > Scalar(0), "rate_certificate: gamma must be positive");
  detail::require(lambda > Scalar(0) && lambda < phi / (Scalar(4) * cmax),
                  "rate_certificate: lambda outside (0, phi / (4 max{c1, c2}))");

  RateCertificateT<Scalar> cert;
  cert.alpha = Scalar(2) * lambda * constants.gamma;
  cert.r1 = companion_root(cert.alpha);
  cert.r2 = contraction_root(cert.alpha);
  const Scalar guard = Scalar(1e-9);
  cert.epsilon =
      std::min(Scalar(1) - guard, Scalar(4) * lambda * constants.c1 / phi + guard);
  cert.theta = std::max(cert.epsilon, cert.r2);
  return cert;
}

/// Envelope constant M = ((phi - 1) / phi) (a_1 + r1 a_0 + b_1) from the
/// first two records of a gra_solve trace, so that
/// ||xbar_n - x*||^2 <= M theta^(n-1). The trace starts at x_1 with no
/// previous main iterate, so the first difference term b_1 is zero.
template <typename Scalar, typename Derived>
Scalar certificate_bound_M(const RateCertificateT<Scalar>& cert,
                           const SolverTraceT<Scalar>& trace,
                           const Eigen::MatrixBase<Derived>& x_star) {
  detail::require(trace.records.size() >= 2,
                  "certificate_bound_M: trace must hold at least two records");
  const auto& rec0 = trace.records[0];
  const auto& rec1 = trace.records[1];
  detail::require(rec0.n == 0 && rec1.n == 1,
                  "certificate_bound_M: trace must record iterations 0 and 1");
  detail::require(rec0.anchor.size() > 0 && rec1.anchor.size() > 0,
                  "certificate_bound_M: trace does not carry iterates");
  detail::require(x_star.size() == rec0.anchor.size(),
                  "certificate_bound_M: x_star dimension mismatch");

  const Scalar phi = golden_ratio<Scalar>();
  const Scalar weight = phi / (phi - Scalar(1));
  const Scalar a0 = weight * (rec0.anchor - x_star).squaredNorm();
  const Scalar a1 = weight * (rec1.anchor - x_star).squaredNorm();
  return ((phi - Scalar(1)) / phi) * (a1 + cert.r1 * a0);
}

/// Least-squares slope of log(residual) against the iteration index over
/// [burn_in, end), exponentiated: the estimated per-iteration decay factor.
template <typename Scalar>
Scalar fit_rate(const std::vector<Scalar>& residuals, std::size_t burn_in) {
  detail::require(residuals.size() >= burn_in + 10,
                  "fit_rate: need at least burn_in + 10 residuals");
  const std::size_t count = residuals.size() - burn_in;

  Scalar mean_i = Scalar(0), mean_y = Scalar(0);
  for (std::size_t k = 0; k < count; ++k) {
    const Scalar r = residuals[burn_in + k];
    detail::require(r > Scalar(0), "fit_rate: nonpositive residual in fit window");
    mean_i += Scalar(k);
    mean_y += std::log(r);
  }
  mean_i /= Scalar(count);
  mean_y /= Scalar(count);

  Scalar sxy = Scalar(0), sxx = Scalar(0);
  for (std::size_t k = 0; k < count; ++k) {
    const Scalar di = Scalar(k) - mean_i;
    sxy += di * (std::log(residuals[burn_in + k]) - mean_y);
    sxx += di * di;
  }
  return std::exp(sxy / sxx);
}

/// The scalar recurrence of the diminishing-step variant on f(x, y) = x(y - x)
/// over the real line: x_1 = ((phi - 1) y_1 + x_0) / phi and
/// x_{n+1} = (1 - lambda_n) x_n + (lambda_n / phi) x_{n-1}. Returns
/// x_0 .. x_N. Each lambda_n must lie in (0, 1); positive starts keep every
/// x_n positive, and the consecutive ratio tends to 1, so no geometric
/// envelope with factor below 1 fits.
template <typename Scalar>
std::vector<Scalar> counterexample_run(Scalar x0, Scalar y1, const StepRuleT<Scalar>& steps,
                                       int n_final) {
  detail::require(n_final >= 2, "counterexample_run: N must be at least 2");
  const Scalar phi = golden_ratio<Scalar>();
  std::vector<Scalar> xs(static_cast<std::size_t>(n_final) + 1);
  xs[0] = x0;
  xs[1] = ((phi - Scalar(1)) * y1 + x0) / phi;
  for (int n = 1; n < n_final; ++n) {
    const Scalar lam = steps.at(n);
    detail::require(lam > Scalar(0) && lam < Scalar(1),
                    "counterexample_run: lambda_n outside (0, 1)");
    xs[n + 1] = (Scalar(1) - lam) * xs[n] + lam / phi * xs[n - 1];
  }
  return xs;
}

}  // namespace goldeneq

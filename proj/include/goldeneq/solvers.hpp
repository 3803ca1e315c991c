// Outer solvers for the equilibrium problem EP(f, C):
//
//   gra_solve    fixed-step golden ratio iteration
//                  xbar_n = ((phi - 1) x_n + xbar_{n-1}) / phi
//                  x_{n+1} = prox of lambda f(x_n, .) at xbar_n
//   mgra1_solve  diminishing-step variant; the prox uses lambda_n and the
//                anchor x_n = ((phi - 1) y_n + x_{n-1}) / phi
//   mgra2_solve  projected subgradient variant with lambda_n = beta_n / max{1, ||g_n||}
//
// All three produce a SolverTrace of per-iteration records with the residual
// D = || x - prox of lambda f(x, .) at x ||^2 evaluated at a fixed lambda.

#pragma once

#include "goldeneq/problem.hpp"
#include "goldeneq/prox.hpp"

#include <chrono>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace goldeneq {

enum class StepRuleKind { fixed, diminishing, custom };

// Step-size schedule for the outer iterations, indexed from n = 1.
template <typename Scalar>
class StepRuleT {
 public:
  static StepRuleT fixed(Scalar lambda) {
    detail::require(lambda > Scalar(0), "step rule: fixed lambda must be positive");
    StepRuleT r;
    r.kind_ = StepRuleKind::fixed;
    r.value_ = lambda;
    return r;
  }

  // lambda_n = base / (n + 1); vanishes and is non-summable, with summable squares.
  static StepRuleT diminishing(Scalar base) {
    detail::require(base > Scalar(0), "step rule: diminishing base must be positive");
    StepRuleT r;
    r.kind_ = StepRuleKind::diminishing;
    r.value_ = base;
    return r;
  }

  static StepRuleT custom(std::function<Scalar(int)> fn) {
    detail::require(static_cast<bool>(fn), "step rule: custom generator must be callable");
    StepRuleT r;
    r.kind_ = StepRuleKind::custom;
    r.fn_ = std::move(fn);
    return r;
  }

  StepRuleKind kind() const { return kind_; }

  Scalar at(int n) const {
    switch (kind_) {
      case StepRuleKind::fixed:
        return value_;
      case StepRuleKind::diminishing:
        return value_ / Scalar(n + 1);
      case StepRuleKind::custom:
        return fn_(n);
    }
    return Scalar(0);
  }

 private:
  StepRuleT() = default;
  StepRuleKind kind_ = StepRuleKind::fixed;
  Scalar value_ = Scalar(0);
  std::function<Scalar(int)> fn_;
};

using StepRule = StepRuleT<double>;

enum class StopReason { residual_met, fixed_point, max_iterations };

inline const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::residual_met:
      return "residual_met";
    case StopReason::fixed_point:
      return "fixed_point";
    case StopReason::max_iterations:
      return "max_iterations";
  }
  return "unknown";
}

// State after n outer iterations. For gra_solve x is x_{n+1} and anchor is
// xbar_n; for mgra1/mgra2 x is x_n and anchor is y_{n+1}. The iterate vectors
// are empty when the trace was run with record_iterates = false.
template <typename Scalar>
struct IterationRecordT {
  int n = 0;
  Scalar residual = std::numeric_limits<Scalar>::quiet_NaN();
  double elapsed_seconds = 0.0;  // cumulative loop time, residual evaluation excluded
  VectorX<Scalar> x;
  VectorX<Scalar> anchor;
};

template <typename Scalar>
struct SolverTraceT {
  std::vector<IterationRecordT<Scalar>> records;
  StopReason reason = StopReason::max_iterations;
  int iterations = 0;
  Scalar residual_lambda = Scalar(0);

  std::vector<Scalar> residuals() const {
    std::vector<Scalar> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.residual);
    return out;
  }
};

using SolverTrace = SolverTraceT<double>;

template <typename Scalar>
struct SolverOptionsT {
  Scalar stop_residual = Scalar(1e-10);
  int max_iterations = 1'000'000;
  // Evaluate (and record) the residual every k-th iteration. Records are
  // appended only where the residual is evaluated, plus n = 0 and the final
  // iteration.
  int residual_every = 1;
  bool record_iterates = true;
  // lambda used in the residual D. Defaults to the solver's own lambda for
  // gra_solve and to 0.9 phi / (4 max{c1, c2}) for mgra1/mgra2, so traces of
  // different algorithms plot one comparable residual.
  std::optional<Scalar> residual_lambda{};
  ProxSettingsT<Scalar> prox{};
};

using SolverOptions = SolverOptionsT<double>;

// D(x) = || x - prox of lambda f(x, .) at x ||^2; zero exactly at solutions.
template <typename Scalar>
Scalar residual(const ProblemInstanceT<Scalar>& instance,
                const Eigen::Ref<const VectorX<Scalar>>& x, Scalar lambda,
                const ProxSettingsT<Scalar>& settings = {}) {
  detail::require(instance.box.contains(x), "residual: x outside the box");
  return (x - prox_step(instance.bifunction, x, x, lambda, instance.box, settings))
      .squaredNorm();
}

namespace detail {

// Monotonic wall clock that can be paused while the residual is evaluated.
class Stopwatch {
 public:
  Stopwatch() : start_(clock::now()) {}
  void pause() { accumulated_ += clock::now() - start_; }
  void resume() { start_ = clock::now(); }
  double seconds() const {
    return std::chrono::duration<double>(accumulated_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_;
  clock::duration accumulated_{};
};

template <typename Scalar>
class TraceBuilder {
 public:
  TraceBuilder(SolverTraceT<Scalar>& trace, const ProblemInstanceT<Scalar>& instance,
               const SolverOptionsT<Scalar>& options, Scalar residual_lambda)
      : trace_(trace), instance_(instance), options_(options) {
    trace_.residual_lambda = residual_lambda;
  }

  void start() { watch_ = Stopwatch(); }
  void pause() { watch_.pause(); }
  void resume() { watch_.resume(); }

  // Evaluates D at x (clock paused) and appends a record. Returns D.
  // Bypasses the strict box precondition of residual(): the mgra main
  // iterate is a convex combination and may sit a few ulps outside the box.
  Scalar record(int n, const VectorX<Scalar>& x, const VectorX<Scalar>& anchor) {
    watch_.pause();
    IterationRecordT<Scalar> rec;
    rec.n = n;
    rec.residual = (x - prox_step<Scalar>(instance_.bifunction, x, x,
                                          trace_.residual_lambda, instance_.box,
                                          options_.prox))
                       .squaredNorm();
    rec.elapsed_seconds = watch_.seconds();
    if (options_.record_iterates) {
      rec.x = x;
      rec.anchor = anchor;
    }
    trace_.records.push_back(std::move(rec));
    watch_.resume();
    return trace_.records.back().residual;
  }

  bool due(int n) const { return n % options_.residual_every == 0; }

 private:
  SolverTraceT<Scalar>& trace_;
  const ProblemInstanceT<Scalar>& instance_;
  const SolverOptionsT<Scalar>& options_;
  Stopwatch watch_;
};

template <typename Scalar>
void validate_options(const SolverOptionsT<Scalar>& options) {
  require(options.max_iterations >= 0, "solver: max_iterations must be nonnegative");
  require(options.residual_every >= 1, "solver: residual_every must be at least 1");
  require(options.stop_residual >= Scalar(0), "solver: stop_residual must be nonnegative");
}

template <typename Scalar>
Scalar default_mgra_residual_lambda(const ProblemConstantsT<Scalar>& k) {
  return Scalar(0.9) * golden_ratio<Scalar>() / (Scalar(4) * std::max(k.c1, k.c2));
}

}  // namespace detail

/// Fixed-step golden ratio iteration. Requires
/// 0 < lambda < phi / (4 max{c1, c2}). Stops when D <= stop_residual, when
/// ||x_{n+1} - x_n|| and ||x_n - xbar_n|| both fall below 1e-14 (1 + ||x_n||)
/// (the exact-fixed-point rule, made robust to rounding), or at
/// max_iterations.
template <typename Scalar>
SolverTraceT<Scalar> gra_solve(const ProblemInstanceT<Scalar>& instance, Scalar lambda,
                               const SolverOptionsT<Scalar>& options = {}) {
  detail::validate_options(options);
  const ProblemConstantsT<Scalar> k = instance.bifunction.constants();
  const Scalar phi = golden_ratio<Scalar>();
  const Scalar lambda_max = phi / (Scalar(4) * std::max(k.c1, k.c2));
  detail::require(lambda > Scalar(0) && lambda < lambda_max,
                  "gra_solve: lambda outside (0, phi / (4 max{c1, c2}))");

  SolverTraceT<Scalar> trace;
  detail::TraceBuilder<Scalar> builder(trace, instance, options,
                                       options.residual_lambda.value_or(lambda));

  VectorX<Scalar> x = instance.x_start;        // x_1
  VectorX<Scalar> xbar = instance.xbar_start;  // xbar_0
  builder.start();
  builder.record(0, x, xbar);

  VectorX<Scalar> xbar_next(instance.dim());
  for (int n = 1; n <= options.max_iterations; ++n) {
    xbar_next = ((phi - Scalar(1)) * x + xbar) / phi;
    VectorX<Scalar> x_next =
        prox_step<Scalar>(instance.bifunction, x, xbar_next, lambda, instance.box,
                          options.prox);

    const Scalar stop_tol = Scalar(1e-14) * (Scalar(1) + x.norm());
    const bool fixed_point = (x_next - x).norm() <= stop_tol &&
                             (x - xbar_next).norm() <= stop_tol;

    xbar = xbar_next;
    x = std::move(x_next);
    trace.iterations = n;

    if (fixed_point) {
      builder.record(n, x, xbar);
      trace.reason = StopReason::fixed_point;
      return trace;
    }
    if (builder.due(n)) {
      const Scalar d = builder.record(n, x, xbar);
      if (d <= options.stop_residual) {
        trace.reason = StopReason::residual_met;
        return trace;
      }
    }
  }
  if (trace.records.empty() || trace.records.back().n != trace.iterations)
    builder.record(trace.iterations, x, xbar);
  trace.reason = StopReason::max_iterations;
  return trace;
}

/// Diminishing-step variant: x_n = ((phi - 1) y_n + x_{n-1}) / phi and
/// y_{n+1} = argmin { lambda_n f(y_n, y) + 0.5 ||x_n - y||^2 : y in C }.
/// Rejects fixed step rules (the schedule must vanish and be non-summable).
template <typename Scalar>
SolverTraceT<Scalar> mgra1_solve(const ProblemInstanceT<Scalar>& instance,
                                 const StepRuleT<Scalar>& steps,
                                 const SolverOptionsT<Scalar>& options = {}) {
  detail::validate_options(options);
  detail::require(steps.kind() != StepRuleKind::fixed,
                  "mgra1_solve: step rule must be diminishing");
  const ProblemConstantsT<Scalar> k = instance.bifunction.constants();
  detail::require(instance.box.contains(instance.xbar_start),
                  "mgra1_solve: x_0 (xbar_start) outside the box");

  SolverTraceT<Scalar> trace;
  detail::TraceBuilder<Scalar> builder(
      trace, instance, options,
      options.residual_lambda.value_or(detail::default_mgra_residual_lambda(k)));

  const Scalar phi = golden_ratio<Scalar>();
  VectorX<Scalar> y = instance.x_start;     // y_1
  VectorX<Scalar> x = instance.xbar_start;  // x_0
  builder.start();
  builder.record(0, x, y);

  for (int n = 1; n <= options.max_iterations; ++n) {
    x = ((phi - Scalar(1)) * y + x) / phi;
    const Scalar lambda_n = steps.at(n);
    detail::require(lambda_n > Scalar(0), "mgra1_solve: step rule produced lambda <= 0");
    y = prox_step<Scalar>(instance.bifunction, y, x, lambda_n, instance.box, options.prox);
    trace.iterations = n;

    if (builder.due(n)) {
      const Scalar d = builder.record(n, x, y);
      if (d <= options.stop_residual) {
        trace.reason = StopReason::residual_met;
        return trace;
      }
    }
  }
  if (trace.records.empty() || trace.records.back().n != trace.iterations)
    builder.record(trace.iterations, x, y);
  trace.reason = StopReason::max_iterations;
  return trace;
}

/// Projected subgradient variant: g_n = (P + Q) y_n + q,
/// lambda_n = beta_n / max{1, ||g_n||}, y_{n+1} = P_C(x_n - lambda_n g_n).
/// The beta schedule must be non-summable with summable squares; fixed rules
/// are rejected.
template <typename Scalar>
SolverTraceT<Scalar> mgra2_solve(const ProblemInstanceT<Scalar>& instance,
                                 const StepRuleT<Scalar>& betas,
                                 const SolverOptionsT<Scalar>& options = {}) {
  detail::validate_options(options);
  detail::require(betas.kind() != StepRuleKind::fixed,
                  "mgra2_solve: beta rule must have summable squares");
  const ProblemConstantsT<Scalar> k = instance.bifunction.constants();
  detail::require(instance.box.contains(instance.xbar_start),
                  "mgra2_solve: x_0 (xbar_start) outside the box");

  SolverTraceT<Scalar> trace;
  detail::TraceBuilder<Scalar> builder(
      trace, instance, options,
      options.residual_lambda.value_or(detail::default_mgra_residual_lambda(k)));

  const Scalar phi = golden_ratio<Scalar>();
  VectorX<Scalar> y = instance.x_start;     // y_1
  VectorX<Scalar> x = instance.xbar_start;  // x_0
  builder.start();
  builder.record(0, x, y);

  for (int n = 1; n <= options.max_iterations; ++n) {
    x = ((phi - Scalar(1)) * y + x) / phi;
    const VectorX<Scalar> g = subgradient_at_diagonal(instance.bifunction, y);
    const Scalar beta_n = betas.at(n);
    detail::require(beta_n > Scalar(0), "mgra2_solve: beta rule produced beta <= 0");
    const Scalar lambda_n = beta_n / std::max(Scalar(1), g.norm());
    y = project_box((x - lambda_n * g).eval(), instance.box);
    trace.iterations = n;

    if (builder.due(n)) {
      const Scalar d = builder.record(n, x, y);
      if (d <= options.stop_residual) {
        trace.reason = StopReason::residual_met;
        return trace;
      }
    }
  }
  if (trace.records.empty() || trace.records.back().n != trace.iterations)
    builder.record(trace.iterations, x, y);
  trace.reason = StopReason::max_iterations;
  return trace;
}

}  // namespace goldeneq

#include "goldeneq/rate.hpp"

#include <doctest.h>

#include "goldeneq/solvers.hpp"
#include "test_support.hpp"

using namespace goldeneq;
using test_support::scalar_instance;
using test_support::seeded_instance;

TEST_CASE("contraction roots at the endpoints") {
  CHECK(contraction_root(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(companion_root(0.0) == doctest::Approx(0.0).epsilon(1e-15));

  const double inv_sqrt_phi = 1.0 / std::sqrt(golden_ratio<double>());
  CHECK(contraction_root(1.0) == doctest::Approx(inv_sqrt_phi).epsilon(1e-12));
  CHECK(companion_root(1.0) == doctest::Approx(inv_sqrt_phi).epsilon(1e-12));
}

TEST_CASE("certificate identities on sampled admissible parameters") {
  const double phi = golden_ratio<double>();
  std::mt19937_64 gen(101);
  for (int trial = 0; trial < 1000; ++trial) {
    ProblemConstants k;
    k.c1 = k.c2 = rng::uniform(gen, 0.05, 2.0);
    k.gamma = rng::uniform(gen, 1e-4, 1.0) * 2.0 * k.c1;  // gamma <= ||P-Q|| = 2 c1
    const double lambda = rng::uniform(gen, 1e-3, 1.0 - 1e-9) * phi / (4.0 * k.c1);
    const RateCertificate cert = rate_certificate(lambda, k);

    CHECK(cert.alpha == doctest::Approx(2.0 * lambda * k.gamma).epsilon(1e-15));
    CHECK(std::abs(1.0 - cert.alpha - cert.r2 + cert.r1) <= 1e-12);
    CHECK(std::abs(cert.alpha / phi - cert.r1 * cert.r2) <= 1e-12);
    CHECK(cert.r1 > 0.0);
    CHECK(cert.r2 > 0.0);
    CHECK(cert.r2 < 1.0);
    CHECK(cert.epsilon > 0.0);
    CHECK(cert.epsilon < 1.0);
    CHECK(cert.theta > 0.0);
    CHECK(cert.theta < 1.0);
  }
}

TEST_CASE("r2 decreases strictly in alpha") {
  double prev = contraction_root(0.0);
  for (int i = 1; i <= 64; ++i) {
    const double t = 0.05 * i;
    const double cur = contraction_root(t);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("rate_certificate validates its arguments") {
  ProblemConstants k{0.5, 0.5, 1.0};
  const double bound = golden_ratio<double>() / 2.0;
  CHECK_THROWS_AS(rate_certificate(0.0, k), std::invalid_argument);
  CHECK_THROWS_AS(rate_certificate(bound, k), std::invalid_argument);
  CHECK_THROWS_AS(rate_certificate(0.5, ProblemConstants{0.0, 0.0, 1.0}),
                  std::invalid_argument);

  SUBCASE("epsilon is the smallest admissible value plus a guard") {
    const RateCertificate cert = rate_certificate(0.5, k);
    CHECK(cert.epsilon ==
          doctest::Approx(4.0 * 0.5 * 0.5 / golden_ratio<double>() + 1e-9).epsilon(1e-12));
  }
}

TEST_CASE("certificate_bound_M") {
  const auto k = scalar_instance().bifunction.constants();
  const RateCertificate cert = rate_certificate(0.5, k);

  SUBCASE("zero at the solution") {
    const auto inst = scalar_instance(0.0, 0.0);
    const SolverTrace trace = gra_solve(inst, 0.5);
    const Eigen::VectorXd x_star = Eigen::VectorXd::Zero(1);
    CHECK(certificate_bound_M(cert, trace, x_star) <= 1e-25);
  }

  SUBCASE("unit start gives 1 + r1") {
    const auto inst = scalar_instance(1.0, 1.0);
    SolverOptions options;
    options.stop_residual = 0.0;
    options.max_iterations = 5;
    const SolverTrace trace = gra_solve(inst, 0.5, options);
    const Eigen::VectorXd x_star = Eigen::VectorXd::Zero(1);
    CHECK(certificate_bound_M(cert, trace, x_star) ==
          doctest::Approx(1.0 + cert.r1).epsilon(1e-12));
  }

  SUBCASE("matches direct recomputation from the iterates") {
    const auto inst = seeded_instance(10, 67);
    const auto kk = inst.bifunction.constants();
    const double lambda = 0.6 * golden_ratio<double>() / (4.0 * kk.c1);
    SolverOptions options;
    options.stop_residual = 1e-14;
    options.max_iterations = 10000;
    const SolverTrace trace = gra_solve(inst, lambda, options);
    const Eigen::VectorXd x_star = trace.records.back().x;
    const RateCertificate c = rate_certificate(lambda, kk);

    const double phi = golden_ratio<double>();
    const double weight = phi / (phi - 1.0);
    const double a0 = weight * (trace.records[0].anchor - x_star).squaredNorm();
    const double a1 = weight * (trace.records[1].anchor - x_star).squaredNorm();
    const double direct = ((phi - 1.0) / phi) * (a1 + c.r1 * a0);
    CHECK(certificate_bound_M(c, trace, x_star) ==
          doctest::Approx(direct).epsilon(1e-12));
  }

  SUBCASE("short traces are rejected") {
    const auto inst = scalar_instance(1.0, 1.0);
    SolverOptions options;
    options.max_iterations = 0;
    const SolverTrace trace = gra_solve(inst, 0.5, options);
    CHECK_THROWS_AS(certificate_bound_M(cert, trace, Eigen::VectorXd::Zero(1)),
                    std::invalid_argument);
  }
}

TEST_CASE("fit_rate") {
  SUBCASE("exact geometric decay") {
    std::vector<double> seq;
    double v = 3.0;
    for (int i = 0; i < 60; ++i) {
      seq.push_back(v);
      v *= 0.5;
    }
    CHECK(fit_rate(seq, 0) == doctest::Approx(0.5).epsilon(1e-10));
  }

  SUBCASE("constant sequence") {
    const std::vector<double> seq(40, 2.5);
    CHECK(fit_rate(seq, 5) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("nonpositive residuals and short windows are rejected") {
    std::vector<double> seq(40, 1.0);
    seq[20] = 0.0;
    CHECK_THROWS_AS(fit_rate(seq, 0), std::invalid_argument);
    CHECK_THROWS_AS(fit_rate(std::vector<double>(5, 1.0), 0), std::invalid_argument);
    CHECK_THROWS_AS(fit_rate(std::vector<double>(15, 1.0), 10), std::invalid_argument);
  }

  SUBCASE("observed decay of the scalar problem is certified") {
    const auto inst = scalar_instance(1.0, 1.0);
    SolverOptions options;
    options.stop_residual = 1e-22;
    options.max_iterations = 300;
    const SolverTrace trace = gra_solve(inst, 0.5, options);
    const RateCertificate cert =
        rate_certificate(0.5, inst.bifunction.constants());

    std::vector<double> dist2;
    for (const auto& rec : trace.records) {
      const double d = rec.x.squaredNorm();  // x* = 0
      if (d > 0.0) dist2.push_back(d);
    }
    const double rho = fit_rate(dist2, dist2.size() / 5);
    CHECK(rho <= cert.theta);
  }
}

TEST_CASE("counterexample recurrence") {
  const auto steps = StepRule::diminishing(1.0);

  SUBCASE("first values") {
    const std::vector<double> xs = counterexample_run(1.0, 1.0, steps, 2);
    REQUIRE(xs.size() == 3);
    CHECK(xs[0] == 1.0);
    CHECK(xs[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(xs[2] == doctest::Approx(0.8090169943749475).epsilon(1e-15));
  }

  SUBCASE("positive starts stay positive") {
    std::mt19937_64 gen(71);
    for (int trial = 0; trial < 10; ++trial) {
      const double x0 = rng::uniform(gen, 0.01, 3.0);
      const double y1 = rng::uniform(gen, 0.01, 3.0);
      const auto rule = StepRule::custom(
          [&](int) { return 0.999; });  // any schedule inside (0, 1)
      const std::vector<double> xs = counterexample_run(x0, y1, rule, 500);
      for (double v : xs) CHECK(v > 0.0);
    }
  }

  SUBCASE("consecutive ratios approach one") {
    const std::vector<double> xs = counterexample_run(1.0, 1.0, steps, 20000);
    double worst = 0.0;
    for (std::size_t n = 10000; n < xs.size() - 1; ++n)
      worst = std::max(worst, 1.0 - xs[n + 1] / xs[n]);
    CHECK(worst <= 1e-3);
  }

  SUBCASE("invalid schedules and lengths are rejected") {
    CHECK_THROWS_AS(counterexample_run(1.0, 1.0, StepRule::diminishing(2.5), 10),
                    std::invalid_argument);  // lambda_1 = 1.25
    CHECK_THROWS_AS(counterexample_run(1.0, 1.0, steps, 1), std::invalid_argument);
  }
}

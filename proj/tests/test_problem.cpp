#include "goldeneq/problem.hpp"

#include <doctest.h>

#include "test_support.hpp"

using namespace goldeneq;
using test_support::sample_in_box;
using test_support::scalar_instance;
using test_support::seeded_instance;

TEST_CASE("golden ratio identities") {
  const double phi = golden_ratio<double>();
  CHECK(std::abs(phi * phi - (phi + 1.0)) <= 1e-15);
  CHECK(std::abs(phi - 1.0 - 1.0 / phi) <= 1e-15);
}

TEST_CASE("box construction and membership") {
  const BoxSet box = BoxSet::cube(3, -2.0, 5.0);
  CHECK(box.dim() == 3);
  CHECK(box.contains(Eigen::Vector3d(0.0, -2.0, 5.0)));
  CHECK_FALSE(box.contains(Eigen::Vector3d(0.0, 0.0, 5.1)));
  CHECK_FALSE(box.contains(Eigen::Vector2d(0.0, 0.0)));

  Eigen::VectorXd lo(2), hi(2);
  lo << 0.0, 1.0;
  hi << 1.0, 0.5;
  CHECK_THROWS_AS(BoxSet(lo, hi), std::invalid_argument);
  CHECK_THROWS_AS(BoxSet(Eigen::VectorXd(), Eigen::VectorXd()), std::invalid_argument);
  CHECK_THROWS_AS(BoxSet(lo, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("eval matches the inner-product form") {
  const auto inst = scalar_instance();
  const auto& f = inst.bifunction;

  Eigen::VectorXd x(1), y(1);
  x << 2.0;
  y << 3.0;
  CHECK(eval(f, x, y) == doctest::Approx(2.0).epsilon(1e-15));

  SUBCASE("two-dimensional spot value") {
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd qv(2);
    qv << 1.0, 0.0;
    AffineBifunction g(id, id, qv);
    CHECK(eval(g, Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 1.0)) ==
          doctest::Approx(3.0).epsilon(1e-15));
  }

  SUBCASE("f(x, x) = 0 on random points") {
    const auto inst8 = seeded_instance(8, 21);
    std::mt19937_64 gen(3);
    for (int k = 0; k < 50; ++k) {
      const Eigen::VectorXd v = sample_in_box(gen, inst8.box);
      CHECK(std::abs(eval(inst8.bifunction, v, v)) <= 1e-12);
    }
  }

  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(eval(f, Eigen::Vector2d(0, 0), y), std::invalid_argument);
    CHECK_THROWS_AS(eval(f, x, Eigen::Vector3d(0, 0, 0)), std::invalid_argument);
  }
}

TEST_CASE("subgradient_at_diagonal") {
  SUBCASE("scalar case: (P + Q) y + q = y") {
    const auto inst = scalar_instance();
    Eigen::VectorXd y(1);
    y << 3.0;
    CHECK(subgradient_at_diagonal(inst.bifunction, y)[0] ==
          doctest::Approx(3.0).epsilon(1e-15));
  }

  SUBCASE("P = Q = 0 gives the constant q") {
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2, 2);
    Eigen::VectorXd qv(2);
    qv << 0.5, -1.5;
    AffineBifunction f(z, z, qv);
    const Eigen::VectorXd g = subgradient_at_diagonal(f, Eigen::Vector2d(7.0, -3.0));
    CHECK((g - qv).norm() == 0.0);
  }

  SUBCASE("matches central finite differences of z -> f(y, z)") {
    const auto inst = seeded_instance(5, 11);
    const auto& f = inst.bifunction;
    std::mt19937_64 gen(5);
    const Eigen::VectorXd y = sample_in_box(gen, inst.box);
    const Eigen::VectorXd g = subgradient_at_diagonal(f, y);
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < 5; ++i) {
      Eigen::VectorXd up = y, dn = y;
      up[i] += h;
      dn[i] -= h;
      const double fd = (eval(f, y, up) - eval(f, y, dn)) / (2.0 * h);
      CHECK(std::abs(fd - g[i]) <= 1e-6);
    }
  }

  SUBCASE("dimension mismatch") {
    const auto inst = scalar_instance();
    CHECK_THROWS_AS(subgradient_at_diagonal(inst.bifunction, Eigen::Vector2d(0, 0)),
                    std::invalid_argument);
  }
}

TEST_CASE("derive_constants") {
  SUBCASE("scalar problem") {
    const auto k = derive_constants(scalar_instance().bifunction);
    CHECK(k.c1 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(k.c2 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(k.gamma == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("diagonal spectrum {2, 1}") {
    Eigen::MatrixXd p = Eigen::Vector2d(2.0, 1.0).asDiagonal();
    AffineBifunction f(p, Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(2));
    const auto k = derive_constants(f);
    CHECK(k.c1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(k.c2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(k.gamma == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("P = Q is rejected") {
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
    AffineBifunction f(id, id, Eigen::VectorXd::Zero(2));
    CHECK_THROWS_WITH_AS(derive_constants(f),
                         doctest::Contains("not strongly pseudomonotone"),
                         std::invalid_argument);
  }
}

TEST_CASE("bifunction construction rejects invalid data") {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::VectorXd qv = Eigen::VectorXd::Zero(2);

  SUBCASE("asymmetric Q beyond tolerance") {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(2, 2);
    q(0, 1) = 1e-11;
    CHECK_THROWS_AS(AffineBifunction(id, q, qv), std::invalid_argument);
  }
  SUBCASE("asymmetry within tolerance is accepted") {
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(2, 2);
    q(0, 1) = 5e-13;
    q(1, 0) = 0.0;
    CHECK_NOTHROW(AffineBifunction(2.0 * id, q, qv));
  }
  SUBCASE("asymmetric P - Q") {
    Eigen::MatrixXd p = 2.0 * id;
    p(0, 1) = 1e-3;
    CHECK_THROWS_AS(AffineBifunction(p, Eigen::MatrixXd::Zero(2, 2), qv),
                    std::invalid_argument);
  }
  SUBCASE("indefinite Q") {
    Eigen::MatrixXd q = Eigen::Vector2d(1.0, -0.5).asDiagonal();
    CHECK_THROWS_AS(AffineBifunction(2.0 * id, q, qv), std::invalid_argument);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(AffineBifunction(id, Eigen::MatrixXd::Zero(3, 3), qv),
                    std::invalid_argument);
    CHECK_THROWS_AS(AffineBifunction(id, Eigen::MatrixXd::Zero(2, 2),
                                     Eigen::VectorXd::Zero(3)),
                    std::invalid_argument);
  }
}

TEST_CASE("strong pseudomonotonicity identity on sampled pairs") {
  const auto inst = seeded_instance(6, 31);
  const auto& f = inst.bifunction;
  const auto k = derive_constants(f);
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd x = sample_in_box(gen, inst.box);
    const Eigen::VectorXd y = sample_in_box(gen, inst.box);
    const double sum = eval(f, x, y) + eval(f, y, x);
    const Eigen::VectorXd d = y - x;
    const double quad = ((f.Q() - f.P()) * d).dot(d);
    const double scale = std::max({1.0, std::abs(sum), std::abs(quad)});
    CHECK(std::abs(sum - quad) <= 1e-9 * scale);
    CHECK(sum <= -k.gamma * d.squaredNorm() + 1e-9 * scale);
  }
}

TEST_CASE("Lipschitz-type inequality on sampled triples") {
  const auto inst = seeded_instance(8, 47);
  const auto& f = inst.bifunction;
  const auto k = derive_constants(f);
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::VectorXd x = sample_in_box(gen, inst.box);
    const Eigen::VectorXd y = sample_in_box(gen, inst.box);
    const Eigen::VectorXd z = sample_in_box(gen, inst.box);
    const double lhs = eval(f, x, y) + eval(f, y, z);
    const double rhs = eval(f, x, z) - k.c1 * (x - y).squaredNorm() -
                       k.c2 * (y - z).squaredNorm();
    CHECK(lhs >= rhs - 1e-9 * std::max({1.0, std::abs(lhs), std::abs(rhs)}));
  }
}

TEST_CASE("instance validation") {
  Eigen::MatrixXd p(1, 1), q(1, 1);
  p << 1.0;
  q << 0.0;
  const AffineBifunction f(p, q, Eigen::VectorXd::Zero(1));
  const BoxSet box = BoxSet::cube(1, -2.0, 5.0);
  Eigen::VectorXd outside(1), inside(1);
  outside << 9.0;
  inside << 1.0;
  CHECK_THROWS_AS(ProblemInstance(f, box, outside, inside), std::invalid_argument);
  CHECK_NOTHROW(ProblemInstance(f, box, inside, outside));  // xbar_start may leave the box
  CHECK_THROWS_AS(ProblemInstance(f, BoxSet::cube(2, -2.0, 5.0), inside, inside),
                  std::invalid_argument);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "bsd/cubature.hpp"
#include "bsd/harmonics.hpp"
#include "bsd/legendre.hpp"
#include "bsd/simulate.hpp"
#include "bsd/sphere.hpp"
#include "oracles.hpp"

using namespace bsd;

TEST_CASE("sphere points round trip between angles and vectors") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const SphPoint p = SphPoint::from_angles(std::acos(1 - 2 * u(rng)), 2 * kPi * u(rng));
    CHECK(p.x * p.x + p.y * p.y + p.z * p.z == doctest::Approx(1.0).epsilon(1e-12));
    const SphPoint q = SphPoint::from_cartesian(p.x, p.y, p.z);
    CHECK(std::abs(q.theta - p.theta) < 1e-12);
    CHECK(std::abs(q.phi - p.phi) < 1e-12);
  }
  CHECK_THROWS_AS(SphPoint::from_cartesian(0, 0, 0), std::domain_error);
  CHECK(geodesic_distance(SphPoint::from_cartesian(0, 0, 1), SphPoint::from_cartesian(0, 0, -1)) ==
        doctest::Approx(kPi));
}

TEST_CASE("eval_legendre") {
  CHECK(eval_legendre(0, 0, 0.3) == 1.0);
  CHECK(eval_legendre(1, 0, 1.0) == 1.0);
  CHECK(eval_legendre(2, 1, 0.5) == doctest::Approx(oracle::legendre_series(2, 1, 0.5)).epsilon(1e-12));
  CHECK(std::abs(eval_legendre(2, 1, 0.5) - oracle::legendre_series(2, 1, 0.5)) < 1e-12);

  SUBCASE("agrees with the explicit series") {
    for (int l = 0; l <= 12; ++l) {
      for (int m = 0; m <= l; ++m) {
        for (double t : {-0.95, -0.3, 0.0, 0.41, 0.99}) {
          const double ref = oracle::legendre_series(l, m, t);
          CHECK(std::abs(eval_legendre(l, m, t) - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
        }
      }
    }
  }
  CHECK_THROWS_AS(eval_legendre(2, 3, 0.1), std::domain_error);
  CHECK_THROWS_AS(eval_legendre(2, 1, 1.5), std::domain_error);
}

TEST_CASE("eval_sh") {
  const SphPoint north = SphPoint::from_angles(0, 0);
  CHECK(eval_sh(0, 0, SphPoint::from_angles(1.1, 2.3)) == doctest::Approx(0.2820947918).epsilon(1e-10));
  CHECK(eval_sh(1, 0, north) == doctest::Approx(0.4886025119).epsilon(1e-10));
  CHECK_THROWS_AS(eval_sh(2, 3, north), std::domain_error);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const SphPoint p = SphPoint::from_angles(kPi * u(rng), 2 * kPi * u(rng));
    for (int l = 0; l <= 10; ++l) {
      for (int m = -l; m <= l; ++m) CHECK(std::abs(eval_sh(l, m, p) - oracle::real_sh(l, m, p.theta, p.phi)) < 1e-11);
    }
  }

  const double self = oracle::sphere_integral(
      [](double t, double ph) {
        const double y = oracle::real_sh(2, 1, t, ph);
        return y * y;
      },
      8, 8);
  CHECK(self == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("high-degree recurrence stays finite") {
  const auto v = sh_values(512, SphPoint::from_angles(0.3, 1.0));
  for (double y : v) REQUIRE(std::isfinite(y));
  // Unsold: sum_m Y_lm^2 = (2l+1)/(4pi)
  double s = 0;
  for (int m = -512; m <= 512; ++m) s += v[sh_index(512, m)] * v[sh_index(512, m)];
  CHECK(s == doctest::Approx(1025 / kFourPi).epsilon(1e-10));
}

TEST_CASE("legendre_kernel") {
  CHECK(legendre_kernel(0, 0.37) == doctest::Approx(1 / kFourPi));
  CHECK(legendre_kernel(2, 1.0) == doctest::Approx(5 / kFourPi).epsilon(1e-12));
  CHECK_THROWS_AS(legendre_kernel(2, 1.01), std::domain_error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const SphPoint x = SphPoint::from_angles(std::acos(1 - 2 * u(rng)), 2 * kPi * u(rng));
    const SphPoint y = SphPoint::from_angles(std::acos(1 - 2 * u(rng)), 2 * kPi * u(rng));
    for (int l = 0; l <= 8; ++l) {
      double sum = 0;
      for (int m = -l; m <= l; ++m) sum += eval_sh(l, m, x) * eval_sh(l, m, y);
      CHECK(std::abs(legendre_kernel(l, std::clamp(x.dot(y), -1.0, 1.0)) - sum) < 1e-10);
    }
  }
}

TEST_CASE("orthonormality under a degree-20 rule") {
  const CubatureSet q = product_rule(20);
  std::vector<std::vector<double>> y;
  for (const SphPoint& p : q.nodes()) y.push_back(sh_values(10, p));
  double worst = 0;
  for (int a = 0; a < sh_count(10); ++a) {
    for (int b = 0; b < sh_count(10); ++b) {
      double s = 0;
      for (std::size_t k = 0; k < q.size(); ++k) s += q.weights()[k] * y[k][a] * y[k][b];
      worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("reproduction property of the projection kernels") {
  const CubatureSet q = product_rule(12);
  const SphPoint x = SphPoint::from_angles(0.7, 0.2);
  const SphPoint z = SphPoint::from_angles(2.1, 4.0);
  for (int l = 0; l <= 6; ++l) {
    for (int k = 0; k <= 6; ++k) {
      double s = 0;
      for (std::size_t i = 0; i < q.size(); ++i) {
        const SphPoint& y = q.nodes()[i];
        s += q.weights()[i] * legendre_kernel(l, std::clamp(x.dot(y), -1.0, 1.0)) *
             legendre_kernel(k, std::clamp(y.dot(z), -1.0, 1.0));
      }
      const double expected = l == k ? legendre_kernel(l, x.dot(z)) : 0.0;
      CHECK(std::abs(s - expected) < 1e-9);
    }
  }
}

TEST_CASE("analyze") {
  const CubatureSet q = product_rule(24);
  SUBCASE("constant") {
    const HarmonicCoeffs c = analyze([](const SphPoint&) { return 1 / std::sqrt(kFourPi); }, 10, q);
    CHECK(c.at(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
    for (int i = 1; i < sh_count(10); ++i) CHECK(std::abs(c.data()[i]) < 1e-10);
  }
  SUBCASE("single harmonic") {
    const HarmonicCoeffs c = analyze([](const SphPoint& p) { return eval_sh(3, 2, p); }, 10, q);
    for (int l = 0; l <= 10; ++l) {
      for (int m = -l; m <= l; ++m) CHECK(std::abs(c.at(l, m) - (l == 3 && m == 2 ? 1.0 : 0.0)) < 1e-10);
    }
  }
  SUBCASE("rejects an inexact rule") {
    CHECK_THROWS_AS(analyze([](const SphPoint&) { return 1.0; }, 13, q), std::invalid_argument);
  }
  SUBCASE("spike density against a brute-force quadrature") {
    const TargetDensity f = TargetDensity::exp_spike();
    const HarmonicCoeffs c = project_target(f, 16);
    for (auto [l, m] : {std::pair{0, 0}, {1, -1}, {4, 2}, {9, -7}, {16, 0}, {16, 13}}) {
      const double ref = oracle::sphere_integral_split(
          [&](double t, double ph) { return f(SphPoint::from_angles(t, ph)) * oracle::real_sh(l, m, t, ph); }, 80);
      CHECK(std::abs(c.at(l, m) - ref) < 1e-8);
    }
  }
}

TEST_CASE("synthesize") {
  const HarmonicCoeffs zero(6);
  CHECK(synthesize(zero, SphPoint::from_angles(0.4, 0.4)) == 0.0);

  HarmonicCoeffs y10(4);
  y10.at(1, 0) = 1.0;
  for (double t : {0.0, 0.5, 1.9, kPi}) {
    const SphPoint p = SphPoint::from_angles(t, 1.3);
    CHECK(std::abs(synthesize(y10, p) - eval_sh(1, 0, p)) < 1e-12);
  }
}

TEST_CASE("round trip and Parseval on random band-limited functions") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const HarmonicCoeffs c = oracle::random_coeffs(8, rng);
    const CubatureSet q = product_rule(16);
    const std::vector<double> values = synthesize(c, q.nodes());
    CHECK(oracle::max_abs_diff(values, evaluate_on(c, q)) < 1e-12);
    const HarmonicCoeffs back = analyze(values, 8, q);
    CHECK(oracle::max_abs_diff(c.data(), back.data()) < 1e-9);

    double l2 = 0;
    for (std::size_t k = 0; k < q.size(); ++k) l2 += q.weights()[k] * values[k] * values[k];
    CHECK(std::abs(l2 - c.squared_norm()) < 1e-9 * c.squared_norm());
  }
}

TEST_CASE("ring transform matches pointwise evaluation at high degree") {
  std::mt19937_64 rng(12);
  const HarmonicCoeffs c = oracle::random_coeffs(60, rng);
  const CubatureSet q = product_rule(125);
  const auto fast = evaluate_on(c, q);
  std::vector<SphPoint> some;
  std::vector<double> expected;
  for (std::size_t k = 0; k < q.size(); k += 97) {
    some.push_back(q.nodes()[k]);
    expected.push_back(fast[k]);
  }
  CHECK(oracle::max_abs_diff(synthesize(c, some), expected) < 1e-10);
  const HarmonicCoeffs back = analyze(fast, 60, q);
  CHECK(oracle::max_abs_diff(c.data(), back.data()) < 1e-9);
}

TEST_CASE("HarmonicCoeffs helpers") {
  HarmonicCoeffs c(3);
  CHECK(c.effective_lmax() == -1);
  c.at(2, -1) = 2.0;
  CHECK(c.effective_lmax() == 2);
  CHECK(c.block(2).size() == 5);
  CHECK(c.block_squared_norm(2) == 4.0);
  const HarmonicCoeffs bigger = c.resized(6);
  CHECK(bigger.lmax() == 6);
  CHECK(bigger.at(2, -1) == 2.0);
  CHECK(bigger.squared_norm() == 4.0);
  HarmonicCoeffs sum = c;
  sum += c;
  CHECK(sum.at(2, -1) == 4.0);
}

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "glasslocal/scalar.hpp"

using namespace glasslocal;

TEST(Quadrature, GaussHermiteMoments) {
  const auto rule = QuadratureRule::gauss_hermite(81);
  double w = 0, m1 = 0, m2 = 0, m4 = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double z = rule.nodes[i];
    w += rule.weights[i];
    m1 += rule.weights[i] * z;
    m2 += rule.weights[i] * z * z;
    m4 += rule.weights[i] * z * z * z * z;
  }
  EXPECT_NEAR(w, 1.0, 1e-12);
  EXPECT_NEAR(m1, 0.0, 1e-12);
  EXPECT_NEAR(m2, 1.0, 1e-10);
  EXPECT_NEAR(m4, 3.0, 1e-9);
}

TEST(Quadrature, CompositeRuleMoments) {
  const auto& ch = default_channel();
  for (double gamma : {0.5, 3.0, 40.0}) {
    EXPECT_NEAR(ch.expect(gamma, [](double) { return 1.0; }), 1.0, 1e-13) << gamma;
    // V = gamma + sqrt(gamma) Z has mean gamma and variance gamma
    EXPECT_NEAR(ch.expect(gamma, [](double v) { return v; }), gamma, 1e-11 * gamma) << gamma;
    EXPECT_NEAR(ch.expect(gamma, [gamma](double v) { return (v - gamma) * (v - gamma); }), gamma, 1e-11 * gamma) << gamma;
  }
}

// Reference values from tests/oracles/scalar_oracles.py (adaptive quadrature
// and a 1e7-sample Monte Carlo run, independent of this library).
TEST(Psi, PinnedValues) {
  EXPECT_EQ(psi(0.0), 0.0);
  EXPECT_NEAR(psi(1.0), 0.5503, 5e-4);  // Monte Carlo, 3 digits
  EXPECT_NEAR(psi(1.0), 0.5504004907933273, 1e-13);
  EXPECT_NEAR(psi_prime(1.0), 0.31655534540439456, 1e-12);
}

TEST(Psi, LimitsAndTail) {
  EXPECT_LE(psi(100.0), 1.0);
  EXPECT_GT(psi(100.0), 1.0 - 1e-15);
  EXPECT_LE(psi(1e4), 1.0);
  EXPECT_NEAR(psi(1e4), 1.0, 1e-15);
  // continuity across the asymptotic switchover
  const double g = ChannelIntegrator::kAsymptoticGamma;
  EXPECT_NEAR(psi(g * (1 - 1e-9)), psi(g * (1 + 1e-9)), 1e-15);
  EXPECT_NEAR(psi_prime(g * (1 - 1e-9)), psi_prime(g * (1 + 1e-9)), 1e-30);
  EXPECT_THROW(psi(-1e-3), DomainError);
}

TEST(Psi, MonotoneConcave) {
  double prev = psi(0.0), prev_diff = 1e300;
  for (int i = 1; i <= 200; ++i) {
    const double g = 0.05 * i;
    const double v = psi(g);
    EXPECT_GT(v - prev, 0.0) << g;
    EXPECT_LT((v - prev) - prev_diff, 1e-8) << g;
    prev_diff = v - prev;
    prev = v;
  }
}

TEST(PsiPrime, SteinFormMatchesFiniteDifferences) {
  EXPECT_EQ(psi_prime(0.0), 1.0);
  for (double g : {0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 25.0, 50.0}) {
    const double h = 1e-5 * std::max(1.0, g);
    const double fd = (psi(g + h) - psi(g - h)) / (2 * h);
    EXPECT_NEAR(psi_prime(g), fd, 1e-6) << g;
    EXPECT_GT(psi_prime(g), 0.0) << g;
  }
}

TEST(Phi, InverseAndDerivative) {
  EXPECT_EQ(phi(0.0), 0.0);
  EXPECT_NEAR(phi_prime(0.0), 1.0, 1e-12);
  for (double q : {0.1, 0.5, 0.9, 0.999}) EXPECT_NEAR(psi(phi(q)), q, 1e-10) << q;
  for (double g : {0.2, 2.0, 20.0}) EXPECT_NEAR(phi(psi(g)), g, 1e-9 * std::max(1.0, g)) << g;
  EXPECT_NEAR(phi_prime(0.5), 1.0 / psi_prime(phi(0.5)), 1e-12);
  EXPECT_THROW(phi(1.0), DomainError);
  EXPECT_THROW(phi(-0.1), DomainError);
}

TEST(Phi, Convex) {
  const double h = 0.01;
  for (double q = 0.02; q < 0.97; q += 0.01) EXPECT_GE(phi(q + h) - 2 * phi(q) + phi(q - h), -1e-8) << q;
}

TEST(MutualInfo, ValuesAndImmse) {
  EXPECT_EQ(mutual_info_scalar(0.0), 0.0);
  EXPECT_NEAR(mutual_info_scalar(1.0), 0.3367, 5e-4);  // Monte Carlo, 3 digits
  EXPECT_NEAR(mutual_info_scalar(1.0), 0.33683082034683154, 1e-12);
  EXPECT_NEAR(mutual_info_scalar(1e4), std::numbers::ln2, 1e-12);
  EXPECT_LE(mutual_info_scalar(1e4), std::numbers::ln2);
  for (double g : {0.05, 0.5, 2.0, 8.0, 30.0}) {
    const double h = 1e-5;
    const double fd = (mutual_info_scalar(g + h) - mutual_info_scalar(g - h)) / (2 * h);
    EXPECT_NEAR(fd, 0.5 * (1.0 - psi(g)), 1e-5) << g;
  }
}

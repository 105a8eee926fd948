#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "glasslocal/state_evolution.hpp"

using namespace glasslocal;

namespace {

const MixtureSpec kSk = MixtureSpec::sk();

}  // namespace

// Pinned values below come from tests/oracles/scalar_oracles.py, which
// iterates the recursion with adaptive quadrature at tolerance 1e-14.

TEST(SeRecursion, ZeroTimeHasZeroFixedPoint) {
  for (double beta : {0.2, 0.5, 0.9}) {
    const auto prof = se_recursion(kSk, beta, 0.0, 5);
    EXPECT_EQ(prof.q_star, 0.0);
    EXPECT_TRUE(prof.converged);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(mse_prediction(prof, k), 1.0);
  }
}

TEST(SeRecursion, ZeroBetaDecouples) {
  const auto prof = se_recursion(kSk, 0.0, 1.3, 6);
  for (std::size_t k = 1; k < prof.q_sequence.size(); ++k) EXPECT_EQ(prof.q_sequence[k], psi(1.3));
}

TEST(SeRecursion, PinnedSkProfile) {
  const auto prof = se_recursion(kSk, 0.5, 1.0, 5);
  const double seq[] = {0.0, 0.5504004907933273, 0.5915320593199856, 0.5944213280127555, 0.5946233703058985, 0.5946374943589094};
  ASSERT_EQ(prof.q_sequence.size(), 6u);
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(prof.q_sequence[k], seq[k], 1e-11) << k;
  EXPECT_NEAR(prof.q_star, 0.5946385559062545, 1e-6);
  EXPECT_NEAR(prof.q_star, 0.5946385559062545, 1e-11);
  EXPECT_NEAR(mse_prediction(prof, 3), 1.0 - 0.5946233703058985, 1e-11);
  EXPECT_TRUE(prof.converged);
  EXPECT_NEAR(prof.gamma_star, 0.25 * prof.q_star, 1e-15);
}

TEST(SeRecursion, ProfileInvariants) {
  for (double beta : {0.3, 0.7, 0.95})
    for (double t : {0.1, 1.0, 4.0}) {
      const auto prof = se_recursion(kSk, beta, t, 30);
      EXPECT_EQ(prof.q_sequence.front(), 0.0);
      for (std::size_t k = 1; k < prof.q_sequence.size(); ++k) {
        EXPECT_GE(prof.q_sequence[k], prof.q_sequence[k - 1] - 1e-15);
        EXPECT_LE(prof.q_sequence[k], prof.q_star + 1e-11);  // q_star is solved to 1e-12
      }
      EXPECT_LE(std::abs(prof.q_star - se_map(kSk, beta, t, prof.q_star)), 1e-10);
      EXPECT_NEAR(mse_prediction(se_recursion(kSk, beta, t, 2000), 1999), 1.0 - prof.q_star, 1e-12);
    }
}

TEST(SeRecursion, RejectsBadArguments) {
  EXPECT_THROW(se_recursion(kSk, -0.1, 1.0, 3), DomainError);
  EXPECT_THROW(se_recursion(kSk, 0.5, -1.0, 3), DomainError);
  EXPECT_THROW(se_recursion(kSk, 0.5, 1.0, 0), DomainError);
  const auto prof = se_recursion(kSk, 0.5, 1.0, 3);
  EXPECT_THROW(mse_prediction(prof, 3), std::out_of_range);
}

TEST(SeRecursion, CapWithoutConvergenceIsFlagged) {
  const auto prof = se_recursion(kSk, 0.5, 1.0, 2, {.tolerance = 0.0, .max_iterations = 3});
  EXPECT_FALSE(prof.converged);
  EXPECT_EQ(prof.iterations, 3);
}

TEST(SeRecursion, Contraction) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const MixtureSpec mixed({{2, 0.5}, {3, 0.3}});
  const double b1 = beta1(mixed);
  for (const auto& [spec, b1v] : {std::pair{kSk, 1.0}, std::pair{mixed, b1}}) {
    const double beta = 0.8 * b1v;
    for (int k = 0; k < 200; ++k) {
      const double q1 = u(gen), q2 = u(gen), t = 5.0 * u(gen);
      const double lhs = std::abs(se_map(spec, beta, t, q1) - se_map(spec, beta, t, q2));
      EXPECT_LE(lhs, (beta / b1v) * (beta / b1v) * std::abs(q1 - q2) + 1e-9);
    }
  }
}

TEST(SeRecursion, GeometricConvergence) {
  const double beta = 0.7;
  for (double t : {0.05, 0.5, 3.0}) {
    const auto prof = se_recursion(kSk, beta, t, 25);
    for (std::size_t k = 0; k < prof.q_sequence.size(); ++k)
      EXPECT_LE(1.0 - prof.q_sequence[k] / prof.q_star, std::pow(beta, 2.0 * k) + 1e-6) << t << " " << k;
  }
}

TEST(SeRecursion, FixedPointScalesLinearlyInT) {
  for (int i = 1; i <= 50; ++i) {
    const double t = 0.2 * i;
    const double r = q_star(kSk, 0.6, t) / t;
    EXPECT_GE(r, 0.01);
    EXPECT_LE(r, 100.0);
  }
}

TEST(SeFixedPoints, MultipleRootsAboveBeta1) {
  bool found = false;
  for (double t = 0.0; t <= 0.5 && !found; t += 0.01) found = se_fixed_points(kSk, 1.5, t).size() >= 2;
  EXPECT_TRUE(found);
  const auto roots = se_fixed_points(kSk, 0.5, 1.0);
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_NEAR(roots[0], 0.5946385559062545, 1e-10);
}

TEST(QSchedule, PinnedSkTable) {
  const auto s = q_schedule(kSk, 0.5, 0.5, 4);
  const double expected[] = {0.0, 0.397952649275891, 0.5946385559062545, 0.715844253548597, 0.7963453553413299};
  ASSERT_EQ(s.q.size(), 5u);
  for (int l = 0; l < 5; ++l) EXPECT_NEAR(s.q[l], expected[l], 1e-10) << l;
  EXPECT_TRUE(s.all_converged());
  const auto fine = q_schedule(kSk, 0.8, 0.05, 200);
  for (std::size_t l = 1; l < fine.q.size(); ++l) EXPECT_GE(fine.q[l], fine.q[l - 1]);
  EXPECT_THROW(q_schedule(kSk, 0.5, 0.0, 4), DomainError);
  EXPECT_THROW(q_schedule(kSk, 0.5, 0.1, 0), DomainError);
}

TEST(PsiStar, Limits) {
  for (double beta : {0.3, 0.8}) {
    EXPECT_NEAR(psi_star(kSk, beta, 0.0), 0.5 * beta * beta * kSk.xi(1.0), 1e-12);
    EXPECT_NEAR(psi_star(kSk, beta, 400.0), std::numbers::ln2, 1e-6);
  }
}

TEST(PsiStar, DerivativeInT) {
  const double beta = 0.6, h = 1e-4;
  for (double t : {0.2, 1.0, 3.0}) {
    const double fd = (psi_star(kSk, beta, t + h) - psi_star(kSk, beta, t - h)) / (2 * h);
    EXPECT_NEAR(fd, 0.5 * (1.0 - q_star(kSk, beta, t)), 1e-4) << t;
  }
}

TEST(Thresholds, Sk) {
  const auto r = thresholds(kSk);
  EXPECT_NEAR(r.beta1, 1.0, 1e-3);
  EXPECT_NEAR(r.beta2, 1.0, 1e-3);
  EXPECT_EQ(r.beta3, 0.5);
  EXPECT_NEAR(r.beta_c_rs, 1.0, 2e-3);
  EXPECT_LE(r.beta1, r.beta_c_rs + 1e-3);
}

TEST(Thresholds, Beta1PureThree) {
  const auto spec = MixtureSpec::pure(3);
  const double b1 = beta1(spec);
  EXPECT_NEAR(b1, 0.9542650056491712, 1e-4);
  EXPECT_GE(b1, 1.0 / std::sqrt(spec.xi(1.0, 2)) - 1e-6);
  EXPECT_GE(beta_c_rs(spec), b1 - 1e-3);
}

TEST(Thresholds, Beta2PureFourAndBound) {
  EXPECT_NEAR(beta2(MixtureSpec::pure(4)), 0.8299405845895181, 1e-4);
  const MixtureSpec mixed({{2, 0.3}, {4, 0.7}});
  EXPECT_LE(beta2(mixed), 1.0 / std::sqrt(mixed.xi(0.0, 2)) + 1e-3);
  EXPECT_LE(beta_c_rs(mixed), 1.0 / std::sqrt(mixed.xi(0.0, 2)) + 2e-3);
  EXPECT_GE(beta_c_rs(mixed), beta1(mixed) - 1e-3);
}

TEST(Thresholds, Beta3Formula) {
  EXPECT_DOUBLE_EQ(beta3(MixtureSpec::pure(2, 1.0)), 1.0 / (2.0 * std::sqrt(2.0)));
  EXPECT_DOUBLE_EQ(beta3(MixtureSpec::pure(3), 0.25), 0.25 / std::sqrt(6.0 * std::log(6561.0)));
  EXPECT_THROW(beta3(MixtureSpec::pure(3), 0.0), DomainError);
}

TEST(BetaDyn, PureThreeMatchesBruteForce) {
  const auto b = beta_dyn(MixtureSpec::pure(3));
  ASSERT_TRUE(b.has_value());
  // scan returns the first grid point at or above the true threshold
  EXPECT_GE(*b, 1.0374249030834957 - 1e-6);
  EXPECT_LE(*b, 1.0374249030834957 + 1e-3 + 1e-6);
}

TEST(BetaDyn, LargePTrend) {
  const auto b50 = beta_dyn(MixtureSpec::pure(50));
  const auto b100 = beta_dyn(MixtureSpec::pure(100));
  const auto b200 = beta_dyn(MixtureSpec::pure(200));
  ASSERT_TRUE(b50 && b100 && b200);
  EXPECT_GT(*b50, *b100);
  EXPECT_GT(*b100, *b200);
  const double ratio = *b100 / std::sqrt(2.0 * std::log(100.0) / 100.0);
  EXPECT_GE(ratio, 0.7);
  EXPECT_LE(ratio, 1.3);
  EXPECT_NEAR(*b100, 0.354949717617584, 1e-3 + 1e-6);
}

TEST(BetaDyn, DynOverlapIsPsiOfLambdaSquared) {
  for (double lambda : {0.3, 1.0, 2.5, 10.0}) EXPECT_NEAR(dyn_overlap(lambda), psi(lambda * lambda), 1e-12);
}

TEST(Thresholds, JsonRecordsMethod) {
  const auto j = to_json(thresholds(kSk));
  EXPECT_TRUE(j.contains("method"));
  EXPECT_EQ(j["beta3"].get<double>(), 0.5);
  EXPECT_FALSE(j["beta3_heuristic_c0"].get<bool>());
}

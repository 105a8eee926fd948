#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "glasslocal/exact.hpp"
#include "glasslocal/experiments.hpp"
#include "glasslocal/glauber.hpp"
#include "glasslocal/metrics.hpp"

using namespace glasslocal;

namespace {

const MixtureSpec kSk = MixtureSpec::sk();

SampleBatch batch_from(const std::vector<std::vector<double>>& rows) {
  SampleBatch b;
  b.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t j = 0; j < rows.size(); ++j)
    for (std::size_t i = 0; i < rows[j].size(); ++i) b.x(j, i) = rows[j][i];
  return b;
}

SampleBatch uniform_batch(int M, int n, std::uint64_t seed) {
  const rng::Stream s(seed, "test-uniform");
  SampleBatch b;
  b.x.resize(M, n);
  for (int j = 0; j < M; ++j)
    for (int i = 0; i < n; ++i) b.x(j, i) = s.uniform(std::uint64_t(j) * n + i) < 0.5 ? 1.0 : -1.0;
  return b;
}

}  // namespace

TEST(ExactGibbs, ProductMeasures) {
  const auto g = gen_random(kSk, 6, 1);
  const auto d0 = exact_gibbs(g, 0.0, Vec::Zero(6));
  EXPECT_LE(d0.mean.cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((d0.covariance - Mat::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-14);
  const Vec y = Vec::LinSpaced(6, -1.2, 2.0);
  const auto d1 = exact_gibbs(g, 0.0, y);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(d1.mean[i], std::tanh(y[i]), 1e-14);
  EXPECT_NEAR(std::accumulate(d1.prob.begin(), d1.prob.end(), 0.0), 1.0, 1e-12);
}

TEST(ExactGibbs, HandEnumerationTwoSpins) {
  auto g = gen_random(kSk, 2, 0);
  g.tensors[0].data = {0.3, 1.0, -0.4, 0.2};
  const double beta = 0.8, c = std::sqrt(0.5) / std::sqrt(2.0);
  const Vec y = (Vec(2) << 0.1, -0.5).finished();
  // H(x) = c (0.3 + 0.2 + (1.0 - 0.4) x1 x2) for x in {-1,1}^2
  double z = 0.0, m0 = 0.0, m1 = 0.0;
  for (int a : {-1, 1})
    for (int b : {-1, 1}) {
      const double w = std::exp(beta * c * (0.5 + 0.6 * a * b) + 0.1 * a - 0.5 * b);
      z += w;
      m0 += a * w;
      m1 += b * w;
    }
  const auto d = exact_gibbs(g, beta, y);
  EXPECT_NEAR(d.mean[0], m0 / z, 1e-14);
  EXPECT_NEAR(d.mean[1], m1 / z, 1e-14);
  EXPECT_NEAR(d.log_z, std::log(z), 1e-13);
}

TEST(ExactGibbs, CapAndShape) {
  EXPECT_THROW(exact_gibbs(gen_random(kSk, 21, 0), 0.1, Vec::Zero(21)), CapacityError);
  EXPECT_THROW(exact_gibbs(gen_random(kSk, 4, 0), 0.1, Vec::Zero(3)), ShapeError);
}

TEST(ExactGibbs, FreeEnergyDerivativeIsMeanEnergy) {
  const auto g = gen_random(kSk, 10, 3);
  const Enumerator en(g);
  const Vec y = Vec::Zero(10);
  for (double beta : {0.3, 1.0}) {
    const double h = 1e-5;
    const double fd = (en.gibbs(beta + h, y, false).log_z - en.gibbs(beta - h, y, false).log_z) / (2 * h);
    EXPECT_NEAR(fd, en.gibbs(beta, y, false).mean_energy, 1e-8) << beta;
  }
}

TEST(ExactSample, Basics) {
  const auto g = gen_random(kSk, 5, 1);
  const int M = 4000;
  const auto b0 = exact_sample(exact_gibbs(g, 0.0, Vec::Zero(5)), M, 1);
  EXPECT_EQ(b0.size(), M);
  for (int i = 0; i < 5; ++i) EXPECT_LE(std::abs(b0.x.col(i).mean()), 3.0 / std::sqrt(double(M)));
  const Vec y = (Vec(5) << 40, -40, 40, 40, -40).finished();
  const auto peaked = exact_gibbs(g, 0.1, y);
  const auto bp = exact_sample(peaked, 50, 2);
  const Vec mode = config_vector(peaked.mode, 5);
  EXPECT_EQ(mode, y.cwiseSign());
  for (int j = 0; j < 50; ++j) EXPECT_EQ(Vec(bp.x.row(j).transpose()), mode);
}

TEST(ExactSample, ChiSquareGoodnessOfFit) {
  const auto g = gen_random(kSk, 4, 9);
  const auto d = exact_gibbs(g, 1.0, Vec::LinSpaced(4, -0.5, 0.5));
  const int M = 100000;
  const auto b = exact_sample(d, M, 3);
  std::vector<double> counts(16, 0.0);
  for (int j = 0; j < M; ++j) {
    std::uint64_t c = 0;
    for (int i = 0; i < 4; ++i) c |= (b.x(j, i) > 0 ? 1u : 0u) << i;
    counts[c] += 1;
  }
  double chi2 = 0.0;
  for (int c = 0; c < 16; ++c) chi2 += std::pow(counts[c] - M * d.prob[c], 2) / (M * d.prob[c]);
  EXPECT_LT(chi2, 30.58);  // 99th percentile of chi-square with 15 degrees of freedom
}

TEST(BatchIo, RoundTrip) {
  const auto a = uniform_batch(7, 13, 1);
  std::stringstream ss;
  write_batch(ss, a);
  EXPECT_EQ(ss.str().size(), 5u + 4 + 4 + 4 + 8 + 7 * 2);
  const auto b = read_batch(ss);
  EXPECT_EQ(b.x, a.x);
  std::stringstream bad("nope");
  EXPECT_THROW(read_batch(bad), std::runtime_error);
}

TEST(Glauber, BetaZeroFairCoins) {
  const auto g = gen_random(kSk, 6, 1);
  const auto b = glauber_run(g, 0.0, Vec::Ones(6), 5000, 1);
  for (int i = 0; i < 6; ++i) EXPECT_LE(std::abs(b.x.col(i).mean()), 3.0 / std::sqrt(5000.0));
}

TEST(Glauber, DeterministicAndThinned) {
  const auto g = gen_random(kSk, 6, 1);
  const auto a = glauber_run(g, 0.5, Vec::Ones(6), 100, 3, {10, 5});
  const auto b = glauber_run(g, 0.5, Vec::Ones(6), 100, 3, {10, 5});
  EXPECT_EQ(a.size(), 18);
  EXPECT_EQ(a.x, b.x);
  EXPECT_THROW(glauber_run(g, 0.5, Vec::Zero(6), 10, 1), DomainError);
}

TEST(Glauber, IncrementalFieldMatchesExactConditional) {
  const int n = 7;
  const auto g = gen_random(kSk, n, 2);
  // one sweep from x0 with a single recorded state reproduces the heat-bath rule
  const Vec x0 = random_spins(n, 5);
  const auto out = glauber_run(g, 0.9, x0, 1, 4);
  Vec x = x0;
  const rng::Stream u(4, "glauber");
  for (int i = 0; i < n; ++i) x[i] = u.uniform(i) < heat_bath_prob_plus(g, 0.9, x, i) ? 1.0 : -1.0;
  EXPECT_EQ(Vec(out.x.row(0).transpose()), x);
}

TEST(Glauber, DetailedBalance) {
  const int n = 3;
  for (const auto& spec : {kSk, MixtureSpec({{2, 0.5}, {3, 0.5}})}) {
    const auto g = gen_random(spec, n, 6);
    const double beta = 0.7;
    const auto d = exact_gibbs(g, beta, Vec::Zero(n));
    auto move = [&](std::uint64_t c, int i) {
      const Vec x = config_vector(c, n);
      const double pp = heat_bath_prob_plus(g, beta, x, i);
      return (x[i] > 0 ? 1.0 - pp : pp) / n;
    };
    for (std::uint64_t c = 0; c < 8; ++c)
      for (int i = 0; i < n; ++i) {
        const std::uint64_t c2 = c ^ (1u << i);
        EXPECT_NEAR(d.prob[c] * move(c, i), d.prob[c2] * move(c2, i), 1e-12);
      }
    // Kolmogorov criterion around the square c -> flip i -> flip j -> flip i -> flip j
    for (std::uint64_t c = 0; c < 8; ++c) {
      const std::uint64_t a = c ^ 1u, b = a ^ 2u, e = b ^ 1u;
      const double fwd = move(c, 0) * move(a, 1) * move(b, 0) * move(e, 1);
      const double bwd = move(c, 1) * move(e, 0) * move(b, 1) * move(a, 0);
      EXPECT_NEAR(fwd, bwd, 1e-12);
    }
  }
}

TEST(Glauber, PairCorrelationsMatchExact) {
  const int n = 8, sweeps = 100000, blocks = 50;
  const auto g = gen_random(kSk, n, 7);
  const double beta = 0.3;
  const auto d = exact_gibbs(g, beta, Vec::Zero(n));
  const auto b = glauber_run(g, beta, Vec::Ones(n), sweeps, 8, {100, 1});
  const int rows = b.size(), per = rows / blocks;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      std::vector<double> means(blocks);
      for (int k = 0; k < blocks; ++k)
        means[k] = b.x.col(i).segment(k * per, per).cwiseProduct(b.x.col(j).segment(k * per, per)).mean();
      const double mu = std::accumulate(means.begin(), means.end(), 0.0) / blocks;
      double v = 0.0;
      for (double m : means) v += (m - mu) * (m - mu);
      const double se = std::sqrt(v / (blocks - 1) / blocks);
      EXPECT_LE(std::abs(mu - d.second_moment(i, j)), 3.5 * se + 1e-3) << i << "," << j;
    }
}

TEST(Hungarian, MatchesBruteForce) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + trial % 6;
    std::vector<std::int64_t> cost(m * m);
    for (auto& c : cost) c = static_cast<std::int64_t>(gen() % 100);
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    do {
      std::int64_t s = 0;
      for (int i = 0; i < m; ++i) s += cost[i * m + perm[i]];
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::vector<int> assign;
    EXPECT_EQ(hungarian(cost, m, &assign), best);
    std::int64_t s = 0;
    for (int i = 0; i < m; ++i) s += cost[i * m + assign[i]];
    EXPECT_EQ(s, best);
  }
}

TEST(EmpiricalW2, Examples) {
  const auto a = uniform_batch(20, 10, 1);
  EXPECT_EQ(empirical_w2(a, a), 0.0);
  const auto x = batch_from({{1, 1, -1, 1}}), y = batch_from({{1, -1, 1, 1}});
  EXPECT_DOUBLE_EQ(empirical_w2(x, y), std::sqrt(8.0 / 4));
  const auto p = batch_from({{1, 1, 1}, {-1, -1, 1}, {1, -1, -1}});
  const auto q = batch_from({{-1, -1, -1}, {1, 1, -1}, {-1, 1, 1}});
  std::vector<int> perm = {0, 1, 2};
  double best = 1e300;
  do {
    double s = 0;
    for (int i = 0; i < 3; ++i) s += (p.x.row(i) - q.x.row(perm[i])).squaredNorm() / 3;
    best = std::min(best, s / 3);
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_NEAR(empirical_w2(p, q), std::sqrt(best), 1e-15);
  EXPECT_THROW(empirical_w2(a, uniform_batch(19, 10, 2)), ShapeError);
  EXPECT_THROW(empirical_w2(uniform_batch(2001, 2, 1), uniform_batch(2001, 2, 2)), CapacityError);
}

TEST(EmpiricalW2, MetricProperties) {
  for (int t = 0; t < 20; ++t) {
    const auto a = uniform_batch(15, 9, 3 * t), b = uniform_batch(15, 9, 3 * t + 1), c = uniform_batch(15, 9, 3 * t + 2);
    EXPECT_EQ(empirical_w2(a, b), empirical_w2(b, a));
    EXPECT_LE(empirical_w2(a, c), empirical_w2(a, b) + empirical_w2(b, c) + 1e-9);
  }
}

TEST(OverlapMoment, Examples) {
  const auto x = batch_from({{1, -1, 1}});
  EXPECT_DOUBLE_EQ(overlap_moment(x, x), 1.0);
  const int n = 100, M = 200;
  const auto a = uniform_batch(M, n, 1), b = uniform_batch(M, n, 2);
  // each cross pair gives (<x, x'>/n)^2 with mean 1/n and variance 2(n-1)/n^3
  const double se = std::sqrt(2.0 * (n - 1) / (double(n) * n * n) / M);
  EXPECT_LE(std::abs(overlap_moment(a, b) - 1.0 / n), 3 * se);
  // Gram and cross-product branches agree
  const auto small = uniform_batch(3, 40, 3);
  const double direct = (small.x * a.x.leftCols(40).transpose()).squaredNorm() / (3.0 * M * 1600);
  auto a40 = a;
  a40.x = a.x.leftCols(40);
  EXPECT_NEAR(overlap_moment(small, a40), direct, 1e-15);
  EXPECT_THROW(overlap_moment(SampleBatch{}, a), ShapeError);
}

TEST(Chaos, EndpointsAndFlatAtBetaZero) {
  const std::vector<double> s_list = {0.0, 0.5, 1.0};
  const auto tab = chaos_experiment(kSk, 8, 1.0, s_list, {0, 1}, {.M = 200});
  for (const auto& rows : tab.per_seed) EXPECT_EQ(rows[0].w2, rows[0].w2_baseline);
  const double c0 = exact_gibbs(disorder_pair(kSk, 8, 0).first, 1.0, Vec::Zero(8)).second_moment.squaredNorm() / 64;
  EXPECT_NEAR(tab.per_seed[0][0].overlap_exact, c0, 1e-12);
  const auto flat = chaos_experiment(kSk, 10, 0.0, s_list, {0}, {.M = 400});
  for (const auto& r : flat.mean) EXPECT_NEAR(r.overlap_exact, 0.1, 1e-12);
  for (const auto& r : flat.mean) EXPECT_NEAR(r.overlap, 0.1, 0.02);
}

TEST(Chaos, ThreadIndependent) {
  const auto a = chaos_experiment(kSk, 8, 1.5, {0.0, 0.3}, {0, 1, 2}, {.M = 100, .threads = 1});
  const auto b = chaos_experiment(kSk, 8, 1.5, {0.0, 0.3}, {0, 1, 2}, {.M = 100, .threads = 3});
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_EQ(a.mean[j].overlap, b.mean[j].overlap);
    EXPECT_EQ(a.mean[j].w2, b.mean[j].w2);
  }
}

TEST(Stability, ZeroAtIdentity) {
  SamplerParams p;
  p.beta = 0.3;
  p.L = 20;
  p.delta = 0.25;
  p.K_amp = 10;
  p.K_ngd = 20;
  const auto rows = stability_experiment(kSk, 10, {0.0, 0.5}, p, {0, 1}, {.replicas = 2});
  EXPECT_EQ(rows[0].x_distance, 0.0);
  EXPECT_EQ(rows[0].m_distance, 0.0);
  EXPECT_GT(rows[1].m_distance, 0.0);
  const auto temp = stability_temperature(kSk, 10, {0.3, 0.5}, p, {0}, {.replicas = 2});
  EXPECT_EQ(temp[0].x_distance, 0.0);
  EXPECT_EQ(temp[0].m_distance, 0.0);
}

TEST(Stability, DistanceGrowsWithS) {
  SamplerParams p;
  p.beta = 0.4;
  p.L = 40;
  p.delta = 0.25;
  p.K_amp = 15;
  p.K_ngd = 30;
  const std::vector<double> s_list = {0.05, 0.2, 0.5, 1.0};
  const auto rows = stability_experiment(kSk, 30, s_list, p, {0, 1, 2}, {.replicas = 2});
  // Spearman correlation between s and the mean-vector distance
  std::vector<double> d;
  for (const auto& r : rows) d.push_back(r.m_distance);
  std::vector<int> rank(d.size());
  std::iota(rank.begin(), rank.end(), 0);
  std::sort(rank.begin(), rank.end(), [&](int a, int b) { return d[a] < d[b]; });
  std::vector<double> r(d.size());
  for (std::size_t k = 0; k < rank.size(); ++k) r[rank[k]] = k;
  double sum = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) sum += (r[k] - k) * (r[k] - k);
  const double m = static_cast<double>(r.size());
  EXPECT_GT(1.0 - 6.0 * sum / (m * (m * m - 1)), 0.0);
}

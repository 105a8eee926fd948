#pragma once

// Disorder-chaos and algorithmic-stability experiments along the path
// G_s = sqrt(1 - s^2) G_0 + s G_1.

#include <cstdint>
#include <vector>

#include "glasslocal/disorder.hpp"
#include "glasslocal/exact.hpp"
#include "glasslocal/localization.hpp"
#include "glasslocal/metrics.hpp"
#include "glasslocal/parallel.hpp"

namespace glasslocal {

/// Disorder pair for one experiment seed: G_0 and G_1 with derived seeds.
inline std::pair<DisorderTensors, DisorderTensors> disorder_pair(const MixtureSpec& spec, int n, std::uint64_t seed) {
  return {gen_random(spec, n, rng::derive(seed, "g0")), gen_random(spec, n, rng::derive(seed, "g1"))};
}

struct ChaosOptions {
  int M = 1000;  // samples per batch
  int threads = 1;
  bool w2 = true;  // the assignment step is O(M^3); off leaves w2 fields at 0
};

struct ChaosRow {
  double s = 0.0;
  double overlap = 0.0;        // overlap_moment(mu_{G_0} batch, mu_{G_s} batch)
  double overlap_exact = 0.0;  // E[(<x, x'> / n)^2] from exact second moments
  double w2 = 0.0;             // empirical_w2 between the two batches
  double w2_baseline = 0.0;    // same statistic at s = 0 (exact-vs-exact)
};

struct ChaosTable {
  std::vector<double> s_list;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<ChaosRow>> per_seed;  // [seed][s]
  std::vector<ChaosRow> mean;                   // averaged over seeds
};

/// Exact-sampling chaos experiment. The mu_{G_0} batch uses the stream
/// "batch-a"; every mu_{G_s} batch reuses the stream "batch-b", so batches at
/// nearby s share their uniforms and differ only through the measure.
inline ChaosTable chaos_experiment(const MixtureSpec& spec, int n, double beta, const std::vector<double>& s_list,
                                   const std::vector<std::uint64_t>& seeds, ChaosOptions opt = {}) {
  if (n > kDefaultEnumerationCap) throw CapacityError("chaos_experiment: n exceeds the enumeration cap");
  ChaosTable tab;
  tab.s_list = s_list;
  tab.seeds = seeds;
  tab.per_seed.assign(seeds.size(), {});
  const Vec zero = Vec::Zero(n);
  parallel_for(seeds.size(), opt.threads, [&](std::size_t k) {
    const auto [g0, g1] = disorder_pair(spec, n, seeds[k]);
    const auto mu0 = Enumerator(g0).gibbs(beta, zero);
    const auto a = exact_sample(mu0, opt.M, rng::derive(seeds[k], "batch-a"));
    const auto base = exact_sample(mu0, opt.M, rng::derive(seeds[k], "batch-b"));
    const double w2_base = opt.w2 ? empirical_w2(a, base) : 0.0;
    auto& rows = tab.per_seed[k];
    for (double s : s_list) {
      const auto mus = Enumerator(interpolate(g0, g1, s)).gibbs(beta, zero);
      const auto b = exact_sample(mus, opt.M, rng::derive(seeds[k], "batch-b"));
      ChaosRow r;
      r.s = s;
      r.overlap = overlap_moment(a, b);
      r.overlap_exact = mu0.second_moment.cwiseProduct(mus.second_moment).sum() / (double(n) * n);
      r.w2 = opt.w2 ? empirical_w2(a, b) : 0.0;
      r.w2_baseline = w2_base;
      rows.push_back(r);
    }
  });
  for (std::size_t j = 0; j < s_list.size(); ++j) {
    ChaosRow m;
    m.s = s_list[j];
    for (const auto& rows : tab.per_seed) {
      m.overlap += rows[j].overlap;
      m.overlap_exact += rows[j].overlap_exact;
      m.w2 += rows[j].w2;
      m.w2_baseline += rows[j].w2_baseline;
    }
    const double c = static_cast<double>(seeds.size());
    m.overlap /= c;
    m.overlap_exact /= c;
    m.w2 /= c;
    m.w2_baseline /= c;
    tab.mean.push_back(m);
  }
  return tab;
}

struct StabilityOptions {
  int replicas = 4;  // shared-noise replicas per disorder seed
  int threads = 1;
};

struct StabilityRow {
  double value = 0.0;      // s, or beta' in the temperature variant
  double x_distance = 0.0;  // mean of |x(G_0, w) - x(G_s, w)|^2 / n
  double m_distance = 0.0;  // same for the final mean vectors
};

namespace detail {

inline std::uint64_t omega_seed(std::uint64_t seed, int replica) {
  return rng::derive(rng::derive(seed, "omega"), static_cast<std::uint64_t>(replica));
}

/// Runs `reference` and `variant(j)` for every (seed, replica) with a shared
/// omega and averages the squared distances per variant index j.
template <class Ref, class Var>
std::vector<StabilityRow> coupled_distances(const std::vector<double>& values, const std::vector<std::uint64_t>& seeds,
                                            const StabilityOptions& opt, Ref&& reference, Var&& variant) {
  const std::size_t jobs = seeds.size() * static_cast<std::size_t>(opt.replicas);
  std::vector<std::vector<std::pair<double, double>>> dist(jobs);
  parallel_for(jobs, opt.threads, [&](std::size_t job) {
    const std::size_t k = job / opt.replicas;
    const int r = static_cast<int>(job % opt.replicas);
    const std::uint64_t omega = omega_seed(seeds[k], r);
    const SampleRun ref = reference(seeds[k], omega);
    const double n = static_cast<double>(ref.x_alg.size());
    for (std::size_t j = 0; j < values.size(); ++j) {
      const SampleRun run = variant(seeds[k], omega, j);
      dist[job].emplace_back((ref.x_alg - run.x_alg).squaredNorm() / n, (ref.mean_final - run.mean_final).squaredNorm() / n);
    }
  });
  std::vector<StabilityRow> rows(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    rows[j].value = values[j];
    for (const auto& d : dist) {
      rows[j].x_distance += d[j].first;
      rows[j].m_distance += d[j].second;
    }
    rows[j].x_distance /= static_cast<double>(jobs);
    rows[j].m_distance /= static_cast<double>(jobs);
  }
  return rows;
}

}  // namespace detail

/// Disorder stability: the sampler on G_0 and on G_s with the same Brownian
/// increments and rounding uniforms. params.seed is ignored.
inline std::vector<StabilityRow> stability_experiment(const MixtureSpec& spec, int n, const std::vector<double>& s_list,
                                                      const SamplerParams& params, const std::vector<std::uint64_t>& seeds,
                                                      StabilityOptions opt = {}) {
  params.validate();
  const QSchedule sched = q_schedule(spec, params.beta, params.delta, params.L);
  auto with_seed = [&](std::uint64_t omega) {
    SamplerParams p = params;
    p.seed = omega;
    p.keep_trajectory = false;
    return p;
  };
  return detail::coupled_distances(
      s_list, seeds, opt,
      [&](std::uint64_t seed, std::uint64_t omega) {
        return sample(disorder_pair(spec, n, seed).first, with_seed(omega), &sched);
      },
      [&](std::uint64_t seed, std::uint64_t omega, std::size_t j) {
        const auto [g0, g1] = disorder_pair(spec, n, seed);
        return sample(interpolate(g0, g1, s_list[j]), with_seed(omega), &sched);
      });
}

/// Temperature stability: the sampler at beta and at beta' on the same G_0
/// and omega.
inline std::vector<StabilityRow> stability_temperature(const MixtureSpec& spec, int n, const std::vector<double>& beta_list,
                                                       const SamplerParams& params, const std::vector<std::uint64_t>& seeds,
                                                       StabilityOptions opt = {}) {
  params.validate();
  const QSchedule sched = q_schedule(spec, params.beta, params.delta, params.L);
  std::vector<QSchedule> scheds;
  for (double b : beta_list) scheds.push_back(q_schedule(spec, b, params.delta, params.L));
  return detail::coupled_distances(
      beta_list, seeds, opt,
      [&](std::uint64_t seed, std::uint64_t omega) {
        SamplerParams p = params;
        p.seed = omega;
        p.keep_trajectory = false;
        return sample(disorder_pair(spec, n, seed).first, p, &sched);
      },
      [&](std::uint64_t seed, std::uint64_t omega, std::size_t j) {
        SamplerParams p = params;
        p.seed = omega;
        p.keep_trajectory = false;
        p.beta = beta_list[j];
        return sample(disorder_pair(spec, n, seed).first, p, &scheds[j]);
      });
}

}  // namespace glasslocal

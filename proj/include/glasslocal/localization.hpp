#pragma once

// Sampling by discretized stochastic localization:
//   y_{l+1} = y_l + m(G, y_l) delta + sqrt(delta) w_{l+1},   y_0 = 0,
// with m estimated by AMP followed by NGD on the TAP free energy, and a
// final randomized rounding of m(G, y_L).

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "glasslocal/amp.hpp"
#include "glasslocal/errors.hpp"
#include "glasslocal/rng.hpp"
#include "glasslocal/state_evolution.hpp"
#include "glasslocal/tap.hpp"

namespace glasslocal {

struct SamplerParams {
  double beta = 0.0;
  double delta = 0.05;
  int L = 400;
  int K_amp = 30;
  int K_ngd = 100;
  double eta = 0.1;
  double gamma_reg = 1.0;
  std::uint64_t seed = 0;
  bool keep_trajectory = false;
  /// Start NGD from the previous step's u instead of rerunning AMP. Not the
  /// canonical algorithm; off by default.
  bool warm_start = false;

  double horizon() const { return delta * L; }

  void validate() const {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("SamplerParams: beta must be finite and >= 0");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("SamplerParams: delta must be > 0");
    if (L < 1) throw DomainError("SamplerParams: L must be >= 1");
    if (K_amp < 1 || K_ngd < 1) throw DomainError("SamplerParams: iteration counts must be >= 1");
    if (!(eta > 0.0)) throw DomainError("SamplerParams: eta must be > 0");
    if (!std::isfinite(gamma_reg)) throw DomainError("SamplerParams: Gamma must be finite");
  }
};

struct MeanEstimate {
  Vec m;
  Vec u;  // natural parameter, m = tanh(u)
  double grad_norm = 0.0;
  int amp_clamp_events = 0;
  int ngd_safeguard_events = 0;
};

namespace detail {

template <class F>
auto with_stage(const char* stage, F&& f) {
  try {
    return f();
  } catch (const NumericError& e) {
    throw NumericError(std::string("mean_estimate[") + stage + "]: " + e.what());
  }
}

}  // namespace detail

/// AMP for K_amp steps, then NGD from u = z^{K_amp} for K_ngd steps.
/// A non-null `warm_u` skips the AMP stage and starts NGD there.
inline MeanEstimate mean_estimate_detailed(const DisorderTensors& g, const Vec& y, double beta, double q, int K_amp, int K_ngd,
                                           double eta, double gamma_reg, const Vec* warm_u = nullptr) {
  detail::check_dim(g, y.size(), "mean_estimate");
  MeanEstimate out;
  Vec u0;
  if (warm_u) {
    u0 = *warm_u;
  } else {
    const auto amp = detail::with_stage("amp", [&] { return amp_run(g, y, beta, K_amp, {.keep_history = false}); });
    out.amp_clamp_events = amp.clamp_events;
    u0 = amp.last().z;
  }
  TapParams prm{beta, q, gamma_reg, y};
  const auto ngd = detail::with_stage("ngd", [&] { return ngd_run(g, u0, prm, eta, K_ngd, {.keep_history = false}); });
  out.u = ngd.last().u;
  out.m = ngd.last().m;
  out.grad_norm = ngd.last().grad_norm;
  out.ngd_safeguard_events = ngd.safeguard_events;
  return out;
}

inline Vec mean_estimate(const DisorderTensors& g, const Vec& y, double beta, double q, int K_amp, int K_ngd, double eta,
                         double gamma_reg) {
  return mean_estimate_detailed(g, y, beta, q, K_amp, K_ngd, eta, gamma_reg).m;
}

/// Independent coordinates with P(x_i = +1) = (1 + m_i) / 2, using uniforms
/// stream.uniform(i).
inline Vec round_spins(const Vec& m, const rng::Stream& stream) {
  Vec x(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!(std::abs(m[i]) <= 1.0)) throw DomainError("round_spins: m must lie in [-1, 1]^n");
    x[i] = stream.uniform(static_cast<std::uint64_t>(i)) < 0.5 * (1.0 + m[i]) ? 1.0 : -1.0;
  }
  return x;
}

/// Stream of Brownian increments: w_{l+1, i} = normal(l n + i).
inline rng::Stream brownian_stream(std::uint64_t seed) { return rng::Stream(seed, "brownian"); }
inline rng::Stream rounding_stream(std::uint64_t seed) { return rng::Stream(seed, "rounding"); }

struct StepDiagnostics {
  double q = 0.0;
  double grad_norm = 0.0;
  int amp_clamp_events = 0;
  int ngd_safeguard_events = 0;
};

struct SampleRun {
  std::vector<Vec> y_trajectory;  // y_0 .. y_L when kept
  Vec y_final;
  Vec mean_final;
  Vec x_alg;
  std::uint64_t seed = 0;
  std::uint64_t brownian_key = 0;
  std::uint64_t rounding_key = 0;
  std::vector<StepDiagnostics> steps;  // l = 0..L (the last entry is the final mean call)

  double final_q() const { return mean_final.squaredNorm() / static_cast<double>(mean_final.size()); }
};

/// Euler loop shared by the algorithmic and exact-mean samplers. mean_fn(y, l)
/// returns the drift at step l together with its diagnostics.
template <class MeanFn>
SampleRun localization_run(int n, double delta, int L, std::uint64_t seed, bool keep_trajectory, MeanFn&& mean_fn) {
  if (!(delta > 0.0)) throw DomainError("localization_run: delta must be > 0");
  if (L < 1) throw DomainError("localization_run: L must be >= 1");
  SampleRun run;
  run.seed = seed;
  const auto bm = brownian_stream(seed);
  const auto rs = rounding_stream(seed);
  run.brownian_key = bm.key();
  run.rounding_key = rs.key();
  Vec y = Vec::Zero(n);
  const double sd = std::sqrt(delta);
  if (keep_trajectory) run.y_trajectory.push_back(y);
  for (int l = 0; l < L; ++l) {
    auto [m, diag] = mean_fn(y, l);
    run.steps.push_back(diag);
    const std::uint64_t base = static_cast<std::uint64_t>(l) * static_cast<std::uint64_t>(n);
    for (int i = 0; i < n; ++i) y[i] += m[i] * delta + sd * bm.normal(base + i);
    if (keep_trajectory) run.y_trajectory.push_back(y);
  }
  auto [m, diag] = mean_fn(y, L);
  run.steps.push_back(diag);
  run.y_final = y;
  run.mean_final = m;
  run.x_alg = round_spins(m, rs);
  return run;
}

/// Full sampler. `schedule` may be supplied to reuse a precomputed q table.
inline SampleRun sample(const DisorderTensors& g, const SamplerParams& prm, const QSchedule* schedule = nullptr) {
  prm.validate();
  QSchedule own;
  if (!schedule) {
    own = q_schedule(g.spec, prm.beta, prm.delta, prm.L);
    schedule = &own;
  }
  if (static_cast<int>(schedule->q.size()) != prm.L + 1) throw ShapeError("sample: schedule length must be L + 1");
  Vec warm;
  bool have_warm = false;
  return localization_run(g.n, prm.delta, prm.L, prm.seed, prm.keep_trajectory, [&](const Vec& y, int l) {
    const double q = schedule->q[l];
    auto est = mean_estimate_detailed(g, y, prm.beta, q, prm.K_amp, prm.K_ngd, prm.eta, prm.gamma_reg,
                                      prm.warm_start && have_warm ? &warm : nullptr);
    if (prm.warm_start) {
      warm = est.u;
      have_warm = true;
    }
    StepDiagnostics d{q, est.grad_norm, est.amp_clamp_events, est.ngd_safeguard_events};
    return std::pair<Vec, StepDiagnostics>(std::move(est.m), d);
  });
}

/// y(t) = t x + B(t) at the given times (strictly increasing, times[0] >= 0).
/// The k-th positive-length increment uses brownian_stream(seed) counters
/// k n .. k n + n - 1, so a uniform grid reproduces the sampler's noise.
inline std::vector<Vec> simulate_planted_path(const Vec& x, const std::vector<double>& times, std::uint64_t seed) {
  if (times.empty()) return {};
  if (!(times.front() >= 0.0)) throw DomainError("simulate_planted_path: times must be >= 0");
  for (std::size_t j = 1; j < times.size(); ++j)
    if (!(times[j] > times[j - 1])) throw DomainError("simulate_planted_path: times must be strictly increasing");
  const auto n = x.size();
  const auto bm = brownian_stream(seed);
  std::vector<Vec> path;
  path.reserve(times.size());
  Vec b = Vec::Zero(n);
  double prev = 0.0;
  std::uint64_t block = 0;
  for (double t : times) {
    const double dt = t - prev;
    if (dt > 0.0) {
      const double sd = std::sqrt(dt);
      for (Eigen::Index i = 0; i < n; ++i) b[i] += sd * bm.normal(block * static_cast<std::uint64_t>(n) + i);
      ++block;
    }
    path.push_back(t * x + b);
    prev = t;
  }
  return path;
}

/// Single observation y(t) = t x + B(t), equal to simulate_planted_path(x, {t}, seed).
inline Vec planted_observation(const Vec& x, double t, std::uint64_t seed) {
  if (!(t >= 0.0)) throw DomainError("planted_observation: t must be >= 0");
  if (t == 0.0) return Vec::Zero(x.size());
  return simulate_planted_path(x, {t}, seed).front();
}

}  // namespace glasslocal

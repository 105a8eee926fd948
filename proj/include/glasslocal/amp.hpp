#pragma once

// AMP for the mean of the tilted Gibbs measure:
//   m^k = tanh(z^k),  q^k = mean tanh^2(z^k),  b_k = beta^2 (1 - q^k) xi''(q^k),
//   z^{k+1} = beta grad H(m^k) + y - b_k m^{k-1},  with m^{-1} = z^0 = 0.

#include <cmath>
#include <string>
#include <vector>

#include "glasslocal/disorder.hpp"
#include "glasslocal/errors.hpp"

namespace glasslocal {

/// |z| clamp applied before tanh.
inline constexpr double kTanhClamp = 40.0;

struct AmpState {
  int k = 0;
  Vec m_hat;
  Vec m_hat_prev;
  Vec z;
  double q_hat = 0.0;
  double onsager_b = 0.0;
};

struct AmpOptions {
  bool keep_history = true;  // false keeps only the final state
};

struct AmpTrajectory {
  std::vector<AmpState> states;  // k = 0..K (or only K when history is off)
  int clamp_events = 0;

  const AmpState& last() const { return states.back(); }
};

inline double onsager(const MixtureSpec& spec, double beta, double q_hat) {
  return beta * beta * (1.0 - q_hat) * spec.xi(q_hat, 2);
}

namespace detail {

inline Vec clamped_tanh(const Vec& z, int& clamp_events) {
  Vec m(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    double v = z[i];
    if (v > kTanhClamp) {
      v = kTanhClamp;
      ++clamp_events;
    } else if (v < -kTanhClamp) {
      v = -kTanhClamp;
      ++clamp_events;
    }
    m[i] = std::tanh(v);
  }
  return m;
}

inline void require_finite(const Vec& v, const std::string& what) {
  if (!v.allFinite()) throw NumericError(what);
}

}  // namespace detail

/// Runs K AMP iterations. states[k] holds z^k and m^k = tanh(z^k); the final
/// state is k = K, whose z^K seeds the NGD stage.
inline AmpTrajectory amp_run(const DisorderTensors& g, const Vec& y, double beta, int K, AmpOptions opt = {}) {
  if (K < 1) throw DomainError("amp_run: K must be >= 1");
  detail::check_dim(g, y.size(), "amp_run");
  AmpTrajectory traj;
  AmpState cur;
  cur.k = 0;
  cur.z = Vec::Zero(g.n);
  cur.m_hat_prev = Vec::Zero(g.n);
  cur.m_hat = detail::clamped_tanh(cur.z, traj.clamp_events);
  cur.q_hat = 0.0;
  cur.onsager_b = onsager(g.spec, beta, 0.0);
  for (int k = 0; k < K; ++k) {
    Vec z_next = beta * grad(g, cur.m_hat) + y - cur.onsager_b * cur.m_hat_prev;
    detail::require_finite(z_next, "amp_run: non-finite iterate at k = " + std::to_string(k + 1));
    AmpState next;
    next.k = k + 1;
    next.z = std::move(z_next);
    next.m_hat = detail::clamped_tanh(next.z, traj.clamp_events);
    next.m_hat_prev = cur.m_hat;
    next.q_hat = next.m_hat.squaredNorm() / g.n;
    next.onsager_b = onsager(g.spec, beta, next.q_hat);
    if (opt.keep_history) traj.states.push_back(std::move(cur));
    cur = std::move(next);
  }
  traj.states.push_back(std::move(cur));
  return traj;
}

/// ||atanh m^k(y) - atanh m^k(y')|| / ||y - y'|| for k = 1..K (atanh m^k is
/// the clamped z^k). Returns zeros when y' = y.
inline std::vector<double> amp_lipschitz_probe(const DisorderTensors& g, const Vec& y, const Vec& y_perturbed, double beta, int K) {
  const double dy = (y - y_perturbed).norm();
  std::vector<double> ratios(K, 0.0);
  if (dy == 0.0) return ratios;
  const auto a = amp_run(g, y, beta, K);
  const auto b = amp_run(g, y_perturbed, beta, K);
  for (int k = 1; k <= K; ++k) {
    const Vec za = a.states[k].z.cwiseMax(-kTanhClamp).cwiseMin(kTanhClamp);
    const Vec zb = b.states[k].z.cwiseMax(-kTanhClamp).cwiseMin(kTanhClamp);
    ratios[k - 1] = (za - zb).norm() / dy;
  }
  return ratios;
}

}  // namespace glasslocal

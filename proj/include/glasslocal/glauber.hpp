#pragma once

// Heat-bath Glauber dynamics for mu_G(x) ∝ exp(beta H(x)), systematic scan.

#include <cmath>
#include <cstdint>
#include <vector>

#include "glasslocal/disorder.hpp"
#include "glasslocal/exact.hpp"

namespace glasslocal {

/// P(x_i = +1 | x_{-i}) = 1 / (1 + exp(-beta (H(x^{i+}) - H(x^{i-})))).
inline double heat_bath_prob_plus(const DisorderTensors& g, double beta, const Vec& x, int i) {
  Vec xp = x, xm = x;
  xp[i] = 1.0;
  xm[i] = -1.0;
  const double dh = hamiltonian(g, xp) - hamiltonian(g, xm);
  return 0.5 * (1.0 + std::tanh(0.5 * beta * dh));
}

struct GlauberOptions {
  int burn_in = 0;  // sweeps discarded before recording
  int thin = 1;     // record every thin-th sweep after burn-in
};

/// Runs `sweeps` sweeps from x0 (update i uses Stream(seed, "glauber").uniform(s n + i))
/// and returns the recorded states.
inline SampleBatch glauber_run(const DisorderTensors& g, double beta, const Vec& x0, int sweeps, std::uint64_t seed,
                               GlauberOptions opt = {}) {
  detail::check_dim(g, x0.size(), "glauber_run");
  for (Eigen::Index i = 0; i < x0.size(); ++i)
    if (x0[i] != 1.0 && x0[i] != -1.0) throw DomainError("glauber_run: x0 must be a +-1 vector");
  if (sweeps < 0 || opt.burn_in < 0 || opt.thin < 1) throw DomainError("glauber_run: invalid sweep counts");
  const int n = g.n;
  const rng::Stream u(seed, "glauber");
  Vec x = x0;
  const bool quadratic = g.spec.max_degree() == 2;
  Mat A;
  Vec field;
  if (quadratic) {
    // H(x^{i+}) - H(x^{i-}) = 2 sum_{j != i} A_ij x_j
    const auto& t = g.tensors.front();
    Eigen::Map<const RowMajorMat> G(t.data.data(), n, n);
    A = t.scale * (G + G.transpose());
    A.diagonal().setZero();
    field = A * x;
  }
  const int recorded = sweeps > opt.burn_in ? (sweeps - opt.burn_in) / opt.thin : 0;
  SampleBatch out;
  out.source = BatchSource::glauber;
  out.seed = seed;
  out.x.resize(recorded, n);
  int row = 0;
  for (int s = 0; s < sweeps; ++s) {
    for (int i = 0; i < n; ++i) {
      const double p_plus = quadratic ? 0.5 * (1.0 + std::tanh(beta * field[i])) : heat_bath_prob_plus(g, beta, x, i);
      const double v = u.uniform(static_cast<std::uint64_t>(s) * n + i) < p_plus ? 1.0 : -1.0;
      if (v != x[i]) {
        if (quadratic) field += A.col(i) * (v - x[i]);
        x[i] = v;
      }
    }
    const int done = s + 1;
    if (done > opt.burn_in && (done - opt.burn_in) % opt.thin == 0) out.x.row(row++) = x.transpose();
  }
  return out;
}

}  // namespace glasslocal

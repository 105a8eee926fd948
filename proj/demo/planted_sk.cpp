// Library walk-through on a planted SK instance: thresholds, AMP against
// state evolution, the two-stage mean estimate, and one sampler run.

#include <cstdio>

#include "glasslocal/glasslocal.hpp"

int main() {
  using namespace glasslocal;
  const auto spec = MixtureSpec::sk();
  const int n = 400;
  const double beta = 0.5, t = 1.0;
  const std::uint64_t seed = 2024;

  const auto th = thresholds(spec);
  std::printf("SK thresholds: beta1 %.4f  beta2 %.4f  beta3 %.4f  beta_c(RS) %.4f\n", th.beta1, th.beta2, th.beta3, th.beta_c_rs);

  const Vec x = random_spins(n, seed);
  const auto g = gen_planted(spec, n, beta, x, seed);
  const Vec y = planted_observation(x, t, rng::derive(seed, "observation"));

  const int K = 8;
  const auto amp = amp_run(g, y, beta, K);
  const auto se = se_recursion(spec, beta, t, K);
  std::printf("\n k   |m^k|^2/n   q_k        mse(m^k)   1 - q_k\n");
  for (int k = 0; k <= K; ++k) {
    const auto& s = amp.states[k];
    std::printf("%2d   %.4f      %.4f     %.4f     %.4f\n", k, s.q_hat, se.q_sequence[k], (s.m_hat - x).squaredNorm() / n,
                1.0 - se.q_sequence[k]);
  }

  const double q = q_star(spec, beta, t);
  const auto est = mean_estimate_detailed(g, y, beta, q, 30, 100, 0.1, 1.0);
  std::printf("\nmean estimate: |m|^2/n %.4f (q* %.4f), |grad F|/sqrt(n) %.2e\n", est.m.squaredNorm() / n, q,
              est.grad_norm / std::sqrt(static_cast<double>(n)));

  SamplerParams prm;
  prm.beta = beta;
  prm.L = 100;  // T = 5 keeps the demo short
  prm.seed = seed;
  const auto run = sample(gen_random(spec, n, seed + 1), prm);
  std::printf("sampler (T = %.1f): |m(y_L)|^2/n %.4f, mean spin %.4f\n", prm.horizon(), run.final_q(), run.x_alg.mean());
  return 0;
}

#pragma once

// Fast self-checks run by the `validate` command: exact identities and
// finite-difference consistency on small instances.

#include <cmath>
#include <string>
#include <vector>

#include "glasslocal/disorder.hpp"
#include "glasslocal/exact.hpp"
#include "glasslocal/scalar.hpp"
#include "glasslocal/state_evolution.hpp"
#include "glasslocal/tap.hpp"

namespace glasslocal {

struct InvariantResult {
  std::string name;
  double value = 0.0;  // observed error or statistic
  double bound = 0.0;  // pass when value <= bound
  bool pass() const { return std::isfinite(value) && value <= bound; }
};

namespace detail {

inline double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

/// Largest central-difference error of grad against f over all coordinates.
template <class F, class G>
double fd_gradient_error(F&& f, G&& grad_fn, const Vec& x, double h) {
  const Vec g = grad_fn(x);
  double err = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec a = x, b = x;
    a[i] += h;
    b[i] -= h;
    err = std::max(err, std::abs((f(a) - f(b)) / (2.0 * h) - g[i]) / std::max(1.0, std::abs(g[i])));
  }
  return err;
}

}  // namespace detail

inline std::vector<InvariantResult> run_invariants(int threads = 1) {
  std::vector<InvariantResult> out;
  out.push_back({"psi(0) = 0", std::abs(psi(0.0)), 1e-12});
  out.push_back({"psi'(0) = 1", std::abs(psi_prime(0.0) - 1.0), 1e-6});
  {
    double err = 0.0;
    for (double q : {0.01, 0.2, 0.5, 0.8, 0.99}) err = std::max(err, std::abs(psi(phi(q)) - q));
    out.push_back({"psi(phi(q)) = q", err, 1e-10});
  }
  const auto sk = MixtureSpec::sk();
  out.push_back({"SK beta1 = 1", std::abs(beta1(sk) - 1.0), 1e-3});
  out.push_back({"SK beta2 = 1", std::abs(beta2(sk) - 1.0), 1e-3});
  out.push_back({"SK beta3 = 1/2", std::abs(beta3(sk) - 0.5), 0.0});

  const MixtureSpec mixed({{2, 0.5}, {3, 0.5}});
  const int n = 8;
  const auto g = gen_random(mixed, n, 7);
  const Vec m = 0.6 * (random_spins(n, 11).array() * Vec::LinSpaced(n, 0.2, 0.9).array()).matrix();
  out.push_back({"grad H vs finite differences",
                 detail::fd_gradient_error([&](const Vec& v) { return hamiltonian(g, v); }, [&](const Vec& v) { return grad(g, v); }, m,
                                           1e-5),
                 1e-7});
  {
    const Mat hs = hessian(g, m);
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      Vec a = m, b = m;
      a[i] += 1e-5;
      b[i] -= 1e-5;
      err = std::max(err, detail::max_abs((grad(g, a) - grad(g, b)) / 2e-5 - hs.col(i)));
    }
    out.push_back({"Hess H vs finite differences", err, 1e-6});
  }
  {
    TapParams prm{0.4, 0.3, 1.0, Vec::LinSpaced(n, -0.5, 0.5)};
    out.push_back({"grad F_TAP vs finite differences",
                   detail::fd_gradient_error([&](const Vec& v) { return ftap_value(g, v, prm); },
                                             [&](const Vec& v) { return ftap_grad(g, v, prm); }, m, 1e-6),
                   1e-6});
  }
  {
    const auto d = exact_gibbs(g, 0.7, Vec::LinSpaced(n, -0.3, 0.3));
    double total = 0.0;
    for (double p : d.prob) total += p;
    out.push_back({"exact Gibbs normalization", std::abs(total - 1.0), 1e-12});
  }
  {
    const auto a = gen_random(mixed, 24, 3, kDefaultTensorBudget, 1);
    const auto b = gen_random(mixed, 24, 3, kDefaultTensorBudget, std::max(threads, 2));
    double diff = 0.0;
    for (std::size_t k = 0; k < a.tensors.size(); ++k)
      diff += a.tensors[k].data == b.tensors[k].data ? 0.0 : 1.0;
    out.push_back({"disorder bits independent of thread count", diff, 0.0});
  }
  {
    // contraction of the SE map below beta1
    const double beta = 0.8;
    double worst = 0.0;
    for (double t : {0.1, 1.0, 3.0})
      for (double q1 : {0.0, 0.3, 0.7})
        for (double q2 : {0.1, 0.5, 0.95}) {
          const double lhs = std::abs(se_map(sk, beta, t, q1) - se_map(sk, beta, t, q2));
          worst = std::max(worst, lhs - beta * beta * std::abs(q1 - q2));
        }
    out.push_back({"SE map contraction (SK, beta = 0.8)", worst, 1e-9});
  }
  return out;
}

}  // namespace glasslocal

#pragma once

// Modified TAP free energy
//   F(m; y, q) = -beta H(m) - <y, m> - sum_i h(m_i) - ONS(q) - ONS'(q)(Q(m) - q)
//                + (n Gamma beta / 8)(Q(m) - q)^2,      Q(m) = |m|^2 / n,
// with ONS(Q) = (beta^2 n / 2)(xi(1) - xi(Q) - (1 - Q) xi'(Q)), and natural
// gradient descent u <- u - eta grad F(tanh u).

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "glasslocal/disorder.hpp"
#include "glasslocal/errors.hpp"
#include "glasslocal/mixture.hpp"

namespace glasslocal {

struct TapParams {
  double beta = 0.0;
  double q = 0.0;          // linearization point
  double gamma_reg = 1.0;  // Gamma
  Vec y;

  void validate(int n) const {
    if (!(q >= 0.0 && q < 1.0)) throw DomainError("TapParams: q must lie in [0, 1)");
    if (!std::isfinite(gamma_reg)) throw DomainError("TapParams: Gamma must be finite");
    if (y.size() != n) throw ShapeError("TapParams: y has wrong length");
  }
};

/// ONS(Q) / n.
inline double ons(const MixtureSpec& spec, double beta, double Q) {
  return 0.5 * beta * beta * (spec.xi(1.0) - spec.xi(Q) - (1.0 - Q) * spec.xi(Q, 1));
}

/// d/dQ of ONS(Q) / n = -(beta^2 / 2)(1 - Q) xi''(Q).
inline double ons_prime(const MixtureSpec& spec, double beta, double Q) {
  return -0.5 * beta * beta * (1.0 - Q) * spec.xi(Q, 2);
}

namespace detail {

inline void require_interior(const Vec& m, const char* what) {
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (!(std::abs(m[i]) < 1.0)) throw DomainError(std::string(what) + ": m must lie in the open cube (-1, 1)^n");
}

inline Vec atanh_vec(const Vec& m) {
  Vec u(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) u[i] = std::atanh(m[i]);
  return u;
}

inline Vec tanh_vec(const Vec& u) {
  Vec m(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) m[i] = std::tanh(u[i]);
  return m;
}

}  // namespace detail

namespace detail {

/// h(tanh u) = log(2 cosh u) - u tanh u, accurate for large |u|.
inline double entropy_natural(double u) {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a)) - u * std::tanh(u);
}

inline double ftap_from(const DisorderTensors& g, const Vec& m, double entropy, const TapParams& prm) {
  const double n = g.n;
  const double dq = m.squaredNorm() / n - prm.q;
  return -prm.beta * hamiltonian(g, m) - prm.y.dot(m) - entropy - n * ons(g.spec, prm.beta, prm.q) -
         n * ons_prime(g.spec, prm.beta, prm.q) * dq + n * prm.gamma_reg * prm.beta / 8.0 * dq * dq;
}

inline Vec ftap_grad_from(const DisorderTensors& g, const Vec& m, const Vec& atanh_m, const TapParams& prm) {
  const double Q = m.squaredNorm() / g.n;
  const double diag = prm.beta * prm.beta * (1.0 - prm.q) * g.spec.xi(prm.q, 2) + 0.5 * prm.gamma_reg * prm.beta * (Q - prm.q);
  return -prm.beta * grad(g, m) - prm.y + atanh_m + diag * m;
}

}  // namespace detail

inline double ftap_value(const DisorderTensors& g, const Vec& m, const TapParams& prm) {
  prm.validate(g.n);
  detail::check_dim(g, m.size(), "ftap_value");
  detail::require_interior(m, "ftap_value");
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) entropy += binary_entropy(m[i]);
  return detail::ftap_from(g, m, entropy, prm);
}

inline Vec ftap_grad(const DisorderTensors& g, const Vec& m, const TapParams& prm) {
  prm.validate(g.n);
  detail::check_dim(g, m.size(), "ftap_grad");
  detail::require_interior(m, "ftap_grad");
  return detail::ftap_grad_from(g, m, detail::atanh_vec(m), prm);
}

/// F at m = tanh(u), evaluated from u so that saturated coordinates
/// (tanh(u) rounding to +-1) stay finite.
inline double ftap_value_natural(const DisorderTensors& g, const Vec& u, const TapParams& prm) {
  prm.validate(g.n);
  detail::check_dim(g, u.size(), "ftap_value_natural");
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) entropy += detail::entropy_natural(u[i]);
  return detail::ftap_from(g, detail::tanh_vec(u), entropy, prm);
}

/// grad F at m = tanh(u), using atanh(m) = u.
inline Vec ftap_grad_natural(const DisorderTensors& g, const Vec& u, const TapParams& prm) {
  prm.validate(g.n);
  detail::check_dim(g, u.size(), "ftap_grad_natural");
  return detail::ftap_grad_from(g, detail::tanh_vec(u), u, prm);
}

inline Mat ftap_hessian(const DisorderTensors& g, const Vec& m, const TapParams& prm, int cap = kDefaultHessianCap) {
  prm.validate(g.n);
  detail::check_dim(g, m.size(), "ftap_hessian");
  detail::require_interior(m, "ftap_hessian");
  const double Q = m.squaredNorm() / g.n;
  const double shift = prm.beta * prm.beta * (1.0 - prm.q) * g.spec.xi(prm.q, 2) + 0.5 * prm.gamma_reg * prm.beta * (Q - prm.q);
  Mat hss = -prm.beta * hessian(g, m, cap);
  const Mat rank_one = (prm.gamma_reg * prm.beta / g.n) * (m * m.transpose());
  hss += rank_one;
  for (int i = 0; i < g.n; ++i) hss(i, i) += 1.0 / (1.0 - m[i] * m[i]) + shift;
  // restore exact symmetry after the rank-one update
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < i; ++j) hss(j, i) = hss(i, j);
  return hss;
}

struct EigenRange {
  double min_eig = 0.0;
  double max_eig = 0.0;
};

/// Extreme eigenvalues of D(m)^{-1/2} Hess F D(m)^{-1/2}, D(m) = diag(1 / (1 - m_i^2)).
inline EigenRange relative_hessian_extremes(const DisorderTensors& g, const Vec& m, const TapParams& prm,
                                            int cap = kDefaultHessianCap) {
  const Mat hss = ftap_hessian(g, m, prm, cap);
  Vec s(g.n);
  for (int i = 0; i < g.n; ++i) s[i] = std::sqrt(1.0 - m[i] * m[i]);
  const Mat rel = s.asDiagonal() * hss * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Mat> eig(rel, Eigen::EigenvaluesOnly);
  return {eig.eigenvalues().minCoeff(), eig.eigenvalues().maxCoeff()};
}

/// Bregman divergence of -h: D(m, v) = -h(m) + h(v) - <atanh v, m - v>.
inline double bregman(const Vec& m, const Vec& v) {
  if (m.size() != v.size()) throw ShapeError("bregman: length mismatch");
  detail::require_interior(m, "bregman");
  detail::require_interior(v, "bregman");
  double d = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) d += -binary_entropy(m[i]) + binary_entropy(v[i]) - std::atanh(v[i]) * (m[i] - v[i]);
  return std::max(d, 0.0);
}

struct TapIterate {
  Vec u;
  Vec m;  // tanh(u)
  double ftap = 0.0;
  double grad_norm = 0.0;
  double eta_used = 0.0;
  int halvings = 0;
};

struct NgdOptions {
  int max_halvings = 30;
  bool keep_history = true;
  /// Relative slack when comparing successive free-energy values.
  double ascent_tolerance = 1e-12;
};

struct NgdTrajectory {
  std::vector<TapIterate> iterates;  // k = 0..K (or only K)
  int safeguard_events = 0;
  const TapIterate& last() const { return iterates.back(); }
};

/// Natural gradient descent in the u = atanh(m) parameterization. If a step
/// raises F, the step size is halved for that step (up to max_halvings).
inline NgdTrajectory ngd_run(const DisorderTensors& g, const Vec& u0, const TapParams& prm, double eta, int K, NgdOptions opt = {}) {
  if (!(eta > 0.0)) throw DomainError("ngd_run: eta must be > 0");
  if (K < 1) throw DomainError("ngd_run: K must be >= 1");
  detail::check_dim(g, u0.size(), "ngd_run");
  NgdTrajectory traj;
  TapIterate cur;
  cur.u = u0;
  cur.m = detail::tanh_vec(u0);
  cur.ftap = ftap_value_natural(g, cur.u, prm);
  Vec gr = ftap_grad_natural(g, cur.u, prm);
  cur.grad_norm = gr.norm();
  for (int k = 0; k < K; ++k) {
    double step = eta;
    TapIterate next;
    int halvings = 0;
    for (;;) {
      next.u = cur.u - step * gr;
      next.m = detail::tanh_vec(next.u);
      if (!next.u.allFinite()) throw NumericError("ngd_run: non-finite iterate at k = " + std::to_string(k + 1));
      next.ftap = ftap_value_natural(g, next.u, prm);
      if (next.ftap <= cur.ftap + opt.ascent_tolerance * std::max(1.0, std::abs(cur.ftap))) break;
      if (++halvings > opt.max_halvings)
        throw NumericError("ngd_run: step-size safeguard exhausted at k = " + std::to_string(k + 1));
      step *= 0.5;
    }
    if (halvings > 0) ++traj.safeguard_events;
    next.eta_used = step;
    next.halvings = halvings;
    gr = ftap_grad_natural(g, next.u, prm);
    next.grad_norm = gr.norm();
    if (opt.keep_history) traj.iterates.push_back(std::move(cur));
    cur = std::move(next);
  }
  traj.iterates.push_back(std::move(cur));
  return traj;
}

}  // namespace glasslocal

#pragma once

// Gaussian expectations for the +-1 channel Y = gamma X + sqrt(gamma) Z:
// psi, psi', phi = psi^{-1}, phi', and the scalar mutual information I(gamma).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>

#include "glasslocal/errors.hpp"

namespace glasslocal {

/// Nodes and weights with sum_i w_i f(z_i) ~ E f(Z), Z ~ N(0,1).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }

  template <class F>
  double expect(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }

  /// Gauss-Hermite rule for the standard normal density (Golub-Welsch on the
  /// probabilists' Hermite Jacobi matrix).
  static QuadratureRule gauss_hermite(int count = 81) {
    if (count < 1) throw DomainError("gauss_hermite: count must be positive");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(count, count);
    for (int k = 1; k < count; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    QuadratureRule rule;
    rule.nodes.resize(count);
    rule.weights.resize(count);
    for (int k = 0; k < count; ++k) {
      rule.nodes[k] = eig.eigenvalues()(k);
      const double v0 = eig.eigenvectors()(0, k);
      rule.weights[k] = v0 * v0;
    }
    // symmetrize against eigensolver round-off
    for (int k = 0; k < count / 2; ++k) {
      const int m = count - 1 - k;
      const double z = 0.5 * (rule.nodes[m] - rule.nodes[k]);
      const double w = 0.5 * (rule.weights[m] + rule.weights[k]);
      rule.nodes[k] = -z;
      rule.nodes[m] = z;
      rule.weights[k] = rule.weights[m] = w;
    }
    if (count % 2 == 1) rule.nodes[count / 2] = 0.0;
    return rule;
  }

  /// Composite Gauss-Legendre on [lo, hi] split at `breaks`, weighted by the
  /// normal density.
  static QuadratureRule composite_normal(std::vector<double> breaks) {
    static const auto legendre = gauss_legendre_reference(10);
    std::sort(breaks.begin(), breaks.end());
    QuadratureRule rule;
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
      const double mid = 0.5 * (breaks[b] + breaks[b + 1]);
      const double half = 0.5 * (breaks[b + 1] - breaks[b]);
      if (half <= 0.0) continue;
      for (std::size_t k = 0; k < legendre.size(); ++k) {
        const double z = mid + half * legendre.nodes[k];
        rule.nodes.push_back(z);
        rule.weights.push_back(half * legendre.weights[k] * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi));
      }
    }
    return rule;
  }

 private:
  static QuadratureRule gauss_legendre_reference(int count) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(count, count);
    for (int k = 1; k < count; ++k) {
      const double b = k / std::sqrt(4.0 * k * k - 1.0);
      jacobi(k, k - 1) = jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    QuadratureRule rule;
    for (int k = 0; k < count; ++k) {
      rule.nodes.push_back(eig.eigenvalues()(k));
      const double v0 = eig.eigenvectors()(0, k);
      rule.weights.push_back(2.0 * v0 * v0);
    }
    return rule;
  }
};

/// Expectations E f(gamma + sqrt(gamma) Z). Small gamma uses Gauss-Hermite;
/// larger gamma uses a composite rule refined around V = 0, where tanh-type
/// integrands change on a z-scale of 1/sqrt(gamma).
class ChannelIntegrator {
 public:
  static constexpr double kHermiteCeiling = 0.25;
  static constexpr double kAsymptoticGamma = 200.0;

  explicit ChannelIntegrator(int hermite_nodes = 81) : hermite_(QuadratureRule::gauss_hermite(hermite_nodes)) {}

  const QuadratureRule& hermite() const noexcept { return hermite_; }

  template <class F>
  double expect(double gamma, F&& f) const {
    const double root = std::sqrt(gamma);
    if (gamma <= kHermiteCeiling) return hermite_.expect([&](double z) { return f(gamma + root * z); });
    return composite_for(gamma).expect([&](double z) { return f(gamma + root * z); });
  }

  static QuadratureRule composite_for(double gamma) {
    constexpr double kSpan = 12.0, kCoarse = 0.5, kHalo = 10.0;
    constexpr int kFinePanels = 40;
    const double root = std::sqrt(gamma);
    const double lo = -root - kHalo / root, hi = -root + kHalo / root;
    std::vector<double> breaks;
    for (double z = -kSpan; z <= kSpan + 1e-12; z += kCoarse)
      if (z < lo || z > hi) breaks.push_back(z);
    for (int k = 0; k <= kFinePanels; ++k) {
      const double z = lo + (hi - lo) * k / kFinePanels;
      if (z >= -kSpan && z <= kSpan) breaks.push_back(z);
    }
    return QuadratureRule::composite_normal(std::move(breaks));
  }

 private:
  QuadratureRule hermite_;
};

inline const ChannelIntegrator& default_channel() {
  static const ChannelIntegrator integrator;
  return integrator;
}

namespace detail {

inline double log_cosh(double v) {
  const double a = std::abs(v);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

/// 1 - psi(gamma) ~ sqrt(pi / (2 gamma)) exp(-gamma / 2) for large gamma.
inline double psi_tail(double gamma) { return std::sqrt(std::numbers::pi / (2.0 * gamma)) * std::exp(-0.5 * gamma); }

inline void require_nonnegative(double gamma, const char* what) {
  if (!(gamma >= 0.0)) throw DomainError(std::string(what) + ": gamma must be >= 0");
}

}  // namespace detail

/// psi(gamma) = E tanh(gamma + sqrt(gamma) Z).
inline double psi(double gamma, const ChannelIntegrator& ch = default_channel()) {
  detail::require_nonnegative(gamma, "psi");
  if (gamma == 0.0) return 0.0;
  if (gamma > ChannelIntegrator::kAsymptoticGamma) return 1.0 - detail::psi_tail(gamma);
  return ch.expect(gamma, [](double v) { return std::tanh(v); });
}

/// psi'(gamma) by Gaussian integration by parts:
/// E[2 tanh tanh' + tanh'^2 + tanh tanh''] at V = gamma + sqrt(gamma) Z.
inline double psi_prime(double gamma, const ChannelIntegrator& ch = default_channel()) {
  detail::require_nonnegative(gamma, "psi_prime");
  if (gamma == 0.0) return 1.0;
  if (gamma > ChannelIntegrator::kAsymptoticGamma)
    return 0.5 * detail::psi_tail(gamma) * (1.0 + 1.0 / gamma);
  return ch.expect(gamma, [](double v) {
    const double t = std::tanh(v);
    const double d1 = 1.0 - t * t;
    const double d2 = -2.0 * t * d1;
    return 2.0 * t * d1 + d1 * d1 + t * d2;
  });
}

/// I(gamma) = gamma - E log cosh(gamma + sqrt(gamma) Z), clamped to [0, log 2].
inline double mutual_info_scalar(double gamma, const ChannelIntegrator& ch = default_channel()) {
  detail::require_nonnegative(gamma, "mutual_info_scalar");
  if (gamma == 0.0) return 0.0;
  double value;
  if (gamma > ChannelIntegrator::kAsymptoticGamma) {
    value = std::numbers::ln2 - detail::psi_tail(gamma);
  } else {
    value = gamma - ch.expect(gamma, [](double v) { return detail::log_cosh(v); });
  }
  return std::clamp(value, 0.0, std::numbers::ln2);
}

struct InverseOptions {
  double tolerance = 1e-11;
  int max_iterations = 200;
};

/// phi = psi^{-1} on [0, 1): bracket, then Newton with bisection fallback.
inline double phi(double q, const ChannelIntegrator& ch = default_channel(), InverseOptions opt = {}) {
  if (!(q >= 0.0 && q < 1.0)) throw DomainError("phi: q must lie in [0, 1)");
  if (q == 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  int it = 0;
  while (psi(hi, ch) < q) {
    lo = hi;
    hi *= 2.0;
    if (++it > 64) throw NumericError("phi: failed to bracket root");
  }
  double x = 0.5 * (lo + hi);
  for (it = 0; it < opt.max_iterations; ++it) {
    const double r = psi(x, ch) - q;
    const double d = psi_prime(x, ch);
    if (std::abs(r) <= opt.tolerance) {
      // one more Newton step takes the residual to rounding level
      const double polished = d > 0.0 ? x - r / d : x;
      return polished > lo && polished < hi ? polished : x;
    }
    if (r > 0.0)
      hi = x;
    else
      lo = x;
    double next = (d > 0.0) ? x - r / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) return next;
    x = next;
  }
  throw NumericError("phi: no convergence after iteration cap");
}

inline double phi_prime(double q, const ChannelIntegrator& ch = default_channel()) {
  if (!(q >= 0.0 && q < 1.0)) throw DomainError("phi_prime: q must lie in [0, 1)");
  if (q == 0.0) return 1.0;
  return 1.0 / psi_prime(phi(q, ch), ch);
}

}  // namespace glasslocal

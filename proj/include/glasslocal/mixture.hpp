#pragma once

// Mixture polynomial xi(t) = sum_p c_p^2 t^p and the binary entropy.

#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "glasslocal/errors.hpp"

namespace glasslocal {

inline constexpr int kDefaultDenseDegreeCap = 4;

struct MixtureTerm {
  int p;
  double c2;  // c_p^2
};

/// Immutable mixture specification. Stores c_p^2 (not c_p) as the canonical
/// parameterization; c_p is recovered by square root for tensor scaling.
class MixtureSpec {
 public:
  MixtureSpec() = default;

  explicit MixtureSpec(std::vector<MixtureTerm> terms, int dense_cap = kDefaultDenseDegreeCap)
      : terms_(std::move(terms)), dense_cap_(dense_cap) {
    if (terms_.empty()) throw DomainError("mixture: no terms");
    bool any_positive = false;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      const auto& t = terms_[k];
      if (t.p < 2) throw DomainError("mixture: degree p must be >= 2 (got " + std::to_string(t.p) + ")");
      if (!(t.c2 >= 0.0) || !std::isfinite(t.c2))
        throw DomainError("mixture: coefficient c_p^2 must be finite and >= 0");
      if (k > 0 && t.p <= terms_[k - 1].p) throw DomainError("mixture: degrees must be strictly increasing");
      any_positive = any_positive || t.c2 > 0.0;
    }
    if (!any_positive) throw DomainError("mixture: at least one c_p^2 must be positive");
  }

  static MixtureSpec sk() { return MixtureSpec({{2, 0.5}}); }
  static MixtureSpec pure(int p, double c2 = 1.0) { return MixtureSpec({{p, c2}}); }

  const std::vector<MixtureTerm>& terms() const noexcept { return terms_; }
  int max_degree() const noexcept { return terms_.back().p; }
  int dense_cap() const noexcept { return dense_cap_; }

  /// True when the degree exceeds the dense-tensor cap; scalar theory still works.
  bool beyond_dense_cap() const noexcept { return max_degree() > dense_cap_; }

  /// xi(t) = c_2^2 t^2 exactly (the SK family).
  bool is_quadratic() const noexcept { return terms_.size() == 1 && terms_.front().p == 2; }

  double c2(int p) const noexcept {
    for (const auto& t : terms_)
      if (t.p == p) return t.c2;
    return 0.0;
  }

  /// d^order xi / dt^order at t, for order <= 4.
  double xi(double t, int order = 0) const {
    if (order < 0 || order > 4) throw DomainError("xi: unsupported derivative order " + std::to_string(order));
    if (!(std::abs(t) <= 1.0)) throw DomainError("xi: t outside [-1, 1]");
    double s = 0.0;
    for (const auto& term : terms_) {
      if (term.p < order) continue;
      double falling = 1.0;
      for (int j = 0; j < order; ++j) falling *= term.p - j;
      s += term.c2 * falling * std::pow(t, term.p - order);
    }
    return s;
  }

  /// sum_p c_p^2 p^ell.
  double xi_hat(int ell) const {
    if (ell < 0 || ell > 8) throw DomainError("xi_hat: ell must lie in [0, 8]");
    double s = 0.0;
    for (const auto& term : terms_) s += term.c2 * std::pow(static_cast<double>(term.p), ell);
    return s;
  }

  friend bool operator==(const MixtureSpec& a, const MixtureSpec& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t k = 0; k < a.terms_.size(); ++k)
      if (a.terms_[k].p != b.terms_[k].p || a.terms_[k].c2 != b.terms_[k].c2) return false;
    return true;
  }

 private:
  std::vector<MixtureTerm> terms_;
  int dense_cap_ = kDefaultDenseDegreeCap;
};

/// {"2": 0.5, "3": 1.0} mapping p -> c_p^2.
inline nlohmann::json to_json_mixture(const MixtureSpec& spec) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& t : spec.terms()) j[std::to_string(t.p)] = t.c2;
  return j;
}

inline MixtureSpec mixture_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DomainError("mixture: expected an object mapping degree -> c_p^2");
  std::map<int, double> by_degree;
  for (const auto& [key, value] : j.items()) {
    std::size_t used = 0;
    int p = 0;
    try {
      p = std::stoi(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size()) throw DomainError("mixture: key '" + key + "' is not an integer degree");
    if (!value.is_number()) throw DomainError("mixture: value for degree " + key + " must be a number");
    by_degree[p] = value.get<double>();
  }
  std::vector<MixtureTerm> terms;
  for (const auto& [p, c2] : by_degree) terms.push_back({p, c2});
  return MixtureSpec(std::move(terms));
}

/// log 2 - h(m), computed without cancellation near m = 0.
inline double entropy_deficit(double m) {
  if (!(std::abs(m) <= 1.0)) throw DomainError("binary entropy: |m| > 1");
  const double a = std::abs(m);
  if (a == 1.0) return std::numbers::ln2;
  return 0.5 * ((1.0 + a) * std::log1p(a) + (1.0 - a) * std::log1p(-a));
}

/// h(m) = -((1+m)/2) log((1+m)/2) - ((1-m)/2) log((1-m)/2), with h(+-1) = 0.
inline double binary_entropy(double m) {
  if (!(std::abs(m) <= 1.0)) throw DomainError("binary entropy: |m| > 1");
  if (std::abs(m) == 1.0) return 0.0;
  const double a = 0.5 * (1.0 + m), b = 0.5 * (1.0 - m);
  return -a * std::log(a) - b * std::log(b);
}

inline double binary_entropy_sum(std::span<const double> m) {
  double s = 0.0;
  for (double v : m) s += binary_entropy(v);
  return s;
}

}  // namespace glasslocal

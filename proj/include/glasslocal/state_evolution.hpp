#pragma once

// Scalar state evolution q_{k+1} = psi(beta^2 xi'(q_k) + t), its fixed points,
// MSE predictions, the free-energy functional Psi, and the threshold
// temperatures beta_1, beta_2, beta_3, beta_c (replica-symmetric condition)
// and beta_dyn.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glasslocal/errors.hpp"
#include "glasslocal/mixture.hpp"
#include "glasslocal/scalar.hpp"

namespace glasslocal {

struct SEProfile {
  double beta = 0.0;
  double t = 0.0;
  std::vector<double> q_sequence;  // q_0 .. q_K
  double q_star = 0.0;
  double gamma_star = 0.0;  // beta^2 xi'(q_star)
  bool converged = false;
  int iterations = 0;  // total iterations used to reach q_star
};

struct SEOptions {
  double tolerance = 1e-12;
  int max_iterations = 10000;
};

/// f_t(q) = psi(beta^2 xi'(q) + t).
inline double se_map(const MixtureSpec& spec, double beta, double t, double q) {
  return psi(beta * beta * spec.xi(q, 1) + t);
}

inline SEProfile se_recursion(const MixtureSpec& spec, double beta, double t, int K, SEOptions opt = {}) {
  if (!(beta >= 0.0)) throw DomainError("se_recursion: beta must be >= 0");
  if (!(t >= 0.0)) throw DomainError("se_recursion: t must be >= 0");
  if (K < 1) throw DomainError("se_recursion: K must be >= 1");
  SEProfile prof;
  prof.beta = beta;
  prof.t = t;
  prof.q_sequence.reserve(K + 1);
  prof.q_sequence.push_back(0.0);
  double q = 0.0;
  int it = 0;
  bool converged = false;
  const int cap = std::max(opt.max_iterations, K);
  while (it < cap) {
    const double next = se_map(spec, beta, t, q);
    ++it;
    if (it <= K) prof.q_sequence.push_back(next);
    const bool small_step = std::abs(next - q) <= opt.tolerance;
    q = next;
    if (small_step && !converged) {
      converged = true;
      prof.iterations = it;
      prof.q_star = q;
    }
    if (converged && it >= K) break;
  }
  prof.converged = converged;
  if (!converged) {
    prof.iterations = it;
    prof.q_star = q;
  }
  prof.gamma_star = beta * beta * spec.xi(prof.q_star, 1);
  return prof;
}

/// Fixed point q*(beta, t) reached by iterating from q_0 = 0 (the smallest root).
inline double q_star(const MixtureSpec& spec, double beta, double t) {
  return se_recursion(spec, beta, t, 1).q_star;
}

/// Predicted AMP mean-squared error 1 - q_{k+1}.
inline double mse_prediction(const SEProfile& profile, std::size_t k) {
  if (k + 1 >= profile.q_sequence.size()) throw std::out_of_range("mse_prediction: k + 1 beyond q_sequence");
  return 1.0 - profile.q_sequence[k + 1];
}

/// All roots of q = f_t(q) in [0, 1), by sign changes on a uniform grid and
/// bisection refinement. Above beta_1 there can be several.
inline std::vector<double> se_fixed_points(const MixtureSpec& spec, double beta, double t, int grid = 4096) {
  auto resid = [&](double q) { return q - se_map(spec, beta, t, q); };
  std::vector<double> roots;
  const double top = 1.0 - 1e-9;
  double q_prev = 0.0, r_prev = resid(0.0);
  if (r_prev == 0.0) roots.push_back(0.0);
  for (int i = 1; i <= grid; ++i) {
    const double q = top * i / grid;
    const double r = resid(q);
    if (r == 0.0) {
      roots.push_back(q);
    } else if (r_prev != 0.0 && (r < 0.0) != (r_prev < 0.0)) {
      double lo = q_prev, hi = q, rlo = r_prev;
      for (int b = 0; b < 200 && hi - lo > 1e-15; ++b) {
        const double mid = 0.5 * (lo + hi);
        const double rm = resid(mid);
        if ((rm < 0.0) == (rlo < 0.0)) {
          lo = mid;
          rlo = rm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    q_prev = q;
    r_prev = r;
  }
  return roots;
}

struct QSchedule {
  double beta = 0.0;
  double delta = 0.0;
  std::vector<double> q;  // q*(beta, l delta), l = 0..L
  std::vector<bool> converged;
  bool all_converged() const { return std::all_of(converged.begin(), converged.end(), [](bool b) { return b; }); }
};

inline QSchedule q_schedule(const MixtureSpec& spec, double beta, double delta, int L) {
  if (!(delta > 0.0)) throw DomainError("q_schedule: delta must be > 0");
  if (L < 1) throw DomainError("q_schedule: L must be >= 1");
  QSchedule s;
  s.beta = beta;
  s.delta = delta;
  for (int l = 0; l <= L; ++l) {
    const auto prof = se_recursion(spec, beta, l * delta, 1);
    s.q.push_back(prof.q_star);
    s.converged.push_back(prof.converged);
  }
  return s;
}

/// Psi(q; beta, t) = beta^2/2 (xi(1) - xi(q) - (1-q) xi'(q)) + I(beta^2 xi'(q) + t).
inline double psi_functional(const MixtureSpec& spec, double beta, double t, double q) {
  const double b2 = beta * beta;
  return 0.5 * b2 * (spec.xi(1.0) - spec.xi(q) - (1.0 - q) * spec.xi(q, 1)) + mutual_info_scalar(b2 * spec.xi(q, 1) + t);
}

/// Psi evaluated at the state-evolution fixed point q*(beta, t).
inline double psi_star(const MixtureSpec& spec, double beta, double t) {
  return psi_functional(spec, beta, t, q_star(spec, beta, t));
}

// ---------------------------------------------------------------------------
// Thresholds

struct ThresholdOptions {
  int beta1_grid = 4096;
  double beta1_tolerance = 1e-4;
  int beta2_grid = 10000;
  double beta2_tolerance = 1e-4;
  int rs_panels = 2048;
  double rs_tolerance = 1e-4;
  double beta3_c0 = 0.25;
  double dyn_step = 1e-3;
  int dyn_grid = 4096;
  double dyn_q_min = 1e-4;
  double dyn_ceiling = 5.0;
};

namespace detail {

template <class F>
double golden_minimize(F&& f, double a, double b, double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (std::abs(b - a) > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// 4096-point grid on (0, 1): half log-spaced toward 0, half toward 1.
inline std::vector<double> two_sided_log_grid(int count, double edge = 1e-7) {
  std::vector<double> g;
  const int half = count / 2;
  const double l0 = std::log(edge), l1 = std::log(0.5);
  for (int i = 0; i < half; ++i) g.push_back(std::exp(l0 + (l1 - l0) * i / (half - 1)));
  for (int i = count - half - 1; i >= 0; --i) g.push_back(1.0 - std::exp(l0 + (l1 - l0) * i / (count - half - 1)));
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

}  // namespace detail

/// beta_1 = inf_{q in (0,1)} sqrt(phi'(q) / xi''(q)).
inline double beta1(const MixtureSpec& spec, const ThresholdOptions& opt = {}) {
  if (spec.xi(0.5, 2) <= 0.0) throw DomainError("beta1: xi'' vanishes identically");
  auto objective = [&](double q) { return std::sqrt(phi_prime(q) / spec.xi(q, 2)); };
  const auto grid = detail::two_sided_log_grid(opt.beta1_grid);
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = objective(grid[i]);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double a = best == 0 ? grid[0] : grid[best - 1];
  const double b = best + 1 == grid.size() ? grid.back() : grid[best + 1];
  const double qmin = detail::golden_minimize(objective, a, b, 1e-3 * opt.beta1_tolerance * (b - a) + 1e-14);
  return std::min(best_val, objective(qmin));
}

/// max_{q in (0,1)} [beta^2 xi(q) + h(q) - log 2] on a uniform grid with
/// golden-section refinement around the best grid point.
inline double beta2_gap(const MixtureSpec& spec, double beta, int grid) {
  auto f = [&](double q) { return beta * beta * spec.xi(q) - entropy_deficit(q); };
  double best = -std::numeric_limits<double>::infinity();
  int arg = 1;
  for (int i = 1; i < grid; ++i) {
    const double v = f(static_cast<double>(i) / grid);
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  const double a = static_cast<double>(arg - 1) / grid, b = static_cast<double>(arg + 1) / grid;
  const double qm = detail::golden_minimize([&](double q) { return -f(q); }, std::max(a, 1e-12), std::min(b, 1.0 - 1e-12), 1e-10);
  return std::max(best, f(qm));
}

/// beta_2 = sup{beta : beta^2 xi(q) + h(q) - log 2 < 0 for all q in (0,1)}.
inline double beta2(const MixtureSpec& spec, const ThresholdOptions& opt = {}) {
  double lo = 0.0, hi = std::sqrt(std::numbers::ln2 / spec.xi(1.0)) + 1e-6;
  while (hi - lo > opt.beta2_tolerance * 1e-2) {
    const double mid = 0.5 * (lo + hi);
    if (beta2_gap(spec, mid, opt.beta2_grid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// beta_3: 1/(2 sqrt(xi''(0))) for xi = c_2^2 t^2, else C0 / sqrt(xi''(1) log xi_hat^(8)(1)).
inline double beta3(const MixtureSpec& spec, double c0 = 0.25) {
  if (spec.is_quadratic()) return 1.0 / (2.0 * std::sqrt(spec.xi(0.0, 2)));
  if (!(c0 > 0.0)) throw DomainError("beta3: c0 must be > 0");
  const double x8 = spec.xi_hat(8);
  if (x8 <= 1.0) throw DomainError("beta3: log xi_hat^(8)(1) must be positive");
  return c0 / std::sqrt(spec.xi(1.0, 2) * std::log(x8));
}

/// max_{t in [0,1]} RS(t), RS(t) = int_0^t xi''(s) (psi(beta^2 xi'(s)) - s) ds,
/// by composite Simpson with `panels` panels (cumulative at panel ends).
inline double rs_max(const MixtureSpec& spec, double beta, int panels) {
  const double h = 1.0 / panels;
  auto g = [&](double s) { return spec.xi(s, 2) * (psi(beta * beta * spec.xi(s, 1)) - s); };
  double acc = 0.0, best = 0.0, left = g(0.0);
  for (int k = 0; k < panels; ++k) {
    const double a = k * h;
    const double mid = g(a + 0.5 * h), right = g(a + h);
    acc += h / 6.0 * (left + 4.0 * mid + right);
    best = std::max(best, acc);
    left = right;
  }
  return best;
}

/// Largest beta with RS(t) <= 0 on [0, 1] (replica-symmetric critical temperature).
inline double beta_c_rs(const MixtureSpec& spec, const ThresholdOptions& opt = {}) {
  constexpr double kSlack = 1e-14;
  auto ok = [&](double b) { return rs_max(spec, b, opt.rs_panels) <= kSlack; };
  double lo = 0.0, hi = 1.0;
  while (ok(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NumericError("beta_c_rs: no upper bracket");
  }
  while (hi - lo > opt.rs_tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// H(lambda) = E[cosh(lambda G) tanh(lambda G)^2] / E[cosh(lambda G)], with the
/// cosh weight absorbed by the shift identity
/// E[cosh(lambda G) f(lambda G)] = e^{lambda^2/2} E[f(lambda^2 + lambda G)] (f even).
inline double dyn_overlap(double lambda) {
  const double g = lambda * lambda;
  if (g == 0.0) return 0.0;
  if (g > ChannelIntegrator::kAsymptoticGamma) return 1.0 - detail::psi_tail(g);
  return default_channel().expect(g, [](double v) {
    const double t = std::tanh(v);
    return t * t;
  });
}

/// Smallest beta (scanned upward in steps of dyn_step) at which q = H(beta sqrt(xi'(q)))
/// has a solution q in (q_min, 1]. Empty if none exists below the ceiling.
/// Since H(lambda) = psi(lambda^2) and psi is increasing, the sign of
/// q - H(beta sqrt(xi'(q))) equals that of phi(q) - beta^2 xi'(q); phi is
/// tabulated once on the q-grid and the beta scan reuses it.
inline std::optional<double> beta_dyn(const MixtureSpec& spec, const ThresholdOptions& opt = {}) {
  std::vector<double> ph(opt.dyn_grid), xip(opt.dyn_grid);
  for (int i = 0; i < opt.dyn_grid; ++i) {
    const double q = opt.dyn_q_min + (1.0 - opt.dyn_q_min) * (i + 1) / opt.dyn_grid;
    ph[i] = q < 1.0 ? phi(q) : std::numeric_limits<double>::infinity();
    xip[i] = spec.xi(q, 1);
  }
  const auto steps = static_cast<long>(std::floor(opt.dyn_ceiling / opt.dyn_step + 1e-9));
  for (long s = 1; s <= steps; ++s) {
    const double beta = s * opt.dyn_step;
    double prev = 0.0;
    for (int i = 0; i < opt.dyn_grid; ++i) {
      const double r = ph[i] - beta * beta * xip[i];
      if (r == 0.0 || (i > 0 && (r < 0.0) != (prev < 0.0))) return beta;
      prev = r;
    }
  }
  return std::nullopt;
}

struct ThresholdReport {
  double beta1 = 0.0, beta2 = 0.0, beta3 = 0.0, beta_c_rs = 0.0;
  std::optional<double> beta_dyn;
  MixtureSpec mixture;
  ThresholdOptions options;
};

inline ThresholdReport thresholds(const MixtureSpec& spec, const ThresholdOptions& opt = {}) {
  ThresholdReport r;
  r.mixture = spec;
  r.options = opt;
  r.beta1 = beta1(spec, opt);
  r.beta2 = beta2(spec, opt);
  r.beta3 = beta3(spec, opt.beta3_c0);
  r.beta_c_rs = beta_c_rs(spec, opt);
  r.beta_dyn = beta_dyn(spec, opt);
  return r;
}

inline nlohmann::json to_json(const ThresholdReport& r) {
  nlohmann::json j;
  j["mixture"] = to_json_mixture(r.mixture);
  j["beta1"] = r.beta1;
  j["beta2"] = r.beta2;
  j["beta3"] = r.beta3;
  j["beta3_heuristic_c0"] = !r.mixture.is_quadratic();
  j["beta_c_rs"] = r.beta_c_rs;
  j["beta_dyn"] = r.beta_dyn ? nlohmann::json(*r.beta_dyn) : nlohmann::json(nullptr);
  const auto& o = r.options;
  j["method"] = {
      {"beta1", {{"grid", o.beta1_grid}, {"grid_kind", "two-sided log"}, {"refine", "golden-section"}, {"tolerance", o.beta1_tolerance}}},
      {"beta2", {{"q_grid", o.beta2_grid}, {"refine", "golden-section"}, {"bisection_tolerance", o.beta2_tolerance}}},
      {"beta3", {{"c0", o.beta3_c0}}},
      {"beta_c_rs", {{"simpson_panels", o.rs_panels}, {"bisection_tolerance", o.rs_tolerance}}},
      {"beta_dyn", {{"beta_step", o.dyn_step}, {"q_grid", o.dyn_grid}, {"q_min", o.dyn_q_min}, {"ceiling", o.dyn_ceiling}}},
  };
  return j;
}

}  // namespace glasslocal

#pragma once

// Gaussian disorder G = (G^(p))_p for the mixed p-spin Hamiltonian
//   H(x) = sum_p c_p n^{-(p-1)/2} <G^(p), x^{(x)p}>,
// with random, planted and interpolated instances, exact derivatives, and
// the small-n rescaled partition function.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "glasslocal/errors.hpp"
#include "glasslocal/mixture.hpp"
#include "glasslocal/parallel.hpp"
#include "glasslocal/rng.hpp"
#include "glasslocal/types.hpp"

namespace glasslocal {

inline constexpr double kDefaultTensorBudget = 2e8;
inline constexpr int kDefaultHessianCap = 512;
inline constexpr int kDefaultEnumerationCap = 20;

enum class DisorderKind : std::uint32_t { random = 0, planted = 1, interpolated = 2 };

inline const char* to_string(DisorderKind k) {
  switch (k) {
    case DisorderKind::random: return "random";
    case DisorderKind::planted: return "planted";
    case DisorderKind::interpolated: return "interpolated";
  }
  return "unknown";
}

/// Raw (unsymmetrized) rank-p tensor of shape n^p in row-major order.
struct CouplingTensor {
  int p = 0;
  double c2 = 0.0;
  double scale = 0.0;  // c_p n^{-(p-1)/2}
  std::vector<double> data;
};

struct DisorderTensors {
  int n = 0;
  MixtureSpec spec;
  std::vector<CouplingTensor> tensors;  // one per mixture term, same order
  std::uint64_t seed = 0;
  DisorderKind kind = DisorderKind::random;
  // planted metadata
  std::optional<Vec> planted_x;
  double planted_beta = 0.0;
  // interpolation metadata
  double interp_s = 0.0;
  std::uint64_t parent_seed0 = 0, parent_seed1 = 0;

  std::size_t entry_count() const {
    std::size_t s = 0;
    for (const auto& t : tensors) s += t.data.size();
    return s;
  }
};

namespace detail {

inline std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

inline void check_tensor_shape(const MixtureSpec& spec, int n, double budget) {
  if (n < 1) throw DomainError("disorder: n must be >= 1");
  if (spec.beyond_dense_cap())
    throw CapacityError("disorder: degree " + std::to_string(spec.max_degree()) + " exceeds dense tensor cap " +
                        std::to_string(spec.dense_cap()));
  double total = 0.0;
  for (const auto& t : spec.terms()) total += std::pow(static_cast<double>(n), t.p);
  if (total > budget)
    throw CapacityError("disorder: " + std::to_string(total) + " tensor entries exceed budget " + std::to_string(budget));
}

inline rng::Stream noise_stream(std::uint64_t seed, int p) { return rng::Stream(seed, "disorder").child(static_cast<std::uint64_t>(p)); }

inline void check_dim(const DisorderTensors& g, Eigen::Index size, const char* what) {
  if (size != g.n) throw ShapeError(std::string(what) + ": vector length " + std::to_string(size) + " != n = " + std::to_string(g.n));
}

/// Contract the last slot of a row-major tensor with x: (len/n, n) * x.
inline std::vector<double> fold_right(const std::vector<double>& cur, int n, const Vec& x) {
  const Eigen::Index rows = static_cast<Eigen::Index>(cur.size() / n);
  Eigen::Map<const RowMajorMat> m(cur.data(), rows, n);
  std::vector<double> out(rows);
  Eigen::Map<Vec>(out.data(), rows) = m * x;
  return out;
}

/// Contract the first slot of a row-major tensor with x: x^T (n, len/n).
inline std::vector<double> fold_left(const std::vector<double>& cur, int n, const Vec& x) {
  const Eigen::Index cols = static_cast<Eigen::Index>(cur.size() / n);
  Eigen::Map<const RowMajorMat> m(cur.data(), n, cols);
  std::vector<double> out(cols);
  Eigen::Map<Vec>(out.data(), cols) = m.transpose() * x;
  return out;
}

/// x^{(x)k} flattened row-major (length n^k).
inline std::vector<double> kron_power(const Vec& x, int k) {
  std::vector<double> v{1.0};
  for (int r = 0; r < k; ++r) {
    std::vector<double> next(v.size() * x.size());
    for (std::size_t a = 0; a < v.size(); ++a)
      for (Eigen::Index i = 0; i < x.size(); ++i) next[a * x.size() + i] = v[a] * x[i];
    v.swap(next);
  }
  return v;
}

/// <T, x^{(x)p}>.
inline double full_contraction(const CouplingTensor& t, int n, const Vec& x) {
  if (t.p == 2) {
    Eigen::Map<const RowMajorMat> g(t.data.data(), n, n);
    return x.dot(g * x);
  }
  std::vector<double> cur = fold_right(t.data, n, x);
  for (int r = 1; r < t.p - 1; ++r) cur = fold_right(cur, n, x);
  return Eigen::Map<const Vec>(cur.data(), n).dot(x);
}

/// Contraction of T with x in every slot except `slot`.
inline Vec contract_except(const CouplingTensor& t, int n, const Vec& x, int slot) {
  if (t.p == 2) {
    Eigen::Map<const RowMajorMat> g(t.data.data(), n, n);
    return slot == 0 ? Vec(g * x) : Vec(g.transpose() * x);
  }
  std::vector<double> cur = t.data;
  for (int r = 0; r < t.p - 1 - slot; ++r) cur = fold_right(cur, n, x);
  for (int r = 0; r < slot; ++r) cur = fold_left(cur, n, x);
  return Eigen::Map<const Vec>(cur.data(), n);
}

/// M[i][j] = contraction of T with x in all slots except k (index i) and l (index j), k < l.
inline Mat contract_pair(const CouplingTensor& t, int n, const Vec& x, int k, int l) {
  if (t.p == 2) return Eigen::Map<const RowMajorMat>(t.data.data(), n, n);
  std::vector<double> cur = t.data;
  for (int r = 0; r < t.p - 1 - l; ++r) cur = fold_right(cur, n, x);
  for (int r = 0; r < k; ++r) cur = fold_left(cur, n, x);
  const int mid = l - k - 1;
  const std::vector<double> w = kron_power(x, mid);
  const Eigen::Index block = static_cast<Eigen::Index>(w.size());
  Eigen::Map<const Vec> wv(w.data(), block);
  Mat out(n, n);
  for (int i = 0; i < n; ++i) {
    Eigen::Map<const RowMajorMat> slab(cur.data() + static_cast<std::size_t>(i) * block * n, block, n);
    out.row(i) = (slab.transpose() * wv).transpose();
  }
  return out;
}

}  // namespace detail

inline DisorderTensors gen_random(const MixtureSpec& spec, int n, std::uint64_t seed, double budget = kDefaultTensorBudget,
                                  int threads = 1) {
  detail::check_tensor_shape(spec, n, budget);
  DisorderTensors g;
  g.n = n;
  g.spec = spec;
  g.seed = seed;
  g.kind = DisorderKind::random;
  for (const auto& term : spec.terms()) {
    CouplingTensor t;
    t.p = term.p;
    t.c2 = term.c2;
    t.scale = std::sqrt(term.c2) / std::pow(static_cast<double>(n), 0.5 * (term.p - 1));
    t.data.resize(detail::ipow(n, term.p));
    const auto stream = detail::noise_stream(seed, term.p);
    constexpr std::size_t kChunk = 1 << 16;
    const std::size_t chunks = (t.data.size() + kChunk - 1) / kChunk;
    parallel_for(chunks, threads, [&](std::size_t c) {
      const std::size_t end = std::min(t.data.size(), (c + 1) * kChunk);
      for (std::size_t i = c * kChunk; i < end; ++i) t.data[i] = stream.normal(i);
    });
    g.tensors.push_back(std::move(t));
  }
  return g;
}

/// Uniform spin vector, x_i = +1 when Stream(seed, "spins").uniform(i) < 1/2.
inline Vec random_spins(int n, std::uint64_t seed) {
  const rng::Stream u(seed, "spins");
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = u.uniform(static_cast<std::uint64_t>(i)) < 0.5 ? 1.0 : -1.0;
  return x;
}

/// G^(p) = beta c_p n^{-(p-1)/2} x^{(x)p} + W^(p), W sharing the noise of gen_random(seed).
inline DisorderTensors gen_planted(const MixtureSpec& spec, int n, double beta, const Vec& x, std::uint64_t seed,
                                   double budget = kDefaultTensorBudget, int threads = 1) {
  if (x.size() != n) throw ShapeError("gen_planted: x has wrong length");
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] != 1.0 && x[i] != -1.0) throw DomainError("gen_planted: x must be a +-1 vector");
  DisorderTensors g = gen_random(spec, n, seed, budget, threads);
  g.kind = DisorderKind::planted;
  g.planted_x = x;
  g.planted_beta = beta;
  if (beta == 0.0) return g;
  for (auto& t : g.tensors) {
    const double spike = beta * t.scale;
    const std::vector<double> outer = detail::kron_power(x, t.p);
    for (std::size_t i = 0; i < t.data.size(); ++i) t.data[i] += spike * outer[i];
  }
  return g;
}

/// G_s = sqrt(1 - s^2) G_0 + s G_1.
inline DisorderTensors interpolate(const DisorderTensors& g0, const DisorderTensors& g1, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("interpolate: s must lie in [0, 1]");
  if (g0.n != g1.n || !(g0.spec == g1.spec)) throw ShapeError("interpolate: instances differ in (n, mixture)");
  DisorderTensors g = g0;
  g.kind = DisorderKind::interpolated;
  g.interp_s = s;
  g.parent_seed0 = g0.seed;
  g.parent_seed1 = g1.seed;
  g.planted_x.reset();
  const double a = std::sqrt(1.0 - s * s);
  for (std::size_t k = 0; k < g.tensors.size(); ++k) {
    auto& dst = g.tensors[k].data;
    const auto& src0 = g0.tensors[k].data;
    const auto& src1 = g1.tensors[k].data;
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = a * src0[i] + s * src1[i];
  }
  return g;
}

inline double hamiltonian(const DisorderTensors& g, const Vec& x) {
  detail::check_dim(g, x.size(), "hamiltonian");
  double h = 0.0;
  for (const auto& t : g.tensors) h += t.scale * detail::full_contraction(t, g.n, x);
  return h;
}

/// Exact gradient of hamiltonian(g, .) at m: sum over derivative slots.
inline Vec grad(const DisorderTensors& g, const Vec& m) {
  detail::check_dim(g, m.size(), "grad");
  Vec out = Vec::Zero(g.n);
  for (const auto& t : g.tensors)
    for (int slot = 0; slot < t.p; ++slot) out += t.scale * detail::contract_except(t, g.n, m, slot);
  return out;
}

inline Mat hessian(const DisorderTensors& g, const Vec& m, int cap = kDefaultHessianCap) {
  detail::check_dim(g, m.size(), "hessian");
  if (g.n > cap) throw CapacityError("hessian: n = " + std::to_string(g.n) + " exceeds cap " + std::to_string(cap));
  Mat acc = Mat::Zero(g.n, g.n);
  for (const auto& t : g.tensors)
    for (int k = 0; k < t.p; ++k)
      for (int l = k + 1; l < t.p; ++l) acc += t.scale * detail::contract_pair(t, g.n, m, k, l);
  // symmetric by construction: each ordered pair (l, k) contributes the transpose
  Mat out(g.n, g.n);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j <= i; ++j) out(i, j) = out(j, i) = acc(i, j) + acc(j, i);
  return out;
}

/// Spin configuration with index c: x_i = +1 when bit i of c is set.
inline Vec config_vector(std::uint64_t c, int n) {
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = ((c >> i) & 1u) ? 1.0 : -1.0;
  return x;
}

/// H(x) for every x in {-1,+1}^n, indexed as in config_vector.
inline std::vector<double> energy_table(const DisorderTensors& g, int cap = kDefaultEnumerationCap, int threads = 1) {
  if (g.n > cap) throw CapacityError("enumeration: n = " + std::to_string(g.n) + " exceeds cap " + std::to_string(cap));
  const std::size_t count = std::size_t{1} << g.n;
  std::vector<double> e(count);
  constexpr std::size_t kBlock = 1024;
  parallel_for((count + kBlock - 1) / kBlock, threads, [&](std::size_t b) {
    const std::size_t end = std::min(count, (b + 1) * kBlock);
    for (std::size_t c = b * kBlock; c < end; ++c) e[c] = hamiltonian(g, config_vector(c, g.n));
  });
  return e;
}

/// Z_xi(G) = 2^{-n} sum_x exp(beta H(x) - n beta^2 xi(1) / 2), by enumeration.
inline double partition_rescaled(const DisorderTensors& g, double beta, int cap = kDefaultEnumerationCap) {
  if (beta == 0.0) {
    if (g.n > cap) throw CapacityError("partition_rescaled: n exceeds enumeration cap");
    return 1.0;
  }
  const auto e = energy_table(g, cap);
  const double shift = 0.5 * g.n * beta * beta * g.spec.xi(1.0);
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : e) mx = std::max(mx, beta * v);
  double s = 0.0;
  for (double v : e) s += std::exp(beta * v - mx);
  return std::exp(mx + std::log(s) - g.n * std::numbers::ln2 - shift);
}

}  // namespace glasslocal

#pragma once

// Binary disorder file:
//   "GLTN1" | n:u32 | P:u32 | c_p^2:f64 for p = 2..P | seed:u64 | kind:u32
//   then, for each p in 2..P with c_p^2 > 0, n^p f64 entries in row-major order.
// Trailers: planted -> beta:f64, n x i8 spins; interpolated -> s:f64, seed0:u64, seed1:u64.
// All fields little-endian.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "glasslocal/disorder.hpp"

namespace glasslocal {

static_assert(std::endian::native == std::endian::little, "tensor files assume a little-endian host");

namespace detail {

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("tensor file: unexpected end of data");
  return v;
}

}  // namespace detail

inline constexpr char kTensorMagic[5] = {'G', 'L', 'T', 'N', '1'};

inline void write_disorder(std::ostream& os, const DisorderTensors& g) {
  os.write(kTensorMagic, sizeof kTensorMagic);
  const int P = g.spec.max_degree();
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(g.n));
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(P));
  for (int p = 2; p <= P; ++p) detail::put<double>(os, g.spec.c2(p));
  detail::put<std::uint64_t>(os, g.seed);
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(g.kind));
  for (const auto& t : g.tensors) {
    if (t.c2 <= 0.0) continue;
    os.write(reinterpret_cast<const char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  }
  if (g.kind == DisorderKind::planted) {
    detail::put<double>(os, g.planted_beta);
    for (int i = 0; i < g.n; ++i) detail::put<std::int8_t>(os, (*g.planted_x)[i] > 0 ? 1 : -1);
  } else if (g.kind == DisorderKind::interpolated) {
    detail::put<double>(os, g.interp_s);
    detail::put<std::uint64_t>(os, g.parent_seed0);
    detail::put<std::uint64_t>(os, g.parent_seed1);
  }
  if (!os) throw std::runtime_error("tensor file: write failed");
}

inline DisorderTensors read_disorder(std::istream& is, double budget = kDefaultTensorBudget) {
  char magic[5];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kTensorMagic, sizeof magic) != 0) throw std::runtime_error("tensor file: bad magic");
  const int n = static_cast<int>(detail::get<std::uint32_t>(is));
  const int P = static_cast<int>(detail::get<std::uint32_t>(is));
  if (P < 2 || P > 64) throw std::runtime_error("tensor file: implausible degree " + std::to_string(P));
  std::vector<MixtureTerm> terms;
  for (int p = 2; p <= P; ++p) {
    const double c2 = detail::get<double>(is);
    if (c2 > 0.0) terms.push_back({p, c2});
  }
  DisorderTensors g;
  g.n = n;
  g.spec = MixtureSpec(terms);
  detail::check_tensor_shape(g.spec, n, budget);
  g.seed = detail::get<std::uint64_t>(is);
  const auto kind = detail::get<std::uint32_t>(is);
  if (kind > 2) throw std::runtime_error("tensor file: unknown kind tag");
  g.kind = static_cast<DisorderKind>(kind);
  for (const auto& term : g.spec.terms()) {
    CouplingTensor t;
    t.p = term.p;
    t.c2 = term.c2;
    t.scale = std::sqrt(term.c2) / std::pow(static_cast<double>(n), 0.5 * (term.p - 1));
    t.data.resize(detail::ipow(n, term.p));
    is.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * sizeof(double)));
    if (!is) throw std::runtime_error("tensor file: truncated tensor data");
    g.tensors.push_back(std::move(t));
  }
  if (g.kind == DisorderKind::planted) {
    g.planted_beta = detail::get<double>(is);
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = detail::get<std::int8_t>(is) > 0 ? 1.0 : -1.0;
    g.planted_x = x;
  } else if (g.kind == DisorderKind::interpolated) {
    g.interp_s = detail::get<double>(is);
    g.parent_seed0 = detail::get<std::uint64_t>(is);
    g.parent_seed1 = detail::get<std::uint64_t>(is);
  }
  return g;
}

inline void save_disorder(const std::string& path, const DisorderTensors& g) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_disorder(os, g);
}

inline DisorderTensors load_disorder(const std::string& path, double budget = kDefaultTensorBudget) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_disorder(is, budget);
}

}  // namespace glasslocal

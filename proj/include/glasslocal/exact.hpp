#pragma once

// Exact enumeration of the tilted Gibbs measure
//   mu_{G,y}(x) ∝ exp(beta H(x) + <y, x>)  on {-1,+1}^n,
// i.i.d. sampling from it, and spin-sample batches with a packed binary form.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "glasslocal/disorder.hpp"
#include "glasslocal/localization.hpp"
#include "glasslocal/tensor_io.hpp"

namespace glasslocal {

struct ExactGibbs {
  int n = 0;
  double beta = 0.0;
  std::vector<double> prob;  // indexed as config_vector
  double log_z = 0.0;        // log sum_x exp(beta H(x) + <y, x>)
  double mean_energy = 0.0;  // E_mu[H]
  Vec mean;
  Mat second_moment;  // E_mu[x x^T]; empty unless requested
  Mat covariance;     // empty unless requested
  std::uint64_t mode = 0;
};

/// Energy table for one instance, reused across (beta, y).
class Enumerator {
 public:
  explicit Enumerator(const DisorderTensors& g, int cap = kDefaultEnumerationCap, int threads = 1)
      : n_(g.n), energy_(energy_table(g, cap, threads)) {}

  int n() const { return n_; }
  const std::vector<double>& energies() const { return energy_; }

  ExactGibbs gibbs(double beta, const Vec& y, bool moments = true) const {
    if (y.size() != n_) throw ShapeError("exact_gibbs: y has wrong length");
    ExactGibbs d;
    d.n = n_;
    d.beta = beta;
    d.prob = log_weights(beta, y);
    double mx = -std::numeric_limits<double>::infinity();
    for (double w : d.prob) mx = std::max(mx, w);
    double z = 0.0;
    for (double& w : d.prob) z += (w = std::exp(w - mx));
    d.log_z = mx + std::log(z);
    const double inv = 1.0 / z;
    Vec acc = Vec::Zero(n_);  // sum of prob over configurations with bit i set
    double best = -1.0;
    for (std::size_t c = 0; c < d.prob.size(); ++c) {
      double& p = d.prob[c];
      p *= inv;
      d.mean_energy += p * energy_[c];
      if (p > best) {
        best = p;
        d.mode = c;
      }
      for (auto b = static_cast<std::uint64_t>(c); b; b &= b - 1) acc[std::countr_zero(b)] += p;
    }
    // summed probabilities can exceed 1 by rounding once the measure is concentrated
    d.mean = (2.0 * acc - Vec::Ones(n_)).cwiseMax(-1.0).cwiseMin(1.0);
    if (moments) {
      d.second_moment = Mat::Zero(n_, n_);
      Vec x(n_);
      for (std::size_t c = 0; c < d.prob.size(); ++c) {
        for (int i = 0; i < n_; ++i) x[i] = ((c >> i) & 1u) ? 1.0 : -1.0;
        d.second_moment.selfadjointView<Eigen::Lower>().rankUpdate(x, d.prob[c]);
      }
      d.second_moment = d.second_moment.selfadjointView<Eigen::Lower>();
      d.covariance = d.second_moment - d.mean * d.mean.transpose();
    }
    return d;
  }

  /// m(G, y) only.
  Vec mean(double beta, const Vec& y) const { return gibbs(beta, y, false).mean; }

 private:
  std::vector<double> log_weights(double beta, const Vec& y) const {
    const std::size_t count = energy_.size();
    std::vector<double> w(count);
    // <y, x_c> = 2 * (sum of y_i over set bits) - sum_i y_i
    std::vector<double> partial(count, 0.0);
    const double total = y.sum();
    for (std::size_t c = 1; c < count; ++c) partial[c] = partial[c & (c - 1)] + y[std::countr_zero(c)];
    for (std::size_t c = 0; c < count; ++c) w[c] = beta * energy_[c] + 2.0 * partial[c] - total;
    return w;
  }

  int n_;
  std::vector<double> energy_;
};

inline ExactGibbs exact_gibbs(const DisorderTensors& g, double beta, const Vec& y, int cap = kDefaultEnumerationCap) {
  return Enumerator(g, cap).gibbs(beta, y);
}

enum class BatchSource : std::uint32_t { algorithm = 0, exact = 1, glauber = 2 };

inline const char* to_string(BatchSource s) {
  switch (s) {
    case BatchSource::algorithm: return "algorithm";
    case BatchSource::exact: return "exact";
    case BatchSource::glauber: return "glauber";
  }
  return "?";
}

/// M spin vectors stored as rows of a +-1 matrix.
struct SampleBatch {
  Mat x;
  BatchSource source = BatchSource::exact;
  std::uint64_t seed = 0;

  int n() const { return static_cast<int>(x.cols()); }
  int size() const { return static_cast<int>(x.rows()); }
};

/// M i.i.d. draws by inverse CDF, with uniforms Stream(seed, "exact").uniform(j).
inline SampleBatch exact_sample(const ExactGibbs& dist, int M, std::uint64_t seed) {
  if (M < 0) throw DomainError("exact_sample: M must be >= 0");
  std::vector<double> cdf(dist.prob.size());
  double run = 0.0;
  for (std::size_t c = 0; c < cdf.size(); ++c) cdf[c] = (run += dist.prob[c]);
  const rng::Stream u(seed, "exact");
  SampleBatch b;
  b.source = BatchSource::exact;
  b.seed = seed;
  b.x.resize(M, dist.n);
  for (int j = 0; j < M; ++j) {
    const double v = u.uniform(static_cast<std::uint64_t>(j)) * run;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), v);
    if (it == cdf.end()) --it;
    const auto c = static_cast<std::uint64_t>(it - cdf.begin());
    for (int i = 0; i < dist.n; ++i) b.x(j, i) = ((c >> i) & 1u) ? 1.0 : -1.0;
  }
  return b;
}

// Batch file: "GLSB1" | n:u32 | M:u32 | source:u32 | seed:u64 | M rows of
// ceil(n/8) bytes, bit i of a row set when x_i = +1 (LSB first).

inline constexpr char kBatchMagic[5] = {'G', 'L', 'S', 'B', '1'};

inline void write_batch(std::ostream& os, const SampleBatch& b) {
  os.write(kBatchMagic, sizeof kBatchMagic);
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(b.n()));
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(b.size()));
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(b.source));
  detail::put<std::uint64_t>(os, b.seed);
  std::vector<unsigned char> row((b.n() + 7) / 8);
  for (int j = 0; j < b.size(); ++j) {
    std::fill(row.begin(), row.end(), 0);
    for (int i = 0; i < b.n(); ++i)
      if (b.x(j, i) > 0) row[i / 8] |= static_cast<unsigned char>(1u << (i % 8));
    os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!os) throw std::runtime_error("batch file: write failed");
}

inline SampleBatch read_batch(std::istream& is) {
  char magic[5];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kBatchMagic, sizeof magic) != 0) throw std::runtime_error("batch file: bad magic");
  const int n = static_cast<int>(detail::get<std::uint32_t>(is));
  const int M = static_cast<int>(detail::get<std::uint32_t>(is));
  const auto source = detail::get<std::uint32_t>(is);
  if (source > 2) throw std::runtime_error("batch file: unknown source tag");
  SampleBatch b;
  b.source = static_cast<BatchSource>(source);
  b.seed = detail::get<std::uint64_t>(is);
  b.x.resize(M, n);
  std::vector<unsigned char> row((n + 7) / 8);
  for (int j = 0; j < M; ++j) {
    is.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
    if (!is) throw std::runtime_error("batch file: truncated");
    for (int i = 0; i < n; ++i) b.x(j, i) = (row[i / 8] >> (i % 8)) & 1u ? 1.0 : -1.0;
  }
  return b;
}

inline void save_batch(const std::string& path, const SampleBatch& b) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_batch(os, b);
}

inline SampleBatch load_batch(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_batch(is);
}

/// The localization SDE driven by exact means m(G, y) (tiny n). Shares the
/// Brownian and rounding streams with sample() for the same seed.
inline SampleRun sample_exact_mean(const Enumerator& en, double beta, double delta, int L, std::uint64_t seed,
                                   bool keep_trajectory = false) {
  return localization_run(en.n(), delta, L, seed, keep_trajectory, [&](const Vec& y, int) {
    return std::pair<Vec, StepDiagnostics>(en.mean(beta, y), StepDiagnostics{});
  });
}

}  // namespace glasslocal

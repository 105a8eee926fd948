#pragma once

// Counter-based random streams. A stream is a 64-bit key; the i-th draw is a
// pure function of (key, i), so any entry can be regenerated independently of
// evaluation order or thread count.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace glasslocal::rng {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Derive a child key from a parent key and one word.
constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t word) noexcept {
  return mix64(mix64(key) ^ mix64(word ^ 0xD1B54A32D192ED03ULL));
}

constexpr std::uint64_t derive(std::uint64_t key, std::string_view label) noexcept {
  return derive(key, hash_label(label));
}

class Stream {
 public:
  constexpr Stream() = default;
  constexpr explicit Stream(std::uint64_t key) : key_(key) {}
  constexpr Stream(std::uint64_t seed, std::string_view label) : key_(derive(seed, label)) {}

  constexpr std::uint64_t key() const noexcept { return key_; }

  constexpr Stream child(std::uint64_t word) const noexcept { return Stream(derive(key_, word)); }
  constexpr Stream child(std::string_view label) const noexcept { return Stream(derive(key_, label)); }

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix64(key_ ^ mix64(counter * 0xA24BAED4963EE407ULL + 0x9FB21C651E98DF25ULL));
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1).
  double uniform_open(std::uint64_t counter) const noexcept {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on the counter pair (2c, 2c+1).
  double normal(std::uint64_t counter) const noexcept {
    const double u1 = uniform_open(2 * counter);
    const double u2 = uniform(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_ = 0;
};

/// Sequential adapter over a Stream for code that consumes draws one at a time.
class Cursor {
 public:
  explicit Cursor(Stream s, std::uint64_t start = 0) : stream_(s), next_(start) {}
  double uniform() noexcept { return stream_.uniform(next_++); }
  double normal() noexcept { return stream_.normal(next_++); }
  std::uint64_t position() const noexcept { return next_; }

 private:
  Stream stream_;
  std::uint64_t next_;
};

}  // namespace glasslocal::rng

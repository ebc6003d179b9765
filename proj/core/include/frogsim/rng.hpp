#pragma once

// Counter-based randomness. Every random quantity in the library is a pure
// function of (master seed, domain, replicate, stream ids, counter), so a
// stream can be re-generated or extended from any point without carrying
// state, and replicates can be scheduled on any number of workers without
// perturbing sampled values.

#include <array>
#include <cmath>
#include <cstdint>

#include "frogsim/types.hpp"

namespace frogsim {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::array<std::uint32_t, 2>& key) {
  constexpr std::uint64_t m0 = 0xD2511F53ULL;
  constexpr std::uint64_t m1 = 0xCD9E8D57ULL;
  const std::uint64_t p0 = m0 * ctr[0];
  const std::uint64_t p1 = m1 * ctr[2];
  ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
         static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
         static_cast<std::uint32_t>(p0)};
  key[0] += 0x9E3779B9u;
  key[1] += 0xBB67AE85u;
}

}  // namespace detail

// Philox4x32-10 block: 128 counter bits, 64 key bits -> 128 output bits.
inline std::array<std::uint32_t, 4> philox4x32(std::uint64_t key, std::uint64_t ctr_hi,
                                               std::uint64_t ctr_lo) {
  std::array<std::uint32_t, 4> c = {
      static_cast<std::uint32_t>(ctr_lo), static_cast<std::uint32_t>(ctr_lo >> 32),
      static_cast<std::uint32_t>(ctr_hi), static_cast<std::uint32_t>(ctr_hi >> 32)};
  std::array<std::uint32_t, 2> k = {static_cast<std::uint32_t>(key),
                                    static_cast<std::uint32_t>(key >> 32)};
  for (int r = 0; r < 10; ++r) detail::philox_round(c, k);
  return c;
}

// A 64-bit stream key identifying (master seed, domain, replicate).
struct StreamKey {
  std::uint64_t v = 0;
};

// Domains keep unrelated consumers of the same (seed, replicate) independent.
enum class RngDomain : std::uint64_t {
  field_counts = 1,
  field_marks = 2,
  frog_walk = 3,
  multiwalk_start = 4,
  multiwalk_step = 5,
  estimator = 6,
  percolation = 7,
  bootstrap = 8,
  generator = 9,
};

inline StreamKey derive_key(std::uint64_t master_seed, RngDomain domain, std::uint64_t replicate) {
  std::uint64_t h = detail::splitmix64(master_seed ^ 0x8f462907u);
  h = detail::splitmix64(h ^ static_cast<std::uint64_t>(domain) * 0xff51afd7ed558ccdULL);
  h = detail::splitmix64(h ^ replicate);
  return StreamKey{h};
}

inline std::uint64_t prf_u64(StreamKey key, std::uint64_t a, std::uint64_t b) {
  const auto w = philox4x32(key.v, a, b);
  return (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
}

// Uniform in (0,1); never returns 0 or 1 exactly.
inline double prf_uniform(StreamKey key, std::uint64_t a, std::uint64_t b) {
  return (static_cast<double>(prf_u64(key, a, b) >> 11) + 0.5) * 0x1.0p-53;
}

// Buffered u32 stream over a fixed (key, id) pair; one Philox block feeds
// four draws. Draw i is a pure function of (key, id, i), so prefixes are
// stable under extension.
class U32Stream {
 public:
  U32Stream(StreamKey key, std::uint64_t id) : key_(key), id_(id) {}

  std::uint32_t next() {
    if (pos_ == 4) refill();
    return block_[pos_++];
  }

  double next_uniform() {
    const std::uint64_t hi = next();
    const std::uint64_t lo = next();
    return (static_cast<double>(((hi << 32) | lo) >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, n) via the multiply-shift map; bias is O(n/2^32).
  std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(next()) * n) >> 32);
  }

  void skip_to(std::uint64_t draw_index) {
    block_index_ = draw_index / 4;
    pos_ = 4;
    refill();
    pos_ = static_cast<int>(draw_index % 4);
  }

 private:
  void refill() {
    block_ = philox4x32(key_.v, id_, block_index_);
    ++block_index_;
    pos_ = 0;
  }

  StreamKey key_;
  std::uint64_t id_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int pos_ = 4;
};

// Poisson sampler: inversion below lambda = 30, PTRS rejection above.
// Consumes a variable number of draws from the stream; reproducible because
// the stream itself is counter-based.
inline std::int64_t sample_poisson(U32Stream& s, double lambda) {
  if (lambda <= 0.0) return 0;
  if (lambda <= 30.0) {
    const double l = std::exp(-lambda);
    std::int64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= s.next_uniform();
    } while (p > l);
    return k - 1;
  }
  // PTRS (Hormann 1993), transformed rejection.
  const double b = 0.931 + 2.53 * std::sqrt(lambda);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_lambda = std::log(lambda);
  for (;;) {
    double u = s.next_uniform() - 0.5;
    double v = s.next_uniform();
    double us = 0.5 - std::fabs(u);
    double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_lambda - lambda - std::lgamma(k + 1.0)) {
      return static_cast<std::int64_t>(k);
    }
  }
}

}  // namespace frogsim

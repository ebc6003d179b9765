#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "frogsim/graph.hpp"
#include "frogsim/rng.hpp"

namespace frogsim {

enum class WalkKernel { srw, lazy_srw };

// Particle index reserved for the planted walker at the origin.
inline constexpr std::uint32_t kPlantedParticle = 0xffffffffu;

inline std::uint64_t walker_stream_id(Vertex home, std::uint32_t particle) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(home)) << 32) | particle;
}

// One SRW/LSRW step driven by a single 32-bit draw.
inline Vertex walk_step(const Graph& g, Vertex pos, WalkKernel kernel, U32Stream& s) {
  const std::uint32_t u = s.next();
  const auto nb = g.neighbors(pos);
  if (kernel == WalkKernel::lazy_srw) {
    if (u & 0x80000000u) return pos;
    return nb[(static_cast<std::uint64_t>(u & 0x7fffffffu) * nb.size()) >> 31];
  }
  return nb[(static_cast<std::uint64_t>(u) * nb.size()) >> 32];
}

// Poisson particle field with per-vertex arrival marks in (0, lambda_max].
// Thresholding the marks at lambda' <= lambda_max recovers the coupled field
// of density lambda': the particle set at lambda1 is a pointwise subset of
// the set at lambda2 whenever lambda1 <= lambda2, on the same replicate.
class ParticleField {
 public:
  ParticleField(const Graph& g, double lambda_max, Vertex origin, std::uint64_t master_seed,
                std::uint64_t replicate);

  double lambda_max() const { return lambda_max_; }
  Vertex origin() const { return origin_; }
  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t replicate() const { return replicate_; }

  // Ambient count at density lambda (the planted walker is not included).
  std::int64_t count(Vertex v, double lambda) const;
  std::int64_t count_at_max(Vertex v) const {
    return marks_offsets_[static_cast<std::size_t>(v) + 1] -
           marks_offsets_[static_cast<std::size_t>(v)];
  }
  std::span<const double> marks(Vertex v) const {
    return {marks_.data() + marks_offsets_[static_cast<std::size_t>(v)],
            marks_.data() + marks_offsets_[static_cast<std::size_t>(v) + 1]};
  }
  std::int64_t total(double lambda) const;
  // For memory budgeting.
  double expected_total() const { return lambda_max_ * static_cast<double>(n_); }

 private:
  Vertex n_ = 0;
  double lambda_max_ = 0.0;
  Vertex origin_ = 0;
  std::uint64_t master_seed_ = 0;
  std::uint64_t replicate_ = 0;
  std::vector<std::int64_t> marks_offsets_;
  std::vector<double> marks_;  // sorted within each vertex segment
};

// Reproducible, lazily extendable trajectory. Extension never changes
// already-sampled steps: step j is a pure function of (key, stream id, j).
class WalkStream {
 public:
  WalkStream(const Graph& g, Vertex start, StreamKey walk_key, std::uint64_t stream_id,
             WalkKernel kernel);

  void extend(Step new_horizon);
  Step horizon() const { return static_cast<Step>(traj_.size()) - 1; }
  Vertex at(Step j) const { return traj_[static_cast<std::size_t>(j)]; }
  std::span<const Vertex> trajectory() const { return traj_; }
  WalkKernel kernel() const { return kernel_; }

 private:
  const Graph* g_;
  WalkKernel kernel_;
  U32Stream stream_;
  std::vector<Vertex> traj_;
};

// First-hit map of one vertex's walker population: for every target y hit
// within the horizon, the earliest step j >= 1 with S_j = y, minimized over
// the population. The source itself is never recorded.
struct FirstHitMap {
  struct Entry {
    Vertex target;
    Step step;
  };
  struct WalkerState {
    std::uint32_t particle;
    Vertex pos;  // position at `horizon`
  };

  Vertex source = -1;
  Step horizon = 0;
  std::vector<Entry> hits;  // sorted by step ascending
  std::vector<WalkerState> walkers;

  std::optional<Step> lookup(Vertex target) const {
    for (const auto& e : hits) {
      if (e.target == target) return e.step;
    }
    return std::nullopt;
  }
};

// Reusable per-graph scratch so building a map is allocation-light.
class FirstHitScratch {
 public:
  explicit FirstHitScratch(Vertex n)
      : best_(static_cast<std::size_t>(n), 0), epoch_(static_cast<std::size_t>(n), 0) {}

  void begin() { ++current_; touched_.clear(); }
  bool record(Vertex v, Step step) {  // true if v is new this round
    auto& e = epoch_[static_cast<std::size_t>(v)];
    if (e != current_) {
      e = current_;
      best_[static_cast<std::size_t>(v)] = step;
      touched_.push_back(v);
      return true;
    }
    auto& b = best_[static_cast<std::size_t>(v)];
    if (step < b) b = step;
    return false;
  }
  void mark_existing(Vertex v) {
    epoch_[static_cast<std::size_t>(v)] = current_;
  }
  Step best(Vertex v) const { return best_[static_cast<std::size_t>(v)]; }
  std::span<const Vertex> touched() const { return touched_; }

 private:
  std::vector<Step> best_;
  std::vector<std::uint64_t> epoch_;
  std::vector<Vertex> touched_;
  std::uint64_t current_ = 0;
};

// Key for all frog-model walker trajectories of one replicate.
inline StreamKey frog_walk_key(std::uint64_t master_seed, std::uint64_t replicate) {
  return derive_key(master_seed, RngDomain::frog_walk, replicate);
}

FirstHitMap first_hit_map(const Graph& g, StreamKey walk_key, WalkKernel kernel, Vertex source,
                          std::span<const std::uint32_t> particles, Step horizon,
                          FirstHitScratch& scratch);

// Prefix-stable horizon extension; may only add entries with step > old horizon.
void extend_first_hit_map(const Graph& g, StreamKey walk_key, WalkKernel kernel, FirstHitMap& map,
                          Step new_horizon, FirstHitScratch& scratch);

ParticleField sample_field(const Graph& g, double lambda_max, Vertex origin,
                           std::uint64_t master_seed, std::uint64_t replicate);

WalkStream walk_stream(const Graph& g, Vertex start, std::uint64_t master_seed,
                       std::uint64_t replicate, Vertex home, std::uint32_t particle,
                       WalkKernel kernel, Step horizon);

}  // namespace frogsim

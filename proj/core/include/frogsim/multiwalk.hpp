#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "frogsim/graph.hpp"
#include "frogsim/hitting.hpp"
#include "frogsim/rng.hpp"

namespace frogsim {

// Walkers of one multiwalk realization: walker i starts at a uniform vertex
// and walks independently; both its start and its steps are pure functions of
// (master seed, replicate, i). C(G,t) and D(G,m) are two readouts of the same
// ordered walker list, which turns the duality P[D(G,s)>t] = P[C(G,t)>s] into
// a per-realization identity.
class MultiwalkRealization {
 public:
  MultiwalkRealization(const Graph& g, std::uint64_t master_seed, std::uint64_t replicate);

  // Walks walkers 1..s (appending as needed) out to `horizon` steps each.
  void ensure(int s, Step horizon);

  // D(G,s) on this realization, or kNever when the first s walkers do not
  // cover V within the built horizon (meaning "greater than the horizon").
  Step d_value(int s) const;

  // C(G,t): walkers needed until the union of t-prefixes covers V; appends
  // walkers up to walker_cap. Returns nullopt when the cap censors.
  std::optional<int> c_value(Step t, int walker_cap);

  int built() const { return built_; }
  Step horizon() const { return horizon_; }
  Vertex start_of(int walker) const;

 private:
  void append_walker();

  const Graph* g_;
  std::uint64_t master_seed_;
  std::uint64_t replicate_;
  StreamKey start_key_;
  StreamKey step_key_;
  int built_ = 0;
  Step horizon_ = 0;
  std::vector<Step> best_;       // per-vertex min first-hit over built walkers
  Vertex uncovered_ = 0;         // vertices with best == kNever
  std::vector<Step> d_profile_;  // d_profile_[s-1] = D after s walkers
};

struct CoverSample {
  Step value = 0;       // D(G,m) in fixed-walkers mode
  int walkers = 0;      // C(G,t) in fixed-length mode
  bool censored = false;
};

// D(G,m): first t at which m walkers' t-prefixes cover V; step-synchronous
// with a remaining-vertex counter, censored at horizon_cap.
CoverSample cover_fixed_walkers(const Graph& g, int m, std::uint64_t master_seed,
                                std::uint64_t replicate, Step horizon_cap);

// C(G,t): walkers appended one at a time until the t-prefixes cover V,
// censored at walker_cap. Shares the walker list with cover_fixed_walkers.
CoverSample cover_fixed_length(const Graph& g, Step t, std::uint64_t master_seed,
                               std::uint64_t replicate, int walker_cap);

struct RangeFraction {
  double p_t = 0.0;
  double ci_half = 0.0;
  Step t = 0;
  bool transitive = true;  // the identity p_t = Pr_pi[T_v <= t] needs symmetry
};

// Estimates p_t = E|R(t)| / |V| from independent uniformly-started walks.
RangeFraction range_fraction(const Graph& g, Step t, std::int64_t reps,
                             std::uint64_t master_seed);

struct MatthewsBounds {
  double lower = 0.0;  // H_min^A * h(|A| - 1)
  double upper = 0.0;  // H_max * h(|V|)
  std::vector<Vertex> a;
};

MatthewsBounds matthews_bounds(const HittingMatrix& hitting, std::span<const Vertex> a);
MatthewsBounds matthews_bounds(const Graph& g, std::span<const Vertex> a, Vertex cap = 4096);

struct ThresholdStat {
  Step t_lambda = 0;        // min{s : 2s / nu_s >= log|V| / lambda}
  Step t_lambda_delta = 0;  // min{s : 2 s lambda >= (1-delta) nu_s log|V|}
  double lambda = 0.0;
  double delta = 0.0;
};

// Scans s upward with horizon doubling on the Green prefix; the crossing
// predicate is not monotone in s (parity of returns), so the minimum is
// located by exact scan inside the bracket.
ThresholdStat threshold_stats(const Graph& g, double lambda, double delta, Step s_cap = 1 << 20);

}  // namespace frogsim

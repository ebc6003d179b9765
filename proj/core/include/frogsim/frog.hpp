#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "frogsim/graph.hpp"
#include "frogsim/sampling.hpp"

namespace frogsim {

struct HorizonConfig {
  Step initial = 0;            // 0 = automatic policy
  Step cap = Step{1} << 24;    // hard cap; results beyond it are censored
};

struct ActivationResult {
  Step tau = 0;                // lifetime used; kNever means "infinite within horizon"
  std::vector<Step> at;        // per-vertex activation times, kNever if unreached
  std::vector<Vertex> visited; // ascending vertex ids with finite labels
  bool censored = false;
};

struct SusceptibilityOutcome {
  Step s_value = 0;
  bool censored = false;
  std::optional<Step> ct_value;
  std::uint64_t replicate = 0;
  double lambda = 0.0;
};

struct CoverOutcome {
  Step ct = 0;
  bool censored = false;
};

enum class RestrictedKind { standard, planted_long, seeded_set };

struct RestrictedVariant {
  RestrictedKind kind = RestrictedKind::standard;
  Step tau = 0;                // lifetime (standard), planted lifetime t (planted_long)
  Step ambient = 0;            // ambient lifetime M (planted_long)
  std::vector<Vertex> seeds;   // initially activated set A (seeded_set)
};

struct VisitSet {
  std::vector<Vertex> vertices;  // ascending
  RestrictedVariant variant;
  bool censored = false;
};

struct DensityReport {
  bool dense = false;
  double min_density = 0.0;
  std::vector<double> box_density;
};

// Def of (alpha, r)-density: every box of the partition holds at least an
// alpha fraction of its vertices inside the visit set.
DensityReport is_dense(std::span<const Vertex> visit, const BoxPartition& part, double alpha,
                       const Graph& g);

// One frog-model realization: a graph, a particle field thresholded at
// `lambda`, and the walker trajectories of this replicate. First-hit maps are
// materialized lazily per activated source and extended as the horizon grows;
// trajectories themselves are never retained.
class FrogRealization {
 public:
  FrogRealization(const Graph& g, const ParticleField& field, double lambda,
                  WalkKernel kernel = WalkKernel::srw, HorizonConfig horizon = {});

  // Exact activation labels for lifetime tau (single-source shortest path
  // over first-hit weights from the origin).
  ActivationResult activation_times(Step tau);

  // Reachability-only probe: does lifetime tau cover every vertex?
  bool covers(Step tau);

  // Minimal lifetime whose visit set is all of V, by horizon doubling plus
  // binary search over tau; censored when the horizon cap is exhausted.
  SusceptibilityOutcome susceptibility();

  // max_v AT_inf(v): activation labels with unbounded lifetime, exact when
  // the horizon admits it, censored at the cap otherwise.
  CoverOutcome cover_time();

  VisitSet restricted(const RestrictedVariant& variant);

  const Graph& graph() const { return *g_; }
  double lambda() const { return lambda_; }
  Step horizon() const { return horizon_now_; }

 private:
  struct SourceMaps {
    std::optional<FirstHitMap> ambient;
    bool materialized = false;
  };

  void ensure_horizon(Step h);
  const FirstHitMap* ambient_map(Vertex v);
  const FirstHitMap* planted_map();
  bool reach(Step planted_tau, Step ambient_tau, std::span<const Vertex> seeds,
             bool use_planted, std::vector<Vertex>* out_visited);
  std::vector<Step> labels(Step planted_tau, Step ambient_tau, std::span<const Vertex> seeds,
                           bool use_planted);

  const Graph* g_;
  const ParticleField* field_;
  double lambda_;
  WalkKernel kernel_;
  HorizonConfig cfg_;
  StreamKey walk_key_;
  Step horizon_now_ = 0;
  std::vector<SourceMaps> maps_;
  std::optional<FirstHitMap> planted_map_;
  FirstHitScratch scratch_;
  std::vector<std::uint32_t> particle_ids_;  // scratch for map construction
  // reach/labels scratch
  std::vector<std::uint64_t> seen_epoch_;
  std::uint64_t epoch_ = 0;
};

// Direct discrete-event simulation of the frog dynamics, used as an oracle:
// active particles step synchronously, activate sleepers they hit, and vanish
// after their lifetime. Supports the standard model and both restricted
// variants through `variant`. Budget is in particle-steps.
struct BruteForceResult {
  std::vector<Step> first_visit;  // per-vertex, kNever if never visited
  std::vector<Vertex> visited;    // ascending
  std::int64_t steps_used = 0;
};

BruteForceResult brute_force_frog(const Graph& g, const ParticleField& field, double lambda,
                                  const RestrictedVariant& variant,
                                  WalkKernel kernel = WalkKernel::srw,
                                  std::int64_t budget = 1000);

// Versioned line-text dump of a realization for debugging: field counts,
// stream seeds and activation labels.
void dump_realization(std::ostream& out, const Graph& g, const ParticleField& field,
                      double lambda, const ActivationResult& result);

}  // namespace frogsim

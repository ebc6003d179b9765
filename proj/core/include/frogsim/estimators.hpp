#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "frogsim/graph.hpp"
#include "frogsim/rng.hpp"

namespace frogsim {

enum class RhoMethod { truncated_mc, green_series };

struct EscapeEstimate {
  int d = 0;
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  RhoMethod method = RhoMethod::green_series;
  // Truncation makes the MC estimate biased upward; the bound below is the
  // analytic allowance already folded into `lo`.
  double truncation_allowance = 0.0;
};

struct RhoBudget {
  std::int64_t horizon = 100000;  // truncated MC walk length
  std::int64_t reps = 4000;       // truncated MC replicates
  std::int64_t terms = 1500;      // Green series partial-sum length (in 2k steps)
  std::uint64_t seed = 1;
};

// Escape probability of SRW on Z^d. Exact 0 for d in {1,2}; for d >= 3 either
// a truncated Monte-Carlo walk on a large torus proxy or the reciprocal of
// the return-probability series with an analytic tail bracket.
EscapeEstimate rho_estimate(int d, RhoMethod method, const RhoBudget& budget = {});

// Return probability P^{2k}(0,0) of SRW on Z^d, exact in floating point.
double zd_return_probability(int d, std::int64_t k);

struct RangeStats {
  Step t = 0;
  double mean_size = 0.0;
  double ci_half = 0.0;
  // Empirical Pr[|R(t)| <= a sqrt(t)] when a tail threshold was requested.
  std::optional<double> tail_freq;
};

RangeStats range_stats(const Graph& g, Step t, std::int64_t reps, std::uint64_t seed,
                       std::optional<double> tail_a = std::nullopt);

enum class HitTimeRegime {
  polynomial,  // t = C * |a|^(2+2alpha), limit alpha/(1+alpha)
  linear,      // t = C * |a|^2, order (1+log C)/log(C |a|^2)
  sub_linear,  // t = c * |a|^2 with c <= 1
};

struct HitProbSpec {
  HitTimeRegime regime = HitTimeRegime::polynomial;
  double c = 1.0;      // C or c above
  double alpha = 1.0;  // polynomial regime only
};

struct HitProbResult {
  double frequency = 0.0;
  double ci_half = 0.0;
  Step t = 0;
  double theory = 0.0;  // matching regime's leading-order value
};

// Monte-Carlo Pr_0[T_a <= t] on a 2-d torus, with the theory value of the
// matching regime attached.
HitProbResult hit_prob_2d(const Graph& torus2, Vertex target, const HitProbSpec& spec,
                          std::int64_t reps, std::uint64_t seed);

struct LDBoundReport {
  std::int64_t n = 0;
  double p = 0.0;
  double delta = 0.0;
  std::optional<std::int64_t> k;

  double upper_bound_sharp = 0.0;  // (1+p d)^n / (1+d)^((1+d)np)
  double upper_bound_exp = 0.0;    // exp(-np d log(1+d)/4)
  double lower_bound_sharp = 0.0;
  double lower_bound_exp = 0.0;    // exp(-np d^2/4)
  std::optional<double> sup_upper_bound;  // delta >= 1, requires k
  std::optional<double> sup_lower_bound;  // delta in (0,1), requires k

  double exact_upper_tail = 0.0;  // Pr[S_n >= np(1+delta)]
  double exact_lower_tail = 0.0;  // Pr[S_n <= np(1-delta)], delta < 1

  bool upper_sound = false;  // exact <= both upper bound forms
  bool lower_sound = false;
};

// Evaluates the four large-deviation bounds and the exact binomial tails;
// throws DomainError when delta lies outside an inequality's stated range.
LDBoundReport ld_bounds(std::int64_t n, double p, double delta,
                        std::optional<std::int64_t> k = std::nullopt);

struct PercolationResult {
  double p = 0.0;
  std::vector<char> open;
  std::vector<std::int64_t> component_sizes;  // indexed by component id
  std::int64_t open_count = 0;
  std::int64_t gc_size = 0;
  double threshold = 0.0;  // prefactor * (log n)^(d/(d-1))
  bool unique_large = false;

  // Component id per vertex (-1 for closed) and the giant's id, for
  // box-density and intersection statistics.
  std::vector<std::int32_t> component_id;
  std::int32_t gc_id = -1;
};

// Bernoulli site percolation on a torus with union-find components,
// cross-checkable against BFS flood fill.
PercolationResult site_percolation(const Graph& torus, double p, std::uint64_t seed,
                                   double threshold_prefactor = 1.0);

}  // namespace frogsim

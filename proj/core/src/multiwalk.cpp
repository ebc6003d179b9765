#include "frogsim/multiwalk.hpp"

#include <algorithm>
#include <cmath>

#include "frogsim/green.hpp"
#include "frogsim/sampling.hpp"
#include "frogsim/stats.hpp"

namespace frogsim {

MultiwalkRealization::MultiwalkRealization(const Graph& g, std::uint64_t master_seed,
                                           std::uint64_t replicate)
    : g_(&g),
      master_seed_(master_seed),
      replicate_(replicate),
      start_key_(derive_key(master_seed, RngDomain::multiwalk_start, replicate)),
      step_key_(derive_key(master_seed, RngDomain::multiwalk_step, replicate)),
      best_(static_cast<std::size_t>(g.n), kNever),
      uncovered_(g.n) {}

Vertex MultiwalkRealization::start_of(int walker) const {
  U32Stream s(start_key_, static_cast<std::uint64_t>(walker));
  return static_cast<Vertex>(s.below(static_cast<std::uint32_t>(g_->n)));
}

void MultiwalkRealization::append_walker() {
  const int i = built_;
  Vertex pos = start_of(i);
  if (best_[static_cast<std::size_t>(pos)] > 0) {
    if (best_[static_cast<std::size_t>(pos)] == kNever) --uncovered_;
    best_[static_cast<std::size_t>(pos)] = 0;
  }
  U32Stream s(step_key_, static_cast<std::uint64_t>(i));
  for (Step j = 1; j <= horizon_; ++j) {
    pos = walk_step(*g_, pos, WalkKernel::srw, s);
    auto& b = best_[static_cast<std::size_t>(pos)];
    if (j < b) {
      if (b == kNever) --uncovered_;
      b = j;
    }
  }
  Step d = 0;
  if (uncovered_ > 0) {
    d = kNever;
  } else {
    for (Step b : best_) d = std::max(d, b);
  }
  d_profile_.push_back(d);
  ++built_;
}

void MultiwalkRealization::ensure(int s, Step horizon) {
  if (horizon > horizon_) {
    // Re-walk everything at the longer horizon; trajectories are pure
    // functions of (key, walker, step), so prefixes are unchanged.
    horizon_ = horizon;
    built_ = 0;
    d_profile_.clear();
    std::fill(best_.begin(), best_.end(), kNever);
    uncovered_ = g_->n;
  }
  while (built_ < s) append_walker();
}

Step MultiwalkRealization::d_value(int s) const {
  if (s < 1 || s > built_) throw InvalidParams("d_value: walker prefix not built");
  return d_profile_[static_cast<std::size_t>(s) - 1];
}

std::optional<int> MultiwalkRealization::c_value(Step t, int walker_cap) {
  if (t > horizon_) ensure(built_, t);
  for (int s = 1; s <= walker_cap; ++s) {
    if (s > built_) ensure(s, horizon_);
    if (d_profile_[static_cast<std::size_t>(s) - 1] <= t) return s;
  }
  return std::nullopt;
}

CoverSample cover_fixed_walkers(const Graph& g, int m, std::uint64_t master_seed,
                                std::uint64_t replicate, Step horizon_cap) {
  if (m < 1) throw InvalidParams("cover_fixed_walkers requires m >= 1");
  const StreamKey start_key = derive_key(master_seed, RngDomain::multiwalk_start, replicate);
  const StreamKey step_key = derive_key(master_seed, RngDomain::multiwalk_step, replicate);
  std::vector<char> seen(static_cast<std::size_t>(g.n), 0);
  Vertex remaining = g.n;
  std::vector<Vertex> pos(static_cast<std::size_t>(m));
  std::vector<U32Stream> streams;
  streams.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    U32Stream s0(start_key, static_cast<std::uint64_t>(i));
    pos[static_cast<std::size_t>(i)] =
        static_cast<Vertex>(s0.below(static_cast<std::uint32_t>(g.n)));
    if (!seen[static_cast<std::size_t>(pos[static_cast<std::size_t>(i)])]) {
      seen[static_cast<std::size_t>(pos[static_cast<std::size_t>(i)])] = 1;
      --remaining;
    }
    streams.emplace_back(step_key, static_cast<std::uint64_t>(i));
  }
  if (remaining == 0) return {0, m, false};
  for (Step t = 1; t <= horizon_cap; ++t) {
    for (int i = 0; i < m; ++i) {
      Vertex& p = pos[static_cast<std::size_t>(i)];
      p = walk_step(g, p, WalkKernel::srw, streams[static_cast<std::size_t>(i)]);
      if (!seen[static_cast<std::size_t>(p)]) {
        seen[static_cast<std::size_t>(p)] = 1;
        if (--remaining == 0) return {t, m, false};
      }
    }
  }
  return {horizon_cap, m, true};
}

CoverSample cover_fixed_length(const Graph& g, Step t, std::uint64_t master_seed,
                               std::uint64_t replicate, int walker_cap) {
  if (t < 0) throw InvalidParams("cover_fixed_length requires t >= 0");
  const StreamKey start_key = derive_key(master_seed, RngDomain::multiwalk_start, replicate);
  const StreamKey step_key = derive_key(master_seed, RngDomain::multiwalk_step, replicate);
  std::vector<char> seen(static_cast<std::size_t>(g.n), 0);
  Vertex remaining = g.n;
  for (int i = 0; i < walker_cap; ++i) {
    U32Stream s0(start_key, static_cast<std::uint64_t>(i));
    Vertex p = static_cast<Vertex>(s0.below(static_cast<std::uint32_t>(g.n)));
    if (!seen[static_cast<std::size_t>(p)]) {
      seen[static_cast<std::size_t>(p)] = 1;
      --remaining;
    }
    U32Stream s(step_key, static_cast<std::uint64_t>(i));
    for (Step j = 1; j <= t && remaining > 0; ++j) {
      p = walk_step(g, p, WalkKernel::srw, s);
      if (!seen[static_cast<std::size_t>(p)]) {
        seen[static_cast<std::size_t>(p)] = 1;
        --remaining;
      }
    }
    if (remaining == 0) return {t, i + 1, false};
  }
  return {t, walker_cap, true};
}

RangeFraction range_fraction(const Graph& g, Step t, std::int64_t reps,
                             std::uint64_t master_seed) {
  if (t < 0 || reps < 1) throw InvalidParams("range_fraction requires t >= 0, reps >= 1");
  RangeFraction out;
  out.t = t;
  out.transitive = g.family == Family::cycle || g.family == Family::torus ||
                   g.family == Family::complete;
  std::vector<std::int64_t> stamp(static_cast<std::size_t>(g.n), -1);
  std::vector<double> sizes;
  sizes.reserve(static_cast<std::size_t>(reps));
  for (std::int64_t r = 0; r < reps; ++r) {
    const StreamKey start_key = derive_key(master_seed, RngDomain::multiwalk_start, 0x7a3c);
    const StreamKey step_key = derive_key(master_seed, RngDomain::multiwalk_step, 0x7a3c);
    U32Stream s0(start_key, static_cast<std::uint64_t>(r));
    Vertex p = static_cast<Vertex>(s0.below(static_cast<std::uint32_t>(g.n)));
    std::int64_t size = 0;
    if (stamp[static_cast<std::size_t>(p)] != r) {
      stamp[static_cast<std::size_t>(p)] = r;
      ++size;
    }
    U32Stream s(step_key, static_cast<std::uint64_t>(r));
    for (Step j = 1; j <= t; ++j) {
      p = walk_step(g, p, WalkKernel::srw, s);
      if (stamp[static_cast<std::size_t>(p)] != r) {
        stamp[static_cast<std::size_t>(p)] = r;
        ++size;
      }
    }
    sizes.push_back(static_cast<double>(size));
  }
  const double n = static_cast<double>(g.n);
  out.p_t = mean(sizes) / n;
  out.ci_half = mean_ci(sizes).half_width() / n;
  return out;
}

MatthewsBounds matthews_bounds(const HittingMatrix& hitting, std::span<const Vertex> a) {
  if (a.empty()) throw InvalidParams("matthews_bounds requires a non-empty target set");
  MatthewsBounds out;
  out.a.assign(a.begin(), a.end());
  out.upper = hitting.max_hitting() * harmonic(hitting.n);
  // Lower bound uses h(|A|-1): with h(|A|) it would exceed the true cover
  // time on complete graphs (A = V gives H_min h(n) > (n-1) h(n-1)).
  out.lower = a.size() >= 2
                  ? hitting.min_hitting(a) * harmonic(static_cast<std::int64_t>(a.size()) - 1)
                  : 0.0;
  return out;
}

MatthewsBounds matthews_bounds(const Graph& g, std::span<const Vertex> a, Vertex cap) {
  return matthews_bounds(hitting_times_exact(g, cap), a);
}

ThresholdStat threshold_stats(const Graph& g, double lambda, double delta, Step s_cap) {
  if (lambda <= 0.0) throw InvalidParams("threshold_stats requires lambda > 0");
  if (delta < 0.0 || delta >= 1.0) throw InvalidParams("threshold_stats requires delta in [0,1)");
  ThresholdStat out;
  out.lambda = lambda;
  out.delta = delta;
  const double log_n = std::log(static_cast<double>(g.n));
  std::optional<Step> t_lambda, t_lambda_delta;
  Step horizon = 64;
  for (;;) {
    const auto nu = green_prefix_min(g, horizon, g.n);
    for (Step s = 0; s <= horizon; ++s) {
      const double nu_s = nu[static_cast<std::size_t>(s)];
      if (!t_lambda && 2.0 * static_cast<double>(s) / nu_s >= log_n / lambda) t_lambda = s;
      if (!t_lambda_delta &&
          2.0 * static_cast<double>(s) * lambda >= (1.0 - delta) * nu_s * log_n) {
        t_lambda_delta = s;
      }
      if (t_lambda && t_lambda_delta) break;
    }
    if (t_lambda && t_lambda_delta) break;
    if (horizon >= s_cap) {
      throw NoCrossingWithinCap("no threshold crossing below s = " + std::to_string(s_cap));
    }
    horizon = std::min(s_cap, horizon * 2);
  }
  out.t_lambda = *t_lambda;
  out.t_lambda_delta = *t_lambda_delta;
  return out;
}

}  // namespace frogsim

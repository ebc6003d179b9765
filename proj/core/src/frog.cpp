#include "frogsim/frog.hpp"

#include <algorithm>
#include <ostream>
#include <queue>

namespace frogsim {

DensityReport is_dense(std::span<const Vertex> visit, const BoxPartition& part, double alpha,
                       const Graph& g) {
  if (part.dim != g.dim || part.side != g.side) {
    throw PartitionMismatch("partition does not belong to this torus");
  }
  std::vector<char> in(static_cast<std::size_t>(g.n), 0);
  for (Vertex v : visit) in[static_cast<std::size_t>(v)] = 1;
  DensityReport rep;
  rep.dense = true;
  rep.min_density = 1.0;
  rep.box_density.reserve(part.boxes.size());
  for (const auto& box : part.boxes) {
    std::int64_t hit = 0;
    for (Vertex v : box) hit += in[static_cast<std::size_t>(v)];
    const double density = static_cast<double>(hit) / static_cast<double>(box.size());
    rep.box_density.push_back(density);
    rep.min_density = std::min(rep.min_density, density);
    if (density < alpha) rep.dense = false;
  }
  return rep;
}

FrogRealization::FrogRealization(const Graph& g, const ParticleField& field, double lambda,
                                 WalkKernel kernel, HorizonConfig horizon)
    : g_(&g),
      field_(&field),
      lambda_(lambda),
      kernel_(kernel),
      cfg_(horizon),
      walk_key_(frog_walk_key(field.master_seed(), field.replicate())),
      maps_(static_cast<std::size_t>(g.n)),
      scratch_(g.n),
      seen_epoch_(static_cast<std::size_t>(g.n), 0) {
  if (lambda > field.lambda_max()) {
    throw InvalidParams("realization density exceeds the field's lambda_max");
  }
  horizon_now_ = std::max<Step>(1, cfg_.initial);
}

void FrogRealization::ensure_horizon(Step h) {
  if (h <= horizon_now_) return;
  horizon_now_ = h;
  for (Vertex v = 0; v < g_->n; ++v) {
    auto& sm = maps_[static_cast<std::size_t>(v)];
    if (sm.materialized && sm.ambient.has_value()) {
      extend_first_hit_map(*g_, walk_key_, kernel_, *sm.ambient, horizon_now_, scratch_);
    }
  }
  if (planted_map_.has_value()) {
    extend_first_hit_map(*g_, walk_key_, kernel_, *planted_map_, horizon_now_, scratch_);
  }
}

const FirstHitMap* FrogRealization::ambient_map(Vertex v) {
  auto& sm = maps_[static_cast<std::size_t>(v)];
  if (!sm.materialized) {
    sm.materialized = true;
    const auto k = field_->count(v, lambda_);
    if (k > 0) {
      particle_ids_.clear();
      for (std::int64_t i = 0; i < k; ++i) {
        particle_ids_.push_back(static_cast<std::uint32_t>(i));
      }
      sm.ambient = first_hit_map(*g_, walk_key_, kernel_, v, particle_ids_, horizon_now_, scratch_);
    }
  } else if (sm.ambient.has_value() && sm.ambient->horizon < horizon_now_) {
    extend_first_hit_map(*g_, walk_key_, kernel_, *sm.ambient, horizon_now_, scratch_);
  }
  return sm.ambient.has_value() ? &*sm.ambient : nullptr;
}

const FirstHitMap* FrogRealization::planted_map() {
  if (!planted_map_.has_value()) {
    const std::uint32_t ids[1] = {kPlantedParticle};
    planted_map_ = first_hit_map(*g_, walk_key_, kernel_, field_->origin(), ids, horizon_now_,
                                 scratch_);
  } else if (planted_map_->horizon < horizon_now_) {
    extend_first_hit_map(*g_, walk_key_, kernel_, *planted_map_, horizon_now_, scratch_);
  }
  return &*planted_map_;
}

bool FrogRealization::reach(Step planted_tau, Step ambient_tau, std::span<const Vertex> seeds,
                            bool use_planted, std::vector<Vertex>* out_visited) {
  ++epoch_;
  std::vector<Vertex> frontier;
  Vertex covered = 0;
  auto visit = [&](Vertex v) {
    auto& e = seen_epoch_[static_cast<std::size_t>(v)];
    if (e == epoch_) return;
    e = epoch_;
    ++covered;
    frontier.push_back(v);
  };
  for (Vertex s : seeds) visit(s);
  std::size_t head = 0;
  while (head < frontier.size()) {
    const Vertex x = frontier[head++];
    if (use_planted && x == field_->origin() && planted_tau > 0) {
      const FirstHitMap* pm = planted_map();
      for (const auto& e : pm->hits) {
        if (e.step > planted_tau) break;
        visit(e.target);
      }
    }
    if (ambient_tau > 0) {
      const FirstHitMap* am = ambient_map(x);
      if (am != nullptr) {
        for (const auto& e : am->hits) {
          if (e.step > ambient_tau) break;
          visit(e.target);
        }
      }
    }
  }
  if (out_visited != nullptr) {
    out_visited->assign(frontier.begin(), frontier.end());
    std::sort(out_visited->begin(), out_visited->end());
  }
  return covered == g_->n;
}

std::vector<Step> FrogRealization::labels(Step planted_tau, Step ambient_tau,
                                          std::span<const Vertex> seeds, bool use_planted) {
  std::vector<Step> at(static_cast<std::size_t>(g_->n), kNever);
  using Item = std::pair<Step, Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (Vertex s : seeds) {
    at[static_cast<std::size_t>(s)] = 0;
    pq.push({0, s});
  }
  while (!pq.empty()) {
    const auto [dist, x] = pq.top();
    pq.pop();
    if (dist != at[static_cast<std::size_t>(x)]) continue;
    auto relax_from = [&](const FirstHitMap* map, Step tau) {
      if (map == nullptr) return;
      for (const auto& e : map->hits) {
        if (e.step > tau) break;
        const Step cand = sat_add(dist, e.step);
        if (cand < at[static_cast<std::size_t>(e.target)]) {
          at[static_cast<std::size_t>(e.target)] = cand;
          pq.push({cand, e.target});
        }
      }
    };
    if (use_planted && x == field_->origin() && planted_tau > 0) {
      relax_from(planted_map(), planted_tau);
    }
    if (ambient_tau > 0) relax_from(ambient_map(x), ambient_tau);
  }
  return at;
}

ActivationResult FrogRealization::activation_times(Step tau) {
  if (tau < 0) throw InvalidParams("activation_times requires tau >= 0");
  ActivationResult res;
  res.tau = tau;
  const Step want = std::min(tau, cfg_.cap);
  if (want > horizon_now_) ensure_horizon(want);
  res.censored = tau > cfg_.cap;
  const Vertex seeds[1] = {field_->origin()};
  res.at = labels(std::min(tau, horizon_now_), std::min(tau, horizon_now_), seeds, true);
  for (Vertex v = 0; v < g_->n; ++v) {
    if (!is_never(res.at[static_cast<std::size_t>(v)])) res.visited.push_back(v);
  }
  return res;
}

bool FrogRealization::covers(Step tau) {
  if (tau > horizon_now_) ensure_horizon(std::min(tau, cfg_.cap));
  const Vertex seeds[1] = {field_->origin()};
  return reach(std::min(tau, horizon_now_), std::min(tau, horizon_now_), seeds, true, nullptr);
}

SusceptibilityOutcome FrogRealization::susceptibility() {
  SusceptibilityOutcome out;
  out.replicate = field_->replicate();
  out.lambda = lambda_;
  const Vertex seeds[1] = {field_->origin()};
  if (reach(0, 0, seeds, true, nullptr)) {  // single-vertex graph
    out.s_value = 0;
    return out;
  }
  // Doubling phase: grow tau (and with it the map horizon) until covered.
  Step lo = 0;  // known not covered
  Step hi = std::max<Step>(1, std::min(horizon_now_, cfg_.cap));
  for (;;) {
    if (covers(hi)) break;
    lo = hi;
    if (hi >= cfg_.cap) {
      out.s_value = cfg_.cap;
      out.censored = true;
      return out;
    }
    hi = std::min(cfg_.cap, hi * 2);
  }
  // Binary refinement on [lo+1, hi]; maps stay at the final horizon.
  while (lo + 1 < hi) {
    const Step mid = lo + (hi - lo) / 2;
    if (covers(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.s_value = hi;
  return out;
}

CoverOutcome FrogRealization::cover_time() {
  const Vertex seeds[1] = {field_->origin()};
  for (;;) {
    const auto at = labels(horizon_now_, horizon_now_, seeds, true);
    Step worst = 0;
    bool all_finite = true;
    for (Step label : at) {
      if (is_never(label)) {
        all_finite = false;
        break;
      }
      worst = std::max(worst, label);
    }
    // Labels are exact for infinite lifetime only when no chain could use a
    // first hit beyond the horizon; worst <= horizon guarantees that.
    if (all_finite && worst <= horizon_now_) return {worst, false};
    if (horizon_now_ >= cfg_.cap) return {std::max(worst, horizon_now_), true};
    ensure_horizon(std::min(cfg_.cap, horizon_now_ * 2));
  }
}

VisitSet FrogRealization::restricted(const RestrictedVariant& variant) {
  VisitSet vs;
  vs.variant = variant;
  switch (variant.kind) {
    case RestrictedKind::standard: {
      if (variant.tau < 0) throw InvalidParams("lifetime must be >= 0");
      const Step tau = std::min(variant.tau, cfg_.cap);
      vs.censored = variant.tau > cfg_.cap;
      ensure_horizon(tau);
      const Vertex seeds[1] = {field_->origin()};
      reach(tau, tau, seeds, true, &vs.vertices);
      return vs;
    }
    case RestrictedKind::planted_long: {
      if (variant.tau < 0 || variant.ambient < 0) throw InvalidParams("lifetimes must be >= 0");
      const Step t = std::min(variant.tau, cfg_.cap);
      const Step m = std::min(variant.ambient, cfg_.cap);
      vs.censored = variant.tau > cfg_.cap || variant.ambient > cfg_.cap;
      ensure_horizon(std::max(t, m));
      const Vertex seeds[1] = {field_->origin()};
      reach(t, m, seeds, true, &vs.vertices);
      return vs;
    }
    case RestrictedKind::seeded_set: {
      if (variant.seeds.empty()) throw InvalidParams("seeded_set requires a non-empty seed set");
      if (variant.tau < 0) throw InvalidParams("lifetime must be >= 0");
      const Step tau = std::min(variant.tau, cfg_.cap);
      vs.censored = variant.tau > cfg_.cap;
      ensure_horizon(tau);
      reach(0, tau, variant.seeds, false, &vs.vertices);
      return vs;
    }
  }
  throw InvalidParams("unknown restricted variant");
}

BruteForceResult brute_force_frog(const Graph& g, const ParticleField& field, double lambda,
                                  const RestrictedVariant& variant, WalkKernel kernel,
                                  std::int64_t budget) {
  const StreamKey walk_key = frog_walk_key(field.master_seed(), field.replicate());
  struct Live {
    U32Stream stream;
    Vertex pos;
    Step deadline;  // moves at global times (activation, deadline]
  };
  BruteForceResult res;
  res.first_visit.assign(static_cast<std::size_t>(g.n), kNever);
  std::vector<char> woken(static_cast<std::size_t>(g.n), 0);
  std::vector<Live> live;
  std::int64_t steps = 0;

  const bool seeded = variant.kind == RestrictedKind::seeded_set;
  const Step planted_life = variant.tau;
  const Step ambient_life =
      variant.kind == RestrictedKind::planted_long ? variant.ambient : variant.tau;

  auto wake = [&](Vertex v, Step now) {
    if (woken[static_cast<std::size_t>(v)]) return;
    woken[static_cast<std::size_t>(v)] = 1;
    const auto k = field.count(v, lambda);
    for (std::int64_t i = 0; i < k; ++i) {
      if (ambient_life > 0) {
        live.push_back({U32Stream(walk_key, walker_stream_id(v, static_cast<std::uint32_t>(i))),
                        v, sat_add(now, ambient_life)});
      }
    }
    if (!seeded && v == field.origin() && planted_life > 0) {
      live.push_back({U32Stream(walk_key, walker_stream_id(v, kPlantedParticle)), v,
                      sat_add(now, planted_life)});
    }
  };

  auto record_visit = [&](Vertex v, Step now) {
    auto& fv = res.first_visit[static_cast<std::size_t>(v)];
    if (now < fv) fv = now;
  };

  std::vector<Vertex> initial;
  if (seeded) {
    initial = variant.seeds;
    std::sort(initial.begin(), initial.end());
    initial.erase(std::unique(initial.begin(), initial.end()), initial.end());
  } else {
    initial = {field.origin()};
  }
  for (Vertex s : initial) {
    record_visit(s, 0);
    wake(s, 0);
  }

  std::vector<Vertex> newly_hit;
  for (Step t = 1; !live.empty(); ++t) {
    newly_hit.clear();
    std::size_t alive = 0;
    for (auto& p : live) {
      if (t > p.deadline) continue;
      p.pos = walk_step(g, p.pos, kernel, p.stream);
      ++steps;
      if (steps > budget) throw BudgetExceeded("brute-force budget exhausted");
      record_visit(p.pos, t);
      if (!woken[static_cast<std::size_t>(p.pos)]) newly_hit.push_back(p.pos);
      ++alive;
    }
    // Simultaneous activations in fixed vertex-id order; activation is
    // idempotent so the order cannot change the outcome.
    std::sort(newly_hit.begin(), newly_hit.end());
    newly_hit.erase(std::unique(newly_hit.begin(), newly_hit.end()), newly_hit.end());
    for (Vertex v : newly_hit) wake(v, t);
    if (alive == 0 && newly_hit.empty()) break;
    // Drop dead walkers occasionally to keep the loop tight.
    if ((t & 63) == 0) {
      std::erase_if(live, [t](const Live& p) { return p.deadline <= t; });
    }
  }
  for (Vertex v = 0; v < g.n; ++v) {
    if (!is_never(res.first_visit[static_cast<std::size_t>(v)])) res.visited.push_back(v);
  }
  res.steps_used = steps;
  return res;
}

void dump_realization(std::ostream& out, const Graph& g, const ParticleField& field,
                      double lambda, const ActivationResult& result) {
  out << "frogsim-realization v1\n";
  out << "graph " << family_name(g.family) << " n " << g.n << " degree " << g.degree << "\n";
  out << "master " << field.master_seed() << " replicate " << field.replicate() << " lambda "
      << lambda << " origin " << field.origin() << "\n";
  out << "tau " << result.tau << " censored " << (result.censored ? 1 : 0) << "\n";
  out << "counts";
  for (Vertex v = 0; v < g.n; ++v) {
    const auto k = field.count(v, lambda);
    if (k > 0) out << " " << v << ":" << k;
  }
  out << "\n";
  out << "at";
  for (Vertex v = 0; v < g.n; ++v) {
    const Step a = result.at[static_cast<std::size_t>(v)];
    out << " " << (is_never(a) ? Step{-1} : a);
  }
  out << "\n";
}

}  // namespace frogsim

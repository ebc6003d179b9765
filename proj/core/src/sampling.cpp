#include "frogsim/sampling.hpp"

#include <algorithm>

namespace frogsim {

ParticleField::ParticleField(const Graph& g, double lambda_max, Vertex origin,
                             std::uint64_t master_seed, std::uint64_t replicate)
    : n_(g.n),
      lambda_max_(lambda_max),
      origin_(origin),
      master_seed_(master_seed),
      replicate_(replicate) {
  if (lambda_max < 0.0) throw InvalidParams("lambda_max must be >= 0");
  if (origin < 0 || origin >= g.n) throw InvalidParams("origin out of range");
  const StreamKey count_key = derive_key(master_seed, RngDomain::field_counts, replicate);
  const StreamKey mark_key = derive_key(master_seed, RngDomain::field_marks, replicate);
  marks_offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n_), 0);
  std::int64_t total = 0;
  for (Vertex v = 0; v < n_; ++v) {
    U32Stream cs(count_key, static_cast<std::uint64_t>(v));
    counts[static_cast<std::size_t>(v)] = sample_poisson(cs, lambda_max);
    total += counts[static_cast<std::size_t>(v)];
    marks_offsets_[static_cast<std::size_t>(v) + 1] = total;
  }
  marks_.resize(static_cast<std::size_t>(total));
  for (Vertex v = 0; v < n_; ++v) {
    U32Stream ms(mark_key, static_cast<std::uint64_t>(v));
    const auto begin = marks_offsets_[static_cast<std::size_t>(v)];
    const auto end = marks_offsets_[static_cast<std::size_t>(v) + 1];
    for (std::int64_t i = begin; i < end; ++i) {
      marks_[static_cast<std::size_t>(i)] = ms.next_uniform() * lambda_max;
    }
    std::sort(marks_.begin() + begin, marks_.begin() + end);
  }
}

std::int64_t ParticleField::count(Vertex v, double lambda) const {
  if (lambda > lambda_max_) {
    throw InvalidParams("requested density exceeds the sampled lambda_max");
  }
  const auto m = marks(v);
  if (lambda >= lambda_max_) return static_cast<std::int64_t>(m.size());
  return std::upper_bound(m.begin(), m.end(), lambda) - m.begin();
}

std::int64_t ParticleField::total(double lambda) const {
  std::int64_t t = 0;
  for (Vertex v = 0; v < n_; ++v) t += count(v, lambda);
  return t;
}

WalkStream::WalkStream(const Graph& g, Vertex start, StreamKey walk_key, std::uint64_t stream_id,
                       WalkKernel kernel)
    : g_(&g), kernel_(kernel), stream_(walk_key, stream_id) {
  traj_.push_back(start);
}

void WalkStream::extend(Step new_horizon) {
  while (horizon() < new_horizon) {
    traj_.push_back(walk_step(*g_, traj_.back(), kernel_, stream_));
  }
}

WalkStream walk_stream(const Graph& g, Vertex start, std::uint64_t master_seed,
                       std::uint64_t replicate, Vertex home, std::uint32_t particle,
                       WalkKernel kernel, Step horizon) {
  WalkStream ws(g, start, frog_walk_key(master_seed, replicate), walker_stream_id(home, particle),
                kernel);
  ws.extend(horizon);
  return ws;
}

FirstHitMap first_hit_map(const Graph& g, StreamKey walk_key, WalkKernel kernel, Vertex source,
                          std::span<const std::uint32_t> particles, Step horizon,
                          FirstHitScratch& scratch) {
  if (horizon < 0) throw InvalidParams("first_hit_map requires horizon >= 0");
  FirstHitMap map;
  map.source = source;
  map.horizon = horizon;
  map.walkers.reserve(particles.size());
  scratch.begin();
  scratch.mark_existing(source);  // never record the source itself
  for (std::uint32_t p : particles) {
    U32Stream s(walk_key, walker_stream_id(source, p));
    Vertex pos = source;
    for (Step j = 1; j <= horizon; ++j) {
      pos = walk_step(g, pos, kernel, s);
      scratch.record(pos, j);
    }
    map.walkers.push_back({p, pos});
  }
  for (Vertex v : scratch.touched()) map.hits.push_back({v, scratch.best(v)});
  std::sort(map.hits.begin(), map.hits.end(),
            [](const FirstHitMap::Entry& a, const FirstHitMap::Entry& b) {
              return a.step != b.step ? a.step < b.step : a.target < b.target;
            });
  return map;
}

void extend_first_hit_map(const Graph& g, StreamKey walk_key, WalkKernel kernel, FirstHitMap& map,
                          Step new_horizon, FirstHitScratch& scratch) {
  if (new_horizon <= map.horizon) return;
  scratch.begin();
  scratch.mark_existing(map.source);
  for (const auto& e : map.hits) scratch.mark_existing(e.target);
  for (auto& w : map.walkers) {
    U32Stream s(walk_key, walker_stream_id(map.source, w.particle));
    s.skip_to(static_cast<std::uint64_t>(map.horizon));
    Vertex pos = w.pos;
    for (Step j = map.horizon + 1; j <= new_horizon; ++j) {
      pos = walk_step(g, pos, kernel, s);
      scratch.record(pos, j);
    }
    w.pos = pos;
  }
  // New entries all have step > map.horizon >= every existing step, so the
  // sorted order is preserved by appending in sorted order.
  std::vector<FirstHitMap::Entry> fresh;
  fresh.reserve(scratch.touched().size());
  for (Vertex v : scratch.touched()) fresh.push_back({v, scratch.best(v)});
  std::sort(fresh.begin(), fresh.end(), [](const FirstHitMap::Entry& a, const FirstHitMap::Entry& b) {
    return a.step != b.step ? a.step < b.step : a.target < b.target;
  });
  map.hits.insert(map.hits.end(), fresh.begin(), fresh.end());
  map.horizon = new_horizon;
}

ParticleField sample_field(const Graph& g, double lambda_max, Vertex origin,
                           std::uint64_t master_seed, std::uint64_t replicate) {
  return ParticleField(g, lambda_max, origin, master_seed, replicate);
}

}  // namespace frogsim

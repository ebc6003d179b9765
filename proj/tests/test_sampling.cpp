#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "frogsim/sampling.hpp"
#include "frogsim/stats.hpp"

using namespace frogsim;

TEST_CASE("empty field at lambda_max = 0") {
  const Graph g = make_cycle(5);
  const ParticleField field(g, 0.0, 0, 99, 0);
  for (Vertex v = 0; v < g.n; ++v) CHECK(field.count(v, 0.0) == 0);
}

TEST_CASE("mark thresholding is pointwise monotone in lambda") {
  const Graph g = make_torus(2, 5);
  for (std::uint64_t rep = 0; rep < 50; ++rep) {
    const ParticleField field(g, 1.0, 0, 42, rep);
    for (Vertex v = 0; v < g.n; ++v) {
      CHECK(field.count(v, 0.5) <= field.count(v, 1.0));
      CHECK(field.count(v, 0.0) == 0);
    }
  }
}

TEST_CASE("poisson counts have the right mean") {
  // 1e4 replicates on 100 vertices at lambda = 2; CLT band from the spec.
  const Graph g = make_complete(100);
  double total = 0.0;
  for (std::uint64_t rep = 0; rep < 10000; ++rep) {
    const ParticleField field(g, 2.0, 0, 271, rep);
    total += static_cast<double>(field.total(2.0));
  }
  const double sample_mean = total / (10000.0 * 100.0);
  CHECK(sample_mean >= 1.97);
  CHECK(sample_mean <= 2.03);
}

TEST_CASE("poisson rejection branch at large lambda") {
  const Graph g = make_complete(1000);
  const ParticleField field(g, 50.0, 0, 7, 0);
  const double mean_count = static_cast<double>(field.total(50.0)) / 1000.0;
  CHECK(mean_count >= 49.0);  // 4 sigma is ~0.9
  CHECK(mean_count <= 51.0);
  // Thresholding inside the rejection regime still nests.
  for (Vertex v = 0; v < 100; ++v) CHECK(field.count(v, 30.0) <= field.count(v, 50.0));
}

TEST_CASE("walk on K_2 strictly alternates") {
  const Graph g = make_custom(2, {{0, 1}});
  const auto ws = walk_stream(g, 0, 1, 0, 0, 0, WalkKernel::srw, 20);
  for (Step j = 0; j <= 20; ++j) CHECK(ws.at(j) == j % 2);
}

TEST_CASE("one-step frequencies on the cycle are uniform") {
  const Graph g = make_cycle(5);
  const StreamKey key = frog_walk_key(3, 0);
  std::int64_t right = 0;
  const std::int64_t draws = 100000;
  for (std::int64_t i = 0; i < draws; ++i) {
    U32Stream s(key, static_cast<std::uint64_t>(i));
    const Vertex step = walk_step(g, 0, WalkKernel::srw, s);
    if (step == 1) ++right;
  }
  const double freq = static_cast<double>(right) / static_cast<double>(draws);
  CHECK(freq >= 0.49);
  CHECK(freq <= 0.51);
}

TEST_CASE("lazy kernel stays put about half the time") {
  const Graph g = make_cycle(7);
  const StreamKey key = frog_walk_key(4, 0);
  std::int64_t stays = 0;
  const std::int64_t draws = 100000;
  for (std::int64_t i = 0; i < draws; ++i) {
    U32Stream s(key, static_cast<std::uint64_t>(i));
    if (walk_step(g, 3, WalkKernel::lazy_srw, s) == 3) ++stays;
  }
  const double freq = static_cast<double>(stays) / static_cast<double>(draws);
  CHECK(freq >= 0.49);
  CHECK(freq <= 0.51);
}

TEST_CASE("extension preserves the sampled prefix bit for bit") {
  const Graph g = make_torus(2, 6);
  auto ws = walk_stream(g, 5, 11, 3, 5, 2, WalkKernel::srw, 40);
  const std::vector<Vertex> prefix(ws.trajectory().begin(), ws.trajectory().end());
  ws.extend(80);
  for (Step j = 0; j <= 40; ++j) CHECK(ws.at(j) == prefix[static_cast<std::size_t>(j)]);
  // And a freshly built stream reproduces the same trajectory.
  const auto again = walk_stream(g, 5, 11, 3, 5, 2, WalkKernel::srw, 80);
  for (Step j = 0; j <= 80; ++j) CHECK(again.at(j) == ws.at(j));
}

TEST_CASE("first-hit map trivial cases") {
  const Graph k2 = make_custom(2, {{0, 1}});
  FirstHitScratch scratch(k2.n);
  const StreamKey key = frog_walk_key(1, 0);
  const auto empty = first_hit_map(k2, key, WalkKernel::srw, 0, {}, 50, scratch);
  CHECK(empty.hits.empty());
  const std::uint32_t one[1] = {0};
  const auto map = first_hit_map(k2, key, WalkKernel::srw, 0, one, 50, scratch);
  REQUIRE(map.hits.size() == 1);
  CHECK(map.hits[0].target == 1);
  CHECK(map.hits[0].step == 1);
  CHECK(map.lookup(1) == Step{1});
  CHECK_FALSE(map.lookup(0).has_value());
}

TEST_CASE("first-hit map equals a brute-force trajectory scan") {
  // 100 random instances across two small graphs.
  const Graph graphs[2] = {make_random_regular(8, 3, 5), make_torus(2, 4)};
  for (int inst = 0; inst < 100; ++inst) {
    const Graph& g = graphs[inst % 2];
    const std::uint64_t master = 1000 + inst;
    const ParticleField field(g, 1.5, 0, master, 0);
    FirstHitScratch scratch(g.n);
    const Vertex source = static_cast<Vertex>(inst % g.n);
    const auto k = field.count(source, 1.5);
    std::vector<std::uint32_t> particles;
    for (std::int64_t i = 0; i < k; ++i) particles.push_back(static_cast<std::uint32_t>(i));
    const Step horizon = 50;
    const auto map = first_hit_map(g, frog_walk_key(master, 0), WalkKernel::srw, source,
                                   particles, horizon, scratch);
    // Oracle: scan every particle's trajectory.
    std::map<Vertex, Step> expect;
    for (std::uint32_t p : particles) {
      const auto ws = walk_stream(g, source, master, 0, source, p, WalkKernel::srw, horizon);
      for (Step j = 1; j <= horizon; ++j) {
        const Vertex y = ws.at(j);
        if (y == source) continue;
        const auto it = expect.find(y);
        if (it == expect.end()) {
          expect.emplace(y, j);
        } else {
          it->second = std::min(it->second, j);
        }
      }
    }
    REQUIRE(map.hits.size() == expect.size());
    for (const auto& e : map.hits) {
      REQUIRE(expect.count(e.target) == 1);
      CHECK(expect.at(e.target) == e.step);
    }
  }
}

TEST_CASE("first-hit merging is order independent") {
  const Graph g = make_torus(2, 4);
  const std::uint64_t master = 77;
  FirstHitScratch scratch(g.n);
  const StreamKey key = frog_walk_key(master, 2);
  const std::uint32_t both[2] = {0, 1};
  const std::uint32_t first[1] = {0};
  const std::uint32_t second[1] = {1};
  const auto merged = first_hit_map(g, key, WalkKernel::srw, 3, both, 30, scratch);
  const auto a = first_hit_map(g, key, WalkKernel::srw, 3, first, 30, scratch);
  const auto b = first_hit_map(g, key, WalkKernel::srw, 3, second, 30, scratch);
  std::map<Vertex, Step> min_merge;
  for (const auto& m : {a, b}) {
    for (const auto& e : m.hits) {
      const auto it = min_merge.find(e.target);
      if (it == min_merge.end()) {
        min_merge.emplace(e.target, e.step);
      } else {
        it->second = std::min(it->second, e.step);
      }
    }
  }
  REQUIRE(merged.hits.size() == min_merge.size());
  for (const auto& e : merged.hits) CHECK(min_merge.at(e.target) == e.step);
}

TEST_CASE("extending a map matches building it at the larger horizon") {
  const Graph g = make_cycle(12);
  const std::uint64_t master = 31;
  FirstHitScratch scratch(g.n);
  const StreamKey key = frog_walk_key(master, 0);
  const std::uint32_t ids[3] = {0, 1, kPlantedParticle};
  auto grown = first_hit_map(g, key, WalkKernel::srw, 2, ids, 16, scratch);
  extend_first_hit_map(g, key, WalkKernel::srw, grown, 64, scratch);
  const auto direct = first_hit_map(g, key, WalkKernel::srw, 2, ids, 64, scratch);
  REQUIRE(grown.hits.size() == direct.hits.size());
  for (std::size_t i = 0; i < direct.hits.size(); ++i) {
    CHECK(grown.hits[i].target == direct.hits[i].target);
    CHECK(grown.hits[i].step == direct.hits[i].step);
  }
}

TEST_CASE("one-step transition chi-square at 0.001 significance") {
  for (const Graph& g : {make_cycle(7), make_torus(2, 5)}) {
    const std::int64_t steps = 1000000;
    const StreamKey key = frog_walk_key(1234, 9);
    U32Stream s(key, 1);
    // Stationary start; count transitions out of each vertex.
    std::vector<std::map<Vertex, std::int64_t>> counts(static_cast<std::size_t>(g.n));
    std::vector<std::int64_t> outgoing(static_cast<std::size_t>(g.n), 0);
    Vertex pos = 0;
    for (std::int64_t i = 0; i < steps; ++i) {
      const Vertex next = walk_step(g, pos, WalkKernel::srw, s);
      ++counts[static_cast<std::size_t>(pos)][next];
      ++outgoing[static_cast<std::size_t>(pos)];
      pos = next;
    }
    double chi2 = 0.0;
    std::int64_t dof = 0;
    for (Vertex v = 0; v < g.n; ++v) {
      const double expected = static_cast<double>(outgoing[static_cast<std::size_t>(v)]) /
                              static_cast<double>(g.deg(v));
      for (Vertex u : g.neighbors(v)) {
        const auto it = counts[static_cast<std::size_t>(v)].find(u);
        const double observed = it == counts[static_cast<std::size_t>(v)].end()
                                    ? 0.0
                                    : static_cast<double>(it->second);
        chi2 += (observed - expected) * (observed - expected) / expected;
      }
      dof += g.deg(v) - 1;
    }
    CHECK(chi2 < chi_square_quantile(0.999, static_cast<double>(dof)));
  }
}

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "frogsim/frog.hpp"
#include "frogsim/stats.hpp"

using namespace frogsim;

namespace {

RestrictedVariant standard_lifetime(Step tau) {
  RestrictedVariant v;
  v.kind = RestrictedKind::standard;
  v.tau = tau;
  return v;
}

}  // namespace

TEST_CASE("tau = 0 visits only the origin") {
  const Graph g = make_cycle(6);
  const ParticleField field(g, 1.0, 0, 5, 0);
  FrogRealization real(g, field, 1.0);
  const auto res = real.activation_times(0);
  CHECK(res.visited == std::vector<Vertex>{0});
  CHECK(res.at[0] == 0);
  for (Vertex v = 1; v < g.n; ++v) CHECK(is_never(res.at[static_cast<std::size_t>(v)]));
}

TEST_CASE("planted-only K_2 covers at lifetime 1") {
  const Graph g = make_custom(2, {{0, 1}});
  const ParticleField field(g, 0.0, 0, 5, 0);
  FrogRealization real(g, field, 0.0);
  const auto res = real.activation_times(1);
  CHECK(res.at[0] == 0);
  CHECK(res.at[1] == 1);
  const auto s = real.susceptibility();
  CHECK(s.s_value == 1);
  CHECK_FALSE(s.censored);
  const auto ct = real.cover_time();
  CHECK(ct.ct == 1);
  CHECK_FALSE(ct.censored);
}

TEST_CASE("single vertex graph has susceptibility 0") {
  const Graph g = make_custom(1, {});
  const ParticleField field(g, 1.0, 0, 5, 0);
  FrogRealization real(g, field, 1.0);
  CHECK(real.susceptibility().s_value == 0);
}

TEST_CASE("activation times equal the event-driven oracle") {
  const Graph graphs[3] = {make_cycle(8), make_torus(2, 4), make_complete(5)};
  int checked = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const Graph& g = graphs[inst % 3];
    const std::uint64_t master = 4000 + inst;
    const double lambda = (inst % 4 == 0) ? 0.5 : 1.0;
    const ParticleField field(g, lambda, 0, master, static_cast<std::uint64_t>(inst));
    const auto tau = static_cast<Step>(inst % 21);
    FrogRealization real(g, field, lambda);
    const auto engine = real.activation_times(tau);
    const auto oracle =
        brute_force_frog(g, field, lambda, standard_lifetime(tau), WalkKernel::srw, 2000000);
    REQUIRE(engine.at == oracle.first_visit);
    CHECK(engine.visited == oracle.visited);
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("susceptibility equals exhaustive tau scan of the oracle") {
  const Graph graphs[2] = {make_cycle(6), make_complete(4)};
  for (int inst = 0; inst < 20; ++inst) {
    const Graph& g = graphs[inst % 2];
    const std::uint64_t master = 90 + inst;
    const ParticleField field(g, 1.0, 0, master, 1);
    FrogRealization real(g, field, 1.0);
    const auto s = real.susceptibility();
    REQUIRE_FALSE(s.censored);
    Step oracle_s = -1;
    for (Step tau = 0; tau <= s.s_value + 2; ++tau) {
      const auto res =
          brute_force_frog(g, field, 1.0, standard_lifetime(tau), WalkKernel::srw, 2000000);
      if (static_cast<Vertex>(res.visited.size()) == g.n) {
        oracle_s = tau;
        break;
      }
    }
    CHECK(oracle_s == s.s_value);
  }
}

TEST_CASE("minimality recheck around the returned susceptibility") {
  const Graph g = make_torus(2, 4);
  for (int inst = 0; inst < 10; ++inst) {
    const ParticleField field(g, 1.0, 0, 777 + inst, 0);
    FrogRealization real(g, field, 1.0);
    const auto s = real.susceptibility();
    REQUIRE_FALSE(s.censored);
    CHECK(real.covers(s.s_value));
    if (s.s_value > 0) CHECK_FALSE(real.covers(s.s_value - 1));
  }
}

TEST_CASE("cover time dominates susceptibility and matches the oracle at tau = S") {
  const Graph g = make_cycle(8);
  for (int inst = 0; inst < 10; ++inst) {
    const ParticleField field(g, 1.0, 0, 55 + inst, 0);
    FrogRealization real(g, field, 1.0);
    const auto s = real.susceptibility();
    const auto ct = real.cover_time();
    REQUIRE_FALSE(s.censored);
    REQUIRE_FALSE(ct.censored);
    CHECK(ct.ct >= s.s_value);
    // Lifetime-S activation maxima agree with the event-driven cover time.
    const auto at = real.activation_times(s.s_value);
    Step worst = 0;
    for (Step label : at.at) {
      REQUIRE_FALSE(is_never(label));
      worst = std::max(worst, label);
    }
    const auto oracle =
        brute_force_frog(g, field, 1.0, standard_lifetime(s.s_value), WalkKernel::srw, 2000000);
    Step oracle_worst = 0;
    for (Step label : oracle.first_visit) oracle_worst = std::max(oracle_worst, label);
    CHECK(worst == oracle_worst);
  }
}

TEST_CASE("visit sets are monotone in the lifetime") {
  const Graph g = make_torus(2, 5);
  for (int inst = 0; inst < 8; ++inst) {
    const ParticleField field(g, 0.8, 0, 300 + inst, 0);
    FrogRealization real(g, field, 0.8);
    const auto r3 = real.restricted(standard_lifetime(3));
    const auto r9 = real.restricted(standard_lifetime(9));
    std::set<Vertex> big(r9.vertices.begin(), r9.vertices.end());
    for (Vertex v : r3.vertices) CHECK(big.count(v) == 1);
  }
}

TEST_CASE("coupled fields give monotone susceptibility in lambda") {
  const Graph g = make_cycle(32);
  for (int inst = 0; inst < 20; ++inst) {
    const ParticleField field(g, 2.0, 0, 1700 + inst, 0);
    FrogRealization dense(g, field, 2.0);
    FrogRealization sparse(g, field, 1.0);
    const auto s2 = dense.susceptibility();
    const auto s1 = sparse.susceptibility();
    REQUIRE_FALSE(s1.censored);
    REQUIRE_FALSE(s2.censored);
    CHECK(s2.s_value <= s1.s_value);
  }
}

TEST_CASE("planted-long with immobile ambience is the planted range") {
  const Graph g = make_torus(2, 5);
  const std::uint64_t master = 642;
  const ParticleField field(g, 1.0, 0, master, 0);
  FrogRealization real(g, field, 1.0);
  RestrictedVariant v;
  v.kind = RestrictedKind::planted_long;
  v.tau = 12;
  v.ambient = 0;
  const auto vs = real.restricted(v);
  const auto planted = walk_stream(g, 0, master, 0, 0, kPlantedParticle, WalkKernel::srw, 12);
  std::set<Vertex> range(planted.trajectory().begin(), planted.trajectory().end());
  CHECK(vs.vertices.size() == range.size());
  for (Vertex x : vs.vertices) CHECK(range.count(x) == 1);
}

TEST_CASE("seeding the whole vertex set visits everything") {
  const Graph g = make_cycle(9);
  const ParticleField field(g, 1.0, 0, 31, 0);
  FrogRealization real(g, field, 1.0);
  RestrictedVariant v;
  v.kind = RestrictedKind::seeded_set;
  v.tau = 3;
  for (Vertex x = 0; x < g.n; ++x) v.seeds.push_back(x);
  const auto vs = real.restricted(v);
  CHECK(static_cast<Vertex>(vs.vertices.size()) == g.n);
}

TEST_CASE("restricted variants agree with the heterogeneous-lifetime oracle") {
  const Graph g = make_torus(2, 4);
  for (int inst = 0; inst < 20; ++inst) {
    const ParticleField field(g, 1.0, 0, 5000 + inst, 0);
    FrogRealization real(g, field, 1.0);
    RestrictedVariant v;
    if (inst % 2 == 0) {
      v.kind = RestrictedKind::planted_long;
      v.tau = 4 + inst % 7;
      v.ambient = inst % 3;
    } else {
      v.kind = RestrictedKind::seeded_set;
      v.tau = 2 + inst % 5;
      v.seeds = {0, static_cast<Vertex>(inst % g.n)};
    }
    const auto engine = real.restricted(v);
    const auto oracle = brute_force_frog(g, field, 1.0, v, WalkKernel::srw, 2000000);
    CHECK(engine.vertices == oracle.visited);
  }
}

TEST_CASE("brute force budget is enforced") {
  const Graph g = make_complete(8);
  const ParticleField field(g, 2.0, 0, 8, 0);
  CHECK_THROWS_AS(
      brute_force_frog(g, field, 2.0, standard_lifetime(50), WalkKernel::srw, 10),
      BudgetExceeded);
}

TEST_CASE("horizon cap censors instead of failing") {
  const Graph g = make_cycle(16);
  const ParticleField field(g, 0.0, 0, 12, 0);  // planted walker only
  HorizonConfig cfg;
  cfg.cap = 4;
  FrogRealization real(g, field, 0.0, WalkKernel::srw, cfg);
  const auto s = real.susceptibility();
  CHECK(s.censored);
  CHECK(s.s_value == 4);
  const auto ct = real.cover_time();
  CHECK(ct.censored);
}

TEST_CASE("density predicate matches direct counting") {
  const Graph g = make_torus(2, 6);
  const auto part = box_partition(g, 3);
  std::vector<Vertex> all;
  for (Vertex v = 0; v < g.n; ++v) all.push_back(v);
  CHECK(is_dense(all, part, 1.0, g).dense);
  CHECK_FALSE(is_dense({}, part, 0.01, g).dense);
  // Random subsets vs per-box counting.
  for (int inst = 0; inst < 25; ++inst) {
    std::vector<Vertex> subset;
    for (Vertex v = 0; v < g.n; ++v) {
      if (prf_u64(derive_key(900 + inst, RngDomain::estimator, 0), v, 0) % 3 != 0) {
        subset.push_back(v);
      }
    }
    const double alpha = 0.5;
    const auto rep = is_dense(subset, part, alpha, g);
    bool expect = true;
    double min_density = 1.0;
    std::set<Vertex> in(subset.begin(), subset.end());
    for (const auto& box : part.boxes) {
      std::int64_t c = 0;
      for (Vertex v : box) c += in.count(v);
      const double density = static_cast<double>(c) / static_cast<double>(box.size());
      min_density = std::min(min_density, density);
      if (density < alpha) expect = false;
    }
    CHECK(rep.dense == expect);
    CHECK(rep.min_density == doctest::Approx(min_density));
  }
  const Graph other = make_torus(2, 5);
  CHECK_THROWS_AS(is_dense(all, box_partition(other, 2), 0.5, g), PartitionMismatch);
}

TEST_CASE("no-ambient-on-range probability matches exp(-lambda |R|)") {
  // Given |R_t(planted)| = i, the chance that no ambient particle sits on the
  // range is e^{-lambda i}; Rao-Blackwellized comparison across replicates.
  const Graph g = make_torus(2, 8);
  const double lambda = 1.0;
  const Step t = 10;
  const int reps = 4000;
  std::vector<double> indicator, predicted;
  for (int rep = 0; rep < reps; ++rep) {
    const std::uint64_t master = 24680;
    const ParticleField field(g, lambda, 0, master, static_cast<std::uint64_t>(rep));
    const auto planted =
        walk_stream(g, 0, master, static_cast<std::uint64_t>(rep), 0, kPlantedParticle,
                    WalkKernel::srw, t);
    std::set<Vertex> range(planted.trajectory().begin(), planted.trajectory().end());
    bool empty = true;
    for (Vertex v : range) {
      if (field.count(v, lambda) > 0) {
        empty = false;
        break;
      }
    }
    indicator.push_back(empty ? 1.0 : 0.0);
    predicted.push_back(std::exp(-lambda * static_cast<double>(range.size())));
  }
  const auto ci = mean_ci(indicator, 3.5);
  CHECK(ci.contains(mean(predicted)));
}

TEST_CASE("realization dump is versioned and self-describing") {
  const Graph g = make_cycle(5);
  const ParticleField field(g, 1.0, 0, 3, 0);
  FrogRealization real(g, field, 1.0);
  const auto res = real.activation_times(4);
  std::ostringstream out;
  dump_realization(out, g, field, 1.0, res);
  const std::string text = out.str();
  CHECK(text.find("frogsim-realization v1") == 0);
  CHECK(text.find("lambda") != std::string::npos);
  CHECK(text.find("at ") != std::string::npos);
}

TEST_CASE("complete-graph cover time scales with log n") {
  // CT(K_n) stays within a constant multiple of log n, with a stable
  // constant across sizes.
  std::vector<double> ratios;
  for (Vertex n : {250, 500, 1000}) {
    const Graph g = make_complete(n);
    std::vector<double> cts;
    for (int rep = 0; rep < 30; ++rep) {
      const ParticleField field(g, 1.0, 0, 5150, static_cast<std::uint64_t>(rep));
      FrogRealization real(g, field, 1.0);
      const auto ct = real.cover_time();
      REQUIRE_FALSE(ct.censored);
      cts.push_back(static_cast<double>(ct.ct));
    }
    ratios.push_back(mean(cts) / std::log(static_cast<double>(n)));
  }
  for (double r : ratios) CHECK(r <= 4.0);
  const double lo = std::min({ratios[0], ratios[1], ratios[2]});
  const double hi = std::max({ratios[0], ratios[1], ratios[2]});
  CHECK(hi / lo <= 1.5);
}

TEST_CASE("lazy kernel realizations also match the oracle") {
  const Graph g = make_torus(2, 4);
  for (int inst = 0; inst < 15; ++inst) {
    const ParticleField field(g, 1.0, 0, 9100 + inst, 0);
    FrogRealization real(g, field, 1.0, WalkKernel::lazy_srw);
    const auto tau = static_cast<Step>(2 + inst % 9);
    const auto engine = real.activation_times(tau);
    const auto oracle = brute_force_frog(g, field, 1.0, standard_lifetime(tau),
                                         WalkKernel::lazy_srw, 2000000);
    CHECK(engine.at == oracle.first_visit);
  }
}

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "frogsim/graph.hpp"
#include "frogsim/rng.hpp"

namespace frogsim {

enum class GreenMethod { matrix_power, sampled_walks };

struct GreenStats {
  std::int64_t t = 0;
  double nu_t = 0.0;  // sum_{i<=t} P^i(v,v) at the queried vertex
  std::optional<double> nu_pair;
  GreenMethod method = GreenMethod::matrix_power;
  double ci_half = 0.0;  // zero for the exact path
};

struct GreenConfig {
  Vertex cap = 4096;       // exact path size cap
  std::int64_t reps = 4000;  // sampled path replicates
  std::uint64_t seed = 1;
};

// sum_{i=0}^{t} P^i(v,v); exact sparse row iteration under the cap,
// Monte-Carlo return counting above it.
GreenStats green_sum(const Graph& g, Vertex v, std::int64_t t, GreenMethod method,
                     const GreenConfig& cfg = {});

// Prefix sums nu[s] = sum_{i<=s} P^i(v,v) for s = 0..t, exact.
std::vector<double> green_diag_prefix(const Graph& g, Vertex v, std::int64_t t,
                                      Vertex cap = 4096);

// min over v of green_sum; evaluates one vertex on vertex-transitive
// families, all vertices otherwise.
double nu_min(const Graph& g, std::int64_t t, Vertex cap = 4096);

// Elementwise min over v of the prefix sums, nu[s] = min_v sum_{i<=s} P^i(v,v).
std::vector<double> green_prefix_min(const Graph& g, std::int64_t t, Vertex cap = 4096);

// sum_{i=0}^{t} P^i(a,b), exact.
double green_pair_sum(const Graph& g, Vertex a, Vertex b, std::int64_t t, Vertex cap = 4096);

}  // namespace frogsim

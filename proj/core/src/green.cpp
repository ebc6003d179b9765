#include "frogsim/green.hpp"

#include <cmath>

#include "frogsim/stats.hpp"

namespace frogsim {

namespace {

bool vertex_transitive_family(Family f) {
  switch (f) {
    case Family::cycle:
    case Family::torus:
    case Family::complete:
      return true;
    default:
      return false;
  }
}

}  // namespace

std::vector<double> green_diag_prefix(const Graph& g, Vertex v, std::int64_t t, Vertex cap) {
  if (g.n > cap) {
    throw TooLarge("green_diag_prefix capped at " + std::to_string(cap) + " vertices");
  }
  if (t < 0) throw InvalidParams("green sum requires t >= 0");
  std::vector<double> row(static_cast<std::size_t>(g.n), 0.0);
  std::vector<double> next(static_cast<std::size_t>(g.n), 0.0);
  row[static_cast<std::size_t>(v)] = 1.0;
  std::vector<double> prefix(static_cast<std::size_t>(t) + 1, 0.0);
  prefix[0] = 1.0;
  for (std::int64_t i = 1; i <= t; ++i) {
    std::fill(next.begin(), next.end(), 0.0);
    for (Vertex x = 0; x < g.n; ++x) {
      const double mass = row[static_cast<std::size_t>(x)];
      if (mass == 0.0) continue;
      const double share = mass / static_cast<double>(g.deg(x));
      for (Vertex u : g.neighbors(x)) next[static_cast<std::size_t>(u)] += share;
    }
    row.swap(next);
    prefix[static_cast<std::size_t>(i)] =
        prefix[static_cast<std::size_t>(i - 1)] + row[static_cast<std::size_t>(v)];
  }
  return prefix;
}

GreenStats green_sum(const Graph& g, Vertex v, std::int64_t t, GreenMethod method,
                     const GreenConfig& cfg) {
  if (t < 0) throw InvalidParams("green sum requires t >= 0");
  GreenStats out;
  out.t = t;
  out.method = method;
  if (method == GreenMethod::matrix_power) {
    out.nu_t = green_diag_prefix(g, v, t, cfg.cap).back();
    return out;
  }
  // Sampled walks: count visits to v (times 0..t) over independent walks.
  const StreamKey key = derive_key(cfg.seed, RngDomain::estimator, 0x97ee);
  std::vector<double> counts;
  counts.reserve(static_cast<std::size_t>(cfg.reps));
  for (std::int64_t r = 0; r < cfg.reps; ++r) {
    U32Stream s(key, static_cast<std::uint64_t>(r));
    Vertex pos = v;
    double c = 1.0;  // visit at time 0
    for (std::int64_t i = 1; i <= t; ++i) {
      const auto nb = g.neighbors(pos);
      pos = nb[s.below(static_cast<std::uint32_t>(nb.size()))];
      if (pos == v) c += 1.0;
    }
    counts.push_back(c);
  }
  out.nu_t = mean(counts);
  out.ci_half = mean_ci(counts).half_width();
  return out;
}

double nu_min(const Graph& g, std::int64_t t, Vertex cap) {
  return green_prefix_min(g, t, cap).back();
}

double green_pair_sum(const Graph& g, Vertex a, Vertex b, std::int64_t t, Vertex cap) {
  if (g.n > cap) throw TooLarge("green_pair_sum capped at " + std::to_string(cap) + " vertices");
  if (t < 0) throw InvalidParams("green sum requires t >= 0");
  std::vector<double> row(static_cast<std::size_t>(g.n), 0.0);
  std::vector<double> next(static_cast<std::size_t>(g.n), 0.0);
  row[static_cast<std::size_t>(a)] = 1.0;
  double acc = a == b ? 1.0 : 0.0;
  for (std::int64_t i = 1; i <= t; ++i) {
    std::fill(next.begin(), next.end(), 0.0);
    for (Vertex x = 0; x < g.n; ++x) {
      const double mass = row[static_cast<std::size_t>(x)];
      if (mass == 0.0) continue;
      const double share = mass / static_cast<double>(g.deg(x));
      for (Vertex u : g.neighbors(x)) next[static_cast<std::size_t>(u)] += share;
    }
    row.swap(next);
    acc += row[static_cast<std::size_t>(b)];
  }
  return acc;
}

std::vector<double> green_prefix_min(const Graph& g, std::int64_t t, Vertex cap) {
  if (vertex_transitive_family(g.family)) return green_diag_prefix(g, g.origin, t, cap);
  std::vector<double> out = green_diag_prefix(g, 0, t, cap);
  for (Vertex v = 1; v < g.n; ++v) {
    const auto prefix = green_diag_prefix(g, v, t, cap);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(out[i], prefix[i]);
  }
  return out;
}

}  // namespace frogsim

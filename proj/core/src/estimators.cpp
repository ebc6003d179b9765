#include "frogsim/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "frogsim/sampling.hpp"
#include "frogsim/stats.hpp"

namespace frogsim {

namespace {

// T^{(d)}_k: probability that two independent d-sided multinomial(k) count
// vectors coincide. Peeling one coordinate gives the recursion
//   T^{(d)}_k = sum_a [C(k,a) (1/d)^a ((d-1)/d)^(k-a)]^2 T^{(d-1)}_{k-a},
// with T^{(1)} = 1. Then P^{2k}(0,0) = C(2k,k) 2^{-2k} T^{(d)}_k.
std::vector<double> collision_table(int d, std::int64_t kmax) {
  std::vector<double> prev(static_cast<std::size_t>(kmax) + 1, 1.0);  // d = 1
  for (int j = 2; j <= d; ++j) {
    std::vector<double> cur(static_cast<std::size_t>(kmax) + 1, 0.0);
    const double lp = std::log(1.0 / j);
    const double lq = std::log(static_cast<double>(j - 1) / j);
    for (std::int64_t k = 0; k <= kmax; ++k) {
      double acc = 0.0;
      for (std::int64_t a = 0; a <= k; ++a) {
        const double lw = log_choose(k, a) + static_cast<double>(a) * lp +
                          static_cast<double>(k - a) * lq;
        acc += std::exp(2.0 * lw) * prev[static_cast<std::size_t>(k - a)];
      }
      cur[static_cast<std::size_t>(k)] = acc;
    }
    prev.swap(cur);
  }
  return prev;
}

double return_prob_from_collision(std::int64_t k, double collision) {
  return std::exp(log_choose(2 * k, k) - 2.0 * static_cast<double>(k) * std::numbers::ln2 +
                  std::log(collision));
}

}  // namespace

double zd_return_probability(int d, std::int64_t k) {
  if (d < 1) throw InvalidParams("dimension must be >= 1");
  if (k < 0) throw InvalidParams("k must be >= 0");
  if (k == 0) return 1.0;
  const auto table = collision_table(d, k);
  return return_prob_from_collision(k, table.back());
}

EscapeEstimate rho_estimate(int d, RhoMethod method, const RhoBudget& budget) {
  if (d < 1) throw InvalidParams("dimension must be >= 1");
  EscapeEstimate out;
  out.d = d;
  out.method = method;
  if (d <= 2) {  // recurrent: escape probability is exactly 0
    out.estimate = out.lo = out.hi = 0.0;
    return out;
  }
  if (method == RhoMethod::green_series) {
    const std::int64_t terms = std::max<std::int64_t>(budget.terms, 64);
    const auto collision = collision_table(d, terms);
    double partial = 0.0;
    for (std::int64_t k = 0; k <= terms; ++k) {
      partial += return_prob_from_collision(k, collision[static_cast<std::size_t>(k)]);
    }
    // Tail bracket: k^{d/2} P^{2k}(0,0) increases towards the local-CLT
    // limit L = 2 (d / 4 pi)^{d/2}; integral bounds on sum k^{-d/2}.
    const double half_d = static_cast<double>(d) / 2.0;
    const double limit = 2.0 * std::pow(static_cast<double>(d) / (4.0 * std::numbers::pi), half_d);
    const double a_last =
        std::pow(static_cast<double>(terms), half_d) *
        return_prob_from_collision(terms, collision[static_cast<std::size_t>(terms)]);
    const double tail_hi =
        limit * std::pow(static_cast<double>(terms), 1.0 - half_d) / (half_d - 1.0);
    const double tail_lo =
        a_last * std::pow(static_cast<double>(terms + 1), 1.0 - half_d) / (half_d - 1.0);
    const double nu_lo = partial + tail_lo;
    const double nu_hi = partial + tail_hi;
    out.lo = 1.0 / nu_hi;
    out.hi = 1.0 / nu_lo;
    out.estimate = 2.0 / (nu_lo + nu_hi);
    return out;
  }
  // Truncated MC: fraction of walks on a large torus proxy that have not
  // returned to the start by the horizon. Over-estimates rho by at most the
  // return-probability tail beyond the horizon; that allowance widens `lo`.
  if (budget.reps < 16) throw BudgetExceeded("rho_estimate needs at least 16 replicates");
  const std::int64_t side_ll =
      std::max<std::int64_t>(64, 4 * static_cast<std::int64_t>(
                                      std::ceil(std::sqrt(static_cast<double>(budget.horizon)))));
  const auto side = static_cast<std::int64_t>(side_ll);
  const StreamKey key = derive_key(budget.seed, RngDomain::estimator, 0x01f0);
  std::int64_t escaped = 0;
  std::vector<std::int64_t> coord(static_cast<std::size_t>(d));
  for (std::int64_t r = 0; r < budget.reps; ++r) {
    U32Stream s(key, static_cast<std::uint64_t>(r));
    std::fill(coord.begin(), coord.end(), 0);
    bool returned = false;
    for (std::int64_t j = 1; j <= budget.horizon; ++j) {
      const std::uint32_t u = s.next();
      const int axis = static_cast<int>((static_cast<std::uint64_t>(u >> 1) * d) >> 31);
      auto& c = coord[static_cast<std::size_t>(axis)];
      c += (u & 1) ? 1 : -1;
      if (c == side) c = 0;
      if (c == -1) c = side - 1;
      bool at_origin = true;
      for (std::int64_t x : coord) {
        if (x != 0) {
          at_origin = false;
          break;
        }
      }
      if (at_origin) {
        returned = true;
        break;
      }
    }
    if (!returned) ++escaped;
  }
  const double phat =
      static_cast<double>(escaped) / static_cast<double>(budget.reps);
  // Wilson interval.
  const double z = 1.96;
  const double nf = static_cast<double>(budget.reps);
  const double denom = 1.0 + z * z / nf;
  const double center = (phat + z * z / (2.0 * nf)) / denom;
  const double spread =
      z * std::sqrt(phat * (1.0 - phat) / nf + z * z / (4.0 * nf * nf)) / denom;
  const double half_d = static_cast<double>(d) / 2.0;
  const double limit = 2.0 * std::pow(static_cast<double>(d) / (4.0 * std::numbers::pi), half_d);
  const double kmin = std::max(1.0, static_cast<double>(budget.horizon) / 2.0);
  out.truncation_allowance = limit * std::pow(kmin, 1.0 - half_d) / (half_d - 1.0);
  out.estimate = phat;
  out.lo = std::max(0.0, center - spread - out.truncation_allowance);
  out.hi = std::min(1.0, center + spread);
  return out;
}

RangeStats range_stats(const Graph& g, Step t, std::int64_t reps, std::uint64_t seed,
                       std::optional<double> tail_a) {
  if (t < 0 || reps < 1) throw InvalidParams("range_stats requires t >= 0, reps >= 1");
  RangeStats out;
  out.t = t;
  const StreamKey key = derive_key(seed, RngDomain::estimator, 0x5a9e);
  std::vector<std::int64_t> stamp(static_cast<std::size_t>(g.n), -1);
  std::vector<double> sizes;
  sizes.reserve(static_cast<std::size_t>(reps));
  std::int64_t tail_hits = 0;
  const double tail_cut = tail_a ? *tail_a * std::sqrt(static_cast<double>(t)) : 0.0;
  for (std::int64_t r = 0; r < reps; ++r) {
    U32Stream s(key, static_cast<std::uint64_t>(r));
    Vertex p = g.origin;
    std::int64_t size = 1;
    stamp[static_cast<std::size_t>(p)] = r;
    for (Step j = 1; j <= t; ++j) {
      p = walk_step(g, p, WalkKernel::srw, s);
      if (stamp[static_cast<std::size_t>(p)] != r) {
        stamp[static_cast<std::size_t>(p)] = r;
        ++size;
      }
    }
    sizes.push_back(static_cast<double>(size));
    if (tail_a && static_cast<double>(size) <= tail_cut) ++tail_hits;
  }
  out.mean_size = mean(sizes);
  out.ci_half = mean_ci(sizes).half_width();
  if (tail_a) out.tail_freq = static_cast<double>(tail_hits) / static_cast<double>(reps);
  return out;
}

HitProbResult hit_prob_2d(const Graph& torus2, Vertex target, const HitProbSpec& spec,
                          std::int64_t reps, std::uint64_t seed) {
  if (torus2.family != Family::torus || torus2.dim != 2) {
    throw NotATorus("hit_prob_2d requires a 2-d torus");
  }
  const double dist2 = [&] {
    const auto ca = torus2.torus_coords(torus2.origin);
    const auto cb = torus2.torus_coords(target);
    double acc = 0.0;
    for (int i = 0; i < 2; ++i) {
      const int diff = std::abs(ca[static_cast<std::size_t>(i)] - cb[static_cast<std::size_t>(i)]);
      const int wrapped = std::min(diff, torus2.side - diff);
      acc += static_cast<double>(wrapped) * wrapped;
    }
    return acc;
  }();
  const double norm = std::sqrt(dist2);
  HitProbResult out;
  if (target == torus2.origin) {  // hit at time 0 with certainty
    out.frequency = 1.0;
    out.theory = 1.0;
    return out;
  }
  switch (spec.regime) {
    case HitTimeRegime::polynomial:
      if (spec.c <= 0.0 || spec.alpha <= 0.0) throw DomainError("polynomial regime needs C, alpha > 0");
      out.t = static_cast<Step>(std::llround(spec.c * std::pow(norm, 2.0 + 2.0 * spec.alpha)));
      out.theory = spec.alpha / (1.0 + spec.alpha);
      break;
    case HitTimeRegime::linear:
      if (spec.c < 1.0) throw DomainError("linear regime needs C >= 1");
      out.t = static_cast<Step>(std::llround(spec.c * dist2));
      out.theory = (1.0 + std::log(spec.c)) / std::log(spec.c * dist2);
      break;
    case HitTimeRegime::sub_linear:
      if (spec.c <= 0.0 || spec.c > 1.0) throw DomainError("sub-linear regime needs c in (0,1]");
      out.t = static_cast<Step>(std::llround(spec.c * dist2));
      out.theory = spec.c * std::exp(-1.0 / spec.c) / std::log(spec.c * dist2);
      break;
    default:
      throw DomainError("hit_prob_2d: regime unspecified");
  }
  const StreamKey key = derive_key(seed, RngDomain::estimator, 0x2dbe);
  std::int64_t hits = 0;
  for (std::int64_t r = 0; r < reps; ++r) {
    U32Stream s(key, static_cast<std::uint64_t>(r));
    Vertex p = torus2.origin;
    for (Step j = 1; j <= out.t; ++j) {
      p = walk_step(torus2, p, WalkKernel::srw, s);
      if (p == target) {
        ++hits;
        break;
      }
    }
  }
  out.frequency = static_cast<double>(hits) / static_cast<double>(reps);
  out.ci_half = 1.96 * std::sqrt(out.frequency * (1.0 - out.frequency) /
                                 static_cast<double>(reps));
  return out;
}

LDBoundReport ld_bounds(std::int64_t n, double p, double delta, std::optional<std::int64_t> k) {
  if (n < 1 || n > 100000) throw InvalidParams("ld_bounds requires 1 <= n <= 1e5");
  if (p <= 0.0 || p >= 1.0) throw DomainError("ld_bounds requires p in (0,1)");
  if (delta < 0.0) throw DomainError("ld_bounds requires delta >= 0");
  LDBoundReport rep;
  rep.n = n;
  rep.p = p;
  rep.delta = delta;
  rep.k = k;
  const double nf = static_cast<double>(n);

  // Upper tail: Pr[S_n >= np(1+delta)].
  rep.upper_bound_sharp = std::exp(nf * std::log1p(p * delta) -
                                   (1.0 + delta) * nf * p * std::log1p(delta));
  rep.upper_bound_exp = std::exp(-nf * p * delta * std::log1p(delta) / 4.0);
  const auto up_m = static_cast<std::int64_t>(std::ceil(nf * p * (1.0 + delta) - 1e-12));
  rep.exact_upper_tail = binomial_upper_tail(n, p, up_m);
  rep.upper_sound = rep.exact_upper_tail <= rep.upper_bound_sharp * (1.0 + 1e-9) + 1e-300 &&
                    rep.exact_upper_tail <= rep.upper_bound_exp * (1.0 + 1e-9) + 1e-300;

  // Lower tail needs delta in (0,1).
  if (delta > 0.0 && delta < 1.0) {
    rep.lower_bound_sharp = std::exp(nf * std::log1p(-p * delta) -
                                     (1.0 - delta) * nf * p * std::log1p(-delta));
    rep.lower_bound_exp = std::exp(-nf * p * delta * delta / 4.0);
    const auto lo_m = static_cast<std::int64_t>(std::floor(nf * p * (1.0 - delta) + 1e-12));
    rep.exact_lower_tail = binomial_lower_tail(n, p, lo_m);
    rep.lower_sound = rep.exact_lower_tail <= rep.lower_bound_sharp * (1.0 + 1e-9) + 1e-300 &&
                      rep.exact_lower_tail <= rep.lower_bound_exp * (1.0 + 1e-9) + 1e-300;
  } else {
    rep.lower_sound = true;  // out of the lower inequality's stated range
  }

  if (k) {
    if (*k < 1) throw DomainError("ld_bounds requires k >= 1");
    if (delta <= 0.0) throw DomainError("supremum bounds require delta > 0");
    const double kf = static_cast<double>(*k);
    if (delta >= 1.0) {
      const double rate = p * delta * std::log1p(delta) / 4.0;
      rep.sup_upper_bound = std::exp(-kf * rate) / (1.0 - std::exp(-rate));
    }
    if (delta > 0.0 && delta < 1.0) {
      rep.sup_lower_bound = 8.0 / (delta * delta) * std::exp(-kf * p * delta * delta / 4.0);
    }
  }
  return rep;
}

PercolationResult site_percolation(const Graph& torus, double p, std::uint64_t seed,
                                   double threshold_prefactor) {
  if (torus.family != Family::torus || torus.dim < 2) {
    throw NotATorus("site_percolation requires a torus of dimension >= 2");
  }
  if (p < 0.0 || p > 1.0) throw InvalidParams("site_percolation requires p in [0,1]");
  PercolationResult res;
  res.p = p;
  const Vertex n = torus.n;
  res.open.assign(static_cast<std::size_t>(n), 0);
  const StreamKey key = derive_key(seed, RngDomain::percolation, 0);
  for (Vertex v = 0; v < n; ++v) {
    if (prf_uniform(key, static_cast<std::uint64_t>(v), 0) < p) {
      res.open[static_cast<std::size_t>(v)] = 1;
      ++res.open_count;
    }
  }
  // Union-find over open-open edges.
  std::vector<Vertex> parent(static_cast<std::size_t>(n));
  std::vector<std::int32_t> rank(static_cast<std::size_t>(n), 0);
  for (Vertex v = 0; v < n; ++v) parent[static_cast<std::size_t>(v)] = v;
  auto find = [&](Vertex v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  auto unite = [&](Vertex a, Vertex b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)]) std::swap(a, b);
    parent[static_cast<std::size_t>(b)] = a;
    if (rank[static_cast<std::size_t>(a)] == rank[static_cast<std::size_t>(b)]) {
      ++rank[static_cast<std::size_t>(a)];
    }
  };
  for (Vertex v = 0; v < n; ++v) {
    if (!res.open[static_cast<std::size_t>(v)]) continue;
    for (Vertex u : torus.neighbors(v)) {
      if (u > v && res.open[static_cast<std::size_t>(u)]) unite(v, u);
    }
  }
  res.component_id.assign(static_cast<std::size_t>(n), -1);
  std::vector<std::int64_t> size_of_root(static_cast<std::size_t>(n), 0);
  for (Vertex v = 0; v < n; ++v) {
    if (res.open[static_cast<std::size_t>(v)]) ++size_of_root[static_cast<std::size_t>(find(v))];
  }
  std::int32_t next_id = 0;
  std::vector<std::int32_t> id_of_root(static_cast<std::size_t>(n), -1);
  for (Vertex v = 0; v < n; ++v) {
    if (!res.open[static_cast<std::size_t>(v)]) continue;
    const Vertex r = find(v);
    if (id_of_root[static_cast<std::size_t>(r)] < 0) {
      id_of_root[static_cast<std::size_t>(r)] = next_id++;
      res.component_sizes.push_back(size_of_root[static_cast<std::size_t>(r)]);
    }
    res.component_id[static_cast<std::size_t>(v)] = id_of_root[static_cast<std::size_t>(r)];
  }
  if (!res.component_sizes.empty()) {
    std::int32_t best = 0;
    for (std::int32_t i = 1; i < next_id; ++i) {
      if (res.component_sizes[static_cast<std::size_t>(i)] >
          res.component_sizes[static_cast<std::size_t>(best)]) {
        best = i;
      }
    }
    res.gc_id = best;
    res.gc_size = res.component_sizes[static_cast<std::size_t>(best)];
  }
  const double log_n = std::log(static_cast<double>(torus.side));
  res.threshold = threshold_prefactor *
                  std::pow(log_n, static_cast<double>(torus.dim) /
                                      static_cast<double>(torus.dim - 1));
  std::int64_t above = 0;
  for (std::int64_t s : res.component_sizes) {
    if (static_cast<double>(s) >= res.threshold) ++above;
  }
  res.unique_large = above <= 1;
  return res;
}

}  // namespace frogsim

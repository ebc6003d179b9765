#include "frogsim/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "frogsim/rng.hpp"

namespace frogsim {

std::string family_name(Family f) {
  switch (f) {
    case Family::cycle: return "cycle";
    case Family::torus: return "torus";
    case Family::complete: return "complete";
    case Family::dary_tree: return "dary_tree";
    case Family::gadget_ring: return "gadget_ring";
    case Family::random_regular: return "random_regular";
    case Family::custom: return "custom";
  }
  return "custom";
}

namespace {

Graph from_adjacency(std::vector<std::vector<Vertex>> nbrs, Family fam) {
  Graph g;
  g.n = static_cast<Vertex>(nbrs.size());
  g.family = fam;
  g.offsets.assign(static_cast<std::size_t>(g.n) + 1, 0);
  for (Vertex v = 0; v < g.n; ++v) {
    auto& lst = nbrs[static_cast<std::size_t>(v)];
    std::sort(lst.begin(), lst.end());
    g.offsets[static_cast<std::size_t>(v) + 1] =
        g.offsets[static_cast<std::size_t>(v)] + static_cast<std::int64_t>(lst.size());
  }
  g.adj.reserve(static_cast<std::size_t>(g.offsets.back()));
  for (auto& lst : nbrs) g.adj.insert(g.adj.end(), lst.begin(), lst.end());
  int mind = g.n > 0 ? g.deg(0) : 0, maxd = mind;
  for (Vertex v = 0; v < g.n; ++v) {
    mind = std::min(mind, g.deg(v));
    maxd = std::max(maxd, g.deg(v));
  }
  g.degree = maxd;
  g.regular = (mind == maxd);
  return g;
}

bool connected(const Graph& g) {
  if (g.n == 0) return false;
  std::vector<char> seen(static_cast<std::size_t>(g.n), 0);
  std::vector<Vertex> stack = {0};
  seen[0] = 1;
  Vertex count = 1;
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    for (Vertex u : g.neighbors(v)) {
      if (!seen[static_cast<std::size_t>(u)]) {
        seen[static_cast<std::size_t>(u)] = 1;
        ++count;
        stack.push_back(u);
      }
    }
  }
  return count == g.n;
}

}  // namespace

Graph make_cycle(Vertex n) {
  if (n < 3) throw InvalidParams("cycle requires n >= 3, got n=" + std::to_string(n));
  std::vector<std::vector<Vertex>> nbrs(static_cast<std::size_t>(n));
  for (Vertex v = 0; v < n; ++v) {
    nbrs[static_cast<std::size_t>(v)] = {(v + 1) % n, (v + n - 1) % n};
  }
  Graph g = from_adjacency(std::move(nbrs), Family::cycle);
  g.dim = 1;
  g.side = n;
  return g;
}

Graph make_torus(int dim, int side) {
  if (dim < 1) throw InvalidParams("torus requires d >= 1");
  if (side < 2) throw InvalidParams("torus requires n >= 2");
  if (dim == 1 && side >= 3) {
    Graph g = make_cycle(side);
    return g;
  }
  std::int64_t total = 1;
  for (int i = 0; i < dim; ++i) {
    total *= side;
    if (total > (std::int64_t{1} << 31)) throw InvalidParams("torus too large for Vertex ids");
  }
  const auto n = static_cast<Vertex>(total);
  std::vector<std::vector<Vertex>> nbrs(static_cast<std::size_t>(n));
  std::vector<std::int64_t> stride(static_cast<std::size_t>(dim), 1);
  for (int i = 1; i < dim; ++i) stride[static_cast<std::size_t>(i)] = stride[i - 1] * side;
  for (Vertex v = 0; v < n; ++v) {
    std::int64_t rest = v;
    for (int i = 0; i < dim; ++i) {
      const auto xi = static_cast<int>((rest / stride[static_cast<std::size_t>(i)]) % side);
      const std::int64_t base = v - xi * stride[static_cast<std::size_t>(i)];
      const int up = (xi + 1) % side;
      const int dn = (xi + side - 1) % side;
      nbrs[static_cast<std::size_t>(v)].push_back(
          static_cast<Vertex>(base + up * stride[static_cast<std::size_t>(i)]));
      if (side > 2) {
        nbrs[static_cast<std::size_t>(v)].push_back(
            static_cast<Vertex>(base + dn * stride[static_cast<std::size_t>(i)]));
      }
    }
  }
  Graph g = from_adjacency(std::move(nbrs), Family::torus);
  g.dim = dim;
  g.side = side;
  return g;
}

Graph make_complete(Vertex n) {
  if (n < 2) throw InvalidParams("complete graph requires n >= 2");
  std::vector<std::vector<Vertex>> nbrs(static_cast<std::size_t>(n));
  for (Vertex v = 0; v < n; ++v) {
    for (Vertex u = 0; u < n; ++u) {
      if (u != v) nbrs[static_cast<std::size_t>(v)].push_back(u);
    }
  }
  return from_adjacency(std::move(nbrs), Family::complete);
}

Graph make_dary_tree(int arity, int depth) {
  if (arity < 2) throw InvalidParams("dary_tree requires arity >= 2");
  if (depth < 1) throw InvalidParams("dary_tree requires depth >= 1");
  std::int64_t total = 1, level = 1;
  for (int i = 0; i < depth; ++i) {
    level *= arity;
    total += level;
    if (total > (std::int64_t{1} << 31)) throw InvalidParams("dary_tree too large");
  }
  const auto n = static_cast<Vertex>(total);
  std::vector<std::vector<Vertex>> nbrs(static_cast<std::size_t>(n));
  // Level order: vertex v's children are arity*v + 1 .. arity*v + arity.
  for (Vertex v = 0; v < n; ++v) {
    for (int c = 1; c <= arity; ++c) {
      const std::int64_t child = static_cast<std::int64_t>(arity) * v + c;
      if (child >= n) break;
      nbrs[static_cast<std::size_t>(v)].push_back(static_cast<Vertex>(child));
      nbrs[static_cast<std::size_t>(child)].push_back(v);
    }
  }
  Graph g = from_adjacency(std::move(nbrs), Family::dary_tree);
  g.tree_arity = arity;
  g.tree_depth = depth;
  g.regular = false;
  return g;
}

Graph make_gadget_ring(int d, Vertex n) {
  if (d < 2) throw InvalidParams("gadget_ring requires d >= 2");
  if (n < 2 * d) throw InvalidParams("gadget_ring requires n >= 2d");
  const int copies = static_cast<int>((n + d) / (d + 1));
  if (copies < 2) throw InvalidParams("gadget_ring requires at least two copies");
  const int cs = d + 1;  // copy size
  const auto total = static_cast<Vertex>(static_cast<std::int64_t>(copies) * cs);
  std::vector<std::vector<Vertex>> nbrs(static_cast<std::size_t>(total));
  auto id = [&](int copy, int local) { return static_cast<Vertex>(copy * cs + local); };
  for (int c = 0; c < copies; ++c) {
    // Complete graph on cs vertices minus the edge {0,1}.
    for (int a = 0; a < cs; ++a) {
      for (int b = a + 1; b < cs; ++b) {
        if (a == 0 && b == 1) continue;
        nbrs[static_cast<std::size_t>(id(c, a))].push_back(id(c, b));
        nbrs[static_cast<std::size_t>(id(c, b))].push_back(id(c, a));
      }
    }
    // Single ring edge between the removed edge's endpoints of consecutive
    // copies; local 1 connects forward to local 0 of the next copy.
    const int next = (c + 1) % copies;
    nbrs[static_cast<std::size_t>(id(c, 1))].push_back(id(next, 0));
    nbrs[static_cast<std::size_t>(id(next, 0))].push_back(id(c, 1));
  }
  Graph g = from_adjacency(std::move(nbrs), Family::gadget_ring);
  g.ring_copies = copies;
  return g;
}

Graph make_random_regular(Vertex n, int d, std::uint64_t seed, int max_retries) {
  if (d < 1 || n < d + 1) throw InvalidParams("random_regular requires n >= d+1, d >= 1");
  if ((static_cast<std::int64_t>(n) * d) % 2 != 0) {
    throw InvalidParams("random_regular requires n*d even");
  }
  const StreamKey key = derive_key(seed, RngDomain::generator, 0);
  const std::size_t half_edges = static_cast<std::size_t>(n) * static_cast<std::size_t>(d);
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    U32Stream s(key, static_cast<std::uint64_t>(attempt));
    // Configuration model: pair consecutive stubs of a uniform shuffle.
    std::vector<Vertex> stubs(half_edges);
    for (Vertex v = 0; v < n; ++v) {
      for (int j = 0; j < d; ++j) stubs[static_cast<std::size_t>(v) * d + j] = v;
    }
    for (std::size_t i = stubs.size(); i > 1; --i) {
      const std::uint32_t j = s.below(static_cast<std::uint32_t>(i));
      std::swap(stubs[i - 1], stubs[j]);
    }
    // Pure rejection accepts only ~e^{-(d^2-1)/4} of pairings, so defects
    // (loops, multi-edges) are repaired by random pair switches instead.
    const std::size_t pairs = half_edges / 2;
    auto edge_key = [n](Vertex a, Vertex b) {
      return static_cast<std::int64_t>(std::min(a, b)) * n + std::max(a, b);
    };
    std::unordered_set<std::int64_t> edges;
    edges.reserve(pairs * 2);
    std::vector<char> is_bad(pairs, 0);
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < pairs; ++i) {
      const Vertex a = stubs[2 * i], b = stubs[2 * i + 1];
      if (a == b || !edges.insert(edge_key(a, b)).second) {
        is_bad[i] = 1;
        bad.push_back(i);
      }
    }
    bool ok = true;
    std::int64_t switches_left = static_cast<std::int64_t>(half_edges) * 64;
    while (!bad.empty() && ok) {
      const std::size_t i = bad.back();
      if (--switches_left < 0) {
        ok = false;
        break;
      }
      const auto j = static_cast<std::size_t>(s.below(static_cast<std::uint32_t>(pairs)));
      if (i == j || is_bad[j]) continue;
      // Switch partners of pairs i and j, accepted only if both fixed pairs
      // are simple against the current edge set.
      const Vertex a = stubs[2 * i], b = stubs[2 * i + 1];
      const Vertex x = stubs[2 * j], y = stubs[2 * j + 1];
      if (a == x || b == y) continue;
      if (edges.count(edge_key(a, x)) || edges.count(edge_key(b, y))) continue;
      edges.erase(edge_key(x, y));
      stubs[2 * i + 1] = x;
      stubs[2 * j] = b;
      edges.insert(edge_key(a, x));
      edges.insert(edge_key(b, y));
      is_bad[i] = 0;
      bad.pop_back();
    }
    if (!ok) continue;
    std::vector<std::vector<Vertex>> nbrs(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < pairs; ++i) {
      const Vertex a = stubs[2 * i], b = stubs[2 * i + 1];
      nbrs[static_cast<std::size_t>(a)].push_back(b);
      nbrs[static_cast<std::size_t>(b)].push_back(a);
    }
    Graph g = from_adjacency(std::move(nbrs), Family::random_regular);
    g.gen_seed = seed;
    if (!connected(g)) continue;
    return g;
  }
  throw GenerationFailed("configuration model failed to produce a simple connected graph in " +
                         std::to_string(max_retries) + " attempts");
}

Graph make_custom(Vertex n, const std::vector<std::pair<Vertex, Vertex>>& edges) {
  if (n < 1) throw InvalidParams("custom graph requires n >= 1");
  std::vector<std::vector<Vertex>> nbrs(static_cast<std::size_t>(n));
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) throw InvalidParams("edge endpoint out of range");
    if (u == v) throw InvalidParams("self-loop in edge list");
    nbrs[static_cast<std::size_t>(u)].push_back(v);
    nbrs[static_cast<std::size_t>(v)].push_back(u);
  }
  return from_adjacency(std::move(nbrs), Family::custom);
}

void validate_graph(const Graph& g) {
  if (g.n < 1) throw InvalidParams("empty graph");
  if (g.offsets.size() != static_cast<std::size_t>(g.n) + 1 || g.offsets[0] != 0 ||
      g.offsets.back() != static_cast<std::int64_t>(g.adj.size())) {
    throw InvalidParams("malformed CSR offsets");
  }
  for (Vertex v = 0; v < g.n; ++v) {
    auto nb = g.neighbors(v);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      const Vertex u = nb[i];
      if (u < 0 || u >= g.n) throw InvalidParams("neighbor out of range");
      if (u == v) throw InvalidParams("self-loop at vertex " + std::to_string(v));
      if (i > 0 && nb[i] == nb[i - 1]) {
        throw InvalidParams("multi-edge at vertex " + std::to_string(v));
      }
      auto back = g.neighbors(u);
      if (!std::binary_search(back.begin(), back.end(), v)) {
        throw InvalidParams("asymmetric adjacency between " + std::to_string(v) + " and " +
                            std::to_string(u));
      }
    }
    if (g.regular && g.deg(v) != g.degree) {
      throw InvalidParams("vertex " + std::to_string(v) + " violates regularity");
    }
  }
  if (!connected(g)) throw InvalidParams("graph is not connected");
  if (g.origin < 0 || g.origin >= g.n) throw InvalidParams("origin out of range");
}

std::vector<int> Graph::torus_coords(Vertex v) const {
  if (!is_torus()) throw NotATorus("torus coordinates requested on " + family_name(family));
  std::vector<int> c(static_cast<std::size_t>(dim));
  std::int64_t rest = v;
  for (int i = 0; i < dim; ++i) {
    c[static_cast<std::size_t>(i)] = static_cast<int>(rest % side);
    rest /= side;
  }
  return c;
}

Vertex Graph::torus_vertex(std::span<const int> coords) const {
  if (!is_torus()) throw NotATorus("torus coordinates requested on " + family_name(family));
  std::int64_t v = 0, stride = 1;
  for (int i = 0; i < dim; ++i) {
    const int x = ((coords[static_cast<std::size_t>(i)] % side) + side) % side;
    v += x * stride;
    stride *= side;
  }
  return static_cast<Vertex>(v);
}

std::int64_t Graph::torus_dist(Vertex a, Vertex b) const {
  const auto ca = torus_coords(a);
  const auto cb = torus_coords(b);
  std::int64_t d2 = 0;
  for (int i = 0; i < dim; ++i) {
    const int diff = std::abs(ca[static_cast<std::size_t>(i)] - cb[static_cast<std::size_t>(i)]);
    d2 += std::min(diff, side - diff);
  }
  return d2;
}

std::int64_t Graph::radius_from_origin() const {
  std::vector<std::int64_t> dist(static_cast<std::size_t>(n), -1);
  std::queue<Vertex> q;
  q.push(origin);
  dist[static_cast<std::size_t>(origin)] = 0;
  std::int64_t ecc = 0;
  while (!q.empty()) {
    const Vertex v = q.front();
    q.pop();
    for (Vertex u : neighbors(v)) {
      if (dist[static_cast<std::size_t>(u)] < 0) {
        dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
        ecc = std::max(ecc, dist[static_cast<std::size_t>(u)]);
        q.push(u);
      }
    }
  }
  return ecc;
}

void save_edge_list(const Graph& g, std::ostream& out) {
  out << "v " << g.n << " d " << g.degree << " family " << family_name(g.family) << "\n";
  for (Vertex v = 0; v < g.n; ++v) {
    for (Vertex u : g.neighbors(v)) {
      if (v < u) out << v << " " << u << "\n";
    }
  }
}

Graph load_edge_list(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty edge-list stream");
  std::istringstream hdr(line);
  std::string tv, td, tf, fam_name_str;
  Vertex n = 0;
  int deg = 0;
  if (!(hdr >> tv >> n >> td >> deg >> tf >> fam_name_str) || tv != "v" || td != "d" ||
      tf != "family") {
    throw IoError("bad edge-list header: " + line);
  }
  std::vector<std::pair<Vertex, Vertex>> edges;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Vertex u, v;
    if (!(ls >> u >> v)) throw IoError("bad edge line: " + line);
    edges.emplace_back(u, v);
  }
  Graph g = make_custom(n, edges);
  for (Family f : {Family::cycle, Family::torus, Family::complete, Family::dary_tree,
                   Family::gadget_ring, Family::random_regular, Family::custom}) {
    if (family_name(f) == fam_name_str) {
      g.family = f;
      break;
    }
  }
  validate_graph(g);
  return g;
}

void save_edge_list_file(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  save_edge_list(g, out);
}

Graph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return load_edge_list(in);
}

BoxPartition box_partition(const Graph& g, int r) {
  if (g.family != Family::torus && g.family != Family::cycle) {
    throw NotATorus("box_partition requires a torus, got " + family_name(g.family));
  }
  if (r < 1 || r > g.side) throw InvalidParams("box side must satisfy 1 <= r <= n");
  BoxPartition part;
  part.r = r;
  part.dim = g.dim;
  part.side = g.side;
  part.m = g.side / r;
  std::int64_t count = 1;
  for (int i = 0; i < g.dim; ++i) count *= part.m;
  part.boxes.assign(static_cast<std::size_t>(count), {});
  // Coordinate x lands in renormalized slot min(x / r, m-1); the last slot
  // along each axis absorbs the remainder, so side lengths lie in [r, 2r).
  for (Vertex v = 0; v < g.n; ++v) {
    const auto coords = g.torus_coords(v);
    std::int64_t idx = 0, stride = 1;
    for (int i = 0; i < g.dim; ++i) {
      const int slot = std::min(coords[static_cast<std::size_t>(i)] / r, part.m - 1);
      idx += slot * stride;
      stride *= part.m;
    }
    part.boxes[static_cast<std::size_t>(idx)].push_back(v);
  }
  return part;
}

}  // namespace frogsim

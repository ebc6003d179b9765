#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "frogsim/types.hpp"

namespace frogsim {

enum class Family {
  cycle,
  torus,
  complete,
  dary_tree,
  gadget_ring,
  random_regular,
  custom,
};

std::string family_name(Family f);

// Immutable CSR adjacency. All generated families except dary_tree are
// regular; dary_tree is flagged so regular-only operations can refuse it.
struct Graph {
  Vertex n = 0;
  int degree = 0;  // common degree when regular, max degree otherwise
  bool regular = true;
  Family family = Family::custom;
  Vertex origin = 0;

  std::vector<std::int64_t> offsets;  // size n+1
  std::vector<Vertex> adj;

  // Family parameters (zero when not applicable).
  int dim = 0;        // torus dimension
  int side = 0;       // torus side length
  int tree_arity = 0;
  int tree_depth = 0;
  int ring_copies = 0;  // gadget ring
  std::uint64_t gen_seed = 0;

  std::span<const Vertex> neighbors(Vertex v) const {
    return {adj.data() + offsets[static_cast<std::size_t>(v)],
            adj.data() + offsets[static_cast<std::size_t>(v) + 1]};
  }
  int deg(Vertex v) const {
    return static_cast<int>(offsets[static_cast<std::size_t>(v) + 1] -
                            offsets[static_cast<std::size_t>(v)]);
  }
  std::int64_t edge_count() const { return static_cast<std::int64_t>(adj.size()) / 2; }
  bool is_torus() const { return family == Family::torus || (family == Family::cycle); }

  // Torus coordinate helpers (cycle counts as a 1-d torus).
  std::vector<int> torus_coords(Vertex v) const;
  Vertex torus_vertex(std::span<const int> coords) const;
  std::int64_t torus_dist(Vertex a, Vertex b) const;

  // Eccentricity of the origin via BFS; exact diameter for vertex-transitive
  // families, a lower bound within a factor 2 otherwise.
  std::int64_t radius_from_origin() const;
};

Graph make_cycle(Vertex n);
Graph make_torus(int dim, int side);
Graph make_complete(Vertex n);
// Rooted tree where every internal vertex has `arity` children, `depth`
// levels below the root. Degree-irregular; flagged regular = false.
Graph make_dary_tree(int arity, int depth);
// Ring of cliques-minus-an-edge. Copies are complete graphs on d+1 vertices
// with one edge removed; consecutive copies are joined by a single edge
// between the removed edge's endpoints, which restores d-regularity.
Graph make_gadget_ring(int d, Vertex n);
// Configuration model with rejection of self-loops/multi-edges and a
// connectivity check; bounded retries.
Graph make_random_regular(Vertex n, int d, std::uint64_t seed, int max_retries = 100);
Graph make_custom(Vertex n, const std::vector<std::pair<Vertex, Vertex>>& edges);

// Throws InvalidParams if any Graph invariant fails (symmetry, no loops or
// multi-edges, connectivity, regularity for regular families).
void validate_graph(const Graph& g);

// Plain-text edge list: header "v <n> d <deg> family <name>", then one
// ascending "u v" pair per line, 0-indexed.
void save_edge_list(const Graph& g, std::ostream& out);
Graph load_edge_list(std::istream& in);
void save_edge_list_file(const Graph& g, const std::string& path);
Graph load_edge_list_file(const std::string& path);

// Partition of a torus into boxes of side in [r, 2r); box count m^dim with
// m = floor(side / r), indexed by renormalized coordinates.
struct BoxPartition {
  int r = 0;
  int m = 0;
  int dim = 0;
  int side = 0;
  std::vector<std::vector<Vertex>> boxes;

  std::size_t box_count() const { return boxes.size(); }
};

BoxPartition box_partition(const Graph& g, int r);

}  // namespace frogsim

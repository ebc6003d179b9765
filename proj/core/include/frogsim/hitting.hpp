#pragma once

#include <span>
#include <vector>

#include "frogsim/graph.hpp"

namespace frogsim {

// Dense matrix of expected hitting times E_x[T_y], row x, column y.
struct HittingMatrix {
  Vertex n = 0;
  std::vector<double> values;  // row-major n*n
  double residual = 0.0;       // worst first-step-equation residual

  double at(Vertex x, Vertex y) const {
    return values[static_cast<std::size_t>(x) * static_cast<std::size_t>(n) +
                  static_cast<std::size_t>(y)];
  }
  double max_hitting() const;                       // H_max
  double min_hitting(std::span<const Vertex> a) const;  // H_min over distinct pairs in a
};

// Solves the first-step system through the fundamental matrix
// Z = (I - P + 1 pi^T)^{-1}; E_x[T_y] = (Z_yy - Z_xy) / pi_y.
HittingMatrix hitting_times_exact(const Graph& g, Vertex cap = 4096);

}  // namespace frogsim

#include "frogsim/hitting.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace frogsim {

double HittingMatrix::max_hitting() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

double HittingMatrix::min_hitting(std::span<const Vertex> a) const {
  double m = std::numeric_limits<double>::infinity();
  for (Vertex x : a) {
    for (Vertex y : a) {
      if (x != y) m = std::min(m, at(x, y));
    }
  }
  return m;
}

HittingMatrix hitting_times_exact(const Graph& g, Vertex cap) {
  if (g.n > cap) {
    throw TooLarge("hitting_times_exact capped at " + std::to_string(cap) + " vertices, graph has " +
                   std::to_string(g.n));
  }
  const Vertex n = g.n;
  const double two_m = static_cast<double>(g.adj.size());
  Eigen::VectorXd pi(n);
  for (Vertex v = 0; v < n; ++v) pi(v) = static_cast<double>(g.deg(v)) / two_m;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Vertex v = 0; v < n; ++v) {
    a(v, v) = 1.0;
    const double inv_deg = 1.0 / static_cast<double>(g.deg(v));
    for (Vertex u : g.neighbors(v)) a(v, u) -= inv_deg;
    for (Vertex u = 0; u < n; ++u) a(v, u) += pi(u);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  if (lu.rcond() < 1e-14) {
    throw SingularSystem("fundamental-matrix system is singular (graph disconnected?)");
  }
  const Eigen::MatrixXd z = lu.inverse();

  HittingMatrix out;
  out.n = n;
  out.values.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  for (Vertex x = 0; x < n; ++x) {
    for (Vertex y = 0; y < n; ++y) {
      out.values[static_cast<std::size_t>(x) * n + y] = (x == y) ? 0.0 : (z(y, y) - z(x, y)) / pi(y);
    }
  }
  // First-step residual: E_x[T_y] = 1 + sum_u P(x,u) E_u[T_y] for x != y.
  double worst = 0.0;
  for (Vertex y = 0; y < n; ++y) {
    for (Vertex x = 0; x < n; ++x) {
      if (x == y) continue;
      double rhs = 1.0;
      const double inv_deg = 1.0 / static_cast<double>(g.deg(x));
      for (Vertex u : g.neighbors(x)) {
        if (u != y) rhs += inv_deg * out.at(u, y);
      }
      worst = std::max(worst, std::abs(out.at(x, y) - rhs));
    }
  }
  out.residual = worst;
  return out;
}

}  // namespace frogsim

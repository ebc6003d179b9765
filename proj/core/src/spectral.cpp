#include "frogsim/spectral.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "frogsim/rng.hpp"

namespace frogsim {

double cycle_gap_closed_form(Vertex n) {
  return 1.0 - std::cos(2.0 * std::numbers::pi / static_cast<double>(n));
}

double complete_gap_closed_form(Vertex n) {
  return 1.0 + 1.0 / (static_cast<double>(n) - 1.0);
}

namespace {

// Symmetrized kernel S = D^{-1/2} A D^{-1/2}; same spectrum as P for
// reversible walks, plain A/d for regular graphs.
Eigen::MatrixXd symmetrized_kernel(const Graph& g) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(g.n, g.n);
  for (Vertex v = 0; v < g.n; ++v) {
    const double dv = static_cast<double>(g.deg(v));
    for (Vertex u : g.neighbors(v)) {
      s(v, u) = 1.0 / std::sqrt(dv * static_cast<double>(g.deg(u)));
    }
  }
  return s;
}

SpectralStats dense_gap(const Graph& g, const SpectralConfig& cfg) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrized_kernel(g),
                                                        Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();  // ascending
  const double second_largest = ev(g.n - 2);
  const double smallest = ev(0);
  SpectralStats out;
  out.gamma = 1.0 - second_largest;
  out.gamma_abs = 1.0 - std::max(second_largest, std::abs(smallest));
  out.method = SpectralMethod::dense_eig;
  out.tolerance = cfg.tol;
  return out;
}

// Largest eigenvalue of a matrix-free symmetric operator restricted to the
// orthogonal complement of `deflate` (unit vector), via power iteration with
// Rayleigh-quotient convergence.
template <typename Apply>
double deflated_power_iteration(Vertex n, const Apply& apply, const Eigen::VectorXd& deflate,
                                const SpectralConfig& cfg, int* iterations) {
  Eigen::VectorXd x(n);
  U32Stream s(derive_key(0x5eedu, RngDomain::generator, 7), 0);
  for (Vertex i = 0; i < n; ++i) x(i) = s.next_uniform() - 0.5;
  x -= deflate * deflate.dot(x);
  x.normalize();
  Eigen::VectorXd y(n);
  double prev = 0.0;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    apply(x, y);
    y -= deflate * deflate.dot(y);
    const double rayleigh = x.dot(y);
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    x = y / norm;
    if (it > 8 && std::abs(rayleigh - prev) < cfg.tol) {
      if (iterations) *iterations = it;
      return rayleigh;
    }
    prev = rayleigh;
  }
  throw ConvergenceFailure("power iteration: residual " + std::to_string(std::abs(prev)) +
                           " after " + std::to_string(cfg.max_iterations) + " iterations");
}

SpectralStats power_gap(const Graph& g, const SpectralConfig& cfg) {
  const Vertex n = g.n;
  Eigen::VectorXd sqrt_deg(n);
  for (Vertex v = 0; v < n; ++v) sqrt_deg(v) = std::sqrt(static_cast<double>(g.deg(v)));
  sqrt_deg.normalize();  // top eigenvector of S

  auto apply_s = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    for (Vertex v = 0; v < n; ++v) {
      double acc = 0.0;
      const double dv = std::sqrt(static_cast<double>(g.deg(v)));
      for (Vertex u : g.neighbors(v)) {
        acc += in(u) / std::sqrt(static_cast<double>(g.deg(u)));
      }
      out(v) = acc / dv;
    }
  };
  // I + S is PSD, so its top eigenvalue on the deflated space is 1 + gamma_2.
  auto apply_shifted = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    apply_s(in, out);
    out += in;
  };
  SpectralStats out;
  out.method = SpectralMethod::power_iteration;
  out.tolerance = cfg.tol;
  int it1 = 0, it2 = 0;
  const double gamma2 = deflated_power_iteration(n, apply_shifted, sqrt_deg, cfg, &it1) - 1.0;
  out.gamma = 1.0 - gamma2;
  // Largest |eigenvalue| of S on the deflated space gives the absolute gap.
  const double mag = deflated_power_iteration(
      n,
      [&](const Eigen::VectorXd& in, Eigen::VectorXd& out2) {
        static thread_local Eigen::VectorXd tmp;
        tmp.resize(in.size());
        apply_s(in, tmp);
        apply_s(tmp, out2);
      },
      sqrt_deg, cfg, &it2);
  out.gamma_abs = 1.0 - std::sqrt(std::max(0.0, mag));
  out.iterations = it1 + it2;
  return out;
}

}  // namespace

SpectralStats spectral_gap(const Graph& g, const SpectralConfig& cfg) {
  if (g.n < 2) throw InvalidParams("spectral gap needs at least two vertices");
  if (g.family == Family::cycle) {
    SpectralStats out;
    out.gamma = cycle_gap_closed_form(g.n);
    const double lambda_min = std::cos(2.0 * std::numbers::pi *
                                       std::floor(g.n / 2.0) / static_cast<double>(g.n));
    out.gamma_abs = 1.0 - std::max(1.0 - out.gamma, std::abs(lambda_min));
    out.method = SpectralMethod::closed_form;
    out.tolerance = 0.0;
    return out;
  }
  if (g.family == Family::complete) {
    SpectralStats out;
    out.gamma = complete_gap_closed_form(g.n);
    out.gamma_abs = 1.0 - 1.0 / (static_cast<double>(g.n) - 1.0);
    out.method = SpectralMethod::closed_form;
    out.tolerance = 0.0;
    return out;
  }
  if (g.n <= cfg.dense_cap) return dense_gap(g, cfg);
  return power_gap(g, cfg);
}

double mixing_decay(const Graph& g, std::int64_t t, Vertex dense_cap) {
  if (g.n > dense_cap) {
    throw TooLarge("mixing_decay dense powering capped at " + std::to_string(dense_cap) +
                   " vertices");
  }
  if (t < 0) throw InvalidParams("mixing_decay requires t >= 0");
  const Vertex n = g.n;
  Eigen::MatrixXd lazy = Eigen::MatrixXd::Zero(n, n);
  for (Vertex v = 0; v < n; ++v) {
    lazy(v, v) = 0.5;
    for (Vertex u : g.neighbors(v)) lazy(v, u) = 0.5 / static_cast<double>(g.deg(v));
  }
  // Binary powering.
  Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd base = lazy;
  std::int64_t e = t;
  while (e > 0) {
    if (e & 1) acc = acc * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  double worst = 0.0;
  const double uniform = 1.0 / static_cast<double>(n);
  for (Vertex v = 0; v < n; ++v) worst = std::max(worst, std::abs(acc(v, v) - uniform));
  return worst;
}

}  // namespace frogsim

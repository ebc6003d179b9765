#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "frogsim/graph.hpp"

namespace frogsim {

enum class SpectralMethod { closed_form, dense_eig, power_iteration };

struct SpectralStats {
  double gamma = 0.0;      // second smallest eigenvalue of I - P, in (0, 2]
  double gamma_abs = 0.0;  // absolute gap 1 - max(|gamma_2|, |gamma_min|)
  SpectralMethod method = SpectralMethod::dense_eig;
  double tolerance = 0.0;
  int iterations = 0;
};

struct SpectralConfig {
  double tol = 1e-10;
  Vertex dense_cap = 2048;      // dense eigensolve up to this many vertices
  int max_iterations = 200000;  // power-iteration budget
};

SpectralStats spectral_gap(const Graph& g, const SpectralConfig& cfg = {});

// max over x of |P_L^t(x,x) - 1/n| for the lazy kernel P_L = (I+P)/2,
// computed by exact matrix powering. Throws TooLarge above the cap.
double mixing_decay(const Graph& g, std::int64_t t, Vertex dense_cap = 4096);

// Closed-form gaps used as oracles in tests.
double cycle_gap_closed_form(Vertex n);
double complete_gap_closed_form(Vertex n);

}  // namespace frogsim

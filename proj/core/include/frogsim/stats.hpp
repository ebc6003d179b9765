#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "frogsim/rng.hpp"

namespace frogsim {

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);
double sample_stddev(std::span<const double> xs);
// Interpolated quantile of a copy of xs, q in [0,1].
double quantile(std::span<const double> xs, double q);
double median(std::span<const double> xs);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double half_width() const { return (hi - lo) / 2.0; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

// Normal-theory CI for the mean at z sigmas.
Interval mean_ci(std::span<const double> xs, double z = 1.96);

// Percentile bootstrap CI for the mean: `resamples` resamples drawn from a
// counter-based stream, so the interval is a pure function of (xs, key).
Interval bootstrap_mean_ci(std::span<const double> xs, StreamKey key, int resamples = 1000,
                           double level = 0.95);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// Harmonic sum h(n) = 1 + 1/2 + ... + 1/n.
double harmonic(std::int64_t n);

// Upper quantile of the chi-square distribution (Wilson-Hilferty).
double chi_square_quantile(double p, double dof);

// log(binomial(n, k))
double log_choose(std::int64_t n, std::int64_t k);

// Exact Pr[Bin(n,p) >= m] and Pr[Bin(n,p) <= m], accumulated in log space.
double binomial_upper_tail(std::int64_t n, double p, std::int64_t m);
double binomial_lower_tail(std::int64_t n, double p, std::int64_t m);

}  // namespace frogsim

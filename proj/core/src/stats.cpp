#include "frogsim/stats.hpp"

#include <algorithm>
#include <cmath>

namespace frogsim {

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

double sample_stddev(std::span<const double> xs) { return std::sqrt(sample_variance(xs)); }

double quantile(std::span<const double> xs, double q) {
  if (xs.empty()) return 0.0;
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

double median(std::span<const double> xs) { return quantile(xs, 0.5); }

Interval mean_ci(std::span<const double> xs, double z) {
  const double m = mean(xs);
  if (xs.size() < 2) return {m, m};
  const double se = sample_stddev(xs) / std::sqrt(static_cast<double>(xs.size()));
  return {m - z * se, m + z * se};
}

Interval bootstrap_mean_ci(std::span<const double> xs, StreamKey key, int resamples,
                           double level) {
  if (xs.empty()) return {0.0, 0.0};
  if (xs.size() == 1) return {xs[0], xs[0]};
  const auto n = static_cast<std::uint32_t>(xs.size());
  std::vector<double> means;
  means.reserve(static_cast<std::size_t>(resamples));
  for (int r = 0; r < resamples; ++r) {
    U32Stream s(key, static_cast<std::uint64_t>(r));
    double acc = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) acc += xs[s.below(n)];
    means.push_back(acc / n);
  }
  const double alpha = (1.0 - level) / 2.0;
  return {quantile(means, alpha), quantile(means, 1.0 - alpha)};
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  LinearFit f;
  const auto n = static_cast<double>(x.size());
  if (x.size() != y.size() || x.size() < 2) return f;
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
  (void)n;
  return f;
}

double harmonic(std::int64_t n) {
  double h = 0.0;
  for (std::int64_t i = 1; i <= n; ++i) h += 1.0 / static_cast<double>(i);
  return h;
}

double chi_square_quantile(double p, double dof) {
  // Wilson-Hilferty cube approximation with a rational normal quantile.
  // Acklam's inverse-normal approximation, |error| < 1.2e-9.
  auto inv_norm = [](double q) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (q < plow) {
      const double u = std::sqrt(-2.0 * std::log(q));
      return (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
             ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
    }
    if (q > 1.0 - plow) {
      const double u = std::sqrt(-2.0 * std::log(1.0 - q));
      return -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
             ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
    }
    const double u = q - 0.5;
    const double t = u * u;
    return (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) * u /
           (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1.0);
  };
  const double z = inv_norm(p);
  const double k = 2.0 / (9.0 * dof);
  const double cube = 1.0 - k + z * std::sqrt(k);
  return dof * cube * cube * cube;
}

double log_choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

namespace {

// log-sum-exp accumulation of binomial pmf terms over [lo, hi].
double binomial_mass_log(std::int64_t n, double p, std::int64_t lo, std::int64_t hi) {
  if (lo > hi) return -std::numeric_limits<double>::infinity();
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t j = lo; j <= hi; ++j) {
    const double t = log_choose(n, j) + static_cast<double>(j) * lp +
                     static_cast<double>(n - j) * lq;
    terms.push_back(t);
    max_term = std::max(max_term, t);
  }
  if (!std::isfinite(max_term)) return max_term;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - max_term);
  return max_term + std::log(acc);
}

}  // namespace

double binomial_upper_tail(std::int64_t n, double p, std::int64_t m) {
  if (m <= 0) return 1.0;
  if (m > n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  return std::exp(binomial_mass_log(n, p, m, n));
}

double binomial_lower_tail(std::int64_t n, double p, std::int64_t m) {
  if (m < 0) return 0.0;
  if (m >= n) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  return std::exp(binomial_mass_log(n, p, 0, m));
}

}  // namespace frogsim

#ifndef HPLAB_STATS_HPP
#define HPLAB_STATS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "hplab/core.hpp"

namespace hplab::stats {

struct TestResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
  bool passes(double level) const { return p_value >= level; }
};

inline double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

inline double students_t_quantile(double p, double dof) {
  return boost::math::quantile(boost::math::students_t_distribution<double>(dof), p);
}

inline double chi_square_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(dof), x));
}

/// Kolmogorov distribution tail P(sup|B| > lambda).
inline double kolmogorov_sf(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

/// Pearson goodness of fit of bin counts against bin probabilities.
inline TestResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& probs) {
  require(observed.size() == probs.size() && observed.size() >= 2, "chi_square_gof: size mismatch");
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  const double psum = std::accumulate(probs.begin(), probs.end(), 0.0);
  TestResult r;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = total * probs[i] / psum;
    require(e > 0.0, "chi_square_gof: empty expected bin");
    r.statistic += (observed[i] - e) * (observed[i] - e) / e;
  }
  r.dof = static_cast<double>(observed.size() - 1);
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

/// Chi-square test of homogeneity for two histograms over the same bins.
/// Bins empty in both samples are skipped.
inline TestResult chi_square_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() == b.size() && a.size() >= 2, "chi_square_two_sample: size mismatch");
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  require(na > 0.0 && nb > 0.0, "chi_square_two_sample: empty sample");
  const double ka = std::sqrt(nb / na);
  const double kb = std::sqrt(na / nb);
  TestResult r;
  int used = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] + b[i] == 0.0) continue;
    const double d = ka * a[i] - kb * b[i];
    r.statistic += d * d / (a[i] + b[i]);
    ++used;
  }
  r.dof = used - 1;
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

/// One-sample Kolmogorov-Smirnov against a continuous CDF.
inline TestResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
  require(!xs.empty(), "ks_one_sample: empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double sn = std::sqrt(n);
  TestResult r;
  r.statistic = d;
  r.p_value = kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
  return r;
}

inline TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), "ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  TestResult r;
  r.statistic = d;
  r.p_value = kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
  int batches = 0;
};

/// Mean with a batch-means standard error: robust to serial correlation in
/// Markov chain output, consistent for independent draws.
inline MeanEstimate batch_means(const std::vector<double>& xs, int batches) {
  require(!xs.empty(), "batch_means: empty sample");
  const std::size_t n = xs.size();
  const auto b = static_cast<std::size_t>(std::clamp<long>(batches, 2, static_cast<long>(n)));
  MeanEstimate out;
  out.batches = static_cast<int>(b);
  std::vector<double> means(b, 0.0);
  for (std::size_t k = 0; k < b; ++k) {
    const std::size_t lo = n * k / b, hi = n * (k + 1) / b;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += xs[i];
    means[k] = s / static_cast<double>(hi - lo);
  }
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double m : means) ss += (m - out.mean) * (m - out.mean);
  out.se = std::sqrt(ss / static_cast<double>(b - 1) / static_cast<double>(b));
  return out;
}

/// Sample mean and its naive standard error sqrt(var / n).
inline MeanEstimate mean_and_se(const std::vector<double>& xs) {
  require(xs.size() >= 2, "mean_and_se: need at least two values");
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n), static_cast<int>(xs.size())};
}

/// Index of the equal-width bin of [lo, hi) containing x (clamped).
inline std::size_t bin_index(double x, double lo, double hi, std::size_t bins) {
  const double u = (x - lo) / (hi - lo);
  const auto i = static_cast<long>(std::floor(u * static_cast<double>(bins)));
  return static_cast<std::size_t>(std::clamp<long>(i, 0, static_cast<long>(bins) - 1));
}

}  // namespace hplab::stats

#endif  // HPLAB_STATS_HPP

#ifndef HPLAB_QUADRATURE_HPP
#define HPLAB_QUADRATURE_HPP

#include <cmath>
#include <vector>

#include "hplab/core.hpp"

namespace hplab {

/// Quadrature rule on the reference interval (-1, 1). `lo_gap[i]` and
/// `hi_gap[i]` hold 1 + x[i] and 1 - x[i] computed without cancellation, so
/// integrands with endpoint singularities can be evaluated accurately.
struct QuadratureRule {
  std::vector<double> x;
  std::vector<double> w;
  std::vector<double> lo_gap;
  std::vector<double> hi_gap;

  std::size_t size() const { return x.size(); }

  /// Node i mapped to [a, b], measured from the nearer endpoint.
  double node(std::size_t i, double a, double b) const {
    return x[i] <= 0.0 ? a + 0.5 * (b - a) * lo_gap[i] : b - 0.5 * (b - a) * hi_gap[i];
  }

  template <class F>
  auto integrate(F&& f, double a, double b) const {
    using R = decltype(f(a));
    R acc{};
    for (std::size_t i = 0; i < size(); ++i) acc += w[i] * f(node(i, a, b));
    return acc * (0.5 * (b - a));
  }
};

/// n-point Gauss-Legendre rule (Newton iteration on the Legendre recurrence).
inline QuadratureRule gauss_legendre(int n) {
  require(n >= 1, "gauss_legendre: n must be >= 1");
  QuadratureRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
    }
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = wi;
    r.w[n - 1 - i] = wi;
  }
  r.lo_gap.resize(n);
  r.hi_gap.resize(n);
  for (int i = 0; i < n; ++i) {
    r.lo_gap[i] = 1.0 + r.x[i];
    r.hi_gap[i] = 1.0 - r.x[i];
  }
  return r;
}

/// Tanh-sinh (double exponential) rule with n nodes spread over t in
/// [-5, 5]. Converges exponentially for integrands analytic inside the
/// interval, including algebraic endpoint singularities.
inline QuadratureRule tanh_sinh(int n) {
  require(n >= 3, "tanh_sinh: n must be >= 3");
  constexpr double t_max = 5.0;
  const double h = 2.0 * t_max / (n - 1);
  QuadratureRule r;
  for (int k = 0; k < n; ++k) {
    const double t = -t_max + k * h;
    const double u = 0.5 * kPi * std::sinh(t);
    const double ch = std::cosh(u);
    const double wk = h * 0.5 * kPi * std::cosh(t) / (ch * ch);
    const double lo = 2.0 / (1.0 + std::exp(-2.0 * u));
    const double hi = 2.0 / (1.0 + std::exp(2.0 * u));
    if (wk == 0.0 || lo == 0.0 || hi == 0.0) continue;
    r.x.push_back(std::tanh(u));
    r.w.push_back(wk);
    r.lo_gap.push_back(lo);
    r.hi_gap.push_back(hi);
  }
  return r;
}

}  // namespace hplab

#endif  // HPLAB_QUADRATURE_HPP

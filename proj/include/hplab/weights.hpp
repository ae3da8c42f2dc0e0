#ifndef HPLAB_WEIGHTS_HPP
#define HPLAB_WEIGHTS_HPP

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "hplab/core.hpp"
#include "hplab/quadrature.hpp"

namespace hplab {

enum class WeightKind { hp, bergman };

/// Density of a reference measure on the unit disc w.r.t. Lebesgue measure.
///   hp:      |(1-z)^delta|^2 (1-|z|^2)^{m-1}     (unnormalized)
///   bergman: (m/pi) (1-|z|^2)^{m-1}              (probability measure)
struct WeightSpec {
  WeightKind kind = WeightKind::hp;
  int m = 1;
  Complex delta{0.0, 0.0};  // ignored for bergman
};

/// |(1-z)^delta|^2 with the principal branch, for Re(1-z) >= 0.
inline double hp_gauge_factor(Complex z, Complex delta) {
  const Complex d = Complex{1.0, 0.0} - z;
  return std::pow(std::abs(d), 2.0 * delta.real()) * std::exp(-2.0 * delta.imag() * std::arg(d));
}

inline double weight_eval(const WeightSpec& spec, Complex z) {
  require(spec.m >= 1, "weight_eval: m must be >= 1");
  require(std::abs(z) < 1.0, "weight_eval: z must lie in the open unit disc");
  const double radial = std::pow(1.0 - std::norm(z), spec.m - 1);
  if (spec.kind == WeightKind::bergman) return spec.m / kPi * radial;
  return hp_gauge_factor(z, spec.delta) * radial;
}

/// The hp weight written in polar coordinates about the boundary point 1,
/// z = 1 - rho e^{i phi} with |phi| < pi/2 and 0 < rho < 2 cos(phi):
///   rho^{2 Re delta} e^{-2 Im delta phi} (rho (2 cos phi - rho))^{m-1}.
/// Accurate arbitrarily close to z = 1, where the Cartesian form cancels.
inline double hp_weight_shifted_polar(double rho, double phi, int m, Complex delta) {
  return std::pow(rho, 2.0 * delta.real()) * std::exp(-2.0 * delta.imag() * phi) *
         std::pow(rho * (2.0 * std::cos(phi) - rho), m - 1);
}

/// Integral over the unit disc of |z|^{2p} (1-|z|^2)^{m-1} dsigma
/// = pi p! (m-1)! / (p+m)!.
inline double radial_monomial_integral(int p, int m) {
  require(p >= 0 && m >= 1, "radial_monomial_integral: need p >= 0, m >= 1");
  return kPi * std::exp(std::lgamma(p + 1.0) + std::lgamma(static_cast<double>(m)) -
                        std::lgamma(p + m + 1.0));
}

inline std::string format_bound(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

/// The series did not reach its tolerance. Carries the best estimate.
class SeriesNotConverged : public NumericalError {
 public:
  SeriesNotConverged(Complex partial, double bound)
      : NumericalError("moment_series: tolerance not reached (achieved bound " + format_bound(bound) +
                       ")"),
        partial_sum(partial),
        achieved_bound(bound) {}
  Complex partial_sum;
  double achieved_bound;
};

struct MomentSeriesResult {
  Complex value;
  double error_bound = 0.0;
  long terms = 0;
  bool extrapolated = false;
};

/// Moment c_{j,k} = int_D z^j conj(z)^k |(1-z)^delta|^2 (1-|z|^2)^{m-1} dsigma.
///
/// Expanding (1-z)^delta binomially, only the diagonal monomials survive the
/// angular integration:
///   c_{j,k} = pi (m-1)! sum_{t >= max(j,k)} b(t-j) conj-b(t-k) t!/(t+m)!,
/// b(a) = (-1)^a C(delta, a). Terms decay like t^{-s}, s = 2 Re(delta) + 2 + m.
///
/// The sum is cut once the tail estimate 2 |T_t| t / (s-1) drops below tol.
/// When that would take more than `direct_terms` terms (Re(delta) near -1/2,
/// small m), the partial sums at t0 + b * 2^l, b = 256 + 16 t0, are extrapolated with
/// Richardson steps for the known error exponents 1-s, -s, -s-1, ...; the
/// error bound is then the larger of the spread between the last two
/// extrapolants and the rounding level 4 eps sum|T_t|. In that regime tol is
/// relative to max(1, sum|T_t|), since absolute accuracy below one ulp of the
/// terms is not representable.
inline MomentSeriesResult moment_series_detailed(int j, int k, int m, Complex delta, double tol,
                                                 long direct_terms = 2048) {
  require(j >= 0 && k >= 0 && m >= 1, "moment_series: need j, k >= 0 and m >= 1");
  require(delta.real() > -0.5, "Re(delta) must exceed -1/2");
  require(tol > 0.0, "moment_series: tol must be positive");

  const Complex dconj = std::conj(delta);
  const int t0 = std::max(j, k);
  const double s = 2.0 * delta.real() + 2.0 + m;

  // Term at t0: b_delta(t0-j) * b_conj(t0-k) * t0!/(t0+m)! * pi (m-1)!.
  auto signed_binomial = [](Complex d, int a) {
    Complex g{1.0, 0.0};
    for (int i = 0; i < a; ++i) g *= (static_cast<double>(i) - d) / static_cast<double>(i + 1);
    return g;
  };
  Complex bj = signed_binomial(delta, t0 - j);
  Complex bk = signed_binomial(dconj, t0 - k);
  double fac = std::exp(std::lgamma(t0 + 1.0) - std::lgamma(t0 + m + 1.0) +
                        std::lgamma(static_cast<double>(m))) * kPi;

  // A binomial series in delta terminates when delta is a non-negative integer.
  const bool terminating = delta.imag() == 0.0 && delta.real() >= 0.0 &&
                           delta.real() == std::floor(delta.real());
  const long warmup = 2 * static_cast<long>(std::abs(delta) + 1.0) + 8;

  // Partial sums S_N at N = t0 + base * 2^l feed the extrapolation. The base
  // grows with t0 so the asymptotic regime is reached for high degrees too.
  constexpr int levels = 7;
  const long base = 256 + 16L * t0;
  std::vector<Complex> table;
  long checkpoint = t0 + base;

  MomentSeriesResult res;
  Complex sum{0.0, 0.0};
  long t = t0;
  Complex carry{0.0, 0.0};  // Neumaier compensation
  double abs_sum = 0.0;
  auto advance = [&] {
    const Complex term = bj * bk * fac;
    abs_sum += std::abs(term);
    const Complex next_sum = sum + term;
    const double cr = std::abs(sum.real()) >= std::abs(term.real())
                          ? (sum.real() - next_sum.real()) + term.real()
                          : (term.real() - next_sum.real()) + sum.real();
    const double ci = std::abs(sum.imag()) >= std::abs(term.imag())
                          ? (sum.imag() - next_sum.imag()) + term.imag()
                          : (term.imag() - next_sum.imag()) + sum.imag();
    carry += Complex{cr, ci};
    sum = next_sum;
    const double a_j = static_cast<double>(t - j);
    const double a_k = static_cast<double>(t - k);
    bj *= (a_j - delta) / (a_j + 1.0);
    bk *= (a_k - dconj) / (a_k + 1.0);
    fac *= (t + 1.0) / (t + 1.0 + m);
    ++t;
    if (t == checkpoint && static_cast<int>(table.size()) < levels) {
      table.push_back(sum + carry);
      checkpoint = t0 + (base << table.size());
    }
  };

  const long limit = t0 + direct_terms;
  while (t < limit) {
    advance();
    const Complex next = bj * bk * fac;
    if (terminating && next == Complex{0.0, 0.0} && t - t0 > static_cast<long>(delta.real()) + 1) {
      res.value = sum + carry;
      res.error_bound = 0.0;
      res.terms = t - t0;
      return res;
    }
    if (t - t0 >= warmup) {
      const double tail = 2.0 * std::abs(next) * static_cast<double>(t) / (s - 1.0);
      if (tail < tol) {
        res.value = sum + carry;
        res.error_bound = tail;
        res.terms = t - t0;
        return res;
      }
    }
  }

  // Richardson on the recorded partial sums.
  while (static_cast<int>(table.size()) < levels) advance();
  Complex prev_best = table.back();
  for (int i = 0; i + 1 < levels; ++i) {
    const double f = std::pow(2.0, s - 1.0 + i);
    std::vector<Complex> next(table.size() - 1);
    for (std::size_t l = 0; l + 1 < table.size(); ++l)
      next[l] = (f * table[l + 1] - table[l]) / (f - 1.0);
    prev_best = table.back();
    table = std::move(next);
  }
  res.value = table.front();
  // The spread between the top two orders cannot resolve below the rounding
  // level of the summation.
  const double rounding = 4.0 * std::numeric_limits<double>::epsilon() * abs_sum;
  res.error_bound = std::max(std::abs(res.value - prev_best), rounding);
  res.terms = t - t0;
  res.extrapolated = true;
  if (res.error_bound > tol * std::max(1.0, abs_sum)) throw SeriesNotConverged(res.value, res.error_bound);
  return res;
}

inline Complex moment_series(int j, int k, int m, Complex delta, double tol = 1e-14) {
  return moment_series_detailed(j, k, m, delta, tol).value;
}

/// Independent quadrature of c_{j,k}, used only to cross-check the series.
///
/// Polar coordinates centred at the boundary point z = 1 (where the weight
/// is singular for Re(delta) < 0): z = 1 - rho e^{i phi}, rho = 2 cos(phi) u,
/// u in (0,1), |phi| < pi/2. Both directions use tanh-sinh nodes, which
/// absorb the algebraic endpoint singularities of the integrand.
inline Complex moment_quadrature(int j, int k, int m, Complex delta, int radial_nodes = 256,
                                 int angular_nodes = 512) {
  require(j >= 0 && k >= 0 && m >= 1, "moment_quadrature: need j, k >= 0 and m >= 1");
  require(radial_nodes >= 64 && angular_nodes >= 64, "moment_quadrature: node counts must be >= 64");
  const QuadratureRule ru = tanh_sinh(radial_nodes);
  const QuadratureRule rp = tanh_sinh(angular_nodes);

  auto inner = [&](double phi) {
    const double c = 2.0 * std::cos(phi);
    const Complex e = std::polar(1.0, phi);
    return ru.integrate(
        [&](double u) {
          const double rho = c * u;
          const Complex z = Complex{1.0, 0.0} - rho * e;
          Complex mono{1.0, 0.0};
          for (int a = 0; a < j; ++a) mono *= z;
          for (int b = 0; b < k; ++b) mono *= std::conj(z);
          // dsigma = rho drho dphi = c^2 u du dphi
          return mono * (hp_weight_shifted_polar(rho, phi, m, delta) * c * c * u);
        },
        0.0, 1.0);
  };
  return rp.integrate(inner, -0.5 * kPi, 0.5 * kPi);
}

/// Hermitian positive-definite moment matrix G_{jk} = c_{j,k}, 0 <= j,k < n.
struct GramMatrix {
  int n = 0;
  int m = 1;
  Complex delta{0.0, 0.0};
  ComplexMatrix entries;
};

inline constexpr int kGramCap = 48;

inline GramMatrix gram_matrix(int n, int m, Complex delta, int cap = kGramCap, double tol = 1e-14) {
  require(n >= 1 && m >= 1, "gram_matrix: need n, m >= 1");
  require(delta.real() > -0.5, "Re(delta) must exceed -1/2");
  require(n <= cap, "gram_matrix: n exceeds the configured cap");
  GramMatrix g{n, m, delta, ComplexMatrix(n, n)};
  for (int j = 0; j < n; ++j) {
    g.entries(j, j) = Complex{moment_series(j, j, m, delta, tol).real(), 0.0};
    for (int k = j + 1; k < n; ++k) {
      const Complex c = moment_series(j, k, m, delta, tol);
      g.entries(j, k) = c;
      g.entries(k, j) = std::conj(c);
    }
  }
  Eigen::LLT<ComplexMatrix> llt(g.entries);
  if (llt.info() != Eigen::Success)
    throw NumericalError("gram_matrix: Cholesky failed (n=" + std::to_string(n) +
                         ", reciprocal condition estimate " + std::to_string(llt.rcond()) + ")");
  return g;
}

}  // namespace hplab

#endif  // HPLAB_WEIGHTS_HPP

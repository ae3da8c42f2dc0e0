#ifndef HPLAB_DPP_HPP
#define HPLAB_DPP_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "hplab/core.hpp"
#include "hplab/linalg.hpp"
#include "hplab/orthopoly.hpp"
#include "hplab/parallel.hpp"
#include "hplab/quadrature.hpp"
#include "hplab/rng.hpp"
#include "hplab/stats.hpp"
#include "hplab/weights.hpp"

namespace hplab {

// ---------------------------------------------------------------------------
// Cells

/// Annular sector {r_lo <= |z| < r_hi, th_lo <= arg z < th_hi}, angles in
/// [-pi, pi).
struct Cell {
  double r_lo = 0.0, r_hi = 1.0;
  double th_lo = -kPi, th_hi = kPi;
};

/// Disjoint annular sectors covering {|z| <= r_max}.
struct CellPartition {
  std::vector<Cell> cells;
  double r_max = 1.0;

  std::size_t size() const { return cells.size(); }

  /// Index of the cell containing z, or -1 when |z| > r_max.
  long locate(Complex z) const {
    const double r = std::abs(z);
    if (r > r_max) return -1;
    double th = std::arg(z);
    if (th >= kPi) th = -kPi;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const Cell& c = cells[i];
      const bool in_r = r >= c.r_lo && (r < c.r_hi || (c.r_hi == r_max && r <= r_max));
      if (in_r && th >= c.th_lo && th < c.th_hi) return static_cast<long>(i);
    }
    return -1;
  }

  std::vector<double> counts(const PointConfiguration& cfg) const {
    std::vector<double> out(cells.size(), 0.0);
    for (const auto& z : cfg.points) {
      const long i = locate(z);
      if (i >= 0) out[static_cast<std::size_t>(i)] += 1.0;
    }
    return out;
  }
};

struct CellNode {
  Complex z;
  double weight;  // quadrature weight times the polar Jacobian r
};

/// Product tanh-sinh nodes for an annular sector. The angular range is split
/// at 0 so that the boundary point z = 1 only ever sits at a corner.
inline std::vector<CellNode> cell_nodes(const Cell& c, const QuadratureRule& rule) {
  std::vector<CellNode> out;
  auto piece = [&](double a, double b) {
    const double ja = 0.5 * (b - a), jr = 0.5 * (c.r_hi - c.r_lo);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const Complex e = std::polar(1.0, rule.node(i, a, b));
      for (std::size_t k = 0; k < rule.size(); ++k) {
        const double r = rule.node(k, c.r_lo, c.r_hi);
        out.push_back(CellNode{r * e, rule.w[i] * ja * rule.w[k] * jr * r});
      }
    }
  };
  if (c.th_lo < 0.0 && c.th_hi > 0.0) {
    piece(c.th_lo, 0.0);
    piece(0.0, c.th_hi);
  } else {
    piece(c.th_lo, c.th_hi);
  }
  return out;
}

/// Integral of a scalar function over a cell.
template <class F>
double integrate_cell(F&& f, const Cell& c, int nodes = 161) {
  const QuadratureRule rule = tanh_sinh(nodes);
  double acc = 0.0;
  for (const auto& nd : cell_nodes(c, rule)) acc += nd.weight * f(nd.z);
  return acc;
}

/// rings x sectors partition of {|z| <= r_max} with (approximately) equal
/// mass of `density` per cell: ring radii split the radial mass evenly, then
/// each ring is cut into sectors of equal angular mass.
inline CellPartition equal_mass_partition(const std::function<double(Complex)>& density, double r_max,
                                          int rings, int sectors) {
  require(r_max > 0.0 && r_max <= 1.0, "equal_mass_partition: r_max must lie in (0, 1]");
  require(rings >= 1 && sectors >= 1, "equal_mass_partition: need rings, sectors >= 1");
  constexpr int fine = 400;
  const QuadratureRule gl = gauss_legendre(24);

  auto sector_mass = [&](double a, double b, double t0, double t1) {
    return gl.integrate(
        [&](double th) {
          const Complex e = std::polar(1.0, th);
          return gl.integrate([&](double r) { return density(r * e) * r; }, a, b);
        },
        t0, t1);
  };
  auto annulus_mass = [&](double a, double b) {
    double acc = 0.0;
    for (int q = 0; q < 16; ++q) acc += sector_mass(a, b, -kPi + kPi * q / 8, -kPi + kPi * (q + 1) / 8);
    return acc;
  };
  // Cumulative radial mass on a fine grid, then linear inversion.
  std::vector<double> rs(fine + 1), cum(fine + 1, 0.0);
  for (int i = 0; i <= fine; ++i) rs[i] = r_max * i / fine;
  for (int i = 0; i < fine; ++i) cum[i + 1] = cum[i] + annulus_mass(rs[i], rs[i + 1]);
  auto invert = [](const std::vector<double>& xs, const std::vector<double>& cs, double target) {
    const auto it = std::lower_bound(cs.begin(), cs.end(), target);
    if (it == cs.begin()) return xs.front();
    if (it == cs.end()) return xs.back();
    const std::size_t i = static_cast<std::size_t>(it - cs.begin());
    const double t = (target - cs[i - 1]) / std::max(cs[i] - cs[i - 1], 1e-300);
    return xs[i - 1] + t * (xs[i] - xs[i - 1]);
  };
  std::vector<double> radii{0.0};
  for (int k = 1; k < rings; ++k) radii.push_back(invert(rs, cum, cum.back() * k / rings));
  radii.push_back(r_max);

  CellPartition p;
  p.r_max = r_max;
  for (int k = 0; k < rings; ++k) {
    const double a = radii[k], b = radii[k + 1];
    std::vector<double> ths(fine + 1), acum(fine + 1, 0.0);
    for (int i = 0; i <= fine; ++i) ths[i] = -kPi + 2.0 * kPi * i / fine;
    for (int i = 0; i < fine; ++i) {
      const double t0 = ths[i], t1 = ths[i + 1];
      acum[i + 1] = acum[i] + sector_mass(a, b, t0, t1);
    }
    std::vector<double> cuts{-kPi};
    for (int s = 1; s < sectors; ++s) cuts.push_back(invert(ths, acum, acum.back() * s / sectors));
    cuts.push_back(kPi);
    for (int s = 0; s < sectors; ++s) p.cells.push_back(Cell{a, b, cuts[s], cuts[s + 1]});
  }
  return p;
}

/// Equal-width rings x sectors partition (used where masses are irrelevant).
inline CellPartition uniform_partition(double r_max, int rings, int sectors) {
  require(r_max > 0.0 && r_max <= 1.0 && rings >= 1 && sectors >= 1, "uniform_partition: bad arguments");
  CellPartition p;
  p.r_max = r_max;
  for (int k = 0; k < rings; ++k)
    for (int s = 0; s < sectors; ++s)
      p.cells.push_back(Cell{r_max * k / rings, r_max * (k + 1) / rings, -kPi + 2.0 * kPi * s / sectors,
                             -kPi + 2.0 * kPi * (s + 1) / sectors});
  return p;
}

// ---------------------------------------------------------------------------
// Intensities

/// Per-cell matrices M_{kl} = int_cell P_k conj(P_l) w dsigma. The expected
/// count in a cell is tr M and, for disjoint cells A and B,
///   E[N_A N_B] = tr M_A tr M_B - tr(M_A M_B),
/// which is int_A int_B (K(z,z) K(w,w) - |K(z,w)|^2) w(z) w(w).
inline std::vector<ComplexMatrix> cell_moment_matrices(const PolynomialBasis& basis, const CellPartition& cells,
                                                       int nodes = 161) {
  const WeightSpec weight{WeightKind::hp, basis.params.m, basis.params.delta};
  const QuadratureRule rule = tanh_sinh(nodes);
  std::vector<ComplexMatrix> out;
  out.reserve(cells.size());
  for (const Cell& c : cells.cells) {
    require(c.r_hi <= 1.0, "cell_moment_matrices: cells must lie in the unit disc");
    const auto pts = cell_nodes(c, rule);
    ComplexMatrix v(basis.n, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto col = static_cast<Eigen::Index>(i);
      const double r = std::abs(pts[i].z);
      if (r >= 1.0) {
        v.col(col).setZero();
        continue;
      }
      v.col(col) = basis.evaluate(pts[i].z) * std::sqrt(pts[i].weight * weight_eval(weight, pts[i].z));
    }
    out.push_back(v * v.adjoint());
  }
  return out;
}

/// E[number of points in each cell] = int_cell K_n(z,z) w(z) dsigma.
inline std::vector<double> expected_cell_counts(const KernelSpec& spec, const CellPartition& cells) {
  require(spec.kind == KernelKind::finite && spec.basis, "expected_cell_counts: needs a finite kernel");
  const auto mats = cell_moment_matrices(*spec.basis, cells);
  std::vector<double> out;
  out.reserve(mats.size());
  for (const auto& mat : mats) out.push_back(std::max(0.0, mat.trace().real()));
  return out;
}

struct CellStatistic {
  std::size_t a = 0, b = 0;  // b == a for first-order statistics
  double expected = 0.0;
  double mean = 0.0;
  double se = 0.0;
  double z = 0.0;
};

/// Empirical first and second factorial moments of cell counts against the
/// kernel's predictions.
struct CorrelationReport {
  std::size_t samples = 0;
  double level = 1e-3;
  double threshold = 0.0;  // Bonferroni-corrected two-sided critical value
  std::vector<CellStatistic> first;
  std::vector<CellStatistic> second;
  double expected_total = 0.0;
  double max_abs_z = 0.0;
  bool pass = true;
};

inline constexpr std::size_t kMinVerificationSamples = 1000;

/// Compares empirical means of N_A (every cell) and N_A N_B (every pair of
/// distinct cells) with the kernel integrals. Standard errors are batch
/// means over `batches` contiguous blocks, so serially correlated MH output
/// is handled; the critical value is the Student-t quantile with
/// batches - 1 degrees of freedom at level / (2 * number of tests).
///
/// Each statistic is a non-negative integer per sample, so its variance is at
/// least mu - mu^2 for the predicted mean mu. The standard error is floored at
/// sqrt((mu - mu^2) / samples): for rare pair events a batch estimate that
/// happens to see few events also sees little spread, which biases |z| up.
inline CorrelationReport verify_intensities(const std::vector<PointConfiguration>& configs, const KernelSpec& spec,
                                            const CellPartition& cells, double level, int batches = 100) {
  require(spec.kind == KernelKind::finite && spec.basis, "verify_intensities: needs a finite kernel");
  if (configs.size() < kMinVerificationSamples)
    throw PreconditionError("verify_intensities: too few samples (" + std::to_string(configs.size()) +
                            " < " + std::to_string(kMinVerificationSamples) + ")");
  require(level > 0.0 && level < 1.0, "verify_intensities: level must lie in (0, 1)");

  const auto mats = cell_moment_matrices(*spec.basis, cells);
  const std::size_t nc = cells.size();
  const std::size_t ns = configs.size();
  std::vector<std::vector<double>> counts(nc, std::vector<double>(ns, 0.0));
  for (std::size_t s = 0; s < ns; ++s) {
    const auto c = cells.counts(configs[s]);
    for (std::size_t i = 0; i < nc; ++i) counts[i][s] = c[i];
  }

  CorrelationReport rep;
  rep.samples = ns;
  rep.level = level;
  const std::size_t tests = nc + nc * (nc - 1) / 2;
  const int b = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(batches), ns / 10));
  rep.threshold = stats::students_t_quantile(1.0 - level / (2.0 * static_cast<double>(tests)), b - 1);
  const double se_floor = 1.0 / static_cast<double>(ns);

  auto finish = [&](CellStatistic& st, const std::vector<double>& xs) {
    const auto est = stats::batch_means(xs, b);
    st.mean = est.mean;
    const double integer_var = std::max(0.0, st.expected - st.expected * st.expected);
    st.se = std::max({est.se, se_floor, std::sqrt(integer_var / static_cast<double>(ns))});
    st.z = (st.mean - st.expected) / st.se;
    rep.max_abs_z = std::max(rep.max_abs_z, std::abs(st.z));
    if (!(std::abs(st.z) <= rep.threshold)) rep.pass = false;
  };

  for (std::size_t i = 0; i < nc; ++i) {
    CellStatistic st;
    st.a = st.b = i;
    st.expected = std::max(0.0, mats[i].trace().real());
    rep.expected_total += st.expected;
    finish(st, counts[i]);
    rep.first.push_back(st);
  }
  std::vector<double> prod(ns);
  for (std::size_t i = 0; i < nc; ++i)
    for (std::size_t j = i + 1; j < nc; ++j) {
      CellStatistic st;
      st.a = i;
      st.b = j;
      st.expected = std::max(
          0.0, (mats[i].trace() * mats[j].trace() - (mats[i] * mats[j]).trace()).real());
      for (std::size_t s = 0; s < ns; ++s) prod[s] = counts[i][s] * counts[j][s];
      finish(st, prod);
      rep.second.push_back(st);
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Projection DPP sampler

/// Exact draw from the normalized reference measure.
///
/// hp weight: with z = 1 - rho e^{i phi}, rho = 2 cos(phi) s, the measure
/// factorizes as s^{2 Re d + m} (1-s)^{m-1} ds times
/// cos(phi)^{2 Re d + 2m} e^{-2 Im d phi} dphi, so s is Beta(2 Re d + m + 1, m)
/// and phi is drawn by rejection from the uniform law on (-pi/2, pi/2).
/// bergman weight: |z|^2 is Beta(1, m), arg z uniform.
inline Complex sample_reference_point(const WeightSpec& w, RngStream& rng) {
  if (w.kind == WeightKind::bergman) {
    const double r2 = rng.beta(1.0, w.m);
    return std::polar(std::sqrt(r2), -kPi + 2.0 * kPi * rng.uniform());
  }
  const double p = 2.0 * w.delta.real() + 2.0 * w.m;
  const double c = -2.0 * w.delta.imag();
  const double peak = std::atan(c / p);
  const double log_max = p * std::log(std::cos(peak)) + c * peak;
  for (;;) {
    const double phi = -0.5 * kPi + kPi * rng.uniform();
    const double cphi = std::cos(phi);
    if (cphi <= 0.0) continue;
    if (std::log(rng.uniform()) < p * std::log(cphi) + c * phi - log_max) {
      const double s = rng.beta(2.0 * w.delta.real() + w.m + 1.0, w.m);
      const Complex z = Complex{1.0, 0.0} - (2.0 * cphi * s) * std::polar(1.0, phi);
      if (std::abs(z) < 1.0) return z;
    }
  }
}

/// Upper bound for K_n(z,z) on the closed disc: 1.5 x the maximum over a
/// polar grid (K_n(z,z) is subharmonic, so its maximum sits on |z| = 1).
inline double kernel_diagonal_envelope(const PolynomialBasis& basis, int radial = 64, int angular = 128,
                                       double safety = 1.5) {
  double mx = 0.0;
  for (int i = 1; i <= radial; ++i) {
    const double r = static_cast<double>(i) / radial;
    for (int j = 0; j < angular; ++j)
      mx = std::max(mx, basis.evaluate(std::polar(r, 2.0 * kPi * j / angular)).squaredNorm());
  }
  mx = std::max(mx, basis.evaluate(0.0).squaredNorm());
  return safety * mx;
}

/// One sample of the projection DPP with kernel K_n = sum P_k conj(P_k)
/// w.r.t. the hp reference measure: exactly n points.
///
/// Points are drawn one at a time. With e_1..e_{i-1} an orthonormal basis of
/// span{v(x_1), ..., v(x_{i-1})}, v(z) = (P_0(z), ..., P_{n-1}(z)), the next
/// point has density proportional to (|v(z)|^2 - sum_j |<v(z), e_j>|^2) w(z).
/// Proposals come from the normalized reference measure and are accepted
/// with probability (|v|^2 - sum |<v, e_j>|^2) / envelope. A proposal whose
/// |v|^2 exceeds the envelope triggers one rebuild on a finer grid and a
/// restart; a second violation throws.
inline PointConfiguration sample_projection_dpp(const PolynomialBasis& basis, RngStream& rng) {
  const WeightSpec weight{WeightKind::hp, basis.params.m, basis.params.delta};
  const int n = basis.n;
  double envelope = kernel_diagonal_envelope(basis);
  for (int attempt = 0; attempt < 2; ++attempt) {
    PointConfiguration out;
    std::vector<ComplexVector> frame;
    bool violated = false;
    for (int i = 0; i < n && !violated; ++i) {
      for (;;) {
        const Complex z = sample_reference_point(weight, rng);
        const ComplexVector v = basis.evaluate(z);
        const double full = v.squaredNorm();
        if (full > envelope) {
          violated = true;
          break;
        }
        double resid = full;
        for (const auto& e : frame) resid -= std::norm(e.dot(v));
        if (rng.uniform() * envelope < resid) {
          out.points.push_back(z);
          ComplexVector u = v;
          for (const auto& e : frame) u -= e * e.dot(u);
          frame.push_back(u / u.norm());
          break;
        }
      }
    }
    if (!violated) return out;
    envelope = kernel_diagonal_envelope(basis, 128, 256, 2.0);
  }
  throw NumericalError("sample_projection_dpp: rejection envelope violated after rebuild");
}

/// `count` independent draws, draw i on substream i (worker-count invariant).
inline std::vector<PointConfiguration> sample_projection_dpp_ensemble(const PolynomialBasis& basis, int count,
                                                                      const RngStream& rng, int workers = 1) {
  require(count >= 1, "sample_projection_dpp_ensemble: count must be >= 1");
  std::vector<PointConfiguration> out(static_cast<std::size_t>(count));
  parallel_for(out.size(), workers, [&](std::size_t i) {
    RngStream s = rng.substream(i);
    out[i] = sample_projection_dpp(basis, s);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Gauge identity and kernel convergence

struct GaugeResult {
  double relative_error = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool degenerate = false;
};

namespace detail {

using LComplex = std::complex<long double>;

/// |(1-z)^delta|^2 (1-|z|^2)^{m-1} and the two kernels in long double. The
/// determinants below are badly conditioned for clustered points, so the
/// extra 11 bits of mantissa are what keeps the comparison meaningful.
inline long double hp_weight_ld(LComplex z, int m, LComplex d) {
  const LComplex q = LComplex{1.0L, 0.0L} - z;
  return std::pow(std::abs(q), 2.0L * d.real()) * std::exp(-2.0L * d.imag() * std::arg(q)) *
         std::pow(1.0L - std::norm(z), static_cast<long double>(m - 1));
}

inline LComplex bergman_core_ld(LComplex z, LComplex w, int m) {
  const LComplex base = LComplex{1.0L, 0.0L} - z * std::conj(w);
  LComplex p{1.0L, 0.0L};
  for (int i = 0; i <= m; ++i) p *= base;
  return LComplex{1.0L, 0.0L} / p;
}

}  // namespace detail

/// Compares the two Janossy-type densities w.r.t. Lebesgue measure
///   det[K^{(m,delta)}(z_i,z_j)] prod w^{(m,delta)}(z_i)
///   det[K^{[m]}(z_i,z_j)]       prod w^{[m]}(z_i)
/// and returns |LHS - RHS| / max(|LHS|, |RHS|). Both sides are evaluated in
/// long double from the same closed-form kernels as kernel_eval.
inline GaugeResult gauge_identity_check(const std::vector<Complex>& points, int m, Complex delta) {
  require(!points.empty() && points.size() <= 12, "gauge_identity_check: need 1..12 points");
  require(m >= 1 && delta.real() > -0.5, "gauge_identity_check: need m >= 1, Re(delta) > -1/2");
  for (const auto& z : points) require(std::abs(z) < 1.0, "gauge_identity_check: points must lie in the open disc");
  using detail::LComplex;
  GaugeResult res;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i] == points[j]) res.degenerate = true;

  const LComplex one{1.0L, 0.0L};
  const LComplex d{delta.real(), delta.imag()};
  const long double pi = std::numbers::pi_v<long double>;
  const long double scale = static_cast<long double>(m) / pi;
  const auto k = static_cast<Eigen::Index>(points.size());
  Eigen::Matrix<LComplex, Eigen::Dynamic, Eigen::Dynamic> a(k, k), b(k, k);
  long double wa = 1.0L, wb = 1.0L;
  std::vector<LComplex> zs, gauge_left, gauge_right;
  for (const auto& p : points) {
    const LComplex z{p.real(), p.imag()};
    zs.push_back(z);
    gauge_left.push_back(std::exp(d * std::log(one - z)));
    gauge_right.push_back(std::exp(std::conj(d) * std::log(one - std::conj(z))));
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const LComplex core = detail::bergman_core_ld(zs[i], zs[j], m);
      a(i, j) = scale * core / (gauge_left[i] * gauge_right[j]);
      b(i, j) = core;
    }
    wa *= detail::hp_weight_ld(zs[i], m, d);
    wb *= scale * std::pow(1.0L - std::norm(zs[i]), static_cast<long double>(m - 1));
  }
  const LComplex lhs = (k == 1 ? a(0, 0) : a.partialPivLu().determinant()) * wa;
  const LComplex rhs = (k == 1 ? b(0, 0) : b.partialPivLu().determinant()) * wb;
  res.lhs = static_cast<double>(lhs.real());
  res.rhs = static_cast<double>(rhs.real());
  if (res.degenerate) return res;
  const long double mag = std::max(std::abs(lhs), std::abs(rhs));
  if (mag == 0.0L) {
    res.degenerate = true;
    return res;
  }
  res.relative_error = static_cast<double>(std::abs(lhs - rhs) / mag);
  return res;
}

/// `k` points drawn uniformly from the disc of radius `radius`.
inline std::vector<Complex> random_disc_tuple(int k, double radius, RngStream& rng) {
  std::vector<Complex> pts;
  for (int i = 0; i < k; ++i)
    pts.push_back(std::polar(radius * std::sqrt(rng.uniform()), 2.0 * kPi * rng.uniform()));
  return pts;
}

struct GaugeSuiteResult {
  int tuples = 0;
  int degenerate = 0;
  double max_relative_error = 0.0;
  std::vector<int> sizes;
  std::vector<double> errors;
};

/// Gauge check on `tuples` random tuples in |z| <= 0.95 whose sizes cycle
/// through 1..max_points.
inline GaugeSuiteResult gauge_identity_suite(int m, Complex delta, int tuples, int max_points, RngStream& rng) {
  require(tuples >= 1 && max_points >= 1 && max_points <= 12, "gauge_identity_suite: bad tuple settings");
  GaugeSuiteResult out;
  out.tuples = tuples;
  for (int t = 0; t < tuples; ++t) {
    const int k = 1 + t % max_points;
    const auto res = gauge_identity_check(random_disc_tuple(k, 0.95, rng), m, delta);
    if (res.degenerate) ++out.degenerate;
    out.sizes.push_back(k);
    out.errors.push_back(res.relative_error);
    out.max_relative_error = std::max(out.max_relative_error, res.relative_error);
  }
  return out;
}

struct ConvergenceRow {
  int n = 0;
  double sup_error = 0.0;
  double sup_relative = 0.0;  // max over the grid of |K_n - K| / |K|
  std::size_t grid_size = 0;
};

/// 8 points: radii {0.3, 0.6} x angles {0, pi/2, pi, 3 pi/2}, scaled to
/// `radius`. Includes the point nearest the boundary singularity at 1.
inline std::vector<Complex> default_convergence_points(double radius = 0.6) {
  std::vector<Complex> pts;
  for (double r : {0.5 * radius, radius})
    for (int a = 0; a < 4; ++a) pts.push_back(std::polar(r, 0.5 * kPi * a));
  return pts;
}

inline std::vector<std::pair<Complex, Complex>> tensor_grid(const std::vector<Complex>& pts) {
  std::vector<std::pair<Complex, Complex>> g;
  for (const auto& z : pts)
    for (const auto& w : pts) g.emplace_back(z, w);
  return g;
}

inline std::vector<ConvergenceRow> convergence_profile(int m, Complex delta, const std::vector<int>& n_list,
                                                       const std::vector<std::pair<Complex, Complex>>& grid) {
  require(!grid.empty(), "convergence_profile: empty grid");
  require(!n_list.empty(), "convergence_profile: empty n_list");
  for (const auto& [z, w] : grid)
    require(std::abs(z) <= 0.8 && std::abs(w) <= 0.8, "convergence_profile: grid must lie in |z|, |w| <= 0.8");
  const auto limit = KernelSpec::limit_hp(m, delta);
  std::vector<ConvergenceRow> rows;
  for (int n : n_list) {
    const auto fin = KernelSpec::finite(orthonormal_basis(n, m, delta));
    ConvergenceRow row;
    row.n = n;
    row.grid_size = grid.size();
    for (const auto& [z, w] : grid) {
      const Complex k = kernel_eval(limit, z, w);
      const double e = std::abs(kernel_eval(fin, z, w) - k);
      row.sup_error = std::max(row.sup_error, e);
      row.sup_relative = std::max(row.sup_relative, e / std::abs(k));
    }
    rows.push_back(row);
  }
  return rows;
}

/// Verdict on a convergence table: the sup error must fall strictly with n
/// and end below `tolerance` times min |K| over the grid.
struct ConvergenceVerdict {
  bool strictly_decreasing = true;
  double min_abs_limit = 0.0;
  double max_abs_limit = 0.0;
  /// Final sup error over the grid divided by sup |K| over the grid.
  double final_relative = 0.0;
  /// Final sup error divided by min |K|: the pointwise worst case scale.
  double final_relative_to_min = 0.0;
  bool pass = false;
};

inline ConvergenceVerdict assess_convergence(const std::vector<ConvergenceRow>& rows, int m, Complex delta,
                                             const std::vector<std::pair<Complex, Complex>>& grid,
                                             double tolerance = 1e-3) {
  require(!rows.empty() && !grid.empty(), "assess_convergence: empty table");
  ConvergenceVerdict v;
  const auto limit = KernelSpec::limit_hp(m, delta);
  v.min_abs_limit = std::numeric_limits<double>::infinity();
  for (const auto& [z, w] : grid) {
    const double a = std::abs(kernel_eval(limit, z, w));
    v.min_abs_limit = std::min(v.min_abs_limit, a);
    v.max_abs_limit = std::max(v.max_abs_limit, a);
  }
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].sup_error < rows[i - 1].sup_error)) v.strictly_decreasing = false;
  v.final_relative = rows.back().sup_error / v.max_abs_limit;
  v.final_relative_to_min = rows.back().sup_error / v.min_abs_limit;
  v.pass = v.strictly_decreasing && v.final_relative <= tolerance;
  return v;
}

}  // namespace hplab

#endif  // HPLAB_DPP_HPP

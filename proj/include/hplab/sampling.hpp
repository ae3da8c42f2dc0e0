#ifndef HPLAB_SAMPLING_HPP
#define HPLAB_SAMPLING_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/QR>

#include "hplab/core.hpp"
#include "hplab/linalg.hpp"
#include "hplab/rng.hpp"

namespace hplab {

/// rows x cols matrix of i.i.d. standard complex Gaussians (E|g|^2 = 1).
inline ComplexMatrix sample_ginibre(int rows, int cols, RngStream& rng) {
  require(rows >= 1 && cols >= 1, "sample_ginibre: rows and cols must be >= 1");
  ComplexMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = rng.complex_normal();
  return g;
}

/// Haar-distributed U(N) element: Q from the QR factorization of a Ginibre
/// matrix, with column phases chosen so R has a positive real diagonal.
inline ComplexMatrix sample_haar_unitary(int n, RngStream& rng) {
  require(n >= 1, "sample_haar_unitary: N must be >= 1");
  for (int attempt = 0; attempt < 2; ++attempt) {
    const ComplexMatrix g = sample_ginibre(n, n, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    const ComplexMatrix& packed = qr.matrixQR();
    const double scale = g.cwiseAbs().maxCoeff();
    bool singular = false;
    for (int i = 0; i < n; ++i)
      if (std::abs(packed(i, i)) <= 1e-13 * scale) singular = true;
    if (singular) continue;
    ComplexMatrix q = qr.householderQ();
    for (int j = 0; j < n; ++j) {
      const Complex r = packed(j, j);
      q.col(j) *= r / std::abs(r);
    }
    return q;
  }
  throw NumericalError("sample_haar_unitary: numerically singular Ginibre draw twice in a row");
}

/// log of |det(I - U)^delta|^2, the unnormalized Hua-Pickrell density with
/// respect to Haar measure. The power is taken eigenvalue by eigenvalue with
/// the principal logarithm: 2 Re(delta * sum_i Log(1 - lambda_i)).
///
/// An eigenvalue exactly at 1 gives -inf for Re(delta) > 0 and +inf for
/// Re(delta) < 0.
inline double hp_log_weight_from_spectrum(const std::vector<Complex>& spectrum, Complex delta) {
  if (delta == Complex{0.0, 0.0}) return 0.0;
  double acc = 0.0;
  for (const Complex& lambda : spectrum) {
    Complex d = Complex{1.0, 0.0} - lambda;
    if (d == Complex{0.0, 0.0}) {
      if (delta.real() > 0.0) return -std::numeric_limits<double>::infinity();
      if (delta.real() < 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    // Rounding can push an eigenvalue near 1 slightly outside the circle.
    if (d.real() < 0.0) d = {0.0, d.imag()};
    acc += 2.0 * (delta * std::log(d)).real();
  }
  return acc;
}

inline double hp_log_weight(const ComplexMatrix& u, Complex delta) {
  require(u.rows() == u.cols() && u.rows() >= 1, "hp_log_weight: U must be square");
  require(delta.real() > -0.5, "Re(delta) must exceed -1/2");
  require(unitarity_defect(u) <= 1e-10, "hp_log_weight: input is not unitary");
  if (delta == Complex{0.0, 0.0}) return 0.0;
  return hp_log_weight_from_spectrum(eigenvalues(u).points, delta);
}

/// log of the bound 2^{2N Re delta} e^{pi N |Im delta|} on |det(I-U)^delta|^2.
inline double hp_log_rejection_bound(int n, Complex delta) {
  return 2.0 * n * delta.real() * std::log(2.0) + kPi * n * std::abs(delta.imag());
}

struct SamplerStats {
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
  double acceptance_rate() const {
    return proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
  }
};

/// Exact Hua-Pickrell sample by rejection from Haar proposals. Needs
/// Re(delta) >= 0, otherwise the density is unbounded near eigenvalue 1.
inline ComplexMatrix sample_hua_pickrell_rejection(int n, Complex delta, RngStream& rng,
                                                   SamplerStats* stats = nullptr,
                                                   std::uint64_t max_proposals = 1'000'000'000ULL) {
  require(n >= 1, "sample_hua_pickrell_rejection: N must be >= 1");
  require(delta.real() >= 0.0, "rejection sampler requires Re(delta) >= 0");
  const double log_bound = hp_log_rejection_bound(n, delta);
  for (std::uint64_t k = 0; k < max_proposals; ++k) {
    ComplexMatrix u = sample_haar_unitary(n, rng);
    const double lw = hp_log_weight(u, delta);
    const double log_u = std::log(rng.uniform());
    if (stats) ++stats->proposals;
    if (log_u < lw - log_bound) {
      if (stats) ++stats->accepted;
      return u;
    }
  }
  throw NumericalError("sample_hua_pickrell_rejection: proposal cap reached");
}

struct MHConfig {
  int burn_in = 1000;
  int thinning = 5;
  /// Independent chains an ensemble is split across. Chains are the unit of
  /// parallelism, so results never depend on the worker count.
  int chains = 1;

  void validate() const {
    require(burn_in >= 0, "mh.burn_in must be >= 0");
    require(thinning >= 1, "mh.thinning must be >= 1");
    require(chains >= 1, "mh.chains must be >= 1");
  }
};

namespace detail {

inline bool mh_accept(double log_current, double log_proposal, double log_u) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (log_current == inf) return false;
  if (log_proposal == inf) return true;
  if (log_proposal == -inf) return false;
  if (log_current == -inf) return true;
  return log_u < log_proposal - log_current;
}

}  // namespace detail

/// Independence Metropolis-Hastings chain targeting the Hua-Pickrell law,
/// with Haar proposals. Only differences of hp_log_weight enter the
/// acceptance ratio. Returns `count` states after `burn_in` proposals,
/// one every `thinning` proposals.
inline std::vector<ComplexMatrix> sample_hua_pickrell_mh(int n, Complex delta, int count,
                                                         const MHConfig& cfg, RngStream& rng,
                                                         SamplerStats* stats = nullptr) {
  require(n >= 1, "sample_hua_pickrell_mh: N must be >= 1");
  require(count >= 1, "sample_hua_pickrell_mh: count must be >= 1");
  require(delta.real() > -0.5, "Re(delta) must exceed -1/2");
  cfg.validate();

  ComplexMatrix current = sample_haar_unitary(n, rng);
  double log_current = hp_log_weight(current, delta);
  auto step = [&] {
    ComplexMatrix proposal = sample_haar_unitary(n, rng);
    const double log_proposal = hp_log_weight(proposal, delta);
    const double log_u = std::log(rng.uniform());
    if (stats) ++stats->proposals;
    if (detail::mh_accept(log_current, log_proposal, log_u)) {
      current = std::move(proposal);
      log_current = log_proposal;
      if (stats) ++stats->accepted;
    }
  };

  for (int i = 0; i < cfg.burn_in; ++i) step();
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    for (int t = 0; t < cfg.thinning; ++t) step();
    out.push_back(current);
  }
  return out;
}

}  // namespace hplab

#endif  // HPLAB_SAMPLING_HPP

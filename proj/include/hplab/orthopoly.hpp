#ifndef HPLAB_ORTHOPOLY_HPP
#define HPLAB_ORTHOPOLY_HPP

#include <cmath>
#include <memory>
#include <ostream>
#include <vector>

#include <Eigen/Cholesky>

#include "hplab/core.hpp"
#include "hplab/weights.hpp"

namespace hplab {

/// <z^k, z^j> = int z^k conj(z)^j dmu = c_{k,j}: the matrix whose sesquilinear
/// form C* A C gives the inner products of polynomials with coefficient
/// columns C is the transpose of the moment matrix.
inline ComplexMatrix inner_product_matrix(const GramMatrix& g) { return g.entries.transpose(); }

/// Orthonormal polynomials P_0..P_{n-1} for the unnormalized measure
/// |(1-z)^delta|^2 (1-|z|^2)^{m-1} dsigma on the unit disc.
///
/// `coeffs(i, k)` is the coefficient of z^i in P_k: upper triangular, with a
/// positive real diagonal (the leading coefficients).
///
/// Normalization: with delta = 0 this measure has total mass pi/m, while the
/// classical weighted Bergman basis sqrt((m+1)...(m+k)/k!) z^k is orthonormal
/// for the probability measure (m/pi)(1-|z|^2)^{m-1} dsigma. The two bases
/// differ by the constant factor sqrt(m/pi).
struct PolynomialBasis {
  int n = 0;
  HPParams params;
  ComplexMatrix coeffs;

  /// (P_0(z), ..., P_{n-1}(z)), each by Horner's rule.
  ComplexVector evaluate(Complex z) const {
    ComplexVector v(n);
    for (int k = 0; k < n; ++k) {
      Complex acc = coeffs(k, k);
      for (int i = k - 1; i >= 0; --i) acc = acc * z + coeffs(i, k);
      v(k) = acc;
    }
    return v;
  }

  /// max |(C* A C - I)_{jk}| for the inner-product matrix A_{jk} = <z^k, z^j>.
  double orthonormality_residual(const ComplexMatrix& inner) const {
    return (coeffs.adjoint() * inner * coeffs - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  }
  double orthonormality_residual(const GramMatrix& g) const {
    return orthonormality_residual(inner_product_matrix(g));
  }
};

inline constexpr double kOrthonormalityTolerance = 1e-9;

/// Gram-Schmidt on 1, z, z^2, ... via the Cholesky factor A = L L* of the
/// inner-product matrix A = G^T: C = (L*)^{-1} satisfies C* A C = I.
inline PolynomialBasis orthonormal_basis(const GramMatrix& g) {
  const ComplexMatrix inner = inner_product_matrix(g);
  Eigen::LLT<ComplexMatrix> llt(inner);
  if (llt.info() != Eigen::Success)
    throw NumericalError("orthonormal_basis: Gram matrix not positive definite (rcond " +
                         std::to_string(llt.rcond()) + ")");
  PolynomialBasis b;
  b.n = g.n;
  b.params = HPParams{g.n, g.m, g.delta};
  const ComplexMatrix upper = llt.matrixU();
  b.coeffs = upper.triangularView<Eigen::Upper>().solve(ComplexMatrix::Identity(g.n, g.n));
  for (int k = 0; k < g.n; ++k) {
    // Leading coefficients are real by construction; drop rounding residue.
    b.coeffs(k, k) = Complex{std::abs(b.coeffs(k, k)), 0.0};
    for (int i = k + 1; i < g.n; ++i) b.coeffs(i, k) = 0.0;
  }
  const double residual = b.orthonormality_residual(inner);
  if (!(residual <= kOrthonormalityTolerance))
    throw NumericalError("orthonormal_basis: orthonormality residual " + std::to_string(residual) +
                         " exceeds tolerance (rcond " + std::to_string(llt.rcond()) + ")");
  return b;
}

inline PolynomialBasis orthonormal_basis(int n, int m, Complex delta) {
  return orthonormal_basis(gram_matrix(n, m, delta));
}

/// Closed-form delta = 0 basis, sqrt(m/pi) sqrt((m+1)...(m+k)/k!) z^k.
inline PolynomialBasis closed_form_basis_delta0(int n, int m) {
  require(n >= 1 && m >= 1, "closed_form_basis_delta0: need n, m >= 1");
  PolynomialBasis b;
  b.n = n;
  b.params = HPParams{n, m, Complex{0.0, 0.0}};
  b.coeffs = ComplexMatrix::Zero(n, n);
  double ratio = 1.0;  // (m+1)...(m+k)/k!
  for (int k = 0; k < n; ++k) {
    if (k > 0) ratio *= static_cast<double>(m + k) / k;
    b.coeffs(k, k) = std::sqrt(m / kPi) * std::sqrt(ratio);
  }
  return b;
}

inline std::vector<double> leading_coefficients(const PolynomialBasis& b) {
  std::vector<double> out(static_cast<std::size_t>(b.n));
  for (int k = 0; k < b.n; ++k) out[static_cast<std::size_t>(k)] = b.coeffs(k, k).real();
  return out;
}

enum class KernelKind { finite, limit_hp, bergman };

/// One of the three correlation kernels together with its reference measure:
///   finite   K_n(z,w) = sum_k P_k(z) conj(P_k(w))            w.r.t. hp(m, delta)
///   limit_hp m / (pi (1-z)^delta (1-z conj w)^{m+1} (1-conj w)^{conj delta})
///                                                         w.r.t. hp(m, delta)
///   bergman  (1 - z conj w)^{-(m+1)}                      w.r.t. bergman(m)
struct KernelSpec {
  KernelKind kind = KernelKind::bergman;
  HPParams params;
  std::shared_ptr<const PolynomialBasis> basis;

  static KernelSpec finite(PolynomialBasis b) {
    KernelSpec s;
    s.kind = KernelKind::finite;
    s.params = b.params;
    s.basis = std::make_shared<const PolynomialBasis>(std::move(b));
    return s;
  }
  static KernelSpec limit_hp(int m, Complex delta) {
    require(m >= 1 && delta.real() > -0.5, "limit_hp kernel: need m >= 1, Re(delta) > -1/2");
    KernelSpec s;
    s.kind = KernelKind::limit_hp;
    s.params = HPParams{1, m, delta};
    return s;
  }
  static KernelSpec bergman(int m) {
    require(m >= 1, "bergman kernel: need m >= 1");
    KernelSpec s;
    s.kind = KernelKind::bergman;
    s.params = HPParams{1, m, Complex{0.0, 0.0}};
    return s;
  }

  WeightSpec weight() const {
    if (kind == KernelKind::bergman) return WeightSpec{WeightKind::bergman, params.m, {}};
    return WeightSpec{WeightKind::hp, params.m, params.delta};
  }
};

inline Complex kernel_eval(const KernelSpec& spec, Complex z, Complex w) {
  require(std::abs(z) < 1.0 && std::abs(w) < 1.0, "kernel_eval: arguments must lie in the open unit disc");
  const Complex one{1.0, 0.0};
  switch (spec.kind) {
    case KernelKind::finite: {
      const ComplexVector vz = spec.basis->evaluate(z);
      const ComplexVector vw = spec.basis->evaluate(w);
      Complex acc{0.0, 0.0};
      for (int k = 0; k < vz.size(); ++k) acc += vz(k) * std::conj(vw(k));
      return acc;
    }
    case KernelKind::limit_hp: {
      const int m = spec.params.m;
      const Complex d = spec.params.delta;
      const Complex left = std::exp(d * std::log(one - z));
      const Complex right = std::exp(std::conj(d) * std::log(one - std::conj(w)));
      Complex mid = one;
      const Complex base = one - z * std::conj(w);
      for (int i = 0; i <= m; ++i) mid *= base;
      return m / kPi / (left * mid * right);
    }
    case KernelKind::bergman: {
      Complex mid = one;
      const Complex base = one - z * std::conj(w);
      for (int i = 0; i <= spec.params.m; ++i) mid *= base;
      return one / mid;
    }
  }
  return {};
}

}  // namespace hplab

#endif  // HPLAB_ORTHOPOLY_HPP

#ifndef HPLAB_CORE_HPP
#define HPLAB_CORE_HPP

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hplab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;

/// Thrown when a caller violates an operation's precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Conditioning loss, eigensolver non-convergence, envelope violations and
/// similar numerical breakdowns.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw PreconditionError(what);
}

/// Parameters (n, m, delta) of the truncated Hua-Pickrell ensemble: the
/// (n+m)x(n+m) unitary is truncated to its top-left n x n corner.
struct HPParams {
  int n = 1;
  int m = 1;
  Complex delta{0.0, 0.0};

  void validate() const {
    require(n >= 1, "n must be >= 1");
    require(m >= 1, "m must be >= 1");
    require(delta.real() > -0.5, "Re(delta) must exceed -1/2");
  }
  int dim() const { return n + m; }
};

/// Unordered multiset of points in the closed unit disc.
struct PointConfiguration {
  std::vector<Complex> points;

  std::size_t size() const { return points.size(); }
  double sum_abs2() const {
    double s = 0.0;
    for (const auto& z : points) s += std::norm(z);
    return s;
  }
};

}  // namespace hplab

#endif  // HPLAB_CORE_HPP

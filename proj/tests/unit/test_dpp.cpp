#include <gtest/gtest.h>

#include <cmath>

#include "hplab/dpp.hpp"
#include "hplab/stats.hpp"
#include "hplab/truncation.hpp"

using namespace hplab;

namespace {

const std::vector<Complex> kDeltas{{0.0, 0.0}, {1.0, 0.0}, {1.0, 2.0}, {-0.3, 0.0}, {-0.3, 0.7}};

CellPartition intensity_partition(const PolynomialBasis& b, double r_max, int rings, int sectors) {
  const WeightSpec w{WeightKind::hp, b.params.m, b.params.delta};
  return equal_mass_partition(
      [&](Complex z) { return std::abs(z) < 1.0 ? b.evaluate(z).squaredNorm() * weight_eval(w, z) : 0.0; }, r_max,
      rings, sectors);
}

}  // namespace

TEST(CellPartition, LocateCoversDiscAndRespectsRadius) {
  const auto p = uniform_partition(0.9, 3, 5);
  ASSERT_EQ(p.size(), 15u);
  RngStream rng(1, 0);
  for (int i = 0; i < 2000; ++i) {
    const Complex z = std::polar(0.9 * std::sqrt(rng.uniform()), -kPi + 2 * kPi * rng.uniform());
    const long c = p.locate(z);
    ASSERT_GE(c, 0);
    const Cell& cell = p.cells[static_cast<std::size_t>(c)];
    EXPECT_GE(std::abs(z), cell.r_lo);
    EXPECT_LE(std::abs(z), cell.r_hi);
  }
  EXPECT_EQ(p.locate(Complex{0.95, 0.0}), -1);
  EXPECT_GE(p.locate(Complex{0.9, 0.0}), 0);
  EXPECT_GE(p.locate(Complex{-0.5, 0.0}), 0);
}

TEST(CellPartition, EqualMassCellsAreBalanced) {
  const auto b = orthonormal_basis(3, 2, {1.0, 2.0});
  const auto cells = intensity_partition(b, 0.95, 4, 6);
  const auto e = expected_cell_counts(KernelSpec::finite(b), cells);
  const double mean = std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size());
  for (double x : e) EXPECT_NEAR(x / mean, 1.0, 0.02);
}

TEST(ExpectedCellCounts, FullDiscSumsToN) {
  for (const Complex d : kDeltas) {
    const auto b = orthonormal_basis(4, 2, d);
    const auto e = expected_cell_counts(KernelSpec::finite(b), uniform_partition(1.0, 3, 4));
    double total = 0.0;
    for (double x : e) {
      EXPECT_GE(x, 0.0);
      total += x;
    }
    EXPECT_NEAR(total, 4.0, 1e-6) << d;
  }
}

TEST(ExpectedCellCounts, QuarterDisc) {
  const auto b = orthonormal_basis(1, 1, {0.0, 0.0});
  const auto e = expected_cell_counts(KernelSpec::finite(b), uniform_partition(0.5, 1, 1));
  EXPECT_NEAR(e[0], 0.25, 1e-9);
}

TEST(ExpectedCellCounts, PolarQuadratureMeetsTolerance) {
  // n = 2, m = 1, delta = 0: K(z,z) w = (1 + 2|z|^2)/pi, so a sector of
  // angle a between radii r0 and r1 holds a/pi (r^2/2 + r^4/2) |_{r0}^{r1}.
  const auto b = orthonormal_basis(2, 1, {0.0, 0.0});
  const auto cells = uniform_partition(0.95, 3, 4);
  const auto e = expected_cell_counts(KernelSpec::finite(b), cells);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells.cells[i];
    auto f = [](double r) { return 0.5 * r * r + 0.5 * r * r * r * r; };
    EXPECT_NEAR(e[i], (c.th_hi - c.th_lo) / kPi * (f(c.r_hi) - f(c.r_lo)), 1e-9);
  }
}

TEST(ProjectionDpp, ExactlyNPointsInsideDisc) {
  for (const Complex d : kDeltas) {
    const auto b = orthonormal_basis(4, 2, d);
    RngStream rng(2, 0);
    for (int i = 0; i < 50; ++i) {
      const auto c = sample_projection_dpp(b, rng);
      ASSERT_EQ(c.size(), 4u);
      for (const auto& z : c.points) EXPECT_LT(std::abs(z), 1.0);
    }
  }
}

TEST(ProjectionDpp, SinglePointIsUniformOnDisc) {
  const auto cs = sample_projection_dpp_ensemble(orthonormal_basis(1, 1, {0.0, 0.0}), 20000, RngStream(3, 0));
  std::vector<double> r2;
  for (const auto& c : cs) r2.push_back(c.sum_abs2());
  const auto r = stats::ks_one_sample(r2, [](double x) { return std::clamp(x, 0.0, 1.0); });
  EXPECT_TRUE(r.passes(1e-3)) << "p = " << r.p_value;
}

TEST(ProjectionDpp, RadialMomentMatchesQuadrature) {
  // E sum |z_i|^2 = int |z|^2 K_2(z,z) dmu = int |z|^2 (1 + 2|z|^2)/pi dsigma
  // = 1/2 + 2/3.
  const auto b = orthonormal_basis(2, 1, {0.0, 0.0});
  const auto cell = uniform_partition(1.0, 1, 1).cells[0];
  const double oracle = integrate_cell(
      [&](Complex z) { return std::abs(z) < 1.0 ? std::norm(z) * b.evaluate(z).squaredNorm() : 0.0; }, cell);
  EXPECT_NEAR(oracle, 0.5 + 2.0 / 3.0, 1e-9);
  const auto cs = sample_projection_dpp_ensemble(b, 100000, RngStream(4, 0));
  std::vector<double> xs;
  for (const auto& c : cs) xs.push_back(c.sum_abs2());
  const auto est = stats::mean_and_se(xs);
  EXPECT_LT(std::abs(est.mean - oracle), 4 * est.se);
}

TEST(ProjectionDpp, WorkerCountInvariant) {
  const auto b = orthonormal_basis(3, 1, {1.0, 0.0});
  const auto a = sample_projection_dpp_ensemble(b, 40, RngStream(5, 0), 1);
  const auto c = sample_projection_dpp_ensemble(b, 40, RngStream(5, 0), 3);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) EXPECT_EQ(a[i].points[j], c[i].points[j]);
}

TEST(ReferenceSampler, MatchesWeightCellMasses) {
  for (const Complex d : {Complex{1.0, 2.0}, Complex{-0.3, 0.7}}) {
    const WeightSpec w{WeightKind::hp, 2, d};
    const auto cells = uniform_partition(1.0, 3, 6);
    std::vector<double> probs;
    for (const auto& c : cells.cells)
      probs.push_back(integrate_cell([&](Complex z) { return std::abs(z) < 1.0 ? weight_eval(w, z) : 0.0; }, c));
    RngStream rng(6, 0);
    std::vector<double> counts(cells.size(), 0.0);
    for (int i = 0; i < 50000; ++i) counts[static_cast<std::size_t>(cells.locate(sample_reference_point(w, rng)))] += 1;
    const auto r = stats::chi_square_gof(counts, probs);
    EXPECT_TRUE(r.passes(1e-3)) << d << " p = " << r.p_value;
  }
}

TEST(VerifyIntensities, HaarTruncationPasses) {
  const auto b = orthonormal_basis(2, 1, {0.0, 0.0});
  const auto cells = intensity_partition(b, 0.95, 4, 6);
  const auto cs = sample_truncation_ensemble(HPParams{2, 1, {0.0, 0.0}}, 10000, SamplerKind::haar, RngStream(7, 0));
  const auto rep = verify_intensities(cs, KernelSpec::finite(b), cells, 1e-3);
  EXPECT_TRUE(rep.pass) << "max |z| " << rep.max_abs_z;
  EXPECT_EQ(rep.first.size(), 24u);
  EXPECT_EQ(rep.second.size(), 24u * 23u / 2u);
  EXPECT_LE(rep.expected_total, 2.0 + 1e-9);
  for (const auto& s : rep.first) {
    EXPECT_TRUE(std::isfinite(s.z));
    EXPECT_GE(s.expected, 0.0);
  }
}

TEST(VerifyIntensities, ProjectionSamplesPass) {
  const auto b = orthonormal_basis(2, 1, {0.0, 0.0});
  const auto cells = intensity_partition(b, 0.95, 4, 6);
  const auto cs = sample_projection_dpp_ensemble(b, 10000, RngStream(8, 0));
  EXPECT_TRUE(verify_intensities(cs, KernelSpec::finite(b), cells, 1e-3).pass);
}

TEST(VerifyIntensities, DetectsWrongDelta) {
  const auto wrong = orthonormal_basis(2, 2, {2.0, 0.0});
  const auto cells = intensity_partition(wrong, 0.95, 4, 6);
  const auto cs = sample_truncation_ensemble(HPParams{2, 2, {0.0, 0.0}}, 10000, SamplerKind::haar, RngStream(9, 0));
  EXPECT_FALSE(verify_intensities(cs, KernelSpec::finite(wrong), cells, 1e-3).pass);
}

TEST(VerifyIntensities, TooFewSamples) {
  const auto b = orthonormal_basis(2, 1, {0.0, 0.0});
  const auto cs = sample_projection_dpp_ensemble(b, 999, RngStream(10, 0));
  EXPECT_THROW(verify_intensities(cs, KernelSpec::finite(b), uniform_partition(0.9, 2, 2), 1e-3), PreconditionError);
}

TEST(GaugeIdentity, SinglePointHandValue) {
  for (const Complex d : kDeltas)
    for (int m = 1; m <= 3; ++m) {
      const Complex z{0.3, -0.6};
      const auto r = gauge_identity_check({z}, m, d);
      const double expected = m / kPi / std::pow(1.0 - std::norm(z), 2);
      EXPECT_NEAR(r.lhs, expected, 1e-12 * expected);
      EXPECT_NEAR(r.rhs, expected, 1e-12 * expected);
      EXPECT_LE(r.relative_error, 1e-12);
    }
}

TEST(GaugeIdentity, RandomTuples) {
  for (const Complex d : kDeltas)
    for (int m = 1; m <= 3; ++m) {
      RngStream rng(11, static_cast<std::uint64_t>(m));
      const auto g = gauge_identity_suite(m, d, 100, 12, rng);
      EXPECT_LE(g.max_relative_error, 1e-10) << d << " m=" << m;
      EXPECT_EQ(g.degenerate, 0);
    }
}

TEST(GaugeIdentity, RepeatedPointIsDegenerate) {
  const auto r = gauge_identity_check({Complex{0.2, 0.1}, Complex{0.5, 0.0}, Complex{0.2, 0.1}}, 2, {1.0, 2.0});
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.relative_error, 0.0);
  EXPECT_NEAR(r.lhs, 0.0, 1e-12);
  EXPECT_NEAR(r.rhs, 0.0, 1e-12);
}

TEST(GaugeIdentity, Preconditions) {
  EXPECT_THROW(gauge_identity_check({}, 1, {0.0, 0.0}), PreconditionError);
  EXPECT_THROW(gauge_identity_check(std::vector<Complex>(13, 0.1), 1, {0.0, 0.0}), PreconditionError);
  EXPECT_THROW(gauge_identity_check({Complex{1.0, 0.0}}, 1, {0.0, 0.0}), PreconditionError);
}

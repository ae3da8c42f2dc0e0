#include <gtest/gtest.h>

#include <cmath>

#include "hplab/rng.hpp"
#include "hplab/stats.hpp"

using namespace hplab;

TEST(Stats, ChiSquareGofExactFitHasPValueOne) {
  const auto r = stats::chi_square_gof({25, 25, 25, 25}, {0.25, 0.25, 0.25, 0.25});
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.dof, 3.0);
  EXPECT_NEAR(r.p_value, 1.0, 1e-15);
}

TEST(Stats, ChiSquareGofDetectsGrossMismatch) {
  EXPECT_FALSE(stats::chi_square_gof({1000, 0, 0, 0}, {0.25, 0.25, 0.25, 0.25}).passes(1e-3));
}

TEST(Stats, ChiSquareSurvivalReference) {
  // P(chi2_1 > 3.841458820694124) = 0.05.
  EXPECT_NEAR(stats::chi_square_sf(3.841458820694124, 1), 0.05, 1e-12);
}

TEST(Stats, KolmogorovReference) {
  // Kolmogorov distribution: P(K > 1.358) ~ 0.05 and P(K > 1.9495) ~ 0.001.
  EXPECT_NEAR(stats::kolmogorov_sf(1.3581), 0.05, 1e-4);
  EXPECT_NEAR(stats::kolmogorov_sf(1.9495), 0.001, 2e-5);
  EXPECT_EQ(stats::kolmogorov_sf(0.0), 1.0);
}

TEST(Stats, KsOneSampleUniform) {
  RngStream rng(1, 0);
  std::vector<double> xs;
  for (int i = 0; i < 20000; ++i) xs.push_back(rng.uniform());
  EXPECT_TRUE(stats::ks_one_sample(xs, [](double x) { return x; }).passes(1e-3));
  for (double& x : xs) x = x * x;
  EXPECT_FALSE(stats::ks_one_sample(xs, [](double x) { return x; }).passes(1e-3));
}

TEST(Stats, KsTwoSample) {
  RngStream rng(2, 0);
  std::vector<double> a, b, c;
  for (int i = 0; i < 20000; ++i) {
    a.push_back(rng.normal(1.0));
    b.push_back(rng.normal(1.0));
    c.push_back(rng.normal(1.0) + 0.1);
  }
  EXPECT_TRUE(stats::ks_two_sample(a, b).passes(1e-3));
  EXPECT_FALSE(stats::ks_two_sample(a, c).passes(1e-3));
}

TEST(Stats, TwoSampleChiSquare) {
  EXPECT_NEAR(stats::chi_square_two_sample({10, 20, 30}, {20, 40, 60}).statistic, 0.0, 1e-12);
  EXPECT_FALSE(stats::chi_square_two_sample({100, 0, 100}, {0, 100, 100}).passes(1e-3));
}

TEST(Stats, BatchMeansMatchesNaiveForIndependentData) {
  RngStream rng(3, 0);
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) xs.push_back(rng.normal(1.0));
  const auto bm = stats::batch_means(xs, 100);
  const auto nv = stats::mean_and_se(xs);
  EXPECT_EQ(bm.batches, 100);
  EXPECT_NEAR(bm.mean, nv.mean, 1e-12);
  EXPECT_NEAR(bm.se / nv.se, 1.0, 0.25);
}

TEST(Stats, BatchMeansInflatesForCorrelatedData) {
  // AR(1) with coefficient 0.9: naive SE underestimates by sqrt(19).
  RngStream rng(4, 0);
  std::vector<double> xs;
  double x = 0.0;
  for (int i = 0; i < 200000; ++i) xs.push_back(x = 0.9 * x + rng.normal(1.0));
  EXPECT_GT(stats::batch_means(xs, 100).se / stats::mean_and_se(xs).se, 3.0);
}

TEST(Stats, Quantiles) {
  EXPECT_NEAR(stats::normal_quantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(stats::students_t_quantile(0.975, 10), 2.228138851986274, 1e-10);
}

TEST(Stats, BinIndexClamps) {
  EXPECT_EQ(stats::bin_index(-1.0, 0.0, 1.0, 4), 0u);
  EXPECT_EQ(stats::bin_index(1.0, 0.0, 1.0, 4), 3u);
  EXPECT_EQ(stats::bin_index(0.3, 0.0, 1.0, 4), 1u);
}

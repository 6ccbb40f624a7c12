#include <gtest/gtest.h>

#include <cmath>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "amcci/chains.hpp"
#include "amcci/errors.hpp"
#include "amcci/lagwindow.hpp"
#include "oracles.hpp"

using namespace amcci;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed, double offset = 0.0) {
  Rng rng(seed);
  boost::random::normal_distribution<double> normal;
  std::vector<double> x(n);
  for (auto& v : x) v = offset + normal(rng);
  return x;
}

}  // namespace

TEST(LagWindow, MatchesQuadraticFormOracle) {
  Rng rng(2024);
  boost::random::uniform_int_distribution<std::size_t> size(10, 300);
  const auto b = WeightKernel::bartlett();
  const auto q = WeightKernel::quadratic();
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = size(rng);
    const auto x = noise(n, 100 + trial, 3.0);
    boost::random::uniform_int_distribution<std::size_t> cdist(1, n + 5);
    const std::size_t c = std::min(cdist(rng), n);
    const double shift = 2.5 + 0.1 * trial;
    const double want_b = oracle::gamma_quadratic_form(x, c, oracle::bartlett_w<long double>, shift);
    const double want_q = oracle::gamma_quadratic_form(x, c, oracle::quadratic_w<long double>, shift);
    EXPECT_NEAR(gamma_n_sq(x, c, b).gamma_sq, want_b, 1e-10 * std::abs(want_b)) << n << " " << c;
    EXPECT_NEAR(gamma_n_sq(x, c, q).gamma_sq, want_q, 1e-10 * std::abs(want_q)) << n << " " << c;
  }
}

TEST(LagWindow, FftMatchesDirect) {
  for (std::size_t n : {2u, 3u, 17u, 64u, 1000u, 4097u}) {
    const auto x = noise(n, n, 1.0);
    const auto direct = reference::autocovariances_direct(x, n - 1);
    const auto fft = autocovariances_fft(x, n - 1);
    ASSERT_EQ(direct.size(), fft.size());
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(fft[k], direct[k], 1e-10 * direct[0]) << n;
  }
}

TEST(LagWindow, DispatchPicksEquivalentRoutes) {
  const auto x = noise(500, 8);
  const auto a = autocovariances(x, 10);
  const auto b = autocovariances(x, 200);
  for (std::size_t k = 0; k <= 10; ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
}

TEST(LagWindow, BandwidthOneIsSampleVariance) {
  const auto x = noise(100, 1);
  const auto e = gamma_n_sq(x, 1, WeightKernel::bartlett());
  EXPECT_DOUBLE_EQ(e.gamma_sq, e.gamma0);
  EXPECT_NEAR(e.ess, 100.0, 1e-9);
}

TEST(LagWindow, ConstantInputIsNotStudentizable) {
  const std::vector<double> x(50, 2.0);
  const auto e = gamma_n_sq(x, 7, WeightKernel::bartlett());
  EXPECT_FALSE(e.studentizable());
  EXPECT_TRUE(std::isnan(e.ess));
  EXPECT_TRUE(std::isnan(e.mc_error()));
  EXPECT_THROW(t_stat(x, 2.0, 7, WeightKernel::bartlett()), NonStudentizableError);
}

TEST(LagWindow, ShiftInvariantAndScaleQuadratic) {
  const auto x = noise(800, 3);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 5.0 + 3.0 * x[i];
  const auto k = WeightKernel::bartlett();
  const auto ex = gamma_n_sq(x, 800, k);
  const auto ey = gamma_n_sq(y, 800, k);
  EXPECT_NEAR(ey.gamma_sq, 9.0 * ex.gamma_sq, 1e-10 * ey.gamma_sq);
}

TEST(LagWindow, Ar1EstimateNearTruth) {
  const auto run = ar1_chain(0.5, 1 << 16, 77);
  const auto e = gamma_n_sq(run.h_path, bandwidth_npow(1 << 16, 1.0 / 3.0), WeightKernel::bartlett());
  EXPECT_NEAR(e.gamma_sq, 3.0, 0.3);
}

TEST(LagWindow, DomainErrors) {
  const auto x = noise(10, 1);
  const auto k = WeightKernel::bartlett();
  EXPECT_THROW(gamma_n_sq(x, 0, k), DomainError);
  EXPECT_THROW(gamma_n_sq(x, 11, k), DomainError);
  EXPECT_THROW(autocovariances(x, 10), DomainError);
  const std::vector<double> one = {1.0};
  EXPECT_THROW(autocovariances(one, 0), DomainError);
  EXPECT_THROW(sample_mean(std::vector<double>{}), DomainError);
}

TEST(LagWindow, TStatistic) {
  const auto x = noise(400, 12);
  const auto e = gamma_n_sq(x, 20, WeightKernel::bartlett());
  EXPECT_NEAR(t_stat(x, 0.1, 20, WeightKernel::bartlett()),
              std::sqrt(400.0) * (e.mean - 0.1) / std::sqrt(e.gamma_sq), 1e-12);
}

TEST(Bandwidth, Parse) {
  EXPECT_EQ(Bandwidth::parse("n").resolve(1000), 1000u);
  EXPECT_EQ(Bandwidth::parse("25").resolve(1000), 25u);
  EXPECT_EQ(Bandwidth::parse("25").resolve(10), 10u);
  EXPECT_EQ(Bandwidth::parse("npow:0.5").resolve(10000), 100u);
  EXPECT_EQ(Bandwidth::parse("npow:0.333").resolve(1 << 16), bandwidth_npow(1 << 16, 0.333));
  EXPECT_EQ(Bandwidth::parse("npow:0.5").to_string(), "npow:0.5");
  EXPECT_THROW(Bandwidth::parse("0"), DomainError);
  EXPECT_THROW(Bandwidth::parse("-3"), DomainError);
  EXPECT_THROW(Bandwidth::parse("npow:"), DomainError);
  EXPECT_THROW(Bandwidth::parse("npow:1.5"), DomainError);
  EXPECT_THROW(Bandwidth::parse("12x"), DomainError);
  EXPECT_THROW(Bandwidth::parse("half"), DomainError);
}

TEST(Bandwidth, NpowRounding) {
  EXPECT_EQ(bandwidth_npow(4096, 1.0 / 3.0), 16u);
  EXPECT_EQ(bandwidth_npow(1, 0.5), 1u);
  EXPECT_EQ(bandwidth_npow(2, 0.01), 1u);
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "amcci/errors.hpp"
#include "amcci/mercer.hpp"

using namespace amcci;

TEST(Mercer, QuadraticHasOneEigenvalue) {
  const auto d = nystrom_decompose(WeightKernel::quadratic(), 500);
  ASSERT_EQ(d.eigenvalues.size(), 1u);
  EXPECT_NEAR(d.eigenvalues[0], 1.0 / 6.0, 1e-4);
  // phi(t) = sqrt(12) (t - 1/2) up to sign; on the midpoint grid
  // (1/m) sum (t_k - 1/2)^2 = (1 - 1/m^2) / 12.
  const auto grid = midpoint_grid(500);
  const double sign = d.eigenfunctions[0][0] < 0 ? 1.0 : -1.0;
  const double norm = std::sqrt(12.0 / (1.0 - 1.0 / (500.0 * 500.0)));
  for (std::size_t k = 0; k < grid.size(); k += 50) {
    EXPECT_NEAR(sign * d.eigenfunctions[0][k], norm * (grid[k] - 0.5), 1e-9);
  }
}

TEST(Mercer, BartlettTraceAndLeadingEigenvalues) {
  const auto d = nystrom_decompose(WeightKernel::bartlett(), 500, 1.0);
  EXPECT_NEAR(std::accumulate(d.eigenvalues.begin(), d.eigenvalues.end(), 0.0), 1.0 / 3.0, 1e-3);
  EXPECT_NEAR(d.trace_estimate, 1.0 / 3.0, 1e-3);
  // alpha_k = 2 / (pi^2 k^2)
  for (int k = 1; k <= 3; ++k) {
    EXPECT_NEAR(d.eigenvalues[k - 1], 2.0 / (std::numbers::pi * std::numbers::pi * k * k), 1e-4);
  }
}

TEST(Mercer, EigenvaluesDescendingAndAboveThreshold) {
  const auto d = nystrom_decompose(WeightKernel::bartlett(), 200);
  for (std::size_t i = 0; i < d.eigenvalues.size(); ++i) {
    EXPECT_GT(d.eigenvalues[i], kEigenvalueThreshold);
    if (i > 0) EXPECT_LE(d.eigenvalues[i], d.eigenvalues[i - 1]);
  }
  EXPECT_GE(d.kept_trace_fraction, kDefaultTraceFraction);
}

TEST(Mercer, EigenfunctionsOrthonormal) {
  const int m = 300;
  const auto d = nystrom_decompose(WeightKernel::bartlett(), m);
  for (std::size_t a = 0; a < 5; ++a) {
    for (std::size_t b = 0; b < 5; ++b) {
      double ip = 0.0;
      for (int k = 0; k < m; ++k) ip += d.eigenfunctions[a][k] * d.eigenfunctions[b][k];
      EXPECT_NEAR(ip / m, a == b ? 1.0 : 0.0, 1e-10);
    }
  }
}

TEST(Mercer, EigenfunctionsIntegrateToZero) {
  // Rows of rho* integrate to zero, so every eigenfunction is orthogonal to constants.
  const int m = 500;
  const auto d = nystrom_decompose(WeightKernel::bartlett(), m);
  for (std::size_t a = 0; a < 10; ++a) {
    const double mean =
        std::accumulate(d.eigenfunctions[a].begin(), d.eigenfunctions[a].end(), 0.0) / m;
    EXPECT_NEAR(mean, 0.0, 1e-6);
  }
}

TEST(Mercer, TruncatedKernelIsNotPositive) {
  const auto k = WeightKernel::truncated();
  EXPECT_THROW(nystrom_decompose(k, 500), KernelNotPositiveError);
  const auto report = positive_definiteness_report(k, 500);
  EXPECT_FALSE(report.pass);
  EXPECT_LT(report.min_eigenvalue, -0.05);
  EXPECT_TRUE(positive_definiteness_report(WeightKernel::bartlett(), 500).pass);
}

TEST(Mercer, ArgumentChecks) {
  EXPECT_THROW(nystrom_decompose(WeightKernel::bartlett(), 20), DomainError);
  EXPECT_THROW(nystrom_decompose(WeightKernel::bartlett(), 100, 0.5), DomainError);
  EXPECT_THROW(nystrom_decompose(WeightKernel::bartlett(), 100, 1.1), DomainError);
}

TEST(Mercer, JsonRoundTrip) {
  const auto d = nystrom_decompose(WeightKernel::bartlett(), 100);
  const auto back = mercer_from_json(to_json(d));
  EXPECT_EQ(back.kernel_name, d.kernel_name);
  EXPECT_EQ(back.grid_size, d.grid_size);
  ASSERT_EQ(back.eigenvalues.size(), d.eigenvalues.size());
  for (std::size_t i = 0; i < d.eigenvalues.size(); ++i) {
    EXPECT_EQ(back.eigenvalues[i], d.eigenvalues[i]);
  }
  EXPECT_TRUE(back.eigenfunctions.empty());
}

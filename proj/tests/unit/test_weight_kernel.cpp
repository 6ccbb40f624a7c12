#include <gtest/gtest.h>

#include <cmath>

#include "amcci/errors.hpp"
#include "amcci/mercer.hpp"
#include "amcci/weight_kernel.hpp"
#include "oracles.hpp"

using namespace amcci;

namespace {

// Parzen kernel, piecewise cubic with a knot at 1/2.
WeightKernel parzen() {
  return WeightKernel::custom(
      "parzen",
      [](double u) {
        const double a = std::abs(u);
        if (a <= 0.5) return 1.0 - 6.0 * a * a + 6.0 * a * a * a;
        return 2.0 * std::pow(1.0 - a, 3);
      },
      {0.5});
}

std::vector<double> unit_grid(int m) {
  std::vector<double> g(m + 1);
  for (int i = 0; i <= m; ++i) g[i] = static_cast<double>(i) / m;
  return g;
}

}  // namespace

TEST(WeightKernel, BartlettValues) {
  const auto k = WeightKernel::bartlett();
  EXPECT_DOUBLE_EQ(k.w(0.0), 1.0);
  EXPECT_DOUBLE_EQ(k.w(0.25), 0.75);
  EXPECT_DOUBLE_EQ(k.w(-0.25), 0.75);
  EXPECT_DOUBLE_EQ(k.w(1.0), 0.0);
  EXPECT_DOUBLE_EQ(k.w(3.0), 0.0);
  EXPECT_NEAR(k.integral_g(), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(k.g(0.0), 0.5, 1e-14);
  EXPECT_NEAR(k.g(0.5), 0.75, 1e-14);
}

TEST(WeightKernel, QuadraticValues) {
  const auto k = WeightKernel::quadratic();
  EXPECT_DOUBLE_EQ(k.w(0.5), 0.75);
  EXPECT_NEAR(k.integral_g(), 5.0 / 6.0, 1e-14);
  EXPECT_NEAR(k.g(0.0), 2.0 / 3.0, 1e-14);
}

TEST(WeightKernel, ClosedFormRhoMatchesIndependentFormula) {
  const auto b = WeightKernel::bartlett();
  const auto q = WeightKernel::quadratic();
  const auto grid = unit_grid(40);
  for (double s : grid) {
    for (double t : grid) {
      EXPECT_NEAR(b.rho_star(s, t), oracle::bartlett_rho(s, t), 1e-14);
      EXPECT_NEAR(q.rho_star(s, t), oracle::quadratic_rho(s, t), 1e-14);
    }
  }
}

TEST(WeightKernel, ClosedFormAgreesWithGenericFormula) {
  for (const auto& k : {WeightKernel::bartlett(), WeightKernel::quadratic()}) {
    const auto grid = unit_grid(100);
    double worst = 0.0;
    for (double s : grid) {
      for (double t : grid) worst = std::max(worst, std::abs(k.rho_star(s, t) - k.rho_star_generic(s, t)));
    }
    EXPECT_LE(worst, 1e-10) << k.name();
  }
}

TEST(WeightKernel, RhoStarSymmetric) {
  for (const auto& k : {WeightKernel::bartlett(), WeightKernel::quadratic(), parzen()}) {
    const auto grid = unit_grid(50);
    for (double s : grid) {
      for (double t : grid) EXPECT_NEAR(k.rho_star(s, t), k.rho_star(t, s), 1e-12) << k.name();
    }
  }
}

TEST(WeightKernel, RhoStarRowsIntegrateToZero) {
  // Midpoint rule on a fine grid; the Bartlett kink on the diagonal limits
  // the rule to O(h^2), so use h = 1/20000.
  constexpr int m = 20000;
  const auto pts = midpoint_grid(m);
  for (const auto& k : {WeightKernel::bartlett(), WeightKernel::quadratic()}) {
    for (double s : {0.0, 0.13, 0.5, 0.77, 1.0}) {
      double sum = 0.0;
      for (double t : pts) sum += k.rho_star(s, t);
      EXPECT_NEAR(sum / m, 0.0, 1e-8) << k.name() << " s=" << s;
    }
  }
}

TEST(WeightKernel, CustomKernelMatchesBuiltinThroughQuadrature) {
  const auto custom = WeightKernel::custom("bartlett-copy", [](double u) { return 1.0 - std::abs(u); });
  const auto builtin = WeightKernel::bartlett();
  EXPECT_EQ(custom.id(), KernelId::Custom);
  EXPECT_FALSE(custom.has_closed_rho_star());
  EXPECT_NEAR(custom.integral_g(), builtin.integral_g(), 1e-12);
  for (double t : {0.0, 0.1, 0.5, 0.9, 1.0}) EXPECT_NEAR(custom.g(t), builtin.g(t), 1e-12);
  EXPECT_NEAR(custom.rho_star(0.2, 0.7), builtin.rho_star(0.2, 0.7), 1e-12);
}

TEST(WeightKernel, ParzenIntegralAgainstDirectQuadrature) {
  const auto k = parzen();
  // G = 2 int_0^1 w(v)(1 - v) dv, evaluated with a fine midpoint rule.
  constexpr int m = 200000;
  double direct = 0.0;
  for (int i = 0; i < m; ++i) {
    const double v = (i + 0.5) / m;
    direct += k.w(v) * (1.0 - v);
  }
  EXPECT_NEAR(k.integral_g(), 2.0 * direct / m, 1e-9);
}

TEST(WeightKernel, CustomValidationRejectsBadShapes) {
  EXPECT_THROW(WeightKernel::custom("odd", [](double u) { return 1.0 - u; }), DomainError);
  EXPECT_THROW(WeightKernel::custom("big", [](double u) { return 2.0 * (1.0 - std::abs(u)); }),
               DomainError);
  EXPECT_THROW(WeightKernel::custom("flat", [](double) { return 1.0; }), DomainError);
  EXPECT_THROW(WeightKernel::custom("low", [](double u) { return 0.5 * (1.0 - std::abs(u)); }),
               DomainError);
  EXPECT_THROW(WeightKernel::custom("none", nullptr), DomainError);
}

TEST(WeightKernel, GDomain) {
  const auto k = WeightKernel::bartlett();
  EXPECT_THROW(k.g(-0.1), DomainError);
  EXPECT_THROW(k.g(1.1), DomainError);
}

TEST(WeightKernel, FromName) {
  EXPECT_EQ(WeightKernel::from_name("bartlett").id(), KernelId::Bartlett);
  EXPECT_EQ(WeightKernel::from_name("quadratic").id(), KernelId::Quadratic);
  EXPECT_EQ(WeightKernel::from_name("truncated").name(), "truncated");
  EXPECT_THROW(WeightKernel::from_name("parzen"), DomainError);
}

TEST(WeightKernel, MatrixMatchesPointwise) {
  const auto k = parzen();
  const std::vector<double> pts = {0.05, 0.3, 0.5, 0.81};
  const auto r = rho_star_matrix(k, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      EXPECT_NEAR(r(i, j), k.rho_star(pts[i], pts[j]), 1e-12);
    }
  }
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "amcci/errors.hpp"
#include "amcci/experiments.hpp"

using namespace amcci;

namespace {

const std::map<std::string, FixedBQuantileTable>& tables() {
  static const auto t = [] {
    std::map<std::string, FixedBQuantileTable> m;
    const std::vector<double> levels = {0.025};
    m["bartlett"] = quantile_table(WeightKernel::bartlett(), levels, 200000, 1);
    m["quadratic"] = quantile_table(WeightKernel::quadratic(), levels, 200000, 1);
    return m;
  }();
  return t;
}

}  // namespace

TEST(Wasserstein, EqualSizeIsSortedCoupling) {
  std::vector<double> a = {3.0, -1.0, 2.0, 0.5};
  std::vector<double> b = {0.0, 4.0, 1.0, 1.5};
  std::vector<double> sa = a;
  std::vector<double> sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double want = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) want += std::abs(sa[i] - sb[i]);
  EXPECT_NEAR(wasserstein1(a, b), want / 4.0, 1e-14);
}

TEST(Wasserstein, UnequalSizes) {
  // F_a steps at 0 (1/2) and 1 (1); F_b at 0.5 (1/3) ... computed by hand.
  EXPECT_NEAR(wasserstein1({0.0, 1.0}, {0.5, 0.5, 2.0}), 0.5 * 0.5 + (2.0 / 3.0 - 0.5) * 0.5 + (1.0 - 2.0 / 3.0) * 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(wasserstein1({1.0, 2.0}, {1.0, 2.0}), 0.0);
  EXPECT_NEAR(wasserstein1({0.0, 1.0, 2.0}, {5.0, 6.0, 7.0}), 5.0, 1e-14);
  EXPECT_THROW(wasserstein1({}, {1.0}), DomainError);
}

TEST(Wasserstein, SymmetricAndNonNegative) {
  const std::vector<double> a = {0.3, 0.9, -2.0, 5.0, 1.1};
  const std::vector<double> b = {1.0, 0.2, 0.0};
  EXPECT_GE(wasserstein1(a, b), 0.0);
  EXPECT_NEAR(wasserstein1(a, b), wasserstein1(b, a), 1e-14);
}

TEST(Ols, Slope) {
  const std::vector<double> x = {1, 2, 3, 4};
  const std::vector<double> y = {3, 5, 7, 9};
  EXPECT_DOUBLE_EQ(ols_slope(x, y), 2.0);
  const std::vector<double> same = {1, 1};
  EXPECT_THROW(ols_slope(same, same), DomainError);
}

TEST(Models, NamesRoundTrip) {
  for (auto k : {ModelKind::Iid, ModelKind::Ar1, ModelKind::Toy, ModelKind::Logistic, ModelKind::Poisson}) {
    EXPECT_EQ(model_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(model_kind_from_string("garch"), ConfigError);
}

TEST(Models, JsonRoundTrip) {
  auto m = ModelSpec::make(ModelKind::Poisson, 5000, 1000);
  m.poisson_ne = 2;
  m.poisson_np = 5;
  m.data_seed = 9;
  const auto back = model_spec_from_json(to_json(m));
  EXPECT_EQ(to_json(back), to_json(m));
  CoverageConfig c;
  c.model = ModelSpec::make(ModelKind::Ar1, 1000, 0);
  c.model.rho = 0.3;
  c.truth = 0.0;
  EXPECT_EQ(to_json(coverage_config_from_json(to_json(c))), to_json(c));
}

TEST(Models, SimulatePathLengthsAndDeterminism) {
  for (auto k : {ModelKind::Iid, ModelKind::Ar1, ModelKind::Toy, ModelKind::Logistic}) {
    auto m = ModelSpec::make(k, 3000, 500);
    m.rho = 0.5;
    const auto a = simulate_path(m, 4);
    EXPECT_EQ(a.size(), 2500u) << to_string(k);
    EXPECT_EQ(a, simulate_path(m, 4)) << to_string(k);
  }
  auto p = ModelSpec::make(ModelKind::Poisson, 600, 100);
  p.poisson_ne = 2;
  p.poisson_np = 5;
  EXPECT_EQ(simulate_path(p, 1).size(), 500u);
}

TEST(Models, Validation) {
  auto m = ModelSpec::make(ModelKind::Ar1, 100, 0);
  m.rho = 1.0;
  EXPECT_THROW(m.validate(), ConfigError);
  m = ModelSpec::make(ModelKind::Logistic, 100, 0);
  m.coordinate = 4;
  EXPECT_THROW(m.validate(), ConfigError);
  m = ModelSpec::make(ModelKind::Iid, 100, 95);
  EXPECT_THROW(m.validate(), ConfigError);
}

TEST(Coverage, ReportStructureAndCounts) {
  CoverageConfig c;
  c.model = ModelSpec::make(ModelKind::Ar1, 2000, 0);
  c.model.rho = 0.5;
  c.deltas = {0.2, 0.5};
  c.kernels = {"bartlett", "quadratic"};
  c.replications = 50;
  c.base_seed = 3;
  const auto r = coverage_study(c, tables());
  ASSERT_EQ(r.rows.size(), 6u);
  EXPECT_EQ(r.replication_seeds.size(), 50u);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.replications, 50u);
    EXPECT_LE(row.covered + row.miss_flags, 50u);
    EXPECT_GE(row.coverage, 0.0);
    EXPECT_LE(row.coverage, 1.0);
    EXPECT_NEAR(row.coverage_se, std::sqrt(row.coverage * (1 - row.coverage) / 50.0), 1e-15);
    EXPECT_DOUBLE_EQ(row.coverage, row.covered / 50.0);
  }
  ASSERT_NE(r.find("fixedb", "quadratic"), nullptr);
  ASSERT_NE(r.find("classical", "bartlett", 0.5), nullptr);
  EXPECT_EQ(r.find("classical", "bartlett", 0.7), nullptr);
  const auto* best = r.best_classical("bartlett", 0.95);
  ASSERT_NE(best, nullptr);
  EXPECT_EQ(best->method, "classical");
  const auto csv = to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "model,method,kernel,delta,K,n,burnin,coverage,coverage_se,mean_halfwidth,halfwidth_se,miss_flags");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}

TEST(Coverage, WorkerCountDoesNotChangeOutput) {
  CoverageConfig c;
  c.model = ModelSpec::make(ModelKind::Toy, 4000, 500);
  c.deltas = {0.3, 0.6};
  c.replications = 24;
  c.base_seed = 5;
  c.workers = 1;
  const auto one = to_csv(coverage_study(c, tables()));
  c.workers = 3;
  EXPECT_EQ(to_csv(coverage_study(c, tables())), one);
}

TEST(Coverage, MissingTableIsConfigError) {
  CoverageConfig c;
  c.model = ModelSpec::make(ModelKind::Iid, 100, 0);
  c.kernels = {"bartlett"};
  c.replications = 2;
  EXPECT_THROW(coverage_study(c, {}), ConfigError);
}

TEST(Coverage, IidFixedBNearNominal) {
  CoverageConfig c;
  c.model = ModelSpec::make(ModelKind::Iid, 4096, 0);
  c.deltas = {};
  c.replications = 500;
  c.base_seed = 17;
  const auto r = coverage_study(c, tables());
  const auto* row = r.find("fixedb", "bartlett");
  ASSERT_NE(row, nullptr);
  EXPECT_GE(row->coverage, 0.92);
  EXPECT_LE(row->coverage, 0.98);
}

TEST(Coverage, Ar1SmallBandwidthUndercovers) {
  CoverageConfig c;
  c.model = ModelSpec::make(ModelKind::Ar1, 4096, 0);
  c.model.rho = 0.9;
  c.deltas = {0.1};
  c.include_fixedb = false;
  c.replications = 500;
  c.base_seed = 19;
  const auto r = coverage_study(c, tables());
  EXPECT_LT(r.rows[0].coverage, 0.93);
}

TEST(Rate, SmallStudyShapes) {
  RateConfig c;
  c.n_grid = {256, 512, 1024};
  c.replications = 40;
  c.reference_draws = 5000;
  c.nystrom_grid = 200;
  c.base_seed = 2;
  const auto r = rate_study(c);
  ASSERT_EQ(r.rows.size(), 9u);
  for (const auto& row : r.rows) {
    EXPECT_GE(row.rmse, 0.0);
    if (row.rule == "n") {
      EXPECT_GE(row.wasserstein, 0.0);
    } else {
      EXPECT_TRUE(std::isnan(row.wasserstein));
    }
  }
  EXPECT_TRUE(std::isfinite(r.slope("n^(1/3)")));
  c.workers = 1;
  const auto one = to_csv(rate_study(c));
  c.workers = 3;
  EXPECT_EQ(to_csv(rate_study(c)), one);
  const auto csv = to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "rho,n,rule,R,rmse,slope_rule,wasserstein");
}

TEST(Rate, Validation) {
  RateConfig c;
  c.n_grid = {1024, 512, 2048};
  EXPECT_THROW(rate_study(c), ConfigError);
  c.n_grid = {512, 1024};
  EXPECT_THROW(rate_study(c), ConfigError);
  c = RateConfig{};
  c.rho = 1.0;
  EXPECT_THROW(rate_study(c), ConfigError);
}

TEST(ToyStudy, TwoStableLimitsAtLevelThirty) {
  ToyStudyConfig c;
  c.n_seeds = 20;
  c.sampler.target_rate = 0.30;
  c.base_seed = 11;
  const auto r = toy_multilimit_study(c);
  ASSERT_EQ(r.roots.size(), 3u);
  EXPECT_TRUE(r.all_near_root());
  EXPECT_GE(r.clusters.size(), 2u);
  EXPECT_TRUE(r.clusters_separated());
  for (const auto& cl : r.clusters) EXPECT_NE(cl.root_index, 1);  // middle root is unstable
}

TEST(ToyStudy, SingleLimitAtLevelTwentyThree) {
  ToyStudyConfig c;
  c.n_seeds = 6;
  c.sampler.n_total = 200000;
  const auto r = toy_multilimit_study(c);
  ASSERT_EQ(r.roots.size(), 1u);
  EXPECT_LE(r.clusters.size(), 1u);
  EXPECT_FALSE(r.clusters_separated());
}

TEST(ToyStudy, WorkerInvariance) {
  ToyStudyConfig c;
  c.n_seeds = 4;
  c.sampler.n_total = 20000;
  c.workers = 1;
  const auto a = to_csv(toy_multilimit_study(c));
  c.workers = 2;
  EXPECT_EQ(to_csv(toy_multilimit_study(c)), a);
}

TEST(ConfigDigest, StableAndSensitive) {
  const nlohmann::json a = {{"x", 1}};
  const nlohmann::json b = {{"x", 2}};
  EXPECT_EQ(config_digest(a), config_digest(a));
  EXPECT_NE(config_digest(a), config_digest(b));
  EXPECT_EQ(config_digest(a).size(), 16u);
}

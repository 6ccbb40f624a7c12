#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "amcci/errors.hpp"
#include "amcci/poisson_re.hpp"

using namespace amcci;

TEST(PoissonRe, ParameterCount) {
  EXPECT_EQ(poisson_parameter_count(3, 27), 113);
  EXPECT_EQ(poisson_parameter_count(2, 5), 19);
}

TEST(PoissonRe, SyntheticData) {
  const auto d = synth_poisson_data(3, 27, {}, 4);
  EXPECT_EQ(d.ne, 3);
  EXPECT_EQ(d.np, 27);
  ASSERT_EQ(d.y.size(), 81u);
  EXPECT_DOUBLE_EQ(d.baseline[0], 50.0);
  EXPECT_DOUBLE_EQ(d.baseline[1], 100.0);
  EXPECT_DOUBLE_EQ(d.baseline[2], 150.0);
  EXPECT_DOUBLE_EQ(d.baseline[3], 50.0);
  for (double y : d.y) EXPECT_EQ(y, std::floor(y));
  const auto again = synth_poisson_data(3, 27, {}, 4);
  EXPECT_EQ(d.y, again.y);
}

TEST(PoissonRe, DataValidation) {
  auto d = synth_poisson_data(2, 5, {}, 1);
  d.y[0] = -1.0;
  EXPECT_THROW(d.validate(), DomainError);
  d = synth_poisson_data(2, 5, {}, 1);
  d.y[0] = 1.5;
  EXPECT_THROW(d.validate(), DomainError);
  d = synth_poisson_data(2, 5, {}, 1);
  d.baseline[2] = 0.0;
  EXPECT_THROW(d.validate(), DomainError);
  d = synth_poisson_data(2, 5, {}, 1);
  d.y.pop_back();
  EXPECT_THROW(d.validate(), DomainError);
  EXPECT_THROW(synth_poisson_data(1, 5, {}, 1), DomainError);
  EXPECT_THROW(synth_poisson_data(2, 2, {}, 1), DomainError);
}

TEST(PoissonRe, SigmaBetaDrawMatchesInverseGammaMoments) {
  std::vector<double> beta(27);
  for (std::size_t i = 0; i < beta.size(); ++i) beta[i] = 0.1 * (static_cast<double>(i) - 13.0);
  const double shape = 0.5 * (27 - 2);
  const double scale = 0.5 * std::inner_product(beta.begin(), beta.end(), beta.begin(), 0.0);
  const double mean = scale / (shape - 1.0);
  const double var = scale * scale / ((shape - 1.0) * (shape - 1.0) * (shape - 2.0));
  Rng rng(5);
  constexpr int N = 100000;
  double sum = 0.0;
  for (int i = 0; i < N; ++i) sum += draw_sigma2_beta(beta, rng);
  EXPECT_NEAR(sum / N, mean, 3.0 * std::sqrt(var / N));
}

TEST(PoissonRe, SigmaEpsDrawMatchesInverseGammaMoments) {
  std::vector<double> eps(81, 0.3);
  const double shape = 0.5 * (81 - 2);
  const double scale = 0.5 * 81 * 0.09;
  const double mean = scale / (shape - 1.0);
  const double var = scale * scale / ((shape - 1.0) * (shape - 1.0) * (shape - 2.0));
  Rng rng(6);
  constexpr int N = 100000;
  double sum = 0.0;
  for (int i = 0; i < N; ++i) sum += draw_sigma2_eps(eps, rng);
  EXPECT_NEAR(sum / N, mean, 3.0 * std::sqrt(var / N));
}

TEST(PoissonRe, MuDrawIsLogGamma) {
  const auto d = synth_poisson_data(2, 5, {}, 3);
  PoissonReState s;
  s.alpha = {0.2, -0.2};
  s.beta = {0.1, 0.0, -0.1, 0.2, 0.0};
  s.eps.assign(10, 0.05);
  double shape = 0.0;
  double rate = 0.0;
  for (int e = 0; e < 2; ++e) {
    for (int p = 0; p < 5; ++p) {
      shape += d.y_at(e, p);
      rate += d.n_at(e, p) * std::exp(s.alpha[e] + s.beta[p] + s.eps[e * 5 + p]);
    }
  }
  Rng rng(7);
  constexpr int N = 100000;
  double sum = 0.0;
  for (int i = 0; i < N; ++i) sum += std::exp(draw_mu(d, s, rng));
  const double mean = shape / rate;
  EXPECT_NEAR(sum / N, mean, 3.0 * std::sqrt(shape) / rate / std::sqrt(N));
}

TEST(PoissonRe, AdaptiveScalesHitTargetRate) {
  const auto d = synth_poisson_data(2, 5, {}, 11);
  auto cfg = poisson_default_config();
  cfg.n_total = 60000;
  cfg.burn_in = 10000;
  const auto out = poisson_re_gibbs(d, cfg, 12);
  ASSERT_EQ(out.last_half_acceptance.size(), 1u + 5u + 10u);
  for (std::size_t j = 0; j < out.last_half_acceptance.size(); ++j) {
    EXPECT_GE(out.last_half_acceptance[j], 0.15) << j;
    EXPECT_LE(out.last_half_acceptance[j], 0.31) << j;
  }
  EXPECT_EQ(out.run.h_path.size(), 50000u);
  double alpha_sum = 0.0;
  for (double a : out.final_state.alpha) alpha_sum += a;
  EXPECT_NEAR(alpha_sum, 0.0, 1e-12);
  EXPECT_GT(out.final_state.sigma2_beta, 0.0);
  EXPECT_GT(out.final_state.sigma2_eps, 0.0);
}

TEST(PoissonRe, FrozenScalesStayAtInitialValue) {
  const auto d = synth_poisson_data(2, 5, {}, 11);
  auto cfg = poisson_default_config();
  cfg.n_total = 2000;
  cfg.burn_in = 0;
  cfg.adapt = false;
  const auto out = poisson_re_gibbs(d, cfg, 1);
  for (double ls : out.log_scales) EXPECT_DOUBLE_EQ(ls, -2.0);
  for (double t : out.run.theta_trace) EXPECT_DOUBLE_EQ(t, -2.0);
}

TEST(PoissonRe, Deterministic) {
  const auto d = synth_poisson_data(3, 6, {}, 2);
  auto cfg = poisson_default_config();
  cfg.n_total = 3000;
  cfg.burn_in = 500;
  EXPECT_EQ(poisson_re_gibbs(d, cfg, 4).run.h_path, poisson_re_gibbs(d, cfg, 4).run.h_path);
  EXPECT_NE(poisson_re_gibbs(d, cfg, 4).run.h_path, poisson_re_gibbs(d, cfg, 5).run.h_path);
}

TEST(PoissonRe, PosteriorMeanNearGeneratingValue) {
  const auto d = synth_poisson_data(3, 27, {}, 20);
  auto cfg = poisson_default_config();
  cfg.n_total = 40000;
  cfg.burn_in = 10000;
  const auto out = poisson_re_gibbs(d, cfg, 3);
  const double mean = std::accumulate(out.run.h_path.begin(), out.run.h_path.end(), 0.0) /
                      static_cast<double>(out.run.h_path.size());
  EXPECT_TRUE(std::isfinite(mean));
  // Posterior sd of alpha_1 is about sqrt(0.1 / 27) + data noise; allow a wide band.
  EXPECT_NEAR(mean, 0.35, 0.25);
}

TEST(PoissonRe, ReferenceMeanReproducibleAcrossSeeds) {
  const auto d = synth_poisson_data(3, 27, {}, 1);
  auto cfg = poisson_default_config();
  cfg.n_total = 1000000;
  double means[2];
  for (int s = 0; s < 2; ++s) {
    const auto out = poisson_re_gibbs(d, cfg, static_cast<std::uint64_t>(s + 1));
    means[s] = std::accumulate(out.run.h_path.begin(), out.run.h_path.end(), 0.0) /
               static_cast<double>(out.run.h_path.size());
    ASSERT_TRUE(std::isfinite(means[s]));
  }
  EXPECT_LT(std::abs(means[0] - means[1]), 1e-3) << means[0] << " " << means[1];
}

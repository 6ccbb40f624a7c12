#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "amcci/chains.hpp"
#include "amcci/seed.hpp"

namespace amcci {

// Poisson regression with random effects:
//   y_ep ~ Poisson(n_ep exp(mu + alpha_e + beta_p + eps_ep)),
//   beta_p ~ N(0, s2_beta), eps_ep ~ N(0, s2_eps), sum_e alpha_e = 0,
// flat priors on (mu, alpha, s2_beta, s2_eps).

struct PoissonReData {
  int ne = 0;
  int np = 0;
  /// Row-major N_e x N_p: entry (e, p) at e * np + p.
  std::vector<double> y;
  std::vector<double> baseline;

  double y_at(int e, int p) const { return y[static_cast<std::size_t>(e) * np + p]; }
  double n_at(int e, int p) const { return baseline[static_cast<std::size_t>(e) * np + p]; }
  /// Throws DomainError on bad shapes, negative or non-integer counts,
  /// non-positive baselines, ne < 2 or np < 3.
  void validate() const;
};

struct PoissonReParams {
  double alpha1 = 0.35;
  double alpha2 = 0.15;
  double mu = -1.0;
  double sigma2_eps = 0.1;
  double sigma2_beta = 0.3;
};

/// Free alphas are (alpha1, alpha2, 0, ...) and the last one closes the sum;
/// baselines cycle over {50, 100, 150}.
PoissonReData synth_poisson_data(int ne, int np, const PoissonReParams& params, std::uint64_t seed);

struct PoissonReState {
  double mu = 0.0;
  std::vector<double> alpha;  ///< all N_e entries, summing to zero
  std::vector<double> beta;
  std::vector<double> eps;    ///< row-major like the data
  double sigma2_eps = 1.0;
  double sigma2_beta = 1.0;
};

/// Number of sampled scalars: mu, N_e - 1 alphas, N_p betas, N_e N_p eps, 2 variances.
int poisson_parameter_count(int ne, int np);

/// IG(0.5 (N_e N_p - 2), 0.5 sum eps^2).
double draw_sigma2_eps(std::span<const double> eps, Rng& rng);
/// IG(0.5 (N_p - 2), 0.5 sum beta^2).
double draw_sigma2_beta(std::span<const double> beta, Rng& rng);
/// log G with G ~ Gamma(sum y, rate sum n exp(alpha + beta + eps)).
double draw_mu(const PoissonReData& data, const PoissonReState& state, Rng& rng);

/// Defaults: 60000 iterations, 10000 burn-in, log scales start at -2 and
/// stay in [-10, 3].
SamplerConfig poisson_default_config();

struct PoissonReRun {
  ChainRun run;  ///< h = alpha_1
  /// Per RWM coordinate (alphas, betas, eps in that order): acceptance
  /// fraction over the second half of the iterations.
  std::vector<double> last_half_acceptance;
  std::vector<double> log_scales;
  PoissonReState final_state;
};

/// Metropolis-within-Gibbs sweep: mu, free alphas, betas, eps, then both
/// variances. With config.adapt the per-coordinate log scales follow the
/// 0.23 Robbins-Monro rule.
PoissonReRun poisson_re_gibbs(const PoissonReData& data, const SamplerConfig& config,
                              std::uint64_t seed);

}  // namespace amcci

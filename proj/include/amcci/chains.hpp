#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "amcci/seed.hpp"

namespace amcci {

/// Output of one sampler run.
struct ChainRun {
  std::string model_id;
  std::uint64_t seed = 0;
  std::size_t n_total = 0;
  std::size_t burn_in = 0;
  /// h(X_k) for k = burn_in + 1 .. n_total.
  std::vector<double> h_path;
  /// One adaptation summary per iteration (toy: theta; RWM: log lambda;
  /// within-Gibbs: log scale of the first alpha coordinate).
  std::vector<double> theta_trace;
  /// Running acceptance fraction after each iteration.
  std::vector<double> accept_trace;
};

/// Robbins-Monro adaptation settings shared by the adaptive samplers.
/// Step size gamma_n = step_scale * (n + step_offset)^(-step_exponent).
struct SamplerConfig {
  std::size_t n_total = 100000;
  std::size_t burn_in = 0;
  double step_scale = 1.0;
  double step_exponent = 0.7;
  std::size_t step_offset = 0;
  double target_rate = 0.23;
  /// Sampler-specific meaning (toy: theta_0; RWM: log lambda_0). NaN picks
  /// the sampler default.
  double initial_param = std::numeric_limits<double>::quiet_NaN();
  double param_lower = 0.0;
  double param_upper = 0.0;
  /// Empty picks the sampler default.
  std::vector<double> initial_state;
  bool adapt = true;

  /// Throws ConfigError on kappa outside (0.5, 1], bad bounds or
  /// burn_in >= n_total.
  void validate() const;
  double step(std::size_t n) const;
};

nlohmann::json to_json(const SamplerConfig& c);
SamplerConfig sampler_config_from_json(const nlohmann::json& j);

// --- bimodal uniform toy target -------------------------------------------
//
// pi = 0.5 * 1_D with D = [-beta - 1, -beta] U [beta, beta + 1], beta = 3/4,
// explored by random-walk Metropolis with U(x - theta, x + theta) proposals.

inline constexpr double kToyBeta = 0.75;

bool toy_in_support(double x) noexcept;

/// Stationary acceptance probability a(theta) = E_pi |D cap [X-theta, X+theta]| / (2 theta),
/// exact piecewise-polynomial form. Domain error for theta <= 2 beta.
double toy_acceptance_rate(double theta);

/// All solutions of a(theta) = level on (2 beta, infinity), ascending, each
/// refined by bisection to |a - level| <= 1e-12.
std::vector<double> toy_rate_roots(double level);

/// Toy defaults: theta in [1.6, 40], theta_0 = 3, X_0 = 1.
SamplerConfig toy_default_config();

ChainRun toy_adaptive_rwm(const SamplerConfig& config, std::uint64_t seed);

// --- AR(1) oracle chain -----------------------------------------------------

/// X_{k+1} = rho X_k + sqrt(1 - rho^2) xi, X_0 ~ N(0, 1); h(x) = x and the
/// asymptotic variance is (1 + rho) / (1 - rho).
ChainRun ar1_chain(double rho, std::size_t n, std::uint64_t seed);
double ar1_asymptotic_variance(double rho);

// --- adaptive random-walk Metropolis ----------------------------------------

using LogDensity = std::function<double(const Eigen::VectorXd&)>;
using Observable = std::function<double(const Eigen::VectorXd&)>;

struct AdaptiveRwmRun {
  ChainRun run;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  double log_lambda = 0.0;
  std::size_t nonfinite_proposals = 0;
  /// Full kept state path when requested.
  std::vector<Eigen::VectorXd> states;
};

/// RWM defaults: log lambda in [-10, 10], lambda_0 = 2.38^2 / d, X_0 = 0,
/// step offset 100 so the first covariance updates do not erase Sigma_0 = I.
SamplerConfig rwm_default_config(int dim);

/// Gaussian proposals with covariance lambda_n (Sigma_n + 1e-6 I); mean,
/// covariance and log lambda follow Robbins-Monro recursions towards the
/// target covariance and acceptance rate. h defaults to the first coordinate.
AdaptiveRwmRun adaptive_rwm(const LogDensity& log_target, int dim, const SamplerConfig& config,
                            std::uint64_t seed, const Observable& h = {},
                            bool record_state = false);

// --- Bayesian logistic regression -------------------------------------------

struct LogisticData {
  Eigen::VectorXd y;
  Eigen::MatrixXd x;
  Eigen::VectorXd beta_true;  ///< empty when loaded from a file
};

/// log pi(beta) = sum_i [y_i x_i'beta - log(1 + exp(x_i'beta))] - |beta|^2 / (2 s^2)
class LogisticPosterior {
 public:
  LogisticPosterior(Eigen::VectorXd y, Eigen::MatrixXd x, double prior_sd = 20.0);
  int dim() const noexcept { return static_cast<int>(x_.cols()); }
  double operator()(const Eigen::VectorXd& beta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& beta) const;

 private:
  Eigen::VectorXd y_;
  Eigen::MatrixXd x_;
  double prior_sd_;
};

/// beta_j = (-1)^j j / d, j = 0..d-1.
Eigen::VectorXd default_logistic_beta(int d);
LogisticData synth_logistic_data(int n, int d, std::uint64_t seed);
LogisticData synth_logistic_data(int n, const Eigen::VectorXd& beta_true, std::uint64_t seed);
/// CSV with a header row; the column named `y` is the response and every
/// other column a covariate.
LogisticData load_logistic_csv(const std::string& text);

}  // namespace amcci

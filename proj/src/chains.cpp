#include "amcci/chains.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "amcci/errors.hpp"
#include "amcci/io.hpp"

namespace amcci {

namespace {

using Normal = boost::random::normal_distribution<double>;
using Uniform01 = boost::random::uniform_01<double>;

// CDF of V - U for independent U, V ~ U(0, 1) (triangular on [-1, 1]).
double triangular_cdf(double u) {
  if (u <= -1.0) return 0.0;
  if (u <= 0.0) return 0.5 * (1.0 + u) * (1.0 + u);
  if (u <= 1.0) return 1.0 - 0.5 * (1.0 - u) * (1.0 - u);
  return 1.0;
}

double running_fraction(std::size_t accepted, std::size_t n) {
  return static_cast<double>(accepted) / static_cast<double>(n);
}

double log1p_exp(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

void SamplerConfig::validate() const {
  if (n_total == 0) throw ConfigError("n_total must be positive");
  if (burn_in >= n_total) throw ConfigError("burn_in must be smaller than n_total");
  if (!(step_exponent > 0.5 && step_exponent <= 1.0)) {
    throw ConfigError("step exponent must lie in (0.5, 1]");
  }
  if (!(step_scale > 0.0) || !std::isfinite(step_scale)) throw ConfigError("step scale must be positive");
  if (!(target_rate > 0.0 && target_rate < 1.0)) throw ConfigError("target rate must lie in (0, 1)");
  if (!std::isfinite(param_lower) || !std::isfinite(param_upper) || !(param_lower < param_upper)) {
    throw ConfigError("adaptation bounds must be finite with lower < upper");
  }
}

double SamplerConfig::step(std::size_t n) const {
  return step_scale * std::pow(static_cast<double>(n + step_offset), -step_exponent);
}

nlohmann::json to_json(const SamplerConfig& c) {
  return {{"n_total", c.n_total},
          {"burn_in", c.burn_in},
          {"step_scale", c.step_scale},
          {"step_exponent", c.step_exponent},
          {"step_offset", c.step_offset},
          {"target_rate", c.target_rate},
          {"initial_param", std::isnan(c.initial_param) ? nlohmann::json() : nlohmann::json(c.initial_param)},
          {"param_lower", c.param_lower},
          {"param_upper", c.param_upper},
          {"initial_state", c.initial_state},
          {"adapt", c.adapt}};
}

SamplerConfig sampler_config_from_json(const nlohmann::json& j) {
  SamplerConfig c;
  c.n_total = j.at("n_total").get<std::size_t>();
  c.burn_in = j.at("burn_in").get<std::size_t>();
  c.step_scale = j.at("step_scale").get<double>();
  c.step_exponent = j.at("step_exponent").get<double>();
  c.step_offset = j.value("step_offset", std::size_t{0});
  c.target_rate = j.at("target_rate").get<double>();
  const auto& init = j.at("initial_param");
  c.initial_param = init.is_null() ? std::numeric_limits<double>::quiet_NaN() : init.get<double>();
  c.param_lower = j.at("param_lower").get<double>();
  c.param_upper = j.at("param_upper").get<double>();
  c.initial_state = j.at("initial_state").get<std::vector<double>>();
  c.adapt = j.at("adapt").get<bool>();
  return c;
}

// --- toy ----------------------------------------------------------------------

bool toy_in_support(double x) noexcept {
  const double a = std::abs(x);
  return a >= kToyBeta && a <= kToyBeta + 1.0;
}

double toy_acceptance_rate(double theta) {
  if (!(theta > 2.0 * kToyBeta)) {
    throw DomainError("toy acceptance rate needs theta > 2 beta = 1.5");
  }
  // a(theta) = (1 / 4 theta) sum over component pairs (I, J) of
  // |{(x, y) in I x J : |x - y| <= theta}|, each component of unit length.
  const std::array<double, 2> left = {-kToyBeta - 1.0, kToyBeta};
  double mass = 0.0;
  for (double li : left) {
    for (double lj : left) {
      const double d = lj - li;
      mass += triangular_cdf(theta - d) - triangular_cdf(-theta - d);
    }
  }
  return mass / (4.0 * theta);
}

std::vector<double> toy_rate_roots(double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("acceptance level must lie in (0, 1)");
  // Beyond theta = 2 beta + 2 every pair is within reach and a = 1 / theta.
  const double lo = 2.0 * kToyBeta;
  const double hi = 2.0 * kToyBeta + 2.0;
  constexpr int kScan = 20000;
  std::vector<double> roots;
  auto f = [level](double t) { return toy_acceptance_rate(t) - level; };
  double prev_t = lo + (hi - lo) / kScan;
  double prev_f = f(prev_t);
  if (prev_f == 0.0) roots.push_back(prev_t);
  for (int i = 2; i <= kScan; ++i) {
    const double t = lo + (hi - lo) * i / kScan;
    const double ft = f(t);
    if (ft == 0.0) {
      roots.push_back(t);
    } else if (prev_f != 0.0 && (prev_f < 0.0) != (ft < 0.0)) {
      double a = prev_t;
      double b = t;
      double fa = prev_f;
      for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if (fm == 0.0) {
          a = b = mid;
          break;
        }
        if ((fa < 0.0) == (fm < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_t = t;
    prev_f = ft;
  }
  if (1.0 / level > hi) roots.push_back(1.0 / level);
  return roots;
}

SamplerConfig toy_default_config() {
  SamplerConfig c;
  c.n_total = 1000000;
  c.initial_param = 3.0;
  c.param_lower = 1.6;
  c.param_upper = 40.0;
  c.initial_state = {1.0};
  return c;
}

ChainRun toy_adaptive_rwm(const SamplerConfig& config, std::uint64_t seed) {
  config.validate();
  if (config.param_lower <= 2.0 * kToyBeta) {
    throw ConfigError("toy theta bounds must lie above 2 beta = 1.5");
  }
  double theta = std::isnan(config.initial_param) ? 3.0 : config.initial_param;
  if (theta < config.param_lower || theta > config.param_upper) {
    throw ConfigError("initial theta outside the projection bounds");
  }
  double x = config.initial_state.empty() ? 1.0 : config.initial_state.front();
  if (!toy_in_support(x)) throw ConfigError("initial toy state outside the target support");

  ChainRun run;
  run.model_id = "toy";
  run.seed = seed;
  run.n_total = config.n_total;
  run.burn_in = config.burn_in;
  run.h_path.reserve(config.n_total - config.burn_in);
  run.theta_trace.reserve(config.n_total);
  run.accept_trace.reserve(config.n_total);

  Rng rng(seed);
  Uniform01 uniform;
  const double log_lo = std::log(config.param_lower);
  const double log_hi = std::log(config.param_upper);
  double log_theta = std::log(theta);
  std::size_t accepted = 0;
  for (std::size_t n = 1; n <= config.n_total; ++n) {
    const double y = x + theta * (2.0 * uniform(rng) - 1.0);
    const bool accept = toy_in_support(y);
    if (accept) {
      x = y;
      ++accepted;
    }
    if (config.adapt) {
      log_theta += config.step(n) * ((accept ? 1.0 : 0.0) - config.target_rate);
      log_theta = std::clamp(log_theta, log_lo, log_hi);
      theta = std::exp(log_theta);
    }
    run.theta_trace.push_back(theta);
    run.accept_trace.push_back(running_fraction(accepted, n));
    if (n > config.burn_in) run.h_path.push_back(x);
  }
  return run;
}

// --- AR(1) ---------------------------------------------------------------------

double ar1_asymptotic_variance(double rho) {
  if (!(std::abs(rho) < 1.0)) throw DomainError("AR(1) needs |rho| < 1");
  return (1.0 + rho) / (1.0 - rho);
}

ChainRun ar1_chain(double rho, std::size_t n, std::uint64_t seed) {
  if (!(std::abs(rho) < 1.0)) throw DomainError("AR(1) needs |rho| < 1");
  if (n == 0) throw DomainError("AR(1) chain length must be positive");
  ChainRun run;
  run.model_id = "ar1";
  run.seed = seed;
  run.n_total = n;
  run.h_path.resize(n);
  Rng rng(seed);
  Normal normal;
  const double innovation = std::sqrt(1.0 - rho * rho);
  double x = normal(rng);
  for (std::size_t k = 0; k < n; ++k) {
    run.h_path[k] = x;
    x = rho * x + innovation * normal(rng);
  }
  return run;
}

// --- adaptive RWM ----------------------------------------------------------------

SamplerConfig rwm_default_config(int dim) {
  SamplerConfig c;
  c.initial_param = std::log(2.38 * 2.38 / dim);
  c.param_lower = -10.0;
  c.param_upper = 10.0;
  c.step_offset = 100;
  return c;
}

AdaptiveRwmRun adaptive_rwm(const LogDensity& log_target, int dim, const SamplerConfig& config,
                            std::uint64_t seed, const Observable& h, bool record_state) {
  config.validate();
  if (dim < 1) throw ConfigError("dimension must be positive");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  if (!config.initial_state.empty()) {
    if (static_cast<int>(config.initial_state.size()) != dim) {
      throw ConfigError("initial state has the wrong dimension");
    }
    x = Eigen::Map<const Eigen::VectorXd>(config.initial_state.data(), dim);
  }
  double log_p = log_target(x);
  if (!std::isfinite(log_p)) throw DomainError("log target is not finite at the initial state");
  const auto observe = [&h](const Eigen::VectorXd& v) { return h ? h(v) : v[0]; };

  AdaptiveRwmRun out;
  ChainRun& run = out.run;
  run.model_id = "adaptive_rwm";
  run.seed = seed;
  run.n_total = config.n_total;
  run.burn_in = config.burn_in;
  run.h_path.reserve(config.n_total - config.burn_in);
  run.theta_trace.reserve(config.n_total);
  run.accept_trace.reserve(config.n_total);

  Rng rng(seed);
  Normal normal;
  Uniform01 uniform;
  Eigen::VectorXd mu = x;
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::MatrixXd jitter = 1e-6 * Eigen::MatrixXd::Identity(dim, dim);
  double log_lambda = std::isnan(config.initial_param) ? std::log(2.38 * 2.38 / dim)
                                                       : config.initial_param;
  log_lambda = std::clamp(log_lambda, config.param_lower, config.param_upper);
  Eigen::VectorXd xi(dim);
  std::size_t accepted = 0;

  for (std::size_t n = 1; n <= config.n_total; ++n) {
    Eigen::LLT<Eigen::MatrixXd> chol(sigma + jitter);
    for (int i = 0; i < dim; ++i) xi[i] = normal(rng);
    Eigen::VectorXd y = x + std::exp(0.5 * log_lambda) * Eigen::VectorXd(chol.matrixL() * xi);
    const double log_q = log_target(y);
    double accept_prob = 0.0;
    if (std::isfinite(log_q)) {
      accept_prob = log_q >= log_p ? 1.0 : std::exp(log_q - log_p);
    } else {
      ++out.nonfinite_proposals;
    }
    if (uniform(rng) < accept_prob) {
      x = std::move(y);
      log_p = log_q;
      ++accepted;
    }
    if (config.adapt) {
      const double gamma = config.step(n);
      const Eigen::VectorXd diff = x - mu;
      mu += gamma * diff;
      sigma += gamma * (diff * diff.transpose() - sigma);
      log_lambda += gamma * (accept_prob - config.target_rate);
      log_lambda = std::clamp(log_lambda, config.param_lower, config.param_upper);
    }
    run.theta_trace.push_back(log_lambda);
    run.accept_trace.push_back(running_fraction(accepted, n));
    if (n > config.burn_in) {
      run.h_path.push_back(observe(x));
      if (record_state) out.states.push_back(x);
    }
  }
  out.mean = mu;
  out.covariance = sigma;
  out.log_lambda = log_lambda;
  return out;
}

// --- logistic regression ----------------------------------------------------------

LogisticPosterior::LogisticPosterior(Eigen::VectorXd y, Eigen::MatrixXd x, double prior_sd)
    : y_(std::move(y)), x_(std::move(x)), prior_sd_(prior_sd) {
  if (y_.size() != x_.rows()) throw DomainError("response length does not match design rows");
  if (!(prior_sd_ > 0.0)) throw DomainError("prior standard deviation must be positive");
}

double LogisticPosterior::operator()(const Eigen::VectorXd& beta) const {
  if (beta.size() != x_.cols()) throw DomainError("coefficient vector has the wrong dimension");
  const Eigen::VectorXd eta = x_ * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y_[i] * eta[i] - log1p_exp(eta[i]);
  return ll - beta.squaredNorm() / (2.0 * prior_sd_ * prior_sd_);
}

Eigen::VectorXd LogisticPosterior::gradient(const Eigen::VectorXd& beta) const {
  if (beta.size() != x_.cols()) throw DomainError("coefficient vector has the wrong dimension");
  const Eigen::VectorXd eta = x_ * beta;
  Eigen::VectorXd resid(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) resid[i] = y_[i] - logistic(eta[i]);
  return x_.transpose() * resid - beta / (prior_sd_ * prior_sd_);
}

Eigen::VectorXd default_logistic_beta(int d) {
  Eigen::VectorXd beta(d);
  for (int j = 0; j < d; ++j) beta[j] = (j % 2 == 0 ? 1.0 : -1.0) * j / d;
  return beta;
}

LogisticData synth_logistic_data(int n, int d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw DomainError("logistic data needs n, d >= 1");
  return synth_logistic_data(n, default_logistic_beta(d), seed);
}

LogisticData synth_logistic_data(int n, const Eigen::VectorXd& beta_true, std::uint64_t seed) {
  const auto d = beta_true.size();
  if (n < 1 || d < 1) throw DomainError("logistic data needs n, d >= 1");
  Rng rng(seed);
  Normal normal;
  Uniform01 uniform;
  LogisticData data;
  data.x.resize(n, d);
  data.y.resize(n);
  data.beta_true = beta_true;
  for (int i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) data.x(i, j) = normal(rng);
  }
  for (int i = 0; i < n; ++i) {
    const double p = logistic(data.x.row(i).dot(beta_true));
    data.y[i] = uniform(rng) < p ? 1.0 : 0.0;
  }
  return data;
}

LogisticData load_logistic_csv(const std::string& text) {
  const auto csv = io::parse_csv(text);
  const auto it = std::find(csv.header.begin(), csv.header.end(), "y");
  if (it == csv.header.end()) throw std::runtime_error("logistic csv needs a column named y");
  const auto y_col = static_cast<std::size_t>(it - csv.header.begin());
  const auto n = static_cast<Eigen::Index>(csv.rows.size());
  const auto d = static_cast<Eigen::Index>(csv.header.size()) - 1;
  if (n == 0 || d == 0) throw std::runtime_error("logistic csv has no data");
  LogisticData data;
  data.y.resize(n);
  data.x.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < csv.header.size(); ++c) {
      const double v = std::stod(csv.rows[i][c]);
      if (c == y_col) {
        if (v != 0.0 && v != 1.0) throw std::runtime_error("response must be 0 or 1");
        data.y[i] = v;
      } else {
        data.x(i, col++) = v;
      }
    }
  }
  return data;
}

}  // namespace amcci

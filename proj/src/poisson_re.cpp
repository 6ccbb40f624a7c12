#include "amcci/poisson_re.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "amcci/errors.hpp"

namespace amcci {

namespace {

double inverse_gamma(double shape, double scale, Rng& rng) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw DomainError("inverse-gamma draw needs positive shape and scale");
  }
  boost::random::gamma_distribution<double> gamma(shape, 1.0);
  return scale / gamma(rng);
}

double sum_squares(std::span<const double> v) {
  return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

class Sampler {
 public:
  Sampler(const PoissonReData& data, const SamplerConfig& config, std::uint64_t seed)
      : d_(data), cfg_(config), rng_(seed) {
    const int ne = d_.ne;
    const int np = d_.np;
    s_.alpha.assign(ne, 0.0);
    s_.beta.resize(np);
    s_.eps.resize(static_cast<std::size_t>(ne) * np);
    for (auto& b : s_.beta) b = 0.1 * normal_(rng_);
    for (auto& e : s_.eps) e = 0.1 * normal_(rng_);
    s_.sigma2_beta = 1.0;
    s_.sigma2_eps = 1.0;
    const double ysum = std::accumulate(d_.y.begin(), d_.y.end(), 0.0);
    const double nsum = std::accumulate(d_.baseline.begin(), d_.baseline.end(), 0.0);
    s_.mu = std::log(std::max(ysum, 0.5) / nsum);

    n_coords_ = (ne - 1) + np + ne * np;
    const double init = std::isnan(cfg_.initial_param) ? -2.0 : cfg_.initial_param;
    log_scale_.assign(n_coords_, std::clamp(init, cfg_.param_lower, cfg_.param_upper));
    accepted_late_.assign(n_coords_, 0);
  }

  PoissonReRun run(std::uint64_t seed) {
    PoissonReRun out;
    ChainRun& run = out.run;
    run.model_id = "poisson_re";
    run.seed = seed;
    run.n_total = cfg_.n_total;
    run.burn_in = cfg_.burn_in;
    run.h_path.reserve(cfg_.n_total - cfg_.burn_in);
    run.theta_trace.reserve(cfg_.n_total);
    run.accept_trace.reserve(cfg_.n_total);

    const std::size_t half = cfg_.n_total / 2;
    std::size_t accepted_total = 0;
    for (std::size_t n = 1; n <= cfg_.n_total; ++n) {
      gamma_ = cfg_.step(n);
      count_ = n > half;
      accepted_now_ = 0;
      sweep();
      accepted_total += accepted_now_;
      run.theta_trace.push_back(log_scale_[0]);
      run.accept_trace.push_back(static_cast<double>(accepted_total) /
                                 (static_cast<double>(n) * n_coords_));
      if (n > cfg_.burn_in) run.h_path.push_back(s_.alpha[0]);
    }
    const double late = static_cast<double>(cfg_.n_total - half);
    out.last_half_acceptance.resize(n_coords_);
    for (int j = 0; j < n_coords_; ++j) out.last_half_acceptance[j] = accepted_late_[j] / late;
    out.log_scales = log_scale_;
    out.final_state = s_;
    return out;
  }

 private:
  double eta(int e, int p) const {
    return s_.alpha[e] + s_.beta[p] + s_.eps[static_cast<std::size_t>(e) * d_.np + p];
  }

  // Exposure-weighted Poisson log-likelihood change when eta moves by delta.
  double cell_delta(int e, int p, double delta, double scale_mu) const {
    const double old_eta = eta(e, p);
    return d_.y_at(e, p) * delta -
           d_.n_at(e, p) * scale_mu * (std::exp(old_eta + delta) - std::exp(old_eta));
  }

  bool metropolis(int coord, double log_ratio) {
    const double a = std::isfinite(log_ratio) ? std::min(1.0, std::exp(std::min(log_ratio, 0.0)))
                                              : 0.0;
    const bool accept = uniform_(rng_) < a;
    if (accept) {
      ++accepted_now_;
      if (count_) ++accepted_late_[coord];
    }
    if (cfg_.adapt) {
      double& ls = log_scale_[coord];
      ls = std::clamp(ls + gamma_ * (a - cfg_.target_rate), cfg_.param_lower, cfg_.param_upper);
    }
    return accept;
  }

  void sweep() {
    const int ne = d_.ne;
    const int np = d_.np;
    s_.mu = draw_mu(d_, s_, rng_);
    const double em = std::exp(s_.mu);
    int coord = 0;

    const int last = ne - 1;
    for (int k = 0; k < last; ++k, ++coord) {
      const double delta = std::exp(log_scale_[coord]) * normal_(rng_);
      double lr = 0.0;
      for (int p = 0; p < np; ++p) lr += cell_delta(k, p, delta, em) + cell_delta(last, p, -delta, em);
      if (metropolis(coord, lr)) {
        s_.alpha[k] += delta;
        s_.alpha[last] -= delta;
      }
    }

    for (int p = 0; p < np; ++p, ++coord) {
      const double delta = std::exp(log_scale_[coord]) * normal_(rng_);
      const double b = s_.beta[p];
      double lr = -((b + delta) * (b + delta) - b * b) / (2.0 * s_.sigma2_beta);
      for (int e = 0; e < ne; ++e) lr += cell_delta(e, p, delta, em);
      if (metropolis(coord, lr)) s_.beta[p] += delta;
    }

    for (int e = 0; e < ne; ++e) {
      for (int p = 0; p < np; ++p, ++coord) {
        const double delta = std::exp(log_scale_[coord]) * normal_(rng_);
        double& x = s_.eps[static_cast<std::size_t>(e) * np + p];
        const double lr = cell_delta(e, p, delta, em) -
                          ((x + delta) * (x + delta) - x * x) / (2.0 * s_.sigma2_eps);
        if (metropolis(coord, lr)) x += delta;
      }
    }

    s_.sigma2_eps = draw_sigma2_eps(s_.eps, rng_);
    s_.sigma2_beta = draw_sigma2_beta(s_.beta, rng_);
  }

  const PoissonReData& d_;
  const SamplerConfig& cfg_;
  Rng rng_;
  boost::random::normal_distribution<double> normal_;
  boost::random::uniform_01<double> uniform_;
  PoissonReState s_;
  int n_coords_ = 0;
  std::vector<double> log_scale_;
  std::vector<std::size_t> accepted_late_;
  double gamma_ = 0.0;
  bool count_ = false;
  std::size_t accepted_now_ = 0;
};

}  // namespace

void PoissonReData::validate() const {
  if (ne < 2 || np < 3) throw DomainError("Poisson model needs N_e >= 2 and N_p >= 3");
  const auto cells = static_cast<std::size_t>(ne) * np;
  if (y.size() != cells || baseline.size() != cells) {
    throw DomainError("Poisson data arrays must have N_e * N_p entries");
  }
  for (double v : y) {
    if (!(v >= 0.0) || v != std::floor(v)) throw DomainError("counts must be non-negative integers");
  }
  for (double v : baseline) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("baselines must be positive");
  }
  if (std::accumulate(y.begin(), y.end(), 0.0) <= 0.0) {
    throw DomainError("all counts are zero; the mu conditional is improper");
  }
}

int poisson_parameter_count(int ne, int np) { return 1 + (ne - 1) + np + ne * np + 2; }

PoissonReData synth_poisson_data(int ne, int np, const PoissonReParams& params, std::uint64_t seed) {
  if (ne < 2 || np < 3) throw DomainError("Poisson model needs N_e >= 2 and N_p >= 3");
  if (!(params.sigma2_eps > 0.0) || !(params.sigma2_beta > 0.0)) {
    throw DomainError("variances must be positive");
  }
  Rng rng(seed);
  boost::random::normal_distribution<double> normal;
  std::vector<double> alpha(ne, 0.0);
  alpha[0] = params.alpha1;
  if (ne > 2) alpha[1] = params.alpha2;
  alpha[ne - 1] = -std::accumulate(alpha.begin(), alpha.end() - 1, 0.0);
  std::vector<double> beta(np);
  for (auto& b : beta) b = std::sqrt(params.sigma2_beta) * normal(rng);

  PoissonReData d;
  d.ne = ne;
  d.np = np;
  const auto cells = static_cast<std::size_t>(ne) * np;
  d.y.resize(cells);
  d.baseline.resize(cells);
  constexpr double kBaselines[3] = {50.0, 100.0, 150.0};
  for (std::size_t i = 0; i < cells; ++i) d.baseline[i] = kBaselines[i % 3];
  for (int e = 0; e < ne; ++e) {
    for (int p = 0; p < np; ++p) {
      const auto i = static_cast<std::size_t>(e) * np + p;
      const double eps = std::sqrt(params.sigma2_eps) * normal(rng);
      const double rate = d.baseline[i] * std::exp(params.mu + alpha[e] + beta[p] + eps);
      boost::random::poisson_distribution<long long, double> pois(rate);
      d.y[i] = static_cast<double>(pois(rng));
    }
  }
  d.validate();
  return d;
}

double draw_sigma2_eps(std::span<const double> eps, Rng& rng) {
  return inverse_gamma(0.5 * (static_cast<double>(eps.size()) - 2.0), 0.5 * sum_squares(eps), rng);
}

double draw_sigma2_beta(std::span<const double> beta, Rng& rng) {
  return inverse_gamma(0.5 * (static_cast<double>(beta.size()) - 2.0), 0.5 * sum_squares(beta), rng);
}

double draw_mu(const PoissonReData& data, const PoissonReState& state, Rng& rng) {
  double shape = 0.0;
  double rate = 0.0;
  for (int e = 0; e < data.ne; ++e) {
    for (int p = 0; p < data.np; ++p) {
      const auto i = static_cast<std::size_t>(e) * data.np + p;
      shape += data.y[i];
      rate += data.baseline[i] * std::exp(state.alpha[e] + state.beta[p] + state.eps[i]);
    }
  }
  if (!(shape > 0.0) || !(rate > 0.0)) throw DomainError("mu conditional needs positive shape and rate");
  boost::random::gamma_distribution<double> gamma(shape, 1.0 / rate);
  return std::log(gamma(rng));
}

SamplerConfig poisson_default_config() {
  SamplerConfig c;
  c.n_total = 60000;
  c.burn_in = 10000;
  c.initial_param = -2.0;
  c.param_lower = -10.0;
  c.param_upper = 3.0;
  return c;
}

PoissonReRun poisson_re_gibbs(const PoissonReData& data, const SamplerConfig& config,
                              std::uint64_t seed) {
  data.validate();
  config.validate();
  Sampler sampler(data, config, seed);
  return sampler.run(seed);
}

}  // namespace amcci

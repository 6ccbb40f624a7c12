#include "amcci/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/random/normal_distribution.hpp>

#include "amcci/ci.hpp"
#include "amcci/errors.hpp"
#include "amcci/io.hpp"
#include "amcci/lagwindow.hpp"
#include "amcci/mercer.hpp"
#include "amcci/parallel.hpp"

namespace amcci {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> drop_burn_in(std::vector<double> path, std::size_t burn_in) {
  path.erase(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(burn_in));
  return path;
}

struct MeanSe {
  double mean = kNaN;
  double se = kNaN;
  double sd = kNaN;
};

MeanSe mean_se(std::span<const double> v) {
  MeanSe out;
  if (v.empty()) return out;
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  out.mean = m;
  if (v.size() < 2) return out;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  out.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  out.se = out.sd / std::sqrt(static_cast<double>(v.size()));
  return out;
}

std::string format_delta(double delta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", delta);
  return buf;
}

double rule_delta(std::string_view rule) {
  if (rule == kRateRules[0]) return 1.0 / 3.0;
  if (rule == kRateRules[1]) return 2.0 / 3.0;
  return 1.0;
}

}  // namespace

// --- models -----------------------------------------------------------------

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Iid:
      return "iid";
    case ModelKind::Ar1:
      return "ar1";
    case ModelKind::Toy:
      return "toy";
    case ModelKind::Logistic:
      return "logistic";
    case ModelKind::Poisson:
      return "poisson";
  }
  return "?";
}

ModelKind model_kind_from_string(std::string_view name) {
  for (auto k : {ModelKind::Iid, ModelKind::Ar1, ModelKind::Toy, ModelKind::Logistic,
                 ModelKind::Poisson}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown model '" + std::string(name) +
                    "' (expected iid, ar1, toy, logistic or poisson)");
}

ModelSpec ModelSpec::make(ModelKind kind, std::size_t n_total, std::size_t burn_in) {
  ModelSpec m;
  m.kind = kind;
  switch (kind) {
    case ModelKind::Toy:
      m.sampler = toy_default_config();
      break;
    case ModelKind::Logistic:
      m.sampler = rwm_default_config(m.logistic_d);
      break;
    case ModelKind::Poisson:
      m.sampler = poisson_default_config();
      break;
    default:
      m.sampler.param_lower = 0.0;
      m.sampler.param_upper = 1.0;
      m.sampler.adapt = false;
      break;
  }
  m.sampler.n_total = n_total;
  m.sampler.burn_in = burn_in;
  return m;
}

void ModelSpec::validate() const {
  sampler.validate();
  if (kept() < 10) throw ConfigError("runs must keep at least 10 samples");
  switch (kind) {
    case ModelKind::Ar1:
      if (!(std::abs(rho) < 1.0)) throw ConfigError("ar1 needs |rho| < 1");
      break;
    case ModelKind::Logistic:
      if (logistic_n < 1 || logistic_d < 1) throw ConfigError("logistic needs n, d >= 1");
      if (coordinate < 0 || coordinate >= logistic_d) {
        throw ConfigError("logistic coordinate out of range");
      }
      break;
    case ModelKind::Poisson:
      if (poisson_ne < 2 || poisson_np < 3) throw ConfigError("poisson needs N_e >= 2, N_p >= 3");
      break;
    default:
      break;
  }
}

std::optional<double> ModelSpec::analytic_truth() const {
  switch (kind) {
    case ModelKind::Iid:
    case ModelKind::Ar1:
    case ModelKind::Toy:
      return 0.0;
    default:
      return std::nullopt;
  }
}

nlohmann::json to_json(const ModelSpec& m) {
  nlohmann::json j = {{"kind", to_string(m.kind)},
                      {"sampler", to_json(m.sampler)},
                      {"data_seed", m.data_seed}};
  switch (m.kind) {
    case ModelKind::Ar1:
      j["rho"] = m.rho;
      break;
    case ModelKind::Logistic:
      j["logistic_n"] = m.logistic_n;
      j["logistic_d"] = m.logistic_d;
      j["coordinate"] = m.coordinate;
      break;
    case ModelKind::Poisson:
      j["poisson_ne"] = m.poisson_ne;
      j["poisson_np"] = m.poisson_np;
      j["poisson_params"] = {m.poisson_params.alpha1, m.poisson_params.alpha2, m.poisson_params.mu,
                             m.poisson_params.sigma2_eps, m.poisson_params.sigma2_beta};
      break;
    default:
      break;
  }
  return j;
}

ModelSpec model_spec_from_json(const nlohmann::json& j) {
  ModelSpec m;
  m.kind = model_kind_from_string(j.at("kind").get<std::string>());
  m.sampler = sampler_config_from_json(j.at("sampler"));
  m.data_seed = j.value("data_seed", std::uint64_t{1});
  m.rho = j.value("rho", 0.0);
  m.logistic_n = j.value("logistic_n", m.logistic_n);
  m.logistic_d = j.value("logistic_d", m.logistic_d);
  m.coordinate = j.value("coordinate", m.coordinate);
  m.poisson_ne = j.value("poisson_ne", m.poisson_ne);
  m.poisson_np = j.value("poisson_np", m.poisson_np);
  if (j.contains("poisson_params")) {
    const auto p = j.at("poisson_params").get<std::vector<double>>();
    if (p.size() != 5) throw ConfigError("poisson_params needs 5 entries");
    m.poisson_params = {p[0], p[1], p[2], p[3], p[4]};
  }
  return m;
}

std::vector<double> simulate_path(const ModelSpec& model, std::size_t n_total, std::size_t burn_in,
                                  std::uint64_t seed) {
  ModelSpec m = model;
  m.sampler.n_total = n_total;
  m.sampler.burn_in = burn_in;
  m.validate();
  switch (m.kind) {
    case ModelKind::Iid: {
      Rng rng(seed);
      boost::random::normal_distribution<double> normal;
      std::vector<double> x(n_total);
      for (auto& v : x) v = normal(rng);
      return drop_burn_in(std::move(x), burn_in);
    }
    case ModelKind::Ar1:
      return drop_burn_in(ar1_chain(m.rho, n_total, seed).h_path, burn_in);
    case ModelKind::Toy:
      return toy_adaptive_rwm(m.sampler, seed).h_path;
    case ModelKind::Logistic: {
      const auto data = synth_logistic_data(m.logistic_n, m.logistic_d, m.data_seed);
      const LogisticPosterior posterior(data.y, data.x);
      const int c = m.coordinate;
      return adaptive_rwm(std::cref(posterior), m.logistic_d, m.sampler, seed,
                          [c](const Eigen::VectorXd& b) { return b[c]; })
          .run.h_path;
    }
    case ModelKind::Poisson: {
      const auto data = synth_poisson_data(m.poisson_ne, m.poisson_np, m.poisson_params, m.data_seed);
      return poisson_re_gibbs(data, m.sampler, seed).run.h_path;
    }
  }
  throw ConfigError("unknown model");
}

std::vector<double> simulate_path(const ModelSpec& model, std::uint64_t seed) {
  return simulate_path(model, model.sampler.n_total, model.sampler.burn_in, seed);
}

double model_truth(const ModelSpec& model, std::uint64_t base_seed) {
  if (const auto t = model.analytic_truth()) return *t;
  const auto path = simulate_path(model, 10 * model.sampler.n_total, 10 * model.sampler.burn_in,
                                  derive_seed(base_seed, to_string(model.kind), "truth"));
  return sample_mean(path);
}

// --- coverage ---------------------------------------------------------------

void CoverageConfig::validate() const {
  model.validate();
  if (replications < 1) throw ConfigError("replications must be positive");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must lie in (0, 1)");
  if (kernels.empty()) throw ConfigError("at least one kernel is needed");
  for (double d : deltas) {
    if (!(d > 0.0 && d < 1.0)) throw ConfigError("classical deltas must lie in (0, 1)");
  }
  if (deltas.empty() && !include_fixedb) throw ConfigError("no interval methods selected");
}

const CoverageRow* CoverageReport::find(std::string_view method, std::string_view kernel,
                                        double delta) const {
  for (const auto& r : rows) {
    if (r.method == method && r.kernel == kernel && std::abs(r.delta - delta) < 1e-9) return &r;
  }
  return nullptr;
}

const CoverageRow* CoverageReport::best_classical(std::string_view kernel, double nominal) const {
  const CoverageRow* best = nullptr;
  for (const auto& r : rows) {
    if (r.method != "classical" || r.kernel != kernel) continue;
    if (best == nullptr) {
      best = &r;
      continue;
    }
    const double gap = std::abs(r.coverage - nominal);
    const double best_gap = std::abs(best->coverage - nominal);
    if (gap < best_gap || (gap == best_gap && r.mean_halfwidth < best->mean_halfwidth)) best = &r;
  }
  return best;
}

CoverageReport coverage_study(const CoverageConfig& config,
                              const std::map<std::string, FixedBQuantileTable>& tables) {
  config.validate();
  std::vector<WeightKernel> kernels;
  std::vector<double> fixedb_t;
  const double tail = (1.0 - config.level) / 2.0;
  for (const auto& name : config.kernels) {
    kernels.push_back(WeightKernel::from_name(name));
    if (!config.include_fixedb) continue;
    const auto it = tables.find(kernels.back().name());
    if (it == tables.end()) throw ConfigError("no fixed-b table for kernel '" + name + "'");
    if (it->second.kernel_id != kernels.back().id()) {
      throw ConfigError("fixed-b table for '" + name + "' belongs to another kernel");
    }
    const auto* row = it->second.find(tail);
    if (row == nullptr) {
      throw MissingTableRowError("fixed-b table for '" + name + "' lacks tail " + std::to_string(tail));
    }
    fixedb_t.push_back(row->critical_value);
  }
  const double z = normal_quantile(1.0 - tail);

  CoverageReport report;
  report.model_id = std::string(to_string(config.model.kind));
  report.base_seed = config.base_seed;
  report.truth = config.truth ? *config.truth : model_truth(config.model, config.base_seed);
  const double truth = report.truth;

  struct Cell {
    std::string method;
    std::size_t kernel;
    double delta;
  };
  std::vector<Cell> cells;
  for (std::size_t k = 0; k < kernels.size(); ++k) {
    for (double d : config.deltas) cells.push_back({"classical", k, d});
    if (config.include_fixedb) cells.push_back({"fixedb", k, 1.0});
  }

  const std::size_t reps = config.replications;
  const std::size_t n_cells = cells.size();
  report.replication_seeds.resize(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    report.replication_seeds[i] = derive_seed(config.base_seed, report.model_id, "rep", i);
  }
  // outcome: 1 covered, 0 missed, -1 not studentizable
  std::vector<signed char> outcome(reps * n_cells, 0);
  std::vector<double> halfwidth(reps * n_cells, kNaN);

  parallel_for(reps, config.workers, [&](std::size_t i) {
    const auto path = simulate_path(config.model, report.replication_seeds[i]);
    const std::size_t n = path.size();
    const auto acov = autocovariances(path, n - 1);
    const double mean = sample_mean(path);
    std::size_t fixedb_index = 0;
    for (std::size_t c = 0; c < n_cells; ++c) {
      const Cell& cell = cells[c];
      const bool fixedb = cell.method == "fixedb";
      const std::size_t c_n = fixedb ? n : std::min(bandwidth_npow(n, cell.delta), n - 1);
      const auto est = gamma_from_autocovariances(acov, n, mean, c_n, kernels[cell.kernel]);
      const std::size_t slot = i * n_cells + c;
      const double crit = fixedb ? fixedb_t[fixedb_index++] : z;
      if (!est.studentizable()) {
        outcome[slot] = -1;
        continue;
      }
      const double hw = crit * est.mc_error();
      halfwidth[slot] = hw;
      outcome[slot] = std::abs(mean - truth) <= hw ? 1 : 0;
    }
  });

  const std::size_t kept = config.model.kept();
  for (std::size_t c = 0; c < n_cells; ++c) {
    CoverageRow row;
    row.method = cells[c].method;
    row.kernel = kernels[cells[c].kernel].name();
    row.delta = cells[c].delta;
    row.replications = reps;
    row.n = kept;
    row.burn_in = config.model.sampler.burn_in;
    std::vector<double> widths;
    for (std::size_t i = 0; i < reps; ++i) {
      const auto o = outcome[i * n_cells + c];
      if (o == 1) ++row.covered;
      if (o == -1) {
        ++row.miss_flags;
      } else {
        widths.push_back(halfwidth[i * n_cells + c]);
      }
    }
    row.coverage = static_cast<double>(row.covered) / static_cast<double>(reps);
    row.coverage_se = std::sqrt(row.coverage * (1.0 - row.coverage) / static_cast<double>(reps));
    const auto hw = mean_se(widths);
    row.mean_halfwidth = hw.mean;
    row.halfwidth_se = hw.se;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string to_csv(const CoverageReport& report) {
  std::ostringstream out;
  out << "model,method,kernel,delta,K,n,burnin,coverage,coverage_se,mean_halfwidth,halfwidth_se,"
         "miss_flags\n";
  for (const auto& r : report.rows) {
    out << report.model_id << ',' << r.method << ',' << r.kernel << ',' << format_delta(r.delta)
        << ',' << r.replications << ',' << r.n << ',' << r.burn_in << ',' << io::fmt(r.coverage)
        << ',' << io::fmt(r.coverage_se) << ',' << io::fmt(r.mean_halfwidth) << ','
        << io::fmt(r.halfwidth_se) << ',' << r.miss_flags << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const CoverageConfig& c) {
  nlohmann::json j = {{"model", to_json(c.model)},         {"deltas", c.deltas},
                      {"kernels", c.kernels},              {"include_fixedb", c.include_fixedb},
                      {"replications", c.replications},    {"level", c.level},
                      {"base_seed", c.base_seed}};
  j["truth"] = c.truth ? nlohmann::json(*c.truth) : nlohmann::json();
  return j;
}

CoverageConfig coverage_config_from_json(const nlohmann::json& j) {
  CoverageConfig c;
  c.model = model_spec_from_json(j.at("model"));
  c.deltas = j.at("deltas").get<std::vector<double>>();
  c.kernels = j.at("kernels").get<std::vector<std::string>>();
  c.include_fixedb = j.at("include_fixedb").get<bool>();
  c.replications = j.at("replications").get<std::size_t>();
  c.level = j.at("level").get<double>();
  c.base_seed = j.at("base_seed").get<std::uint64_t>();
  if (j.contains("truth") && !j.at("truth").is_null()) c.truth = j.at("truth").get<double>();
  return c;
}

nlohmann::json to_json(const CoverageReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"method", r.method},
                    {"kernel", r.kernel},
                    {"delta", r.delta},
                    {"K", r.replications},
                    {"n", r.n},
                    {"burnin", r.burn_in},
                    {"covered", r.covered},
                    {"coverage", r.coverage},
                    {"coverage_se", r.coverage_se},
                    {"mean_halfwidth", r.mean_halfwidth},
                    {"halfwidth_se", r.halfwidth_se},
                    {"miss_flags", r.miss_flags}});
  }
  return {{"model", report.model_id},
          {"truth", report.truth},
          {"base_seed", report.base_seed},
          {"replication_seed_rule", "derive_seed(base_seed, model, \"rep\", i)"},
          {"replication_seeds", report.replication_seeds},
          {"rows", rows}};
}

// --- rate -------------------------------------------------------------------

void RateConfig::validate() const {
  if (!(std::abs(rho) < 1.0)) throw ConfigError("rate study needs |rho| < 1");
  if (n_grid.size() < 3) throw ConfigError("rate study needs at least 3 sample sizes");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 16) throw ConfigError("rate study sample sizes must be >= 16");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw ConfigError("n_grid must be increasing");
  }
  if (replications < 2) throw ConfigError("rate study needs at least 2 replications");
  if (reference_draws < 1000) throw ConfigError("reference sample needs at least 1000 draws");
  if (!(trace_fraction > 0.9 && trace_fraction <= 1.0)) throw ConfigError("trace_fraction must lie in (0.9, 1]");
}

const RateRow* RateReport::find(std::size_t n, std::string_view rule) const {
  for (const auto& r : rows) {
    if (r.n == n && r.rule == rule) return &r;
  }
  return nullptr;
}

double RateReport::slope(std::string_view rule) const {
  for (const auto& r : rows) {
    if (r.rule == rule) return r.slope_rule;
  }
  return kNaN;
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope needs two or more points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw DomainError("slope needs distinct x values");
  return sxy / sxx;
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("Wasserstein distance of an empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double x_prev = std::min(a.front(), b.front());
  double total = 0.0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
      x = a[i];
    } else {
      x = b[j];
    }
    total += std::abs(i / na - j / nb) * (x - x_prev);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    x_prev = x;
  }
  return total;
}

RateReport rate_study(const RateConfig& config) {
  config.validate();
  const auto kernel = WeightKernel::from_name(config.kernel);
  const auto& grid = config.n_grid;
  const std::size_t n_max = grid.back();
  const std::size_t reps = config.replications;
  const std::size_t n_sizes = grid.size();
  const std::size_t n_rules = kRateRules.size();
  const double scale = std::sqrt((1.0 - config.rho) / (1.0 + config.rho));

  std::vector<double> gammas(reps * n_sizes * n_rules);
  parallel_for(reps, config.workers, [&](std::size_t r) {
    auto path = ar1_chain(config.rho, n_max, derive_seed(config.base_seed, "rate", r)).h_path;
    for (auto& v : path) v *= scale;
    for (std::size_t s = 0; s < n_sizes; ++s) {
      const std::span<const double> x(path.data(), grid[s]);
      const std::size_t n = grid[s];
      const auto acov = autocovariances(x, n - 1);
      const double mean = sample_mean(x);
      for (std::size_t k = 0; k < n_rules; ++k) {
        const double delta = rule_delta(kRateRules[k]);
        const std::size_t c_n = delta >= 1.0 ? n : bandwidth_npow(n, delta);
        gammas[(r * n_sizes + s) * n_rules + k] =
            gamma_from_autocovariances(acov, n, mean, c_n, kernel).gamma_sq;
      }
    }
  });

  const auto decomp = nystrom_decompose(kernel, config.nystrom_grid, config.trace_fraction);
  const auto reference = sample_chi2_eigen(decomp, config.reference_draws,
                                           derive_seed(config.base_seed, "rate-reference"),
                                           config.workers);

  RateReport report;
  report.config = config;
  std::vector<double> log_n(n_sizes);
  for (std::size_t s = 0; s < n_sizes; ++s) log_n[s] = std::log(static_cast<double>(grid[s]));
  for (std::size_t k = 0; k < n_rules; ++k) {
    std::vector<double> log_rmse(n_sizes);
    const std::size_t first = report.rows.size();
    for (std::size_t s = 0; s < n_sizes; ++s) {
      std::vector<double> sample(reps);
      double sq = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        sample[r] = gammas[(r * n_sizes + s) * n_rules + k];
        sq += (sample[r] - 1.0) * (sample[r] - 1.0);
      }
      RateRow row;
      row.rho = config.rho;
      row.n = grid[s];
      row.rule = std::string(kRateRules[k]);
      row.replications = reps;
      row.rmse = std::sqrt(sq / static_cast<double>(reps));
      row.wasserstein = kRateRules[k] == "n" ? wasserstein1(sample, reference) : kNaN;
      log_rmse[s] = std::log(row.rmse);
      report.rows.push_back(row);
    }
    const double slope = ols_slope(log_n, log_rmse);
    for (std::size_t i = first; i < report.rows.size(); ++i) report.rows[i].slope_rule = slope;
  }
  return report;
}

std::string to_csv(const RateReport& report) {
  std::ostringstream out;
  out << "rho,n,rule,R,rmse,slope_rule,wasserstein\n";
  for (const auto& r : report.rows) {
    out << io::fmt(r.rho) << ',' << r.n << ',' << r.rule << ',' << r.replications << ','
        << io::fmt(r.rmse) << ',' << io::fmt(r.slope_rule) << ',' << io::fmt(r.wasserstein) << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const RateConfig& c) {
  return {{"rho", c.rho},
          {"n_grid", c.n_grid},
          {"replications", c.replications},
          {"kernel", c.kernel},
          {"reference_draws", c.reference_draws},
          {"nystrom_grid", c.nystrom_grid},
          {"trace_fraction", c.trace_fraction},
          {"base_seed", c.base_seed},
          {"replication_seed_rule", "derive_seed(base_seed, \"rate\", r)"}};
}

RateConfig rate_config_from_json(const nlohmann::json& j) {
  RateConfig c;
  c.rho = j.at("rho").get<double>();
  c.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
  c.replications = j.at("replications").get<std::size_t>();
  c.kernel = j.at("kernel").get<std::string>();
  c.reference_draws = j.at("reference_draws").get<std::size_t>();
  c.nystrom_grid = j.at("nystrom_grid").get<int>();
  c.trace_fraction = j.value("trace_fraction", 1.0);
  c.base_seed = j.at("base_seed").get<std::uint64_t>();
  return c;
}

// --- toy multi-limit ----------------------------------------------------------

void ToyStudyConfig::validate() const {
  sampler.validate();
  if (n_seeds < 2) throw ConfigError("toy study needs at least 2 seeds");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("toy study delta must lie in (0, 1)");
  if (!(theta0_low >= sampler.param_lower && theta0_high <= sampler.param_upper &&
        theta0_low < theta0_high)) {
    throw ConfigError("theta_0 range must lie inside the projection bounds");
  }
  if (!(root_tolerance > 0.0)) throw ConfigError("root tolerance must be positive");
}

bool ToyStudyReport::all_near_root() const {
  return !runs.empty() && std::all_of(runs.begin(), runs.end(), [this](const ToyRun& r) {
    return r.root_index >= 0 && r.root_distance <= config.root_tolerance;
  });
}

bool ToyStudyReport::clusters_separated() const {
  if (clusters.size() < 2) return false;
  for (std::size_t a = 0; a < clusters.size(); ++a) {
    for (std::size_t b = a + 1; b < clusters.size(); ++b) {
      const double gap = std::abs(clusters[a].mean_gamma_sq - clusters[b].mean_gamma_sq);
      const double se = std::hypot(clusters[a].se_gamma_sq, clusters[b].se_gamma_sq);
      if (!(gap > 3.0 * se)) return false;
    }
  }
  return true;
}

ToyStudyReport toy_multilimit_study(const ToyStudyConfig& config) {
  config.validate();
  ToyStudyReport report;
  report.config = config;
  report.roots = toy_rate_roots(config.sampler.target_rate);
  report.runs.resize(config.n_seeds);
  const double log_lo = std::log(config.theta0_low);
  const double log_hi = std::log(config.theta0_high);
  const auto bartlett = WeightKernel::bartlett();

  parallel_for(config.n_seeds, config.workers, [&](std::size_t i) {
    ToyRun& out = report.runs[i];
    SamplerConfig sc = config.sampler;
    const double frac = static_cast<double>(i) / static_cast<double>(config.n_seeds - 1);
    sc.initial_param = std::exp(log_lo + frac * (log_hi - log_lo));
    out.seed = derive_seed(config.base_seed, "toy", i);
    out.theta0 = sc.initial_param;
    const auto run = toy_adaptive_rwm(sc, out.seed);
    out.theta_final = run.theta_trace.back();
    const std::size_t n = run.h_path.size();
    const auto est = gamma_n_sq(run.h_path, bandwidth_npow(n, config.delta), bartlett);
    out.gamma_sq = est.gamma_sq;
    out.mean = est.mean;
    out.root_distance = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < report.roots.size(); ++k) {
      const double d = std::abs(out.theta_final - report.roots[k]);
      if (d < out.root_distance) {
        out.root_distance = d;
        out.root_index = static_cast<int>(k);
      }
    }
  });

  // Clusters are the runs that ended near each root.
  std::vector<std::vector<double>> members(report.roots.size());
  for (const auto& r : report.runs) {
    if (r.root_index >= 0 && r.root_distance <= config.root_tolerance) {
      members[r.root_index].push_back(r.gamma_sq);
    }
  }
  double pooled_ss = 0.0;
  std::size_t pooled_df = 0;
  for (const auto& m : members) {
    if (m.size() < 2) continue;
    const auto s = mean_se(m);
    pooled_ss += s.sd * s.sd * static_cast<double>(m.size() - 1);
    pooled_df += m.size() - 1;
  }
  const double pooled_sd = pooled_df > 0 ? std::sqrt(pooled_ss / pooled_df) : kNaN;
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (members[k].empty()) continue;
    const auto s = mean_se(members[k]);
    ToyCluster c;
    c.root_index = static_cast<int>(k);
    c.root = report.roots[k];
    c.count = members[k].size();
    c.mean_gamma_sq = s.mean;
    c.se_gamma_sq = members[k].size() >= 2 ? s.se : pooled_sd;
    report.clusters.push_back(c);
  }
  return report;
}

std::string to_csv(const ToyStudyReport& report) {
  std::ostringstream out;
  out << "run,seed,theta0,theta_final,root_index,root,root_distance,gamma_sq,mean\n";
  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    const auto& r = report.runs[i];
    out << i << ',' << r.seed << ',' << io::fmt(r.theta0) << ',' << io::fmt(r.theta_final) << ','
        << r.root_index << ','
        << io::fmt(r.root_index >= 0 ? report.roots[r.root_index] : kNaN) << ','
        << io::fmt(r.root_distance) << ',' << io::fmt(r.gamma_sq) << ',' << io::fmt(r.mean) << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const ToyStudyConfig& c) {
  return {{"n_seeds", c.n_seeds},       {"sampler", to_json(c.sampler)},
          {"delta", c.delta},           {"root_tolerance", c.root_tolerance},
          {"theta0_low", c.theta0_low}, {"theta0_high", c.theta0_high},
          {"base_seed", c.base_seed},   {"seed_rule", "derive_seed(base_seed, \"toy\", i)"}};
}

nlohmann::json to_json(const ToyStudyReport& report) {
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& c : report.clusters) {
    clusters.push_back({{"root_index", c.root_index},
                        {"root", c.root},
                        {"count", c.count},
                        {"mean_gamma_sq", c.mean_gamma_sq},
                        {"se_gamma_sq", c.se_gamma_sq}});
  }
  return {{"config", to_json(report.config)},
          {"roots", report.roots},
          {"clusters", clusters},
          {"all_near_root", report.all_near_root()},
          {"clusters_separated", report.clusters_separated()}};
}

std::string config_digest(const nlohmann::json& j) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(mix64(label_hash(j.dump()))));
  return buf;
}

}  // namespace amcci

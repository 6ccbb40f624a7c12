#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "amcci/chains.hpp"
#include "amcci/fixedb.hpp"
#include "amcci/poisson_re.hpp"
#include "amcci/seed.hpp"
#include "amcci/weight_kernel.hpp"

namespace amcci {

// --- models -----------------------------------------------------------------

enum class ModelKind { Iid, Ar1, Toy, Logistic, Poisson };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

/// A chain family that can be simulated for any seed. `sampler` drives the
/// adaptive models (toy, logistic, poisson); n_total and burn_in inside it
/// are the per-replication run length.
struct ModelSpec {
  ModelKind kind = ModelKind::Iid;
  double rho = 0.0;                ///< ar1
  int logistic_n = 50;             ///< logistic: observations
  int logistic_d = 4;              ///< logistic: coefficients
  int coordinate = 2;              ///< logistic: h(beta) = beta[coordinate]
  int poisson_ne = 3;
  int poisson_np = 27;
  PoissonReParams poisson_params;
  SamplerConfig sampler;
  /// Seed for the synthetic data set shared by every replication.
  std::uint64_t data_seed = 1;

  /// Defaults for a model at run length n_total with burn_in.
  static ModelSpec make(ModelKind kind, std::size_t n_total, std::size_t burn_in);
  void validate() const;
  /// Kept path length n_total - burn_in.
  std::size_t kept() const { return sampler.n_total - sampler.burn_in; }
  /// pi(h) when it is known in closed form.
  std::optional<double> analytic_truth() const;
};

nlohmann::json to_json(const ModelSpec& m);
ModelSpec model_spec_from_json(const nlohmann::json& j);

/// Simulates one run of `model` and returns the kept h path. `n_total` and
/// `burn_in` override the values in model.sampler (used for reference runs).
std::vector<double> simulate_path(const ModelSpec& model, std::uint64_t seed);
std::vector<double> simulate_path(const ModelSpec& model, std::size_t n_total, std::size_t burn_in,
                                  std::uint64_t seed);

/// pi(h): analytic when available, else the mean of one reference run ten
/// times longer than the study runs, seeded derive_seed(base_seed, model, "truth").
double model_truth(const ModelSpec& model, std::uint64_t base_seed);

// --- coverage ---------------------------------------------------------------

struct CoverageConfig {
  ModelSpec model;
  std::vector<double> deltas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<std::string> kernels = {"bartlett"};
  bool include_fixedb = true;
  std::size_t replications = 200;
  double level = 0.95;
  std::uint64_t base_seed = 1;
  int workers = 0;
  std::optional<double> truth;  ///< overrides model_truth

  void validate() const;
};

struct CoverageRow {
  std::string method;  ///< "classical" or "fixedb"
  std::string kernel;
  double delta = 1.0;  ///< bandwidth exponent; 1 for fixed-b
  std::size_t replications = 0;
  std::size_t n = 0;
  std::size_t burn_in = 0;
  double coverage = 0.0;
  double coverage_se = 0.0;
  double mean_halfwidth = 0.0;
  double halfwidth_se = 0.0;
  std::size_t miss_flags = 0;  ///< non-studentizable replications, counted as misses
  std::size_t covered = 0;
};

struct CoverageReport {
  std::string model_id;
  double truth = 0.0;
  std::uint64_t base_seed = 0;
  std::vector<CoverageRow> rows;
  /// Replication i uses simulate_path(model, replication_seeds[i]) for every cell.
  std::vector<std::uint64_t> replication_seeds;

  const CoverageRow* find(std::string_view method, std::string_view kernel,
                          double delta = 1.0) const;
  /// Classical row of `kernel` whose coverage is closest to `nominal`; ties
  /// go to the narrower interval.
  const CoverageRow* best_classical(std::string_view kernel, double nominal) const;
};

/// Fixed-b critical values come from `tables`, keyed by kernel name.
CoverageReport coverage_study(const CoverageConfig& config,
                              const std::map<std::string, FixedBQuantileTable>& tables);

std::string to_csv(const CoverageReport& report);
nlohmann::json to_json(const CoverageReport& report);
nlohmann::json to_json(const CoverageConfig& config);
CoverageConfig coverage_config_from_json(const nlohmann::json& j);

// --- rate -------------------------------------------------------------------

struct RateConfig {
  double rho = 0.5;
  std::vector<std::size_t> n_grid = {4096, 8192, 16384, 32768, 65536};
  std::size_t replications = 500;
  std::string kernel = "bartlett";
  std::size_t reference_draws = 100000;
  int nystrom_grid = kDefaultNystromGrid;
  /// Share of the positive trace kept in the chi2 reference; 1 keeps every
  /// eigenvalue above the threshold.
  double trace_fraction = 1.0;
  std::uint64_t base_seed = 1;
  int workers = 0;

  void validate() const;
};

/// Bandwidth rules of the rate study: c_n = n^(1/3), n^(2/3) and n.
inline constexpr std::array<std::string_view, 3> kRateRules = {"n^(1/3)", "n^(2/3)", "n"};

struct RateRow {
  double rho = 0.0;
  std::size_t n = 0;
  std::string rule;
  std::size_t replications = 0;
  double rmse = 0.0;
  double slope_rule = 0.0;
  double wasserstein = 0.0;  ///< NaN except for the c_n = n rule
};

struct RateReport {
  RateConfig config;
  std::vector<RateRow> rows;

  const RateRow* find(std::size_t n, std::string_view rule) const;
  double slope(std::string_view rule) const;
};

/// Gamma_n^2 on AR(1) rescaled to unit asymptotic variance. Replication r uses
/// the first n steps of one chain seeded derive_seed(base_seed, "rate", r),
/// shared across n. The fixed-b column also reports d1 to sigma^2 chi2 drawn
/// from the eigen route.
RateReport rate_study(const RateConfig& config);

std::string to_csv(const RateReport& report);
nlohmann::json to_json(const RateConfig& config);
RateConfig rate_config_from_json(const nlohmann::json& j);

/// Empirical 1-Wasserstein distance, the integral of |F_a - F_b|.
double wasserstein1(std::vector<double> a, std::vector<double> b);

/// Ordinary least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

// --- toy multi-limit ----------------------------------------------------------

struct ToyStudyConfig {
  std::size_t n_seeds = 20;
  SamplerConfig sampler = toy_default_config();
  double delta = 1.0 / 3.0;
  double root_tolerance = 0.05;
  /// theta_0 values are log-spaced over [theta0_low, theta0_high].
  double theta0_low = 1.6;
  double theta0_high = 8.0;
  std::uint64_t base_seed = 1;
  int workers = 0;

  void validate() const;
};

struct ToyRun {
  std::uint64_t seed = 0;
  double theta0 = 0.0;
  double theta_final = 0.0;
  int root_index = -1;  ///< nearest root
  double root_distance = 0.0;
  double gamma_sq = 0.0;
  double mean = 0.0;
};

struct ToyCluster {
  int root_index = 0;
  double root = 0.0;
  std::size_t count = 0;
  double mean_gamma_sq = 0.0;
  double se_gamma_sq = 0.0;
};

struct ToyStudyReport {
  ToyStudyConfig config;
  std::vector<double> roots;
  std::vector<ToyRun> runs;
  std::vector<ToyCluster> clusters;  ///< occupied only

  bool all_near_root() const;
  /// Every pair of occupied clusters differs by more than 3 combined SEs.
  bool clusters_separated() const;
};

ToyStudyReport toy_multilimit_study(const ToyStudyConfig& config);

std::string to_csv(const ToyStudyReport& report);
nlohmann::json to_json(const ToyStudyReport& report);
nlohmann::json to_json(const ToyStudyConfig& config);

/// Hex digest of a JSON document, stable across runs.
std::string config_digest(const nlohmann::json& j);

}  // namespace amcci

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "amcci/ci.hpp"
#include "amcci/errors.hpp"
#include "amcci/experiments.hpp"
#include "amcci/fixedb.hpp"
#include "amcci/io.hpp"
#include "amcci/lagwindow.hpp"
#include "amcci/mercer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace amcci;

namespace {

enum Exit { kOk = 0, kConfig = 2, kInput = 3, kNumeric = 4 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_input(const fs::path& path) {
  try {
    return io::read_file(path);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("not a number in list: '" + item + "'");
    }
    if (used != item.size()) throw ConfigError("not a number in list: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

fs::path default_out_dir() {
  if (const char* env = std::getenv("AMCCI_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return ".";
}

class Run {
 public:
  Run(std::string command, fs::path dir) : command_(std::move(command)), dir_(std::move(dir)) {
    start_ = std::chrono::steady_clock::now();
  }

  void write(const std::string& name, const std::string& content) {
    fs::create_directories(dir_);
    io::write_file_atomic(dir_ / name, content);
    outputs_.push_back(name);
  }

  void finish(const json& config, std::uint64_t seed) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json m = {{"command", command_},
              {"config", config},
              {"base_seed", seed},
              {"version", AMCCI_VERSION},
              {"config_digest", config_digest(config)},
              {"outputs", outputs_},
              {"wall_clock_seconds", secs}};
    fs::create_directories(dir_);
    io::write_file_atomic(dir_ / "manifest.json", m.dump(2) + "\n");
  }

 private:
  std::string command_;
  fs::path dir_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

FixedBQuantileTable load_table(const fs::path& path, const WeightKernel& kernel) {
  const auto text = read_input(path);
  FixedBQuantileTable t;
  try {
    if (path.extension() == ".json") {
      t = quantile_table_from_json(json::parse(text));
    } else {
      t = quantile_table_from_csv(text, kernel);
    }
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return t;
}

std::string table_stem(const std::string& kernel) { return "quantiles_" + kernel; }

// --- subcommands --------------------------------------------------------------

struct QuantilesOpts {
  std::string kernel = "bartlett";
  std::string levels = "0.05,0.025";
  std::size_t draws = 1000000;
  std::string method = "eigen";
  int grid = 0;
  std::string out;
};

FixedBOptions fixedb_options(const std::string& method, int grid, int workers) {
  FixedBOptions o;
  if (method == "eigen") {
    o.method = FixedBMethod::Eigen;
    if (grid > 0) o.eigen_grid = grid;
  } else if (method == "ito") {
    o.method = FixedBMethod::Ito;
    if (grid > 0) o.ito_grid = grid;
  } else {
    throw ConfigError("method must be eigen or ito");
  }
  o.workers = workers;
  return o;
}

int cmd_quantiles(const QuantilesOpts& o, std::uint64_t seed, int workers, const fs::path& dir) {
  const auto kernel = WeightKernel::from_name(o.kernel);
  const auto levels = parse_list(o.levels);
  const auto table =
      quantile_table(kernel, levels, o.draws, seed, fixedb_options(o.method, o.grid, workers));
  fs::path csv = o.out.empty() ? dir / (table_stem(o.kernel) + ".csv") : fs::path(o.out);
  Run run("quantiles", csv.parent_path().empty() ? fs::path(".") : csv.parent_path());
  run.write(csv.filename().string(), to_csv(table));
  run.write(csv.stem().string() + ".json", to_json(table).dump(2) + "\n");
  for (const auto& r : table.rows) {
    std::printf("tail %-8s t = %.6f  (+- %.4f)\n", io::fmt(r.tail_prob).c_str(), r.critical_value,
                r.mc_se);
  }
  if (table.non_positive_draws > 0) {
    std::printf("non-positive chi2 draws: %zu\n", table.non_positive_draws);
  }
  run.finish({{"kernel", o.kernel},
              {"levels", levels},
              {"draws", o.draws},
              {"method", o.method},
              {"grid", table.grid}},
             seed);
  return kOk;
}

struct EstimateOpts {
  std::string input;
  std::string cn = "npow:0.333333333333";
  std::string kernel = "bartlett";
  double level = 0.95;
  std::string table;
};

int cmd_estimate(const EstimateOpts& o) {
  const auto kernel = WeightKernel::from_name(o.kernel);
  const auto bandwidth = Bandwidth::parse(o.cn);
  std::vector<double> x;
  try {
    x = io::parse_single_column(read_input(o.input));
  } catch (const InputError&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw InputError(o.input + ": " + e.what());
  }
  if (x.size() < 10) throw InputError("input needs at least 10 values, got " + std::to_string(x.size()));
  const std::size_t n = x.size();
  const std::size_t c_n = bandwidth.resolve(n);
  const auto est = gamma_n_sq(x, c_n, kernel);
  std::printf("n          %zu\n", n);
  std::printf("c_n        %zu\n", c_n);
  std::printf("kernel     %s\n", kernel.name().c_str());
  std::printf("mean       %.12g\n", est.mean);
  std::printf("gamma_sq   %.12g\n", est.gamma_sq);
  std::printf("gamma0     %.12g\n", est.gamma0);
  if (!est.studentizable()) throw NonStudentizableError(est.gamma_sq);
  std::printf("ess        %.12g\n", est.ess);
  std::printf("mc_error   %.12g\n", est.mc_error());

  ConfidenceInterval ci;
  if (c_n < n) {
    ci = ci_classical(x, c_n, kernel, o.level);
  } else if (!o.table.empty()) {
    ci = ci_fixedb(x, kernel, o.level, load_table(o.table, kernel));
  } else {
    std::printf("ci         none (c_n = n needs --table)\n");
    return kOk;
  }
  std::printf("method     %s\n", std::string(to_string(ci.method)).c_str());
  std::printf("level      %.12g\n", ci.level);
  std::printf("critical   %.12g\n", ci.critical_value_used);
  std::printf("halfwidth  %.12g\n", ci.halfwidth);
  std::printf("lower      %.12g\n", ci.lower);
  std::printf("upper      %.12g\n", ci.upper);
  if (ci.bandwidth_warning) std::printf("warning    c_n > n^0.9; the classical interval is unreliable\n");
  return kOk;
}

struct ModelOpts {
  std::string model = "iid";
  std::size_t n_total = 10000;
  std::size_t burn_in = 0;
  double rho = 0.5;
  int logistic_n = 50;
  int logistic_d = 4;
  int coordinate = 2;
  int ne = 3;
  int np = 27;
  std::uint64_t data_seed = 1;

  void add(CLI::App* app) {
    app->add_option("--model", model, "iid, ar1, toy, logistic or poisson")->capture_default_str();
    app->add_option("--n", n_total, "iterations per run")->capture_default_str();
    app->add_option("--burnin", burn_in, "iterations discarded")->capture_default_str();
    app->add_option("--rho", rho, "ar1 coefficient")->capture_default_str();
    app->add_option("--logistic-n", logistic_n)->capture_default_str();
    app->add_option("--logistic-d", logistic_d)->capture_default_str();
    app->add_option("--coordinate", coordinate, "logistic coefficient reported")->capture_default_str();
    app->add_option("--ne", ne, "poisson groups N_e")->capture_default_str();
    app->add_option("--np", np, "poisson units N_p")->capture_default_str();
    app->add_option("--data-seed", data_seed, "seed of the synthetic data set")->capture_default_str();
  }

  ModelSpec spec() const {
    auto m = ModelSpec::make(model_kind_from_string(model), n_total, burn_in);
    m.rho = rho;
    m.logistic_n = logistic_n;
    m.logistic_d = logistic_d;
    m.coordinate = coordinate;
    m.poisson_ne = ne;
    m.poisson_np = np;
    m.data_seed = data_seed;
    if (m.kind == ModelKind::Logistic) {
      const auto burn = m.sampler.burn_in;
      const auto total = m.sampler.n_total;
      m.sampler = rwm_default_config(logistic_d);
      m.sampler.n_total = total;
      m.sampler.burn_in = burn;
    }
    m.validate();
    return m;
  }
};

struct CoverageOpts {
  ModelOpts model;
  std::size_t reps = 200;
  std::string deltas = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  std::string kernels = "bartlett";
  double level = 0.95;
  bool no_fixedb = false;
  std::vector<std::string> tables;
  std::size_t table_draws = 1000000;
};

int cmd_coverage(const CoverageOpts& o, std::uint64_t seed, int workers, const fs::path& dir) {
  CoverageConfig c;
  c.model = o.model.spec();
  c.deltas = parse_list(o.deltas);
  c.kernels = split(o.kernels);
  c.include_fixedb = !o.no_fixedb;
  c.replications = o.reps;
  c.level = o.level;
  c.base_seed = seed;
  c.workers = workers;
  c.validate();

  Run run("coverage", dir);
  std::map<std::string, FixedBQuantileTable> tables;
  std::map<std::string, std::string> table_sources;
  for (const auto& spec : o.tables) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw ConfigError("--table expects kernel=path, got '" + spec + "'");
    const auto name = spec.substr(0, eq);
    const auto kernel = WeightKernel::from_name(name);
    tables[kernel.name()] = load_table(spec.substr(eq + 1), kernel);
    table_sources[kernel.name()] = spec.substr(eq + 1);
  }
  if (c.include_fixedb) {
    const double tail = (1.0 - c.level) / 2.0;
    for (const auto& name : c.kernels) {
      const auto kernel = WeightKernel::from_name(name);
      if (tables.count(kernel.name()) != 0) continue;
      FixedBOptions fo;
      fo.workers = workers;
      const std::vector<double> levels = {tail};
      auto table = quantile_table(kernel, levels, o.table_draws,
                                  derive_seed(seed, "table", kernel.name()), fo);
      run.write(table_stem(kernel.name()) + ".csv", to_csv(table));
      run.write(table_stem(kernel.name()) + ".json", to_json(table).dump(2) + "\n");
      table_sources[kernel.name()] = table_stem(kernel.name()) + ".json";
      tables[kernel.name()] = std::move(table);
    }
  }

  const auto report = coverage_study(c, tables);
  run.write("coverage.csv", to_csv(report));
  run.write("coverage.json", to_json(report).dump(2) + "\n");
  std::printf("truth %.10g\n", report.truth);
  for (const auto& r : report.rows) {
    std::printf("%-9s %-9s delta %-4s coverage %.3f (se %.3f)  halfwidth %.5g  flags %zu\n",
                r.method.c_str(), r.kernel.c_str(), io::fmt(r.delta).c_str(), r.coverage,
                r.coverage_se, r.mean_halfwidth, r.miss_flags);
  }
  auto cfg = to_json(c);
  cfg["table_draws"] = o.table_draws;
  cfg["tables"] = table_sources;
  run.finish(cfg, seed);
  return kOk;
}

struct RateOpts {
  double rho = 0.5;
  std::string n_grid = "4096,8192,16384,32768,65536";
  std::size_t reps = 500;
  std::string kernel = "bartlett";
  std::size_t reference_draws = 100000;
};

int cmd_rate(const RateOpts& o, std::uint64_t seed, int workers, const fs::path& dir) {
  RateConfig c;
  c.rho = o.rho;
  c.n_grid.clear();
  for (double v : parse_list(o.n_grid)) {
    if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("n_grid entries must be integers");
    c.n_grid.push_back(static_cast<std::size_t>(v));
  }
  c.replications = o.reps;
  c.kernel = o.kernel;
  c.reference_draws = o.reference_draws;
  c.base_seed = seed;
  c.workers = workers;
  const auto report = rate_study(c);
  Run run("rate", dir);
  run.write("rate.csv", to_csv(report));
  for (const auto& rule : kRateRules) {
    std::printf("rule %-8s slope %.4f\n", std::string(rule).c_str(), report.slope(rule));
  }
  for (const auto& r : report.rows) {
    std::printf("n %-7zu %-8s rmse %.5f", r.n, r.rule.c_str(), r.rmse);
    if (!std::isnan(r.wasserstein)) std::printf("  d1 %.5f", r.wasserstein);
    std::printf("\n");
  }
  run.finish(to_json(c), seed);
  return kOk;
}

struct ToyOpts {
  std::size_t seeds = 20;
  std::size_t n_total = 1000000;
  double target = 0.23;
  double theta0_low = 1.6;
  double theta0_high = 8.0;
};

int cmd_toy(const ToyOpts& o, std::uint64_t seed, int workers, const fs::path& dir) {
  ToyStudyConfig c;
  c.n_seeds = o.seeds;
  c.sampler.n_total = o.n_total;
  c.sampler.target_rate = o.target;
  c.theta0_low = o.theta0_low;
  c.theta0_high = o.theta0_high;
  c.base_seed = seed;
  c.workers = workers;
  const auto report = toy_multilimit_study(c);
  Run run("toy", dir);
  run.write("toy.csv", to_csv(report));
  run.write("toy.json", to_json(report).dump(2) + "\n");
  std::printf("roots of a(theta) = %.4g:", o.target);
  for (double r : report.roots) std::printf(" %.6f", r);
  std::printf("\n");
  for (const auto& cl : report.clusters) {
    std::printf("cluster root %.4f  runs %zu  mean gamma_sq %.5g (se %.3g)\n", cl.root, cl.count,
                cl.mean_gamma_sq, cl.se_gamma_sq);
  }
  std::printf("occupied clusters %zu  all near a root %s  separated %s\n", report.clusters.size(),
              report.all_near_root() ? "yes" : "no", report.clusters_separated() ? "yes" : "no");
  run.finish(to_json(c), seed);
  return kOk;
}

struct CdfOpts {
  std::string kernel = "bartlett";
  std::size_t draws = 1000000;
  double lo = -12.0;
  double hi = 12.0;
  int points = 241;
};

int cmd_cdf(const CdfOpts& o, std::uint64_t seed, int workers, const fs::path& dir) {
  const auto kernel = WeightKernel::from_name(o.kernel);
  if (o.points < 2 || !(o.lo < o.hi)) throw ConfigError("cdf grid needs points >= 2 and lo < hi");
  std::vector<double> grid(o.points);
  for (int i = 0; i < o.points; ++i) grid[i] = o.lo + (o.hi - o.lo) * i / (o.points - 1);
  FixedBOptions fo;
  fo.workers = workers;
  const auto cdf = cdf_table(kernel, grid, o.draws, seed, fo);
  Run run("cdf", dir);
  run.write("cdf_" + o.kernel + ".csv", to_csv(cdf));
  run.finish({{"kernel", o.kernel}, {"draws", o.draws}, {"lo", o.lo}, {"hi", o.hi}, {"points", o.points}},
             seed);
  std::printf("wrote %s\n", (dir / ("cdf_" + o.kernel + ".csv")).string().c_str());
  return kOk;
}

struct EigsOpts {
  std::string kernel = "bartlett";
  int m = kDefaultNystromGrid;
  double trace_fraction = kDefaultTraceFraction;
  int show = 10;
};

int cmd_eigs(const EigsOpts& o, const fs::path& dir) {
  const auto kernel = WeightKernel::from_name(o.kernel);
  const auto d = nystrom_decompose(kernel, o.m, o.trace_fraction);
  Run run("eigs", dir);
  run.write("eigs_" + o.kernel + ".json", to_json(d).dump(2) + "\n");
  std::printf("kernel %s  grid %d  retained %zu  trace %.10g  kept fraction %.6f\n",
              kernel.name().c_str(), o.m, static_cast<std::size_t>(d.eigenvalues.size()),
              d.trace_estimate, d.kept_trace_fraction);
  const int shown = std::min<int>(o.show, static_cast<int>(d.eigenvalues.size()));
  for (int i = 0; i < shown; ++i) std::printf("alpha_%d %.12g\n", i + 1, d.eigenvalues[i]);
  run.finish({{"kernel", o.kernel}, {"m", o.m}, {"trace_fraction", o.trace_fraction}}, 0);
  return kOk;
}

int cmd_simulate(const ModelOpts& o, std::uint64_t seed, const fs::path& dir) {
  const auto spec = o.spec();
  const auto path = simulate_path(spec, seed);
  std::string csv = "h\n";
  for (double v : path) csv += io::fmt(v) + "\n";
  Run run("simulate", dir);
  const std::string stem = "chain_" + o.model;
  run.write(stem + ".csv", csv);
  json sidecar = {{"seed", seed}, {"model", to_json(spec)}, {"kept", path.size()}};
  run.write(stem + ".json", sidecar.dump(2) + "\n");
  run.finish(to_json(spec), seed);
  std::printf("wrote %zu values to %s\n", path.size(), (dir / (stem + ".csv")).string().c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lag-window variance estimation and fixed-bandwidth intervals for adaptive MCMC"};
  app.set_version_flag("--version", AMCCI_VERSION);
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  int workers = 0;
  std::string out_dir;
  const auto add_common = [&](CLI::App* sub, bool with_seed) {
    if (with_seed) sub->add_option("--seed", seed, "base seed")->capture_default_str();
    sub->add_option("--workers", workers, "OpenMP workers (0 = all)")->capture_default_str();
    sub->add_option("--out-dir", out_dir, "output directory (default $AMCCI_OUTPUT_DIR or .)");
  };

  QuantilesOpts qo;
  auto* q = app.add_subcommand("quantiles", "fixed-b critical values");
  q->add_option("--kernel", qo.kernel)->capture_default_str();
  q->add_option("--levels", qo.levels, "tail probabilities, comma separated")->capture_default_str();
  q->add_option("--draws", qo.draws)->capture_default_str();
  q->add_option("--method", qo.method, "eigen or ito")->capture_default_str();
  q->add_option("--grid", qo.grid, "Nystrom or Brownian grid size (0 = default)");
  q->add_option("--out", qo.out, "CSV path (default <out-dir>/quantiles_<kernel>.csv)");
  add_common(q, true);

  EstimateOpts eo;
  auto* e = app.add_subcommand("estimate", "lag-window estimate and interval for a CSV column");
  e->add_option("--input", eo.input, "single-column CSV")->required();
  e->add_option("--cn", eo.cn, "bandwidth: integer, npow:<delta> or n")->capture_default_str();
  e->add_option("--kernel", eo.kernel)->capture_default_str();
  e->add_option("--level", eo.level)->capture_default_str();
  e->add_option("--table", eo.table, "quantile table (.csv or .json) for c_n = n");

  CoverageOpts co;
  auto* cov = app.add_subcommand("coverage", "coverage study");
  co.model.add(cov);
  cov->add_option("--K", co.reps, "replications")->capture_default_str();
  cov->add_option("--deltas", co.deltas)->capture_default_str();
  cov->add_option("--kernels", co.kernels)->capture_default_str();
  cov->add_option("--level", co.level)->capture_default_str();
  cov->add_flag("--no-fixedb", co.no_fixedb);
  cov->add_option("--table", co.tables, "kernel=path of a persisted quantile table");
  cov->add_option("--table-draws", co.table_draws, "draws for tables built on the fly")
      ->capture_default_str();
  add_common(cov, true);

  RateOpts ro;
  auto* rate = app.add_subcommand("rate", "convergence-rate study on AR(1)");
  rate->add_option("--rho", ro.rho)->capture_default_str();
  rate->add_option("--n-grid", ro.n_grid)->capture_default_str();
  rate->add_option("--R", ro.reps, "replications")->capture_default_str();
  rate->add_option("--kernel", ro.kernel)->capture_default_str();
  rate->add_option("--reference-draws", ro.reference_draws)->capture_default_str();
  add_common(rate, true);

  ToyOpts to;
  auto* toy = app.add_subcommand("toy", "multiple adaptation limits of the bimodal toy sampler");
  toy->add_option("--seeds", to.seeds)->capture_default_str();
  toy->add_option("--n", to.n_total, "iterations per run")->capture_default_str();
  toy->add_option("--target", to.target, "target acceptance rate")->capture_default_str();
  toy->add_option("--theta0-low", to.theta0_low)->capture_default_str();
  toy->add_option("--theta0-high", to.theta0_high)->capture_default_str();
  add_common(toy, true);

  CdfOpts cd;
  auto* cdf = app.add_subcommand("cdf", "empirical CDF of the fixed-b limit");
  cdf->add_option("--kernel", cd.kernel)->capture_default_str();
  cdf->add_option("--draws", cd.draws)->capture_default_str();
  cdf->add_option("--lo", cd.lo)->capture_default_str();
  cdf->add_option("--hi", cd.hi)->capture_default_str();
  cdf->add_option("--points", cd.points)->capture_default_str();
  add_common(cdf, true);

  EigsOpts eg;
  auto* eigs = app.add_subcommand("eigs", "Nystrom eigenvalues of the centered kernel");
  eigs->add_option("--kernel", eg.kernel)->capture_default_str();
  eigs->add_option("--m", eg.m)->capture_default_str();
  eigs->add_option("--trace-fraction", eg.trace_fraction)->capture_default_str();
  eigs->add_option("--show", eg.show)->capture_default_str();
  add_common(eigs, false);

  ModelOpts so;
  auto* sim = app.add_subcommand("simulate", "export one chain's h path");
  so.add(sim);
  add_common(sim, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kConfig;
  }

  const fs::path dir = out_dir.empty() ? default_out_dir() : fs::path(out_dir);
  try {
    if (*q) return cmd_quantiles(qo, seed, workers, dir);
    if (*e) return cmd_estimate(eo);
    if (*cov) return cmd_coverage(co, seed, workers, dir);
    if (*rate) return cmd_rate(ro, seed, workers, dir);
    if (*toy) return cmd_toy(to, seed, workers, dir);
    if (*cdf) return cmd_cdf(cd, seed, workers, dir);
    if (*eigs) return cmd_eigs(eg, dir);
    if (*sim) return cmd_simulate(so, seed, dir);
  } catch (const NonStudentizableError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kNumeric;
  } catch (const KernelNotPositiveError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kNumeric;
  } catch (const InputError& err) {
    std::fprintf(stderr, "input error: %s\n", err.what());
    return kInput;
  } catch (const ConfigError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return kConfig;
  } catch (const DomainError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return kConfig;
  } catch (const MissingTableRowError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return kConfig;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kNumeric;
  }
  return kConfig;
}

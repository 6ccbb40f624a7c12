#include "amcci/fixedb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/random/normal_distribution.hpp>

#include "amcci/errors.hpp"
#include "amcci/io.hpp"
#include "amcci/parallel.hpp"

namespace amcci {

namespace {

using Normal = boost::random::normal_distribution<double>;

std::vector<double> left_point_grid(int m) {
  std::vector<double> t(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) t[i] = static_cast<double>(i) / m;
  return t;
}

std::size_t block_count(std::size_t n) { return (n + kDrawBlock - 1) / kDrawBlock; }

template <class Out, class Draw>
void fill_block(std::vector<Out>& out, std::size_t block, std::uint64_t seed, Draw& draw) {
  Rng rng(derive_seed(seed, "draw-block", block));
  const std::size_t begin = block * kDrawBlock;
  const std::size_t end = std::min(out.size(), begin + kDrawBlock);
  for (std::size_t i = begin; i < end; ++i) out[i] = draw(rng);
}

template <class Out, class Draw>
std::vector<Out> sample_parallel(std::size_t n, std::uint64_t seed, int workers, Draw draw) {
  std::vector<Out> out(n);
  parallel_for(block_count(n), workers, [&](std::size_t b) { fill_block(out, b, seed, draw); });
  return out;
}

template <class Out, class Draw>
std::vector<Out> sample_serial(std::size_t n, std::uint64_t seed, Draw draw) {
  std::vector<Out> out(n);
  for (std::size_t b = 0; b < block_count(n); ++b) fill_block(out, b, seed, draw);
  return out;
}

void validate_table_request(std::span<const double> levels, std::size_t n_draws) {
  if (n_draws < 100000) throw DomainError("quantile tables need at least 1e5 draws");
  if (levels.empty()) throw DomainError("no quantile levels requested");
  for (double p : levels) {
    if (!(p > 0.0 && p < 0.5)) throw DomainError("tail probabilities must lie in (0, 0.5)");
  }
}

struct TSample {
  std::vector<double> sorted;
  std::size_t non_positive = 0;
  int grid = 0;
};

TSample simulate_T(const WeightKernel& kernel, std::size_t n_draws, std::uint64_t seed,
                   const FixedBOptions& options) {
  TSample s;
  if (options.method == FixedBMethod::Eigen) {
    const auto decomp = nystrom_decompose(kernel, options.eigen_grid, options.trace_fraction);
    s.sorted = sample_T_eigen(decomp, n_draws, seed, options.workers);
    s.grid = options.eigen_grid;
  } else {
    const ItoGrid grid(kernel, options.ito_grid);
    const auto draws = sample_chi2_ito(grid, n_draws, seed, options.workers);
    s.sorted.reserve(draws.size());
    for (const auto& d : draws) {
      if (!(d.chi2 > 0.0)) ++s.non_positive;
      s.sorted.push_back(ito_T(d));
    }
    s.grid = options.ito_grid;
  }
  std::sort(s.sorted.begin(), s.sorted.end());
  return s;
}

}  // namespace

ItoGrid::ItoGrid(const WeightKernel& kernel, int m) : m_(m), integral_g_(kernel.integral_g()) {
  if (m < 64) throw DomainError("Ito grid needs m >= 64, got " + std::to_string(m));
  const auto points = left_point_grid(m);
  rho_ = rho_star_matrix(kernel, points);
}

ChiSquareDraw draw_chi2_ito(const ItoGrid& grid, Rng& rng) {
  const int m = grid.size();
  const double step = 1.0 / std::sqrt(static_cast<double>(m));
  Normal normal;
  std::vector<double> db(static_cast<std::size_t>(m));
  double b1 = 0.0;
  for (auto& d : db) {
    d = normal(rng) * step;
    b1 += d;
  }
  const Eigen::MatrixXd& rho = grid.rho();
  double iterated = 0.0;
  for (int t = 1; t < m; ++t) {
    const double* column = rho.col(t).data();
    double inner = 0.0;
    for (int s = 0; s < t; ++s) inner += column[s] * db[s];
    iterated += inner * db[t];
  }
  return {1.0 - grid.integral_g() + 2.0 * iterated, b1};
}

double draw_chi2_eigen(const MercerDecomposition& decomp, Rng& rng) {
  Normal normal;
  double chi2 = 0.0;
  for (double alpha : decomp.eigenvalues) {
    const double z = normal(rng);
    chi2 += alpha * z * z;
  }
  return chi2;
}

double draw_T_eigen(const MercerDecomposition& decomp, Rng& rng) {
  if (decomp.eigenvalues.empty()) throw DomainError("decomposition has no positive eigenvalue");
  Normal normal;
  const double z0 = normal(rng);
  return z0 / std::sqrt(draw_chi2_eigen(decomp, rng));
}

double ito_T(const ChiSquareDraw& draw) {
  if (draw.chi2 > 0.0) return draw.b1 / std::sqrt(draw.chi2);
  return std::copysign(std::numeric_limits<double>::infinity(), draw.b1);
}

std::vector<double> sample_T_eigen(const MercerDecomposition& decomp, std::size_t n_draws,
                                   std::uint64_t seed, int workers) {
  if (decomp.eigenvalues.empty()) throw DomainError("decomposition has no positive eigenvalue");
  return sample_parallel<double>(n_draws, seed, workers,
                                 [&decomp](Rng& rng) { return draw_T_eigen(decomp, rng); });
}

std::vector<double> sample_chi2_eigen(const MercerDecomposition& decomp, std::size_t n_draws,
                                      std::uint64_t seed, int workers) {
  return sample_parallel<double>(n_draws, seed, workers,
                                 [&decomp](Rng& rng) { return draw_chi2_eigen(decomp, rng); });
}

std::vector<ChiSquareDraw> sample_chi2_ito(const ItoGrid& grid, std::size_t n_draws,
                                           std::uint64_t seed, int workers) {
  return sample_parallel<ChiSquareDraw>(n_draws, seed, workers,
                                        [&grid](Rng& rng) { return draw_chi2_ito(grid, rng); });
}

namespace reference {

std::vector<double> sample_T_eigen(const MercerDecomposition& decomp, std::size_t n_draws,
                                   std::uint64_t seed) {
  return sample_serial<double>(n_draws, seed,
                               [&decomp](Rng& rng) { return draw_T_eigen(decomp, rng); });
}

std::vector<ChiSquareDraw> sample_chi2_ito(const ItoGrid& grid, std::size_t n_draws,
                                           std::uint64_t seed) {
  return sample_serial<ChiSquareDraw>(n_draws, seed,
                                      [&grid](Rng& rng) { return draw_chi2_ito(grid, rng); });
}

}  // namespace reference

const QuantileRow* FixedBQuantileTable::find(double tail_prob) const {
  for (const auto& row : rows) {
    if (std::abs(row.tail_prob - tail_prob) <= 1e-12) return &row;
  }
  return nullptr;
}

double sorted_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level outside [0, 1]");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double order_statistic_halfwidth(std::span<const double> sorted, double p) {
  const double n = static_cast<double>(sorted.size());
  const double spread = 1.959963984540054 * std::sqrt(n * p * (1.0 - p));
  const double last = n - 1.0;
  const auto lo = static_cast<std::size_t>(std::clamp(std::floor(n * p - spread), 0.0, last));
  const auto hi = static_cast<std::size_t>(std::clamp(std::ceil(n * p + spread), 0.0, last));
  return 0.5 * (sorted[hi] - sorted[lo]);
}

FixedBQuantileTable quantile_table(const WeightKernel& kernel, std::span<const double> levels,
                                   std::size_t n_draws, std::uint64_t seed,
                                   const FixedBOptions& options) {
  validate_table_request(levels, n_draws);
  const auto sample = simulate_T(kernel, n_draws, seed, options);

  FixedBQuantileTable table;
  table.kernel = kernel.name();
  table.kernel_id = kernel.id();
  table.method = options.method;
  table.n_draws = n_draws;
  table.grid = sample.grid;
  table.seed = seed;
  table.non_positive_draws = sample.non_positive;
  for (double p : levels) {
    table.rows.push_back({p, sorted_quantile(sample.sorted, 1.0 - p),
                          order_statistic_halfwidth(sample.sorted, 1.0 - p)});
  }
  return table;
}

std::vector<CdfPoint> cdf_table(const WeightKernel& kernel, std::span<const double> grid,
                                std::size_t n_draws, std::uint64_t seed,
                                const FixedBOptions& options) {
  if (!std::is_sorted(grid.begin(), grid.end())) throw DomainError("cdf grid must be sorted");
  if (n_draws == 0) throw DomainError("cdf table needs at least one draw");
  const auto sample = simulate_T(kernel, n_draws, seed, options);
  std::vector<CdfPoint> out;
  out.reserve(grid.size());
  const double n = static_cast<double>(sample.sorted.size());
  for (double x : grid) {
    const auto count = std::upper_bound(sample.sorted.begin(), sample.sorted.end(), x) -
                       sample.sorted.begin();
    out.push_back({x, static_cast<double>(count) / n});
  }
  return out;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("KS distance of an empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

KsReport ks_compare(std::vector<double> a, std::vector<double> b) {
  KsReport r;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  r.threshold = 1.63 * std::sqrt((na + nb) / (na * nb));
  r.distance = ks_distance(std::move(a), std::move(b));
  r.pass = r.distance <= r.threshold;
  return r;
}

KsReport crossvalidate_routes(const WeightKernel& kernel, int m, std::size_t n_draws,
                              std::uint64_t seed, int workers) {
  const ItoGrid grid(kernel, m);
  const auto ito = sample_chi2_ito(grid, n_draws, derive_seed(seed, "ito"), workers);
  std::vector<double> ito_t;
  ito_t.reserve(ito.size());
  std::size_t non_positive = 0;
  for (const auto& d : ito) {
    if (!(d.chi2 > 0.0)) ++non_positive;
    ito_t.push_back(ito_T(d));
  }
  const auto decomp = nystrom_decompose(kernel);
  auto eigen_t = sample_T_eigen(decomp, n_draws, derive_seed(seed, "eigen"), workers);
  auto report = ks_compare(std::move(ito_t), std::move(eigen_t));
  report.non_positive_draws = non_positive;
  return report;
}

std::string to_csv(const FixedBQuantileTable& table) {
  std::ostringstream out;
  out << "level,critical_value,mc_se\n";
  for (const auto& row : table.rows) {
    out << io::fmt(row.tail_prob) << ',' << io::fmt(row.critical_value) << ','
        << io::fmt(row.mc_se) << '\n';
  }
  return out.str();
}

std::string to_csv(std::span<const CdfPoint> cdf) {
  std::ostringstream out;
  out << "x,cdf\n";
  for (const auto& p : cdf) out << io::fmt(p.x) << ',' << io::fmt(p.cdf) << '\n';
  return out.str();
}

nlohmann::json to_json(const FixedBQuantileTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"level", r.tail_prob}, {"critical_value", r.critical_value}, {"mc_se", r.mc_se}});
  }
  return {{"kernel", table.kernel},
          {"kernel_id", std::string(to_string(table.kernel_id))},
          {"method", table.method == FixedBMethod::Eigen ? "eigen" : "ito"},
          {"n_draws", table.n_draws},
          {"grid", table.grid},
          {"seed", table.seed},
          {"non_positive_draws", table.non_positive_draws},
          {"rows", rows}};
}

FixedBQuantileTable quantile_table_from_json(const nlohmann::json& j) {
  FixedBQuantileTable t;
  t.kernel = j.at("kernel").get<std::string>();
  const auto id = j.at("kernel_id").get<std::string>();
  t.kernel_id = id == "bartlett"    ? KernelId::Bartlett
                : id == "quadratic" ? KernelId::Quadratic
                                    : KernelId::Custom;
  t.method = j.at("method").get<std::string>() == "ito" ? FixedBMethod::Ito : FixedBMethod::Eigen;
  t.n_draws = j.at("n_draws").get<std::size_t>();
  t.grid = j.at("grid").get<int>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.non_positive_draws = j.value("non_positive_draws", std::size_t{0});
  for (const auto& r : j.at("rows")) {
    t.rows.push_back({r.at("level").get<double>(), r.at("critical_value").get<double>(),
                      r.at("mc_se").get<double>()});
  }
  return t;
}

FixedBQuantileTable quantile_table_from_csv(const std::string& text, const WeightKernel& kernel) {
  const auto csv = io::parse_csv(text);
  if (csv.header != std::vector<std::string>{"level", "critical_value", "mc_se"}) {
    throw std::runtime_error("quantile csv must have header level,critical_value,mc_se");
  }
  FixedBQuantileTable t;
  t.kernel = kernel.name();
  t.kernel_id = kernel.id();
  for (const auto& row : csv.rows) {
    t.rows.push_back({std::stod(row[0]), std::stod(row[1]), std::stod(row[2])});
  }
  return t;
}

}  // namespace amcci

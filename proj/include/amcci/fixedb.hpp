#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "amcci/mercer.hpp"
#include "amcci/seed.hpp"
#include "amcci/weight_kernel.hpp"

namespace amcci {

// Fixed-bandwidth limit law
//
//   T = Z0 / sqrt(chi2),   chi2 = sum_i alpha_i Z_i^2
//
// simulated either from the Mercer eigenvalues of rho* ("eigen" route) or by
// discretizing the iterated Ito integral
//
//   chi2 = 1 - G + 2 int_0^1 [ int_0^t rho*(s, t) dB(s) ] dB(t)
//
// on a uniform grid with left-point increments ("ito" route).

struct ChiSquareDraw {
  double chi2 = 0.0;
  double b1 = 0.0;  ///< B(1); zero on the eigen route
};

/// rho* evaluated on the left-point grid s/m, s = 0..m-1, for the Ito route.
class ItoGrid {
 public:
  ItoGrid(const WeightKernel& kernel, int m);
  int size() const noexcept { return m_; }
  double integral_g() const noexcept { return integral_g_; }
  const Eigen::MatrixXd& rho() const noexcept { return rho_; }

 private:
  int m_;
  double integral_g_;
  Eigen::MatrixXd rho_;
};

/// One O(m^2) draw. Throws DomainError for m < 64 (checked by ItoGrid).
ChiSquareDraw draw_chi2_ito(const ItoGrid& grid, Rng& rng);
double draw_chi2_eigen(const MercerDecomposition& decomp, Rng& rng);
/// Z0 / sqrt(sum alpha_i Z_i^2); DomainError when no eigenvalue is retained.
double draw_T_eigen(const MercerDecomposition& decomp, Rng& rng);
/// b1 / sqrt(chi2), or +-infinity (sign of b1) when chi2 <= 0.
double ito_T(const ChiSquareDraw& draw);

/// Draw i lives in block i / kDrawBlock, whose stream is
/// derive_seed(seed, "draw-block", block). Results do not depend on `workers`.
inline constexpr std::size_t kDrawBlock = 4096;

std::vector<double> sample_T_eigen(const MercerDecomposition& decomp, std::size_t n_draws,
                                   std::uint64_t seed, int workers = 0);
std::vector<double> sample_chi2_eigen(const MercerDecomposition& decomp, std::size_t n_draws,
                                      std::uint64_t seed, int workers = 0);
std::vector<ChiSquareDraw> sample_chi2_ito(const ItoGrid& grid, std::size_t n_draws,
                                           std::uint64_t seed, int workers = 0);

/// Single-threaded implementations of the batch samplers, kept as the
/// reference the parallel versions are tested against.
namespace reference {
std::vector<double> sample_T_eigen(const MercerDecomposition& decomp, std::size_t n_draws,
                                   std::uint64_t seed);
std::vector<ChiSquareDraw> sample_chi2_ito(const ItoGrid& grid, std::size_t n_draws,
                                           std::uint64_t seed);
}  // namespace reference

enum class FixedBMethod { Eigen, Ito };

struct QuantileRow {
  double tail_prob = 0.0;       ///< alpha / 2
  double critical_value = 0.0;  ///< t with P(T > t) = tail_prob
  double mc_se = 0.0;           ///< half-width of the 95% order-statistic interval
};

struct FixedBQuantileTable {
  std::string kernel;
  KernelId kernel_id = KernelId::Bartlett;
  FixedBMethod method = FixedBMethod::Eigen;
  std::size_t n_draws = 0;
  int grid = 0;  ///< Nystrom grid (eigen) or Brownian grid (ito)
  std::uint64_t seed = 0;
  std::vector<QuantileRow> rows;
  std::size_t non_positive_draws = 0;

  /// Row whose tail probability matches within 1e-12, or nullptr.
  const QuantileRow* find(double tail_prob) const;
};

struct FixedBOptions {
  FixedBMethod method = FixedBMethod::Eigen;
  int eigen_grid = kDefaultNystromGrid;
  double trace_fraction = kDefaultTraceFraction;
  int ito_grid = 512;
  int workers = 0;
};

/// Levels are tail probabilities in (0, 0.5); n_draws >= 1e5.
FixedBQuantileTable quantile_table(const WeightKernel& kernel, std::span<const double> levels,
                                   std::size_t n_draws, std::uint64_t seed,
                                   const FixedBOptions& options = {});

struct CdfPoint {
  double x = 0.0;
  double cdf = 0.0;
};

/// Empirical CDF of T on a sorted grid.
std::vector<CdfPoint> cdf_table(const WeightKernel& kernel, std::span<const double> grid,
                                std::size_t n_draws, std::uint64_t seed,
                                const FixedBOptions& options = {});

struct KsReport {
  double distance = 0.0;
  double threshold = 0.0;  ///< 1.63 sqrt((n_a + n_b) / (n_a n_b)), the asymptotic 1% band
  bool pass = false;
  std::size_t non_positive_draws = 0;
};

/// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b);
KsReport ks_compare(std::vector<double> a, std::vector<double> b);

/// Ito-route T against eigen-route T with n_draws each.
KsReport crossvalidate_routes(const WeightKernel& kernel, int m, std::size_t n_draws,
                              std::uint64_t seed, int workers = 0);

/// Type-7 quantile (linear interpolation between order statistics) of a sorted sample.
double sorted_quantile(std::span<const double> sorted, double p);
/// Half-width of the distribution-free 95% order-statistic interval for the p-quantile.
double order_statistic_halfwidth(std::span<const double> sorted, double p);

std::string to_csv(const FixedBQuantileTable& table);
std::string to_csv(std::span<const CdfPoint> cdf);
nlohmann::json to_json(const FixedBQuantileTable& table);
FixedBQuantileTable quantile_table_from_json(const nlohmann::json& j);
/// Parses the `level,critical_value,mc_se` CSV; metadata comes from the caller.
FixedBQuantileTable quantile_table_from_csv(const std::string& text, const WeightKernel& kernel);

}  // namespace amcci

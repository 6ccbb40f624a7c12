#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "amcci/weight_kernel.hpp"

namespace amcci {

/// Truncated spectral decomposition of the integral operator with kernel
/// rho* on L^2[0, 1], from a Nystrom discretization on the midpoint grid
/// t_i = (i + 1/2) / m.
struct MercerDecomposition {
  KernelId kernel_id = KernelId::Bartlett;
  std::string kernel_name;
  int grid_size = 0;
  /// Retained eigenvalues, descending, each above the truncation threshold.
  std::vector<double> eigenvalues;
  /// eigenfunctions[i][k] ~ phi_i(t_k); orthonormal under (1/m) sum_k.
  /// Empty when the decomposition was loaded from JSON.
  std::vector<std::vector<double>> eigenfunctions;
  /// Sum of all eigenvalues above the threshold.
  double trace_estimate = 0.0;
  /// (sum of retained) / trace_estimate.
  double kept_trace_fraction = 0.0;
  double min_eigenvalue = 0.0;
};

inline constexpr double kEigenvalueThreshold = 1e-10;
inline constexpr double kNegativeTolerance = 1e-8;
inline constexpr int kDefaultNystromGrid = 1000;
inline constexpr double kDefaultTraceFraction = 0.999;

/// Throws KernelNotPositiveError when the smallest eigenvalue is below
/// -1e-8 and DomainError when m < 50 or trace_fraction is outside (0.9, 1].
MercerDecomposition nystrom_decompose(const WeightKernel& kernel, int m = kDefaultNystromGrid,
                                      double trace_fraction = kDefaultTraceFraction);

struct PositiveDefinitenessReport {
  int grid_size = 0;
  double min_eigenvalue = 0.0;
  bool pass = false;
};

PositiveDefinitenessReport positive_definiteness_report(const WeightKernel& kernel, int m);

/// Midpoint grid (i + 1/2)/m, i = 0..m-1.
std::vector<double> midpoint_grid(int m);

nlohmann::json to_json(const MercerDecomposition& d);
/// Eigenfunctions are not serialized; the result carries eigenvalues only.
MercerDecomposition mercer_from_json(const nlohmann::json& j);

}  // namespace amcci

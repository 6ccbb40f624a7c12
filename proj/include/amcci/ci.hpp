#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "amcci/fixedb.hpp"
#include "amcci/lagwindow.hpp"
#include "amcci/weight_kernel.hpp"

namespace amcci {

enum class CiMethod { Classical, FixedB };

std::string_view to_string(CiMethod method);

struct ConfidenceInterval {
  double center = 0.0;
  double halfwidth = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  CiMethod method = CiMethod::Classical;
  double level = 0.95;
  std::size_t c_n = 0;
  KernelId kernel_id = KernelId::Bartlett;
  double critical_value_used = 0.0;
  LagWindowEstimate estimate;
  /// Classical interval with c_n > n^0.9, outside the regime it is valid for.
  bool bandwidth_warning = false;

  bool contains(double value) const noexcept { return lower <= value && value <= upper; }
};

/// Standard-normal quantile.
double normal_quantile(double p);

/// mean +- z_{1-a/2} sqrt(Gamma_n^2 / n), Gamma_n^2 at bandwidth c_n < n.
ConfidenceInterval ci_classical(std::span<const double> x, std::size_t c_n,
                                const WeightKernel& kernel, double level);

/// mean +- t_{1-a/2} sqrt(Gamma_n^2 / n), Gamma_n^2 at c_n = n and t read
/// from `table`. Throws MissingTableRowError when the level is not tabulated
/// or the table belongs to another kernel.
ConfidenceInterval ci_fixedb(std::span<const double> x, const WeightKernel& kernel,
                             double level, const FixedBQuantileTable& table);

/// Both intervals from an already computed estimate; used by the coverage
/// harness, which reuses one set of autocovariances across many bandwidths.
ConfidenceInterval interval_from_estimate(const LagWindowEstimate& estimate, CiMethod method,
                                          double level, double critical_value);

class MissingTableRowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace amcci

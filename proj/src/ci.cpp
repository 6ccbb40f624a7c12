#include "amcci/ci.hpp"

#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "amcci/errors.hpp"

namespace amcci {

namespace {

void validate_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
}

}  // namespace

std::string_view to_string(CiMethod method) {
  return method == CiMethod::Classical ? "classical" : "fixedb";
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal quantile needs p in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

ConfidenceInterval interval_from_estimate(const LagWindowEstimate& estimate, CiMethod method,
                                          double level, double critical_value) {
  if (!estimate.studentizable()) throw NonStudentizableError(estimate.gamma_sq);
  ConfidenceInterval ci;
  ci.method = method;
  ci.level = level;
  ci.c_n = estimate.c_n;
  ci.kernel_id = estimate.kernel_id;
  ci.critical_value_used = critical_value;
  ci.estimate = estimate;
  ci.center = estimate.mean;
  ci.halfwidth = critical_value * estimate.mc_error();
  ci.lower = ci.center - ci.halfwidth;
  ci.upper = ci.center + ci.halfwidth;
  return ci;
}

ConfidenceInterval ci_classical(std::span<const double> x, std::size_t c_n,
                                const WeightKernel& kernel, double level) {
  validate_level(level);
  if (c_n >= x.size()) throw DomainError("classical interval needs c_n < n");
  const auto estimate = gamma_n_sq(x, c_n, kernel);
  auto ci = interval_from_estimate(estimate, CiMethod::Classical, level,
                                   normal_quantile(1.0 - (1.0 - level) / 2.0));
  ci.bandwidth_warning =
      static_cast<double>(c_n) > std::pow(static_cast<double>(x.size()), 0.9);
  return ci;
}

ConfidenceInterval ci_fixedb(std::span<const double> x, const WeightKernel& kernel,
                             double level, const FixedBQuantileTable& table) {
  validate_level(level);
  if (table.kernel_id != kernel.id() || table.kernel != kernel.name()) {
    throw MissingTableRowError("quantile table is for kernel '" + table.kernel + "', not '" +
                               kernel.name() + "'");
  }
  const double tail = (1.0 - level) / 2.0;
  const auto* row = table.find(tail);
  if (row == nullptr) {
    throw MissingTableRowError("quantile table has no row for tail probability " +
                               std::to_string(tail));
  }
  const auto estimate = gamma_n_sq(x, x.size(), kernel);
  return interval_from_estimate(estimate, CiMethod::FixedB, level, row->critical_value);
}

}  // namespace amcci

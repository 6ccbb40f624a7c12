#include "amcci/mercer.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "amcci/errors.hpp"

namespace amcci {

namespace {

Eigen::MatrixXd nystrom_matrix(const WeightKernel& kernel, int m) {
  const auto grid = midpoint_grid(m);
  Eigen::MatrixXd r = rho_star_matrix(kernel, grid);
  r /= static_cast<double>(m);
  return r;
}

void require_grid(int m) {
  if (m < 50) throw DomainError("Nystrom grid needs m >= 50, got " + std::to_string(m));
}

}  // namespace

std::vector<double> midpoint_grid(int m) {
  std::vector<double> t(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) t[i] = (i + 0.5) / m;
  return t;
}

MercerDecomposition nystrom_decompose(const WeightKernel& kernel, int m, double trace_fraction) {
  require_grid(m);
  if (!(trace_fraction > 0.9 && trace_fraction <= 1.0)) {
    throw DomainError("trace_fraction must lie in (0.9, 1]");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(nystrom_matrix(kernel, m));
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigen decomposition did not converge");
  }
  const Eigen::VectorXd& values = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd& vectors = solver.eigenvectors();

  MercerDecomposition d;
  d.kernel_id = kernel.id();
  d.kernel_name = kernel.name();
  d.grid_size = m;
  d.min_eigenvalue = values[0];
  if (d.min_eigenvalue < -kNegativeTolerance) {
    throw KernelNotPositiveError(kernel.name(), d.min_eigenvalue);
  }

  double trace = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] > kEigenvalueThreshold) trace += values[i];
  }
  d.trace_estimate = trace;

  const double scale = std::sqrt(static_cast<double>(m));
  double kept = 0.0;
  for (Eigen::Index i = values.size() - 1; i >= 0; --i) {
    if (values[i] <= kEigenvalueThreshold) break;
    if (!d.eigenvalues.empty() && kept >= trace_fraction * trace) break;
    d.eigenvalues.push_back(values[i]);
    std::vector<double> phi(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) phi[k] = scale * vectors(k, i);
    d.eigenfunctions.push_back(std::move(phi));
    kept += values[i];
  }
  d.kept_trace_fraction = trace > 0.0 ? kept / trace : 0.0;
  return d;
}

PositiveDefinitenessReport positive_definiteness_report(const WeightKernel& kernel, int m) {
  require_grid(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(nystrom_matrix(kernel, m),
                                                        Eigen::EigenvaluesOnly);
  PositiveDefinitenessReport report;
  report.grid_size = m;
  report.min_eigenvalue = solver.eigenvalues()[0];
  report.pass = report.min_eigenvalue >= -kNegativeTolerance;
  return report;
}

nlohmann::json to_json(const MercerDecomposition& d) {
  return {{"kernel", d.kernel_name},
          {"kernel_id", std::string(to_string(d.kernel_id))},
          {"m", d.grid_size},
          {"eigenvalues", d.eigenvalues},
          {"trace_estimate", d.trace_estimate},
          {"kept_trace_fraction", d.kept_trace_fraction},
          {"min_eigenvalue", d.min_eigenvalue}};
}

MercerDecomposition mercer_from_json(const nlohmann::json& j) {
  MercerDecomposition d;
  d.kernel_name = j.at("kernel").get<std::string>();
  const auto id = j.at("kernel_id").get<std::string>();
  d.kernel_id = id == "bartlett"    ? KernelId::Bartlett
                : id == "quadratic" ? KernelId::Quadratic
                                    : KernelId::Custom;
  d.grid_size = j.at("m").get<int>();
  d.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  d.trace_estimate = j.at("trace_estimate").get<double>();
  d.kept_trace_fraction = j.at("kept_trace_fraction").get<double>();
  d.min_eigenvalue = j.value("min_eigenvalue", 0.0);
  return d;
}

}  // namespace amcci

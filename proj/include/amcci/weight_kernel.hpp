#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace amcci {

enum class KernelId { Bartlett, Quadratic, Custom };

std::string_view to_string(KernelId id);

/// Even lag-window weight function supported on [-1, 1] with w(0) = 1 and
/// w(1) = 0, together with the derived quantities
///
///   g(t)        = int_0^1 w(t - u) du
///   G           = int_0^1 g(t) dt
///   rho*(s, t)  = w(t - s) - g(t) - g(s) + G
///
/// whose positive eigenvalues define the fixed-bandwidth limit law.
/// Instances are immutable and cheap to copy.
class WeightKernel {
 public:
  /// w(u) = (1 - |u|) 1(|u| < 1)
  static WeightKernel bartlett();
  /// w(u) = (1 - u^2) 1(|u| < 1)
  static WeightKernel quadratic();
  /// User-supplied shape. `shape` is evaluated on (-1, 1) and at the
  /// endpoints during validation; outside the support w is zero regardless.
  /// Throws DomainError when evenness, w(0) = 1, w(1) = 0 or 0 <= w <= 1
  /// fail on a 1001-point grid over [-1, 1]. `breakpoints` lists points of
  /// (0, 1) where w has a jump or kink; quadrature splits there.
  static WeightKernel custom(std::string name, std::function<double(double)> shape,
                             std::vector<double> breakpoints = {});
  /// w(u) = 1(|u| < 1/2). Its centered kernel has negative eigenvalues, so
  /// it has no fixed-bandwidth law; useful for exercising that failure path.
  static WeightKernel truncated();
  /// "bartlett", "quadratic" or "truncated".
  static WeightKernel from_name(std::string_view name);

  KernelId id() const noexcept { return id_; }
  const std::string& name() const noexcept { return *name_; }
  bool has_closed_rho_star() const noexcept { return id_ != KernelId::Custom; }

  double w(double u) const;
  /// Domain error for t outside [0, 1].
  double g(double t) const;
  double integral_g() const noexcept { return integral_g_; }
  /// Closed form for the built-in kernels, generic formula otherwise.
  double rho_star(double s, double t) const;
  /// Always the generic w - g - g + G formula.
  double rho_star_generic(double s, double t) const;

 private:
  WeightKernel(KernelId id, std::string name, std::function<double(double)> shape,
               std::vector<double> breakpoints);

  // int_0^a w(v) dv for a in [0, 1]
  double primitive(double a) const;

  KernelId id_;
  std::shared_ptr<const std::string> name_;
  std::shared_ptr<const std::function<double(double)>> shape_;
  std::shared_ptr<const std::vector<double>> breakpoints_;
  double integral_g_ = 0.0;
};

/// Matrix R(i, j) = rho*(points[i], points[j]). g is evaluated once per point,
/// so this is the efficient path for quadrature-backed custom kernels.
Eigen::MatrixXd rho_star_matrix(const WeightKernel& kernel, std::span<const double> points);

}  // namespace amcci

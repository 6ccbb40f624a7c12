#include "amcci/weight_kernel.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "amcci/errors.hpp"

namespace amcci {

namespace {

constexpr double kQuadratureTolerance = 1e-10;
constexpr double kValidationTolerance = 1e-12;
constexpr int kValidationGrid = 1001;

void require_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0, 1], got " + std::to_string(v));
  }
}

}  // namespace

std::string_view to_string(KernelId id) {
  switch (id) {
    case KernelId::Bartlett:
      return "bartlett";
    case KernelId::Quadratic:
      return "quadratic";
    case KernelId::Custom:
      return "custom";
  }
  return "unknown";
}

WeightKernel::WeightKernel(KernelId id, std::string name, std::function<double(double)> shape,
                           std::vector<double> breakpoints)
    : id_(id),
      name_(std::make_shared<const std::string>(std::move(name))),
      shape_(std::make_shared<const std::function<double(double)>>(std::move(shape))),
      breakpoints_(std::make_shared<const std::vector<double>>(std::move(breakpoints))) {}

WeightKernel WeightKernel::bartlett() {
  WeightKernel k(KernelId::Bartlett, "bartlett", [](double u) { return 1.0 - std::abs(u); }, {});
  k.integral_g_ = 2.0 / 3.0;
  return k;
}

WeightKernel WeightKernel::quadratic() {
  WeightKernel k(KernelId::Quadratic, "quadratic", [](double u) { return 1.0 - u * u; }, {});
  k.integral_g_ = 5.0 / 6.0;
  return k;
}

WeightKernel WeightKernel::custom(std::string name, std::function<double(double)> shape,
                                  std::vector<double> breakpoints) {
  if (!shape) throw DomainError("custom kernel needs a shape function");
  for (int i = 0; i < kValidationGrid; ++i) {
    const double u = -1.0 + 2.0 * i / (kValidationGrid - 1);
    const double a = shape(u);
    const double b = shape(-u);
    if (!std::isfinite(a) || std::abs(a - b) > kValidationTolerance) {
      throw DomainError("custom kernel '" + name + "' is not even at u = " + std::to_string(u));
    }
    if (a < -kValidationTolerance || a > 1.0 + kValidationTolerance) {
      throw DomainError("custom kernel '" + name + "' leaves [0, 1] at u = " + std::to_string(u));
    }
  }
  if (std::abs(shape(0.0) - 1.0) > kValidationTolerance) {
    throw DomainError("custom kernel '" + name + "' needs w(0) = 1");
  }
  if (std::abs(shape(1.0)) > kValidationTolerance) {
    throw DomainError("custom kernel '" + name + "' needs w(1) = 0");
  }
  std::erase_if(breakpoints, [](double b) { return !(b > 0.0 && b < 1.0); });
  std::sort(breakpoints.begin(), breakpoints.end());

  WeightKernel k(KernelId::Custom, std::move(name), std::move(shape), std::move(breakpoints));
  // G = int_{-1}^{1} w(v) (1 - |v|) dv = 2 int_0^1 w(v) (1 - v) dv by evenness.
  double total = 0.0;
  double lo = 0.0;
  auto pieces = *k.breakpoints_;
  pieces.push_back(1.0);
  for (double hi : pieces) {
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&k](double v) { return k.w(v) * (1.0 - v); }, lo, hi, 20, kQuadratureTolerance);
    lo = hi;
  }
  k.integral_g_ = 2.0 * total;
  return k;
}

WeightKernel WeightKernel::from_name(std::string_view name) {
  if (name == "bartlett") return bartlett();
  if (name == "quadratic") return quadratic();
  if (name == "truncated") return truncated();
  throw DomainError("unknown kernel '" + std::string(name) +
                    "' (expected bartlett, quadratic or truncated)");
}

WeightKernel WeightKernel::truncated() {
  return custom("truncated", [](double u) { return std::abs(u) < 0.5 ? 1.0 : 0.0; }, {0.5});
}

double WeightKernel::w(double u) const {
  if (!(std::abs(u) < 1.0)) return 0.0;
  return (*shape_)(u);
}

double WeightKernel::primitive(double a) const {
  if (a <= 0.0) return 0.0;
  double total = 0.0;
  double lo = 0.0;
  for (double b : *breakpoints_) {
    if (b >= a) break;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [this](double v) { return w(v); }, lo, b, 20, kQuadratureTolerance);
    lo = b;
  }
  total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [this](double v) { return w(v); }, lo, a, 20, kQuadratureTolerance);
  return total;
}

double WeightKernel::g(double t) const {
  require_unit(t, "t");
  switch (id_) {
    case KernelId::Bartlett:
      return 1.0 - (t * t + (1.0 - t) * (1.0 - t)) / 2.0;
    case KernelId::Quadratic:
      return 1.0 - (t * t * t + (1.0 - t) * (1.0 - t) * (1.0 - t)) / 3.0;
    case KernelId::Custom:
      // int_{t-1}^{t} w(v) dv split at zero, folded by evenness.
      return primitive(t) + primitive(1.0 - t);
  }
  return 0.0;
}

double WeightKernel::rho_star_generic(double s, double t) const {
  require_unit(s, "s");
  require_unit(t, "t");
  return w(t - s) - g(t) - g(s) + integral_g_;
}

double WeightKernel::rho_star(double s, double t) const {
  require_unit(s, "s");
  require_unit(t, "t");
  switch (id_) {
    case KernelId::Bartlett:
      return 2.0 / 3.0 - s * (1.0 - s) - t * (1.0 - t) - std::abs(s - t);
    case KernelId::Quadratic:
      return 2.0 * (s - 0.5) * (t - 0.5);
    case KernelId::Custom:
      break;
  }
  return rho_star_generic(s, t);
}

Eigen::MatrixXd rho_star_matrix(const WeightKernel& kernel, std::span<const double> points) {
  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd r(m, m);
  if (kernel.has_closed_rho_star()) {
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < m; ++i) r(i, j) = kernel.rho_star(points[i], points[j]);
    }
    return r;
  }
  Eigen::VectorXd g(m);
  for (Eigen::Index i = 0; i < m; ++i) g[i] = kernel.g(points[i]);
  const double big_g = kernel.integral_g();
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      r(i, j) = kernel.w(points[j] - points[i]) - g[i] - g[j] + big_g;
    }
  }
  return r;
}

}  // namespace amcci

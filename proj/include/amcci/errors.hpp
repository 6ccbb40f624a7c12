#pragma once

#include <stdexcept>
#include <string>

namespace amcci {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The lag-window estimate is not positive, so the statistic cannot be
/// studentized and no interval can be formed.
class NonStudentizableError : public std::runtime_error {
 public:
  explicit NonStudentizableError(double gamma_sq)
      : std::runtime_error("lag-window estimate is not positive: " + std::to_string(gamma_sq)),
        gamma_sq_(gamma_sq) {}
  double gamma_sq() const noexcept { return gamma_sq_; }

 private:
  double gamma_sq_;
};

/// The centered kernel has a clearly negative eigenvalue.
class KernelNotPositiveError : public std::runtime_error {
 public:
  KernelNotPositiveError(const std::string& kernel, double min_eigenvalue)
      : std::runtime_error("kernel '" + kernel + "' is not positive semidefinite (min eigenvalue " +
                           std::to_string(min_eigenvalue) + ")"),
        min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// Invalid sampler / study configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace amcci

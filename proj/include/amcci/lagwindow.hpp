#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "amcci/weight_kernel.hpp"

namespace amcci {

/// Lag-window estimate
///
///   Gamma_n^2 = gamma_0 + 2 sum_{k=1}^{c_n - 1} w(k / c_n) gamma_k
///
/// with gamma_k = n^{-1} sum_{j=1}^{n-k} (x_j - mean)(x_{j+k} - mean).
struct LagWindowEstimate {
  double gamma_sq = 0.0;
  double gamma0 = 0.0;
  double mean = 0.0;
  std::size_t n = 0;
  std::size_t c_n = 0;
  KernelId kernel_id = KernelId::Bartlett;
  std::string kernel;
  /// n gamma_0 / Gamma_n^2; NaN when Gamma_n^2 <= 0.
  double ess = 0.0;

  bool studentizable() const noexcept { return gamma_sq > 0.0; }
  /// sqrt(Gamma_n^2 / n); NaN when not studentizable.
  double mc_error() const noexcept;
};

/// Lags up to this value use direct sums; longer requests go through the FFT.
inline constexpr std::size_t kDirectMaxLag = 64;

double sample_mean(std::span<const double> x);

/// gamma_0..gamma_max_lag with divisor n. Domain error for n < 2 or
/// max_lag > n - 1.
std::vector<double> autocovariances(std::span<const double> x, std::size_t max_lag);
/// Zero-padded FFT route, O(n log n) regardless of max_lag.
std::vector<double> autocovariances_fft(std::span<const double> x, std::size_t max_lag);

namespace reference {
/// O(n * max_lag) direct sums straight from the definition.
std::vector<double> autocovariances_direct(std::span<const double> x, std::size_t max_lag);
}  // namespace reference

/// Domain error unless 1 <= c_n <= n. A non-positive estimate is returned,
/// not clamped; check studentizable().
LagWindowEstimate gamma_n_sq(std::span<const double> x, std::size_t c_n,
                             const WeightKernel& kernel);

/// Same estimate from precomputed autocovariances (at least min(c_n, n) lags).
LagWindowEstimate gamma_from_autocovariances(std::span<const double> acov, std::size_t n,
                                             double mean, std::size_t c_n,
                                             const WeightKernel& kernel);

/// sqrt(n) (mean - pi_h) / sqrt(Gamma_n^2). Throws NonStudentizableError when
/// Gamma_n^2 <= 0.
double t_stat(std::span<const double> x, double pi_h, std::size_t c_n,
              const WeightKernel& kernel);

/// Bandwidth rule: a fixed integer, n^delta rounded, or the full sample.
class Bandwidth {
 public:
  enum class Kind { Fixed, Power, Full };

  static Bandwidth fixed(std::size_t c);
  static Bandwidth power(double delta);
  static Bandwidth full() { return Bandwidth(Kind::Full, 0, 0.0); }
  /// "n", "npow:<delta>" or a positive integer.
  static Bandwidth parse(const std::string& text);

  Kind kind() const noexcept { return kind_; }
  double delta() const noexcept { return delta_; }
  /// c_n for a sample of size n, clamped into [1, n].
  std::size_t resolve(std::size_t n) const;
  std::string to_string() const;

 private:
  Bandwidth(Kind kind, std::size_t c, double delta) : kind_(kind), fixed_(c), delta_(delta) {}
  Kind kind_;
  std::size_t fixed_;
  double delta_;
};

/// max(1, round(n^delta)).
std::size_t bandwidth_npow(std::size_t n, double delta);

}  // namespace amcci

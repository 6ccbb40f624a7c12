#include "amcci/lagwindow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "amcci/errors.hpp"

namespace amcci {

namespace {

void validate_lags(std::size_t n, std::size_t max_lag) {
  if (n < 2) throw DomainError("autocovariances need n >= 2");
  if (max_lag > n - 1) throw DomainError("max_lag must not exceed n - 1");
}

void validate_bandwidth(std::size_t n, std::size_t c_n) {
  if (c_n < 1 || c_n > n) {
    throw DomainError("bandwidth c_n must lie in [1, n], got " + std::to_string(c_n));
  }
}

}  // namespace

double LagWindowEstimate::mc_error() const noexcept {
  if (!studentizable()) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(gamma_sq / static_cast<double>(n));
}

double sample_mean(std::span<const double> x) {
  if (x.empty()) throw DomainError("mean of an empty sequence");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

namespace reference {

std::vector<double> autocovariances_direct(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  validate_lags(n, max_lag);
  const double mean = sample_mean(x);
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = x[i] - mean;
  std::vector<double> acov(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j + k < n; ++j) s += centered[j] * centered[j + k];
    acov[k] = s / static_cast<double>(n);
  }
  return acov;
}

}  // namespace reference

std::vector<double> autocovariances(std::span<const double> x, std::size_t max_lag) {
  validate_lags(x.size(), max_lag);
  if (max_lag <= kDirectMaxLag) return reference::autocovariances_direct(x, max_lag);
  return autocovariances_fft(x, max_lag);
}

LagWindowEstimate gamma_from_autocovariances(std::span<const double> acov, std::size_t n,
                                             double mean, std::size_t c_n,
                                             const WeightKernel& kernel) {
  validate_bandwidth(n, c_n);
  const std::size_t last_lag = std::min(c_n, n) - 1;
  if (acov.size() < last_lag + 1) throw DomainError("not enough autocovariance lags");

  LagWindowEstimate e;
  e.n = n;
  e.c_n = c_n;
  e.mean = mean;
  e.kernel_id = kernel.id();
  e.kernel = kernel.name();
  e.gamma0 = acov[0];
  double tail = 0.0;
  const double c = static_cast<double>(c_n);
  for (std::size_t k = 1; k <= last_lag; ++k) tail += kernel.w(static_cast<double>(k) / c) * acov[k];
  e.gamma_sq = acov[0] + 2.0 * tail;
  e.ess = e.studentizable() ? static_cast<double>(n) * e.gamma0 / e.gamma_sq
                            : std::numeric_limits<double>::quiet_NaN();
  return e;
}

LagWindowEstimate gamma_n_sq(std::span<const double> x, std::size_t c_n,
                             const WeightKernel& kernel) {
  const std::size_t n = x.size();
  validate_lags(n, 0);
  validate_bandwidth(n, c_n);
  const auto acov = autocovariances(x, std::min(c_n, n) - 1);
  return gamma_from_autocovariances(acov, n, sample_mean(x), c_n, kernel);
}

double t_stat(std::span<const double> x, double pi_h, std::size_t c_n,
              const WeightKernel& kernel) {
  const auto e = gamma_n_sq(x, c_n, kernel);
  if (!e.studentizable()) throw NonStudentizableError(e.gamma_sq);
  return std::sqrt(static_cast<double>(e.n)) * (e.mean - pi_h) / std::sqrt(e.gamma_sq);
}

std::size_t bandwidth_npow(std::size_t n, double delta) {
  const double c = std::round(std::pow(static_cast<double>(n), delta));
  return c < 1.0 ? 1 : static_cast<std::size_t>(c);
}

Bandwidth Bandwidth::fixed(std::size_t c) {
  if (c < 1) throw DomainError("bandwidth must be at least 1");
  return Bandwidth(Kind::Fixed, c, 0.0);
}

Bandwidth Bandwidth::power(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("bandwidth exponent must lie in (0, 1]");
  return Bandwidth(Kind::Power, 0, delta);
}

Bandwidth Bandwidth::parse(const std::string& text) {
  if (text == "n") return full();
  if (text.rfind("npow:", 0) == 0) {
    std::size_t used = 0;
    const std::string rest = text.substr(5);
    double delta = 0.0;
    try {
      delta = std::stod(rest, &used);
    } catch (const std::exception&) {
      throw DomainError("bad bandwidth exponent in '" + text + "'");
    }
    if (used != rest.size()) throw DomainError("bad bandwidth exponent in '" + text + "'");
    return power(delta);
  }
  std::size_t used = 0;
  long long c = 0;
  try {
    c = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw DomainError("bandwidth must be an integer, 'n' or 'npow:<delta>', got '" + text + "'");
  }
  if (used != text.size() || c < 1) {
    throw DomainError("bandwidth must be an integer, 'n' or 'npow:<delta>', got '" + text + "'");
  }
  return fixed(static_cast<std::size_t>(c));
}

std::size_t Bandwidth::resolve(std::size_t n) const {
  std::size_t c = 1;
  switch (kind_) {
    case Kind::Fixed:
      c = fixed_;
      break;
    case Kind::Power:
      c = bandwidth_npow(n, delta_);
      break;
    case Kind::Full:
      c = n;
      break;
  }
  return std::clamp<std::size_t>(c, 1, std::max<std::size_t>(n, 1));
}

std::string Bandwidth::to_string() const {
  switch (kind_) {
    case Kind::Fixed:
      return std::to_string(fixed_);
    case Kind::Power: {
      std::ostringstream s;
      s << "npow:" << delta_;
      return s.str();
    }
    case Kind::Full:
      return "n";
  }
  return "?";
}

}  // namespace amcci

#include <complex>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>

#include <fftw3.h>

#include "amcci/errors.hpp"
#include "amcci/lagwindow.hpp"

namespace amcci {

namespace {

// FFTW planning is not thread safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class AutocorrelationPlan {
 public:
  explicit AutocorrelationPlan(std::size_t length) : length_(length) {
    std::lock_guard lock(planner_mutex());
    real_ = fftw_alloc_real(length);
    spectrum_ = fftw_alloc_complex(length / 2 + 1);
    const int n = static_cast<int>(length);
    forward_ = fftw_plan_dft_r2c_1d(n, real_, spectrum_, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_1d(n, spectrum_, real_, FFTW_ESTIMATE);
  }
  ~AutocorrelationPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(real_);
    fftw_free(spectrum_);
  }
  AutocorrelationPlan(const AutocorrelationPlan&) = delete;
  AutocorrelationPlan& operator=(const AutocorrelationPlan&) = delete;

  // Circular autocorrelation of the buffer contents, left in the buffer
  // scaled by `length`.
  double* buffer() noexcept { return real_; }
  void run() {
    fftw_execute(forward_);
    const std::size_t bins = length_ / 2 + 1;
    for (std::size_t k = 0; k < bins; ++k) {
      const double re = spectrum_[k][0];
      const double im = spectrum_[k][1];
      spectrum_[k][0] = re * re + im * im;
      spectrum_[k][1] = 0.0;
    }
    fftw_execute(backward_);
  }

 private:
  std::size_t length_;
  double* real_ = nullptr;
  fftw_complex* spectrum_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

AutocorrelationPlan& plan_for(std::size_t length) {
  thread_local std::map<std::size_t, std::unique_ptr<AutocorrelationPlan>> cache;
  auto& slot = cache[length];
  if (!slot) slot = std::make_unique<AutocorrelationPlan>(length);
  return *slot;
}

std::size_t padded_length(std::size_t needed) {
  std::size_t length = 16;
  while (length < needed) length *= 2;
  return length;
}

}  // namespace

std::vector<double> autocovariances_fft(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  if (n < 2) throw DomainError("autocovariances need n >= 2");
  if (max_lag > n - 1) throw DomainError("max_lag must not exceed n - 1");

  const double mean = sample_mean(x);
  const std::size_t length = padded_length(n + max_lag + 1);
  auto& plan = plan_for(length);
  double* buf = plan.buffer();
  for (std::size_t i = 0; i < n; ++i) buf[i] = x[i] - mean;
  std::memset(buf + n, 0, (length - n) * sizeof(double));
  plan.run();

  std::vector<double> acov(max_lag + 1);
  const double scale = 1.0 / (static_cast<double>(length) * static_cast<double>(n));
  for (std::size_t k = 0; k <= max_lag; ++k) acov[k] = buf[k] * scale;
  return acov;
}

}  // namespace amcci

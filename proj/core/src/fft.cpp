#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>
#include <stdexcept>

namespace fiberair::detail {

namespace {
// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft::Fft(std::size_t n) : n_(n), data_(nullptr), fwd_(nullptr), bwd_(nullptr) {
  if (n == 0) throw std::invalid_argument("Fft: zero length");
  data_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (!data_) throw std::bad_alloc();
  auto* buf = reinterpret_cast<fftw_complex*>(data_);
  const int len = static_cast<int>(n);
  std::lock_guard lock(planner_mutex());
  fwd_ = fftw_plan_dft_1d(len, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_1d(len, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!fwd_ || !bwd_) throw std::runtime_error("Fft: planning failed");
}

Fft::~Fft() {
  std::lock_guard lock(planner_mutex());
  if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  fftw_free(data_);
}

void Fft::forward() { fftw_execute(static_cast<fftw_plan>(fwd_)); }
void Fft::backward() { fftw_execute(static_cast<fftw_plan>(bwd_)); }

}  // namespace fiberair::detail

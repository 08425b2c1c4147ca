#pragma once

#include <cstddef>
#include <span>

#include "fiberair/types.hpp"

namespace fiberair::detail {

/// In-place unnormalized DFT of fixed length backed by an FFTW plan.
/// Each instance owns its plan and an aligned buffer; instances may be used
/// concurrently from different threads.
class Fft {
 public:
  explicit Fft(std::size_t n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t size() const { return n_; }
  std::span<cplx> buffer() { return {data_, n_}; }
  std::span<const cplx> buffer() const { return {data_, n_}; }

  void forward();   // X_k = sum x_t e^{-j2pi kt/n}
  void backward();  // x_t = sum X_k e^{+j2pi kt/n}

 private:
  std::size_t n_;
  cplx* data_;
  void* fwd_;
  void* bwd_;
};

}  // namespace fiberair::detail

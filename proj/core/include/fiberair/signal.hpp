#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fiberair/types.hpp"

namespace fiberair {

/// Uniformly sampled complex baseband envelope (amplitudes in sqrt(W)).
///
/// The frame is one period of a circular signal; all filtering is circular.
/// `center_offset` is the offset of this band's center from the WDM comb
/// center, so the absolute frequency of bin k is center_offset + f_k.
struct SampledSignal {
  std::vector<cplx> samples;
  double sample_rate = 0.0;  // Hz
  double center_offset = 0.0;  // Hz

  std::size_t size() const { return samples.size(); }
  double energy() const;  // sum |s|^2
  double average_power() const;  // W
  /// Throws std::invalid_argument on empty/non-finite samples or sample_rate <= 0.
  void validate() const;
};

/// Unitary DFT of a SampledSignal, bins in FFT order.
struct Spectrum {
  std::vector<cplx> bins;
  double bin_spacing = 0.0;  // Hz
  double center_offset = 0.0;  // Hz

  std::size_t size() const { return bins.size(); }
  double sample_rate() const { return bin_spacing * static_cast<double>(bins.size()); }
  /// Baseband frequency of bin k (signed, half-open band [-N/2, N/2)).
  double frequency(std::size_t k) const;
};

/// Signed index of FFT bin k for a length-n transform: [-floor(n/2), ceil(n/2)).
inline std::ptrdiff_t signed_bin(std::size_t k, std::size_t n) {
  return k < (n + 1) / 2 ? static_cast<std::ptrdiff_t>(k)
                         : static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(n);
}

/// FFT-order bin holding signed index m (|m| < n).
inline std::size_t bin_of(std::ptrdiff_t m, std::size_t n) {
  return m >= 0 ? static_cast<std::size_t>(m) : static_cast<std::size_t>(m + static_cast<std::ptrdiff_t>(n));
}

/// Baseband frequencies of an n-point grid at `sample_rate`, in FFT order.
std::vector<double> frequency_grid(std::size_t n, double sample_rate);

Spectrum to_frequency(const SampledSignal& signal);
SampledSignal to_time(const Spectrum& spectrum);

using TransferFunction = std::function<cplx(double)>;

/// Multiplies the spectrum by H evaluated at the absolute frequency of each
/// bin. Throws std::domain_error if H is non-finite anywhere on the grid.
SampledSignal apply_transfer(const SampledSignal& signal, const TransferFunction& H);
/// Same, with H already sampled on the signal's grid (FFT order).
SampledSignal apply_transfer(const SampledSignal& signal, std::span<const cplx> H);

}  // namespace fiberair

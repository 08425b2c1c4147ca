#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fiberair/rng.hpp"
#include "fiberair/signal.hpp"
#include "fiberair/types.hpp"

namespace fiberair {

/// WDM comb with sinc-pulse channels. Channel indices run symmetrically over
/// [-(n_channels-1)/2, (n_channels-1)/2]; channel 0 is the channel of interest.
struct WdmSpec {
  int n_channels = 3;
  double grid_spacing = 50e9;   // B, Hz
  double symbol_rate = 50e9;    // R_s, baud
  double channel_power = 1e-3;  // P, W
  int oversampling = 4;         // samples per symbol of the aggregate grid
  std::size_t n_symbols = 1024;

  /// Throws std::invalid_argument unless: odd n_channels, R_s <= B,
  /// oversampling*R_s >= n_channels*B, and B lands on an integer number of bins.
  void validate() const;

  int max_channel_index() const { return (n_channels - 1) / 2; }
  double sample_rate() const { return oversampling * symbol_rate; }
  std::size_t n_samples() const { return n_symbols * static_cast<std::size_t>(oversampling); }
  /// Number of DFT bins per grid spacing B.
  std::size_t bins_per_grid() const;
  /// Half-width of the outermost channel edge relative to the simulated band,
  /// i.e. (n_channels*B/2) / (sample_rate/2). Below 1/1.2 leaves a 20% guard.
  double band_occupancy() const;
};

/// Smallest oversampling factor leaving at least `guard` (fractional) spectrum
/// beyond the outermost channel edge.
int oversampling_with_guard(int n_channels, double grid_spacing, double symbol_rate, double guard = 0.2);

/// i.i.d. circularly-symmetric complex Gaussian symbols of variance `power`.
SymbolSeq generate_gaussian_symbols(std::size_t n, double power, Rng& rng);

/// Periodic-sinc modulation at baseband: the output spectrum is the symbol DFT
/// placed on the half-open band [-R_s/2, R_s/2), so sampling the waveform at
/// symbol instants returns the symbols.
SampledSignal modulate(std::span<const cplx> symbols, const WdmSpec& spec);

/// Sums baseband waveforms shifted to k*B. `waveforms[i]` is channel
/// k = i - max_channel_index().
SampledSignal wdm_mux(std::span<const SampledSignal> waveforms, const WdmSpec& spec);

/// Ideal brick-wall selection of [kB - B/2, kB + B/2), shifted to baseband.
/// The output keeps the aggregate sample rate.
SampledSignal wdm_demux(const SampledSignal& aggregate, int k, const WdmSpec& spec);

/// Brick-wall filter of bandwidth R_s matched to the sinc pulse, sampled at R_s.
SymbolSeq matched_filter_and_sample(const SampledSignal& signal, double symbol_rate);

}  // namespace fiberair

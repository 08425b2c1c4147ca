#include "fiberair/transceiver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace fiberair {

namespace {

// Returns round(x) if x is within 1e-9 of an integer, otherwise -1.
long long exact_integer(double x) {
  const double r = std::round(x);
  return std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)) ? static_cast<long long>(r) : -1;
}

}  // namespace

void WdmSpec::validate() const {
  if (n_channels <= 0 || n_channels % 2 == 0)
    throw std::invalid_argument("WdmSpec: n_channels must be a positive odd integer");
  if (!(symbol_rate > 0.0) || !(grid_spacing > 0.0))
    throw std::invalid_argument("WdmSpec: symbol_rate and grid_spacing must be positive");
  if (symbol_rate > grid_spacing * (1.0 + 1e-12))
    throw std::invalid_argument("WdmSpec: symbol_rate exceeds grid_spacing (channels overlap)");
  if (oversampling <= 0) throw std::invalid_argument("WdmSpec: oversampling must be positive");
  if (oversampling * symbol_rate < n_channels * grid_spacing * (1.0 - 1e-12))
    throw std::invalid_argument("WdmSpec: aggregate grid does not contain all channels");
  if (n_symbols == 0) throw std::invalid_argument("WdmSpec: n_symbols must be positive");
  if (!(channel_power >= 0.0)) throw std::invalid_argument("WdmSpec: channel_power must be >= 0");
  if (exact_integer(grid_spacing * static_cast<double>(n_symbols) / symbol_rate) <= 0)
    throw std::invalid_argument("WdmSpec: grid spacing is not an integer number of DFT bins (B*n_symbols/R_s)");
}

std::size_t WdmSpec::bins_per_grid() const {
  return static_cast<std::size_t>(exact_integer(grid_spacing * static_cast<double>(n_symbols) / symbol_rate));
}

double WdmSpec::band_occupancy() const { return n_channels * grid_spacing / sample_rate(); }

int oversampling_with_guard(int n_channels, double grid_spacing, double symbol_rate, double guard) {
  const double needed = (1.0 + guard) * n_channels * grid_spacing / symbol_rate;
  return static_cast<int>(std::ceil(needed - 1e-12));
}

SymbolSeq generate_gaussian_symbols(std::size_t n, double power, Rng& rng) {
  if (n == 0) throw std::invalid_argument("generate_gaussian_symbols: n must be positive");
  if (!(power >= 0.0)) throw std::invalid_argument("generate_gaussian_symbols: power must be >= 0");
  SymbolSeq out(n);
  if (power == 0.0) return out;
  std::normal_distribution<double> normal(0.0, std::sqrt(power / 2.0));
  for (auto& s : out) {
    const double re = normal(rng);
    const double im = normal(rng);
    s = {re, im};
  }
  return out;
}

SampledSignal modulate(std::span<const cplx> symbols, const WdmSpec& spec) {
  spec.validate();
  if (symbols.size() != spec.n_symbols)
    throw std::invalid_argument("modulate: symbol count does not match WdmSpec::n_symbols");
  const std::size_t n = spec.n_symbols;
  const std::size_t big_n = spec.n_samples();

  detail::Fft small(n);
  std::copy(symbols.begin(), symbols.end(), small.buffer().begin());
  small.forward();

  // Unnormalized forward of length n, unnormalized backward of length N:
  // u[l*os] = (1/n) sum_m S_m e^{j2pi ml/n} = x_l.
  detail::Fft big(big_n);
  auto out = big.buffer();
  std::fill(out.begin(), out.end(), cplx{});
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) out[bin_of(signed_bin(k, n), big_n)] = small.buffer()[k] * scale;
  big.backward();
  return SampledSignal{std::vector<cplx>(out.begin(), out.end()), spec.sample_rate(), 0.0};
}

SampledSignal wdm_mux(std::span<const SampledSignal> waveforms, const WdmSpec& spec) {
  spec.validate();
  if (waveforms.size() != static_cast<std::size_t>(spec.n_channels))
    throw std::invalid_argument("wdm_mux: need one waveform per channel");
  const std::size_t big_n = spec.n_samples();
  for (const auto& w : waveforms) {
    if (w.size() != big_n || std::abs(w.sample_rate - spec.sample_rate()) > 1e-9 * spec.sample_rate())
      throw std::invalid_argument("wdm_mux: waveform grid does not match WdmSpec");
  }
  const auto shift_bins = static_cast<std::ptrdiff_t>(spec.bins_per_grid());
  const auto kmax = spec.max_channel_index();

  std::vector<cplx> acc(big_n, cplx{});
  detail::Fft fft(big_n);
  auto buf = fft.buffer();
  for (int i = 0; i < spec.n_channels; ++i) {
    const int k = i - kmax;
    std::copy(waveforms[i].samples.begin(), waveforms[i].samples.end(), buf.begin());
    fft.forward();
    const std::ptrdiff_t shift = k * shift_bins;
    for (std::size_t b = 0; b < big_n; ++b) {
      const auto m = signed_bin(b, big_n) + shift;
      const auto sn = static_cast<std::ptrdiff_t>(big_n);
      acc[static_cast<std::size_t>(((m % sn) + sn) % sn)] += buf[b];
    }
  }
  std::copy(acc.begin(), acc.end(), buf.begin());
  fft.backward();
  const double inv_n = 1.0 / static_cast<double>(big_n);
  SampledSignal out{std::vector<cplx>(big_n), spec.sample_rate(), 0.0};
  for (std::size_t t = 0; t < big_n; ++t) out.samples[t] = buf[t] * inv_n;
  return out;
}

SampledSignal wdm_demux(const SampledSignal& aggregate, int k, const WdmSpec& spec) {
  spec.validate();
  if (std::abs(k) > spec.max_channel_index())
    throw std::out_of_range("wdm_demux: channel index " + std::to_string(k) + " out of range");
  aggregate.validate();
  const std::size_t big_n = aggregate.size();
  if (big_n != spec.n_samples()) throw std::invalid_argument("wdm_demux: aggregate grid does not match WdmSpec");

  const std::size_t band = spec.bins_per_grid();
  const auto shift = static_cast<std::ptrdiff_t>(k) * static_cast<std::ptrdiff_t>(band);
  const auto lo = -static_cast<std::ptrdiff_t>(band / 2);
  const auto hi = static_cast<std::ptrdiff_t>((band + 1) / 2);  // exclusive

  detail::Fft fft(big_n);
  auto buf = fft.buffer();
  std::copy(aggregate.samples.begin(), aggregate.samples.end(), buf.begin());
  fft.forward();
  std::vector<cplx> sel(big_n, cplx{});
  const auto sn = static_cast<std::ptrdiff_t>(big_n);
  for (auto m = lo; m < hi; ++m) {
    const auto src = m + shift;
    if (src < -sn / 2 || src >= (sn + 1) / 2) continue;  // outside the simulated band
    sel[bin_of(m, big_n)] = buf[bin_of(src, big_n)];
  }
  std::copy(sel.begin(), sel.end(), buf.begin());
  fft.backward();
  const double inv_n = 1.0 / static_cast<double>(big_n);
  SampledSignal out{std::vector<cplx>(big_n), aggregate.sample_rate, aggregate.center_offset + k * spec.grid_spacing};
  for (std::size_t t = 0; t < big_n; ++t) out.samples[t] = buf[t] * inv_n;
  // The output lives at baseband; center_offset records where it came from.
  return out;
}

SymbolSeq matched_filter_and_sample(const SampledSignal& signal, double symbol_rate) {
  signal.validate();
  if (!(symbol_rate > 0.0)) throw std::invalid_argument("matched_filter_and_sample: symbol_rate must be positive");
  const std::size_t big_n = signal.size();
  const double n_real = static_cast<double>(big_n) * symbol_rate / signal.sample_rate;
  const auto n_ll = exact_integer(n_real);
  if (n_ll <= 0 || static_cast<std::size_t>(n_ll) > big_n)
    throw std::invalid_argument("matched_filter_and_sample: frame does not hold an integer number of symbols");
  const auto n = static_cast<std::size_t>(n_ll);

  detail::Fft big(big_n);
  std::copy(signal.samples.begin(), signal.samples.end(), big.buffer().begin());
  big.forward();
  detail::Fft small(n);
  auto s = small.buffer();
  // Inverse of modulate(): S_m = U_m * n / N, x = (1/n) IDFT_n(S).
  for (std::size_t k = 0; k < n; ++k) s[k] = big.buffer()[bin_of(signed_bin(k, n), big_n)];
  small.backward();
  const double scale = 1.0 / static_cast<double>(big_n);
  SymbolSeq out(n);
  for (std::size_t l = 0; l < n; ++l) out[l] = s[l] * scale;
  return out;
}

}  // namespace fiberair

#include "fiberair/signal.hpp"

#include <cmath>
#include <stdexcept>

#include "fft.hpp"

namespace fiberair {

namespace units {
double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
double watt_to_dbm(double watt) { return 10.0 * std::log10(watt / 1e-3); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
}  // namespace units

double SampledSignal::energy() const {
  double e = 0.0;
  for (const auto& s : samples) e += std::norm(s);
  return e;
}

double SampledSignal::average_power() const {
  return samples.empty() ? 0.0 : energy() / static_cast<double>(samples.size());
}

void SampledSignal::validate() const {
  if (samples.empty()) throw std::invalid_argument("SampledSignal: no samples");
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
    throw std::invalid_argument("SampledSignal: sample_rate must be positive");
  for (const auto& s : samples)
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      throw std::invalid_argument("SampledSignal: non-finite sample");
}

double Spectrum::frequency(std::size_t k) const {
  return static_cast<double>(signed_bin(k, bins.size())) * bin_spacing;
}

std::vector<double> frequency_grid(std::size_t n, double sample_rate) {
  std::vector<double> f(n);
  const double df = sample_rate / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) f[k] = static_cast<double>(signed_bin(k, n)) * df;
  return f;
}

Spectrum to_frequency(const SampledSignal& signal) {
  signal.validate();
  const std::size_t n = signal.size();
  detail::Fft fft(n);
  auto buf = fft.buffer();
  std::copy(signal.samples.begin(), signal.samples.end(), buf.begin());
  fft.forward();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Spectrum out;
  out.bins.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.bins[k] = buf[k] * scale;
  out.bin_spacing = signal.sample_rate / static_cast<double>(n);
  out.center_offset = signal.center_offset;
  return out;
}

SampledSignal to_time(const Spectrum& spectrum) {
  const std::size_t n = spectrum.size();
  if (n == 0) throw std::invalid_argument("to_time: empty spectrum");
  if (!(spectrum.bin_spacing > 0.0)) throw std::invalid_argument("to_time: bin_spacing must be positive");
  detail::Fft fft(n);
  auto buf = fft.buffer();
  std::copy(spectrum.bins.begin(), spectrum.bins.end(), buf.begin());
  fft.backward();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  SampledSignal out;
  out.samples.resize(n);
  for (std::size_t t = 0; t < n; ++t) out.samples[t] = buf[t] * scale;
  out.sample_rate = spectrum.sample_rate();
  out.center_offset = spectrum.center_offset;
  return out;
}

SampledSignal apply_transfer(const SampledSignal& signal, std::span<const cplx> H) {
  signal.validate();
  const std::size_t n = signal.size();
  if (H.size() != n) throw std::invalid_argument("apply_transfer: H length does not match the signal grid");
  for (const auto& h : H)
    if (!std::isfinite(h.real()) || !std::isfinite(h.imag()))
      throw std::domain_error("apply_transfer: H is not finite on the grid");
  detail::Fft fft(n);
  auto buf = fft.buffer();
  std::copy(signal.samples.begin(), signal.samples.end(), buf.begin());
  fft.forward();
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) buf[k] *= H[k] * inv_n;
  fft.backward();
  SampledSignal out{std::vector<cplx>(buf.begin(), buf.end()), signal.sample_rate, signal.center_offset};
  return out;
}

SampledSignal apply_transfer(const SampledSignal& signal, const TransferFunction& H) {
  signal.validate();
  const auto f = frequency_grid(signal.size(), signal.sample_rate);
  std::vector<cplx> h(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) h[k] = H(signal.center_offset + f[k]);
  return apply_transfer(signal, h);
}

}  // namespace fiberair

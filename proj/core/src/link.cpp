#include "fiberair/link.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fft.hpp"
#include "fiberair/xpm.hpp"

namespace fiberair {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::NDM: return "NDM";
    case Scheme::DM: return "DM";
    case Scheme::CDM: return "CDM";
  }
  return "?";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "NDM") return Scheme::NDM;
  if (text == "DM") return Scheme::DM;
  if (text == "CDM") return Scheme::CDM;
  throw std::invalid_argument("unknown scheme '" + std::string(text) + "'");
}

std::string_view to_string(AsePlacement p) {
  return p == AsePlacement::Inline ? "inline" : "at_transmitter";
}

AsePlacement parse_ase_placement(std::string_view text) {
  if (text == "inline") return AsePlacement::Inline;
  if (text == "at_transmitter") return AsePlacement::AtTransmitter;
  throw std::invalid_argument("unknown ase_placement '" + std::string(text) + "'");
}

void FiberSpan::validate() const {
  if (!(length > 0.0)) throw std::invalid_argument("FiberSpan: length must be positive");
  if (!(gamma >= 0.0)) throw std::invalid_argument("FiberSpan: gamma must be >= 0");
  if (!(attenuation_db_per_km >= 0.0)) throw std::invalid_argument("FiberSpan: attenuation must be >= 0");
  if (!(wavelength > 0.0)) throw std::invalid_argument("FiberSpan: wavelength must be positive");
}

double FiberSpan::alpha() const { return attenuation_db_per_km * std::log(10.0) / 10.0 / 1e3; }
double FiberSpan::beta2() const { return beta2_from_D(dispersion, wavelength); }

void LinkSpec::validate() const {
  span.validate();
  if (n_spans <= 0) throw std::invalid_argument("LinkSpec: n_spans must be positive");
  if (!(channel_bandwidth > 0.0)) throw std::invalid_argument("LinkSpec: channel_bandwidth must be positive");
}

void SsfmConfig::validate() const {
  if (steps_per_span < 1) throw std::invalid_argument("SsfmConfig: steps_per_span must be >= 1");
}

double beta2_from_D(double dispersion, double wavelength) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("beta2_from_D: wavelength must be positive");
  return -dispersion * wavelength * wavelength / (kTwoPi * phys::kSpeedOfLight);
}

cplx cd_transfer(double beta2_accumulated, double f) {
  return std::polar(1.0, -2.0 * kPi * kPi * f * f * beta2_accumulated);
}

cplx dc_element_transfer(Scheme scheme, const FiberSpan& span, double channel_bandwidth, double f) {
  const double b2l = span.beta2() * span.length;
  switch (scheme) {
    case Scheme::DM: return std::polar(1.0, 2.0 * kPi * kPi * f * f * b2l);
    case Scheme::CDM: {
      const double ff = folded_freq(f, channel_bandwidth);
      return std::polar(1.0, 2.0 * kPi * kPi * ff * ff * b2l);
    }
    case Scheme::NDM: break;
  }
  throw std::invalid_argument("dc_element_transfer: NDM links have no inline DC element");
}

namespace {

// Forward (sign=+1) or inverse (sign=-1) propagation over one span. The
// inverse negates beta2, gamma and alpha; since the step sequence is
// symmetric this is the exact inverse of the forward map.
void propagate_span(detail::Fft& fft, std::vector<cplx>& u, double sample_rate, double center_offset,
                    const FiberSpan& span, int steps, double sign) {
  const std::size_t n = u.size();
  const double h = span.length / steps;
  const double beta2 = sign * span.beta2();
  const double alpha = sign * span.alpha();
  const double gamma = sign * span.gamma;
  const auto f = frequency_grid(n, sample_rate);
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<cplx> half(n), full(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = center_offset + f[k];
    const cplx lin{-alpha / 2.0, -2.0 * kPi * kPi * fk * fk * beta2};
    half[k] = std::exp(lin * (h / 2.0)) * inv_n;
    full[k] = std::exp(lin * h) * inv_n;
  }
  auto buf = fft.buffer();
  std::copy(u.begin(), u.end(), buf.begin());

  auto linear = [&](const std::vector<cplx>& op) {
    fft.forward();
    for (std::size_t k = 0; k < n; ++k) buf[k] *= op[k];
    fft.backward();
  };
  auto nonlinear = [&] {
    if (gamma == 0.0) return;
    for (std::size_t t = 0; t < n; ++t) buf[t] *= std::polar(1.0, -gamma * std::norm(buf[t]) * h);
  };

  // D(h/2) N D(h) N ... D(h) N D(h/2): adjacent half steps merged.
  linear(half);
  for (int s = 0; s < steps; ++s) {
    nonlinear();
    linear(s + 1 < steps ? full : half);
  }
  std::copy(buf.begin(), buf.end(), u.begin());
}

void check_finite(const std::vector<cplx>& u, const char* where) {
  for (const auto& s : u)
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      throw NumericalBlowUp(std::string(where) + ": non-finite field; increase steps_per_span");
}

void apply_dc(detail::Fft& fft, std::vector<cplx>& u, double sample_rate, double center_offset,
              const LinkSpec& link, bool inverse) {
  const std::size_t n = u.size();
  const auto f = frequency_grid(n, sample_rate);
  auto buf = fft.buffer();
  std::copy(u.begin(), u.end(), buf.begin());
  fft.forward();
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx h = dc_element_transfer(link.scheme, link.span, link.channel_bandwidth, center_offset + f[k]);
    if (inverse) h = std::conj(h);
    buf[k] *= h * inv_n;
  }
  fft.backward();
  std::copy(buf.begin(), buf.end(), u.begin());
}

}  // namespace

SampledSignal ssfm_propagate(const SampledSignal& signal, const FiberSpan& span, const SsfmConfig& cfg) {
  signal.validate();
  span.validate();
  cfg.validate();
  detail::Fft fft(signal.size());
  SampledSignal out = signal;
  propagate_span(fft, out.samples, out.sample_rate, out.center_offset, span, cfg.steps_per_span, +1.0);
  check_finite(out.samples, "ssfm_propagate");
  return out;
}

double ase_psd(const FiberSpan& span, double noise_figure_db) {
  const double g = span.span_gain();
  const double n_sp = units::db_to_linear(noise_figure_db) / 2.0;
  return (g - 1.0) * phys::kPlanck * span.carrier_frequency() * n_sp;
}

void add_white_noise(SampledSignal& signal, double psd, Rng& rng) {
  if (!(psd >= 0.0)) throw std::invalid_argument("add_white_noise: psd must be >= 0");
  if (psd == 0.0) return;
  std::normal_distribution<double> normal(0.0, std::sqrt(psd * signal.sample_rate / 2.0));
  for (auto& s : signal.samples) {
    const double re = normal(rng);
    const double im = normal(rng);
    s += cplx{re, im};
  }
}

SampledSignal amplify(const SampledSignal& signal, const FiberSpan& span, double noise_figure_db, AmpMode mode,
                      Rng& rng) {
  SampledSignal out = signal;
  const double field_gain = std::sqrt(span.span_gain());
  for (auto& s : out.samples) s *= field_gain;
  if (mode == AmpMode::AddAse) add_white_noise(out, ase_psd(span, noise_figure_db), rng);
  return out;
}

SampledSignal run_link(const SampledSignal& waveform, const LinkSpec& link, const SsfmConfig& cfg, Rng& rng) {
  waveform.validate();
  link.validate();
  cfg.validate();
  SampledSignal sig = waveform;
  const double nf = link.amplifier.noise_figure_db;
  const bool at_tx = link.ase_placement == AsePlacement::AtTransmitter;
  const double ase = link.amplifier.noiseless ? 0.0 : ase_psd(link.span, nf);
  if (at_tx) add_white_noise(sig, link.n_spans * ase, rng);

  detail::Fft fft(sig.size());
  const double field_gain = std::sqrt(link.span.span_gain());
  for (int s = 0; s < link.n_spans; ++s) {
    propagate_span(fft, sig.samples, sig.sample_rate, sig.center_offset, link.span, cfg.steps_per_span, +1.0);
    check_finite(sig.samples, "run_link");
    if (link.scheme != Scheme::NDM) apply_dc(fft, sig.samples, sig.sample_rate, sig.center_offset, link, false);
    for (auto& v : sig.samples) v *= field_gain;
    if (!at_tx) add_white_noise(sig, ase, rng);
  }
  return sig;
}

SampledSignal dbp(const SampledSignal& signal, const LinkSpec& link, const SsfmConfig& cfg) {
  signal.validate();
  link.validate();
  cfg.validate();
  SampledSignal sig = signal;
  detail::Fft fft(sig.size());
  const double inv_field_gain = 1.0 / std::sqrt(link.span.span_gain());
  for (int s = 0; s < link.n_spans; ++s) {
    for (auto& v : sig.samples) v *= inv_field_gain;
    if (link.scheme != Scheme::NDM) apply_dc(fft, sig.samples, sig.sample_rate, sig.center_offset, link, true);
    propagate_span(fft, sig.samples, sig.sample_rate, sig.center_offset, link.span, cfg.steps_per_span, -1.0);
    check_finite(sig.samples, "dbp");
  }
  return sig;
}

}  // namespace fiberair

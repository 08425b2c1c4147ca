#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fiberair/rng.hpp"
#include "fiberair/signal.hpp"
#include "fiberair/types.hpp"

namespace fiberair {

/// NDM: electronic dispersion compensation only. DM: full-band inline
/// compensation (DCF). CDM: per-channel inline compensation (FBG).
enum class Scheme { NDM, DM, CDM };
enum class AsePlacement { Inline, AtTransmitter };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view text);
std::string_view to_string(AsePlacement p);
AsePlacement parse_ase_placement(std::string_view text);

/// One span of standard single-mode fiber. All fields SI.
struct FiberSpan {
  double length = 100e3;               // m
  double attenuation_db_per_km = 0.2;  // power attenuation
  double dispersion = 17e-6;           // D, s/m^2 (17 ps/nm/km)
  double gamma = 1.27e-3;              // 1/(W m)
  double wavelength = 1550e-9;         // m

  void validate() const;
  double alpha() const;  // power attenuation, 1/m
  double beta2() const;  // s^2/m
  double span_gain() const { return std::exp(alpha() * length); }  // G (power)
  double carrier_frequency() const { return phys::kSpeedOfLight / wavelength; }
};

struct Amplifier {
  double noise_figure_db = 5.0;
  bool noiseless = false;  // gain only, no ASE
};

struct LinkSpec {
  FiberSpan span;
  int n_spans = 20;
  Scheme scheme = Scheme::NDM;
  double channel_bandwidth = 50e9;  // B, the FBG folding period
  Amplifier amplifier;
  AsePlacement ase_placement = AsePlacement::Inline;

  void validate() const;
};

struct SsfmConfig {
  int steps_per_span = 200;
  void validate() const;
};

/// Raised when propagation produces non-finite samples (step count too low).
class NumericalBlowUp : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// beta2 = -D lambda^2 / (2 pi c).
double beta2_from_D(double dispersion, double wavelength);

/// exp(-j 2 pi^2 f^2 beta2_accumulated).
cplx cd_transfer(double beta2_accumulated, double f);

/// Inline DC element at the end of one span: DM undoes the span's CD on the
/// whole band, CDM undoes it per channel using the folded frequency.
/// Throws std::invalid_argument for Scheme::NDM.
cplx dc_element_transfer(Scheme scheme, const FiberSpan& span, double channel_bandwidth, double f);

/// Symmetric split-step solution of
///   du/dz = j beta2/2 d2u/dt2 - j gamma |u|^2 u - alpha/2 u
/// over one span with uniform steps.
SampledSignal ssfm_propagate(const SampledSignal& signal, const FiberSpan& span, const SsfmConfig& cfg);

enum class AmpMode { AddAse, Noiseless };

/// One-sided ASE PSD per polarization: (G-1) h nu n_sp, n_sp = NF/2.
double ase_psd(const FiberSpan& span, double noise_figure_db);

/// Lumped amplifier restoring the span loss; optionally adds white circular
/// Gaussian ASE flat over the simulated band.
SampledSignal amplify(const SampledSignal& signal, const FiberSpan& span, double noise_figure_db, AmpMode mode,
                      Rng& rng);

/// Adds circular white Gaussian noise of the given PSD (W/Hz) over the band.
void add_white_noise(SampledSignal& signal, double psd, Rng& rng);

/// N_s x [SMF -> DC element (DM/CDM) -> EDFA]. With AtTransmitter placement the
/// amplifiers are noiseless and N_s * S_ASE is added to the input instead.
SampledSignal run_link(const SampledSignal& waveform, const LinkSpec& link, const SsfmConfig& cfg, Rng& rng);

/// Noiseless backward propagation of a channel-of-interest band through the
/// link: per span (reversed) inverse gain, inverse DC element, inverse SMF.
SampledSignal dbp(const SampledSignal& signal, const LinkSpec& link, const SsfmConfig& cfg);

}  // namespace fiberair

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fiberair/rng.hpp"
#include "fiberair/types.hpp"

namespace fiberair {

/// Phase process of the auxiliary channel y_l = h0 x_l e^{j theta_l} + n_l.
///   AWGN: theta_l = 0
///   AR1:  theta_l = theta_{l-1} + z_l                       (Wiener)
///   HOAR: theta_l = a theta_{l-1} + (1-a) theta_{l-l0} + z_l
/// with z_l ~ N(0, sigma_z^2).
enum class PhaseModel { AWGN, AR1, HOAR };

std::string_view to_string(PhaseModel m);
PhaseModel parse_phase_model(std::string_view text);

struct AuxChannelParams {
  double h0 = 1.0;
  double sigma_n = 1.0;  // total complex noise variance is sigma_n^2
  PhaseModel phase_model = PhaseModel::AWGN;
  double sigma_z = 0.0;  // rad
  double a_mix = 1.0;    // HOAR mixing coefficient in [0, 1]
  int l0 = 2;            // HOAR long lag, >= 2

  void validate() const;
};

struct AirResult {
  double air = 0.0;        // bits/symbol
  double std_error = 0.0;  // bits/symbol, from block means
  AuxChannelParams params;
  std::size_t n_train = 0;
  std::size_t n_eval = 0;
  std::uint64_t seed = 0;
  std::string config_digest;
};

struct ParticleConfig {
  int n_particles = 512;
  double resample_threshold = 0.5;  // resample when ESS < threshold * n_particles
  std::uint64_t seed = 1;

  void validate() const;
};

struct GaConfig {
  int population = 20;
  int generations = 30;
  double sigma_z_min = 1e-4;
  double sigma_z_max = 1.0;
  double a_mix_min = 0.0;
  double a_mix_max = 1.0;
  int l0_min = 2;
  int l0_max = 64;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  void validate() const;
};

/// The particle filter lost every particle (all weights zero or non-finite).
class EstimatorFailure : public std::runtime_error {
 public:
  EstimatorFailure(const std::string& what, std::size_t index) : std::runtime_error(what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// log of the density of r = |y|^2 when y ~ CN(sqrt(a) e^{j phi}, sigma2):
/// a noncentral chi-square with 2 degrees of freedom scaled by sigma2/2.
double log_power_likelihood(double r, double a, double sigma2);

/// log I0(z) without overflow (asymptotic series for large z).
double log_bessel_i0(double z);

struct GainNoiseEstimate {
  double h0 = 0.0;
  double sigma_n = 0.0;
  int iterations = 0;
  bool degenerate = false;  // sigma_n pinned at the lower search bound
};

/// Fits (h0, sigma_n): sigma_n maximizes the noncentral-chi likelihood of
/// |y_i|^2 given x_i, h0^2 = sum(|y|^2 - sigma_n^2) / sum |x|^2 (clamped at 0);
/// the pair is alternated to a 1e-6 relative fixed point.
GainNoiseEstimate estimate_gain_noise(std::span<const cplx> x, std::span<const cplx> y);

/// arg sum y_i x_i^*: the constant phase rotation between input and output.
double estimate_common_phase(std::span<const cplx> x, std::span<const cplx> y);

/// Mismatched AIR of the AWGN auxiliary channel, averaged over the data.
AirResult air_awgn(std::span<const cplx> x, std::span<const cplx> y, const AuxChannelParams& params,
                   int blocks = 20);

/// Mismatched AIR of the AR1/HOAR auxiliary channel; the conditional output
/// density is estimated with a sequential-importance-resampling particle filter.
AirResult air_particle(std::span<const cplx> x, std::span<const cplx> y, const AuxChannelParams& params,
                       const ParticleConfig& cfg, int blocks = 20);

/// Dispatches on params.phase_model.
AirResult air_estimate(std::span<const cplx> x, std::span<const cplx> y, const AuxChannelParams& params,
                       const ParticleConfig& cfg, int blocks = 20);

/// Fits the phase-process parameters (sigma_z; and a_mix, l0 for HOAR) by
/// maximizing the particle-filter AIR on the training block with a GA.
/// `warm_start` is inserted into the initial population.
AuxChannelParams fit_phase_model(std::span<const cplx> x_train, std::span<const cplx> y_train, PhaseModel variant,
                                 double h0, double sigma_n, const GaConfig& ga, const ParticleConfig& particles,
                                 const std::optional<AuxChannelParams>& warm_start = std::nullopt);

/// Draws y from the auxiliary channel. theta_0 ~ U[0, 2pi) unless given.
SymbolSeq simulate_aux(std::span<const cplx> x, const AuxChannelParams& params, Rng& rng,
                       std::optional<double> theta0 = std::nullopt);

/// Phase trajectory of the auxiliary phase process (wrapped to [0, 2pi)).
std::vector<double> simulate_phase(std::size_t n, const AuxChannelParams& params, Rng& rng,
                                   std::optional<double> theta0 = std::nullopt);

}  // namespace fiberair

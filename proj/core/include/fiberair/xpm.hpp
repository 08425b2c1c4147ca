#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fiberair/link.hpp"
#include "fiberair/types.hpp"

namespace fiberair {

struct WdmSpec;

/// Gaussian interferer with rectangular PSD S_w(f) = P_w/(2 B_w) on the two
/// bands |f| in [f_w - B_w/2, f_w + B_w/2], one pair per entry of
/// `center_offsets`. `total_power` is P_w of each pair (both bands), so a
/// physical WDM neighbor of power P contributes a pair with P_w = 2P.
struct InterfererSpec {
  double total_power = 2e-3;  // P_w, W
  double bandwidth = 50e9;    // B_w, Hz
  std::vector<double> center_offsets{50e9};  // f_w > 0, Hz

  void validate() const;
  /// Interferers seen by the center channel of `wdm`: one pair per ring of
  /// neighbors at k*B, bandwidth R_s, P_w = 2 * channel_power.
  static InterfererSpec from_wdm(const WdmSpec& wdm);
};

/// min over integer m of |f - mB|, in [0, B/2].
double folded_freq(double f, double B);
/// f - B*round(f/B), the signed offset from the nearest grid frequency.
double signed_folded_freq(double f, double B);

/// g(f, mu, nu) = 4 pi^2 beta2 (nu - f)(nu - mu), rad/m.
double g_coeff(double f, double mu, double nu, double beta2);

/// sum_{n=0}^{N-1} exp(j n x), evaluated in closed form.
cplx geometric_phase_sum(double x, int n_terms);

/// First-order XPM kernel K_w(f, mu, nu) in rad/W for the given scheme.
cplx xpm_kernel(Scheme scheme, double f, double mu, double nu, const LinkSpec& link);

struct AutocorrEstimate {
  cplx value;    // quadrature with M points per axis per band
  cplx refined;  // same with 2M points
  int points = 0;
  bool converged = false;  // |value - refined| <= 1% |refined|
};

/// Midpoint-rule quadrature (M points per axis per band) of
///   R(f1,f2,tau) = P_w^2/B_w^2 sum_bands iint K(f1,mu,nu) K*(f2,mu,nu) e^{-j2pi(mu-nu)tau}
/// over T_{f_w}^2 and T_{-f_w}^2, summed over all interferer pairs.
cplx xpm_autocorr(double f1, double f2, double tau, const LinkSpec& link, const InterfererSpec& interferer,
                  int points_per_axis);

/// xpm_autocorr at M and 2M with the 1% convergence flag.
AutocorrEstimate xpm_autocorr_checked(double f1, double f2, double tau, const LinkSpec& link,
                                      const InterfererSpec& interferer, int points_per_axis);

/// R(0, delta_f, tau) sampled on a rectangular grid.
struct CorrelationGrid {
  std::vector<double> delta_f;  // Hz
  std::vector<double> tau;      // s
  std::vector<cplx> values;     // row-major: values[i_df * tau.size() + i_tau]
  int points_per_axis = 0;
  bool converged = false;
  double max_rel_change = 0.0;  // max |R(M)-R(M/2)| over the grid / max |R(M)|

  const cplx& at(std::size_t i_df, std::size_t i_tau) const { return values[i_df * tau.size() + i_tau]; }
  double peak() const;  // max |R| over the grid
  /// |R(0, delta_f, 0)| / peak(). Requires tau == 0 on the axis.
  std::vector<double> frequency_section() const;
  /// Re R(0, 0, tau) / peak(). Requires delta_f == 0 on the axis.
  std::vector<double> time_section() const;
  std::size_t tau_zero_index() const;
  std::size_t delta_f_zero_index() const;
};

struct GridOptions {
  int points_per_axis = 256;  // starting M
  int max_points_per_axis = 4096;
  double tolerance = 0.01;    // relative to the grid peak
  unsigned threads = 1;
};

/// Evaluates R(0, delta_f, tau) on the grid, doubling M until the change
/// between successive resolutions is within tolerance (or the cap is hit,
/// leaving converged == false).
CorrelationGrid correlation_grid(const LinkSpec& link, const InterfererSpec& interferer,
                                 std::span<const double> delta_f, std::span<const double> tau,
                                 const GridOptions& opts = {});

/// Single-resolution grid (no doubling).
CorrelationGrid correlation_grid_fixed(const LinkSpec& link, const InterfererSpec& interferer,
                                       std::span<const double> delta_f, std::span<const double> tau,
                                       int points_per_axis, unsigned threads = 1);

/// Delta_lambda = lambda^2 B / c.
double grid_spacing_to_wavelength(double grid_spacing, double wavelength);
/// T_p = D Delta_lambda L_s.
double walkoff_period(double dispersion, double delta_lambda, double span_length);

/// Interferer spectrum sampled on uniform bins mu_k = mu_start + k*bin_width,
/// in units of the continuous Fourier transform (sqrt(W)/Hz).
struct InterfererField {
  std::vector<cplx> bins;
  double mu_start = 0.0;
  double bin_width = 0.0;
};

struct ThetaField {
  std::vector<double> f;
  std::vector<double> t;
  std::vector<cplx> values;  // row-major: values[i_f * t.size() + i_t]
  std::size_t active_bins = 0;
  bool coarse = false;  // fewer than 8 nonzero interferer bins

  const cplx& at(std::size_t i_f, std::size_t i_t) const { return values[i_f * t.size() + i_t]; }
};

/// theta(f,t) = 2 sum_i sum_k K(f,mu_i,nu_k) W_i W_k^* e^{j2pi(mu_i-nu_k)t} dmu^2.
ThetaField theta_field(const InterfererField& w, const LinkSpec& link, std::span<const double> f,
                       std::span<const double> t);

}  // namespace fiberair

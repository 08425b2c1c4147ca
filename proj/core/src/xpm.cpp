#include "fiberair/xpm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fiberair/parallel.hpp"
#include "fiberair/transceiver.hpp"

namespace fiberair {

void InterfererSpec::validate() const {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("InterfererSpec: bandwidth must be positive");
  if (!(total_power >= 0.0)) throw std::invalid_argument("InterfererSpec: total_power must be >= 0");
  for (double fw : center_offsets)
    if (!(fw - bandwidth / 2.0 > 0.0))
      throw std::invalid_argument("InterfererSpec: interferer band touches baseband (f_w - B_w/2 <= 0)");
}

InterfererSpec InterfererSpec::from_wdm(const WdmSpec& wdm) {
  InterfererSpec spec;
  spec.total_power = 2.0 * wdm.channel_power;
  spec.bandwidth = wdm.symbol_rate;
  spec.center_offsets.clear();
  for (int k = 1; k <= wdm.max_channel_index(); ++k) spec.center_offsets.push_back(k * wdm.grid_spacing);
  return spec;
}

double signed_folded_freq(double f, double B) {
  if (!(B > 0.0)) throw std::invalid_argument("folded_freq: B must be positive");
  return f - B * std::round(f / B);
}

double folded_freq(double f, double B) { return std::abs(signed_folded_freq(f, B)); }

double g_coeff(double f, double mu, double nu, double beta2) {
  return 4.0 * kPi * kPi * beta2 * (nu - f) * (nu - mu);
}

cplx geometric_phase_sum(double x, int n_terms) {
  const double n = n_terms;
  const double r = std::remainder(x, kTwoPi);  // e^{jnx} only depends on x mod 2pi
  const double s = std::sin(r / 2.0);
  if (std::abs(s) < 1e-12) return {n, 0.0};
  return std::polar(std::sin(n * r / 2.0) / s, (n - 1.0) * r / 2.0);
}

namespace {

// Link constants hoisted out of the kernel hot loops.
struct KernelEval {
  Scheme scheme;
  double gamma, alpha, beta2, span, bandwidth;
  int n_spans;

  explicit KernelEval(const LinkSpec& link, Scheme s)
      : scheme(s),
        gamma(link.span.gamma),
        alpha(link.span.alpha()),
        beta2(link.span.beta2()),
        span(link.span.length),
        bandwidth(link.channel_bandwidth),
        n_spans(link.n_spans) {}

  // gamma * (exp((-alpha + jg) L) - 1) / (-alpha + jg)
  cplx span_factor(double g) const {
    const cplx z{-alpha, g};
    const cplx zl = z * span;
    if (std::abs(zl) < 1e-5) return gamma * span * (1.0 + zl / 2.0 + zl * zl / 6.0);
    return gamma * (std::exp(zl) - 1.0) / z;
  }

  cplx operator()(double f, double mu, double nu) const {
    const double g = g_coeff(f, mu, nu, beta2);
    const cplx c = span_factor(g);
    switch (scheme) {
      case Scheme::DM: return c * static_cast<double>(n_spans);
      case Scheme::NDM: return c * geometric_phase_sum(span * g, n_spans);
      case Scheme::CDM: {
        const double gf = g_coeff(signed_folded_freq(f, bandwidth), signed_folded_freq(mu, bandwidth),
                                  signed_folded_freq(nu, bandwidth), beta2);
        return c * geometric_phase_sum(span * (g - gf), n_spans);
      }
    }
    return {};
  }
};

struct Band {
  double lo;
  double width;
};

std::vector<Band> bands_of(const InterfererSpec& spec) {
  std::vector<Band> out;
  for (double fw : spec.center_offsets) {
    out.push_back({fw - spec.bandwidth / 2.0, spec.bandwidth});
    out.push_back({-fw - spec.bandwidth / 2.0, spec.bandwidth});
  }
  return out;
}

std::vector<double> midpoints(const Band& b, int m) {
  std::vector<double> x(static_cast<std::size_t>(m));
  const double h = b.width / m;
  for (int i = 0; i < m; ++i) x[static_cast<std::size_t>(i)] = b.lo + (i + 0.5) * h;
  return x;
}

}  // namespace

cplx xpm_kernel(Scheme scheme, double f, double mu, double nu, const LinkSpec& link) {
  return KernelEval(link, scheme)(f, mu, nu);
}

cplx xpm_autocorr(double f1, double f2, double tau, const LinkSpec& link, const InterfererSpec& interferer,
                  int points_per_axis) {
  link.validate();
  interferer.validate();
  if (points_per_axis < 16) throw std::invalid_argument("xpm_autocorr: need at least 16 points per axis");
  if (interferer.total_power == 0.0) return {};
  const KernelEval k(link, link.scheme);
  const double pref = interferer.total_power * interferer.total_power / (interferer.bandwidth * interferer.bandwidth);
  const int m = points_per_axis;

  cplx total{};
  for (const auto& band : bands_of(interferer)) {
    const auto x = midpoints(band, m);
    const double h = band.width / m;
    std::vector<cplx> rot(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) rot[i] = std::polar(1.0, -kTwoPi * x[i] * tau);
    cplx acc{};
    for (std::size_t i = 0; i < x.size(); ++i) {
      cplx row{};
      for (std::size_t j = 0; j < x.size(); ++j) {
        const cplx k1 = k(f1, x[i], x[j]);
        const cplx k2 = (f2 == f1) ? k1 : k(f2, x[i], x[j]);
        row += k1 * std::conj(k2) * std::conj(rot[j]);
      }
      acc += row * rot[i];
    }
    total += acc * h * h;
  }
  return pref * total;
}

AutocorrEstimate xpm_autocorr_checked(double f1, double f2, double tau, const LinkSpec& link,
                                      const InterfererSpec& interferer, int points_per_axis) {
  AutocorrEstimate e;
  e.points = points_per_axis;
  e.value = xpm_autocorr(f1, f2, tau, link, interferer, points_per_axis);
  e.refined = xpm_autocorr(f1, f2, tau, link, interferer, 2 * points_per_axis);
  e.converged = std::abs(e.value - e.refined) <= 0.01 * std::abs(e.refined);
  return e;
}

double CorrelationGrid::peak() const {
  double p = 0.0;
  for (const auto& v : values) p = std::max(p, std::abs(v));
  return p;
}

namespace {
std::size_t zero_index(const std::vector<double>& axis, const char* what) {
  for (std::size_t i = 0; i < axis.size(); ++i)
    if (axis[i] == 0.0) return i;
  throw std::logic_error(std::string("CorrelationGrid: axis ") + what + " does not contain 0");
}
}  // namespace

std::size_t CorrelationGrid::tau_zero_index() const { return zero_index(tau, "tau"); }
std::size_t CorrelationGrid::delta_f_zero_index() const { return zero_index(delta_f, "delta_f"); }

std::vector<double> CorrelationGrid::frequency_section() const {
  const auto it = tau_zero_index();
  const double p = peak();
  std::vector<double> out(delta_f.size());
  for (std::size_t i = 0; i < delta_f.size(); ++i) out[i] = p > 0 ? std::abs(at(i, it)) / p : 0.0;
  return out;
}

std::vector<double> CorrelationGrid::time_section() const {
  const auto id = delta_f_zero_index();
  const double p = peak();
  std::vector<double> out(tau.size());
  for (std::size_t j = 0; j < tau.size(); ++j) out[j] = p > 0 ? at(id, j).real() / p : 0.0;
  return out;
}

CorrelationGrid correlation_grid_fixed(const LinkSpec& link, const InterfererSpec& interferer,
                                       std::span<const double> delta_f, std::span<const double> tau,
                                       int points_per_axis, unsigned threads) {
  link.validate();
  interferer.validate();
  if (delta_f.empty() || tau.empty()) throw std::invalid_argument("correlation_grid: empty axis");
  if (points_per_axis < 16) throw std::invalid_argument("correlation_grid: need at least 16 points per axis");

  CorrelationGrid grid;
  grid.delta_f.assign(delta_f.begin(), delta_f.end());
  grid.tau.assign(tau.begin(), tau.end());
  grid.values.assign(delta_f.size() * tau.size(), cplx{});
  grid.points_per_axis = points_per_axis;
  if (interferer.total_power == 0.0) return grid;

  const KernelEval kern(link, link.scheme);
  const auto m = static_cast<std::size_t>(points_per_axis);
  const double pref = interferer.total_power * interferer.total_power / (interferer.bandwidth * interferer.bandwidth);
  const auto bands = bands_of(interferer);

  // K(0, mu_i, nu_j) per band; shared by every delta_f row.
  std::vector<std::vector<cplx>> k0(bands.size());
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const auto x = midpoints(bands[b], points_per_axis);
    k0[b].resize(m * m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) k0[b][i * m + j] = kern(0.0, x[i], x[j]);
  }

  // On a common midpoint grid mu_i - nu_j = (i - j) h, so the tau dependence
  // factors through the lag sums A_d = sum_{i-j=d} K1 K2^*.
  parallel_for(delta_f.size(), threads, [&](std::size_t r) {
    std::vector<cplx> lag(2 * m - 1);
    std::vector<cplx> row(tau.size(), cplx{});
    for (std::size_t b = 0; b < bands.size(); ++b) {
      const auto x = midpoints(bands[b], points_per_axis);
      const double h = bands[b].width / points_per_axis;
      std::fill(lag.begin(), lag.end(), cplx{});
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          const cplx k1 = k0[b][i * m + j];
          const cplx k2 = delta_f[r] == 0.0 ? k1 : kern(delta_f[r], x[i], x[j]);
          lag[i + m - 1 - j] += k1 * std::conj(k2);
        }
      for (std::size_t c = 0; c < tau.size(); ++c) {
        // sum_d A_d w^d with w = exp(-j 2 pi h tau), d from -(m-1).
        const cplx w = std::polar(1.0, -kTwoPi * h * tau[c]);
        cplx acc{};
        for (std::size_t d = lag.size(); d-- > 0;) acc = acc * w + lag[d];  // Horner in w
        acc *= std::polar(1.0, kTwoPi * h * tau[c] * static_cast<double>(m - 1));
        row[c] += acc * h * h * pref;
      }
    }
    for (std::size_t c = 0; c < tau.size(); ++c) grid.values[r * tau.size() + c] = row[c];
  });
  grid.converged = true;
  return grid;
}

CorrelationGrid correlation_grid(const LinkSpec& link, const InterfererSpec& interferer,
                                 std::span<const double> delta_f, std::span<const double> tau,
                                 const GridOptions& opts) {
  int m = opts.points_per_axis;
  CorrelationGrid coarse = correlation_grid_fixed(link, interferer, delta_f, tau, m, opts.threads);
  while (true) {
    const int next = 2 * m;
    if (next > opts.max_points_per_axis) {
      coarse.converged = false;
      return coarse;
    }
    CorrelationGrid fine = correlation_grid_fixed(link, interferer, delta_f, tau, next, opts.threads);
    const double p = fine.peak();
    double worst = 0.0;
    for (std::size_t i = 0; i < fine.values.size(); ++i)
      worst = std::max(worst, std::abs(fine.values[i] - coarse.values[i]));
    fine.max_rel_change = p > 0.0 ? worst / p : 0.0;
    if (fine.max_rel_change <= opts.tolerance) {
      fine.converged = true;
      return fine;
    }
    coarse = std::move(fine);
    m = next;
  }
}

double grid_spacing_to_wavelength(double grid_spacing, double wavelength) {
  return wavelength * wavelength * grid_spacing / phys::kSpeedOfLight;
}

double walkoff_period(double dispersion, double delta_lambda, double span_length) {
  return dispersion * delta_lambda * span_length;
}

ThetaField theta_field(const InterfererField& w, const LinkSpec& link, std::span<const double> f,
                       std::span<const double> t) {
  link.validate();
  if (!(w.bin_width > 0.0)) throw std::invalid_argument("theta_field: bin_width must be positive");
  ThetaField out;
  out.f.assign(f.begin(), f.end());
  out.t.assign(t.begin(), t.end());
  out.values.assign(f.size() * t.size(), cplx{});

  std::vector<double> mu;
  std::vector<cplx> amp;
  for (std::size_t i = 0; i < w.bins.size(); ++i) {
    if (w.bins[i] == cplx{}) continue;
    mu.push_back(w.mu_start + static_cast<double>(i) * w.bin_width);
    amp.push_back(w.bins[i]);
  }
  out.active_bins = mu.size();
  out.coarse = out.active_bins < 8;
  if (mu.empty()) return out;

  const KernelEval kern(link, link.scheme);
  const std::size_t n = mu.size();
  const double scale = 2.0 * w.bin_width * w.bin_width;
  std::vector<cplx> kmat(n * n), a(n), b(n), v(n);
  for (std::size_t fi = 0; fi < f.size(); ++fi) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) kmat[i * n + j] = kern(f[fi], mu[i], mu[j]);
    for (std::size_t ti = 0; ti < t.size(); ++ti) {
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = amp[i] * std::polar(1.0, kTwoPi * mu[i] * t[ti]);
        b[i] = std::conj(a[i]);
      }
      cplx acc{};
      for (std::size_t i = 0; i < n; ++i) {
        cplx row{};
        for (std::size_t j = 0; j < n; ++j) row += kmat[i * n + j] * b[j];
        acc += a[i] * row;
      }
      out.values[fi * t.size() + ti] = scale * acc;
    }
  }
  return out;
}

}  // namespace fiberair

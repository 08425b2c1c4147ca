#include <doctest.h>

#include <cmath>
#include <random>

#include "fiberair/transceiver.hpp"
#include "fiberair/xpm.hpp"

using namespace fiberair;

namespace {

LinkSpec std_link(Scheme s, int n_spans = 20) {
  LinkSpec l;
  l.scheme = s;
  l.n_spans = n_spans;
  return l;
}

// Draws W on the midpoint bins of both bands of one interferer pair and
// returns the sampled field together with the bin layout.
InterfererField draw_field(const InterfererSpec& spec, int m, Rng& rng) {
  const double fw = spec.center_offsets.at(0), bw = spec.bandwidth;
  const double h = bw / m;
  InterfererField w;
  w.bin_width = h;
  w.mu_start = -fw - bw / 2 + h / 2;
  const std::size_t n = static_cast<std::size_t>(std::llround((2 * fw + bw) / h));
  w.bins.assign(n, cplx{});
  const double s = spec.total_power / (2 * bw);  // PSD per band
  std::normal_distribution<double> g(0.0, std::sqrt(s / h / 2.0));
  for (std::size_t k = 0; k < n; ++k) {
    const double mu = w.mu_start + static_cast<double>(k) * h;
    if (std::abs(std::abs(mu) - fw) < bw / 2) w.bins[k] = {g(rng), g(rng)};
  }
  return w;
}

}  // namespace

TEST_SUITE("xpm") {
  TEST_CASE("folded frequency") {
    CHECK(folded_freq(0.0, 50e9) == 0.0);
    CHECK(folded_freq(30e9, 50e9) == doctest::Approx(20e9));
    CHECK(folded_freq(75e9, 50e9) == doctest::Approx(25e9));
    CHECK(folded_freq(-130e9, 50e9) == doctest::Approx(20e9));
    CHECK(signed_folded_freq(30e9, 50e9) == doctest::Approx(-20e9));
    CHECK_THROWS_AS(folded_freq(1.0, 0.0), std::invalid_argument);
  }

  TEST_CASE("g coefficient") {
    const double b2 = -21.7e-27;  // s^2/m
    CHECK(g_coeff(3e9, 7e9, 3e9, b2) == 0.0);
    CHECK(g_coeff(3e9, 7e9, 7e9, b2) == 0.0);
    const double expect = 4 * 3.141592653589793 * 3.141592653589793 * b2 * (50e9 - 0.0) * (50e9 + 50e9);
    CHECK(g_coeff(0.0, -50e9, 50e9, b2) == doctest::Approx(expect));
    CHECK(expect == doctest::Approx(-4.28e-3).epsilon(0.002));
  }

  TEST_CASE("geometric phase sum matches the explicit sum") {
    for (double x : {0.0, 1e-9, 0.3, 3.0, 2 * 3.141592653589793, 100.0}) {
      cplx ref{};
      for (int n = 0; n < 20; ++n) ref += std::polar(1.0, n * x);
      CHECK(std::abs(geometric_phase_sum(x, 20) - ref) < 1e-9);
    }
  }

  TEST_CASE("kernel values at g = 0") {
    const LinkSpec l = std_link(Scheme::DM);
    const double alpha = 0.2 * std::log(10.0) / 10.0 / 1e3;
    const double leff = (1 - std::exp(-alpha * 100e3)) / alpha;
    const double c = 1.27e-3 * leff;  // rad/W
    CHECK(c * 1e-3 == doctest::Approx(27.3e-3).epsilon(0.002));
    CHECK(std::abs(xpm_kernel(Scheme::DM, 10e9, 40e9, 10e9, l) - 20.0 * c) < 1e-9 * c);
    CHECK(20.0 * c * 1e-3 == doctest::Approx(546e-3).epsilon(0.002));
    CHECK(std::abs(xpm_kernel(Scheme::NDM, 10e9, 40e9, 10e9, l) - 20.0 * c) < 1e-9 * c);

    // Lossless and g = 0: gamma L limit.
    LinkSpec lossless = l;
    lossless.span.attenuation_db_per_km = 0.0;
    CHECK(std::abs(xpm_kernel(Scheme::DM, 1e9, 5e9, 1e9, lossless) - 20.0 * 1.27e-3 * 100e3) < 1e-6);
  }

  TEST_CASE("CDM kernel equals DM in band and with unbounded folding period") {
    const LinkSpec l = std_link(Scheme::CDM);
    for (auto [f, mu, nu] : {std::array{0.0, 10e9, -7e9}, std::array{3e9, -20e9, 24e9}, std::array{-12e9, 0.0, 5e9}})
      CHECK(std::abs(xpm_kernel(Scheme::CDM, f, mu, nu, l) - xpm_kernel(Scheme::DM, f, mu, nu, l)) < 1e-9);
    LinkSpec wide = l;
    wide.channel_bandwidth = 1e15;
    CHECK(std::abs(xpm_kernel(Scheme::CDM, 0.0, 40e9, 60e9, wide) - xpm_kernel(Scheme::DM, 0.0, 40e9, 60e9, wide)) < 1e-9);
    CHECK(std::abs(xpm_kernel(Scheme::CDM, 0.0, 40e9, 60e9, l) - xpm_kernel(Scheme::DM, 0.0, 40e9, 60e9, l)) > 1.0);
  }

  TEST_CASE("NDM kernel is bounded by N_s |C|") {
    const LinkSpec l = std_link(Scheme::NDM);
    const LinkSpec one = std_link(Scheme::NDM, 1);
    for (auto [mu, nu] : {std::pair{30e9, 60e9}, std::pair{40e9, 41e9}, std::pair{-70e9, -30e9}}) {
      const double c = std::abs(xpm_kernel(Scheme::NDM, 0.0, mu, nu, one));
      CHECK(std::abs(xpm_kernel(Scheme::NDM, 0.0, mu, nu, l)) <= 20.0 * c * (1 + 1e-12));
    }
  }

  TEST_CASE("walk-off period") {
    const double dl = grid_spacing_to_wavelength(50e9, 1550e-9);
    CHECK(dl * 1e9 == doctest::Approx(0.4007).epsilon(0.002));
    CHECK(walkoff_period(17e-6, dl, 100e3) * 1e12 == doctest::Approx(681.0).epsilon(0.0015));
    CHECK(walkoff_period(17e-6, 0.0, 100e3) == 0.0);
    CHECK(walkoff_period(17e-6, grid_spacing_to_wavelength(100e9, 1550e-9), 100e3) ==
          doctest::Approx(2.0 * walkoff_period(17e-6, dl, 100e3)));
  }

  TEST_CASE("autocorrelation basics") {
    InterfererSpec none;
    none.total_power = 0.0;
    CHECK(xpm_autocorr(0, 0, 0, std_link(Scheme::NDM), none, 16) == cplx{});
    InterfererSpec w;
    const auto r_dm = xpm_autocorr(0, 0, 0, std_link(Scheme::DM), w, 64);
    const auto r_ndm = xpm_autocorr(0, 0, 0, std_link(Scheme::NDM), w, 64);
    CHECK(std::abs(r_dm.imag()) < 1e-12 * r_dm.real());
    CHECK(r_dm.real() > 0.0);
    CHECK(r_ndm.real() > 0.0);
    CHECK(r_dm.real() > r_ndm.real());
    CHECK_THROWS_AS(xpm_autocorr(0, 0, 0, std_link(Scheme::DM), w, 8), std::invalid_argument);
    InterfererSpec bad;
    bad.center_offsets = {20e9};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }

  TEST_CASE("autocorrelation Hermitian symmetry") {
    InterfererSpec w;
    Rng rng(5);
    std::uniform_real_distribution<double> u(-20e9, 20e9), t(-500e-12, 500e-12);
    for (Scheme s : {Scheme::NDM, Scheme::DM, Scheme::CDM})
      for (int k = 0; k < 3; ++k) {
        const double f1 = u(rng), f2 = u(rng), tau = t(rng);
        const auto a = xpm_autocorr(f1, f2, tau, std_link(s, 5), w, 32);
        const auto b = xpm_autocorr(f2, f1, -tau, std_link(s, 5), w, 32);
        CHECK(std::abs(a - std::conj(b)) < 1e-9 * std::abs(a));
      }
  }

  TEST_CASE("fast grid agrees with the direct quadrature") {
    InterfererSpec w;
    const LinkSpec l = std_link(Scheme::CDM, 5);
    const std::vector<double> df{-10e9, 0.0, 20e9}, tau{-300e-12, 0.0, 137e-12, 700e-12};
    const auto g = correlation_grid_fixed(l, w, df, tau, 32, 2);
    for (std::size_t i = 0; i < df.size(); ++i)
      for (std::size_t j = 0; j < tau.size(); ++j) {
        const auto ref = xpm_autocorr(0.0, df[i], tau[j], l, w, 32);
        CHECK(std::abs(g.at(i, j) - ref) < 1e-9 * std::abs(ref) + 1e-12 * g.peak());
      }
    CHECK(g.tau_zero_index() == 1);
    CHECK(g.delta_f_zero_index() == 1);
    CHECK(g.time_section()[1] <= 1.0);
  }

  TEST_CASE("adaptive grid converges and reports it") {
    InterfererSpec w;
    const std::vector<double> df{0.0, 25e9}, tau{0.0, 681e-12};
    GridOptions opts;
    opts.points_per_axis = 32;
    const auto g = correlation_grid(std_link(Scheme::NDM, 5), w, df, tau, opts);
    CHECK(g.converged);
    CHECK(g.max_rel_change <= 0.01);
    opts.max_points_per_axis = 32;
    CHECK_FALSE(correlation_grid(std_link(Scheme::NDM, 5), w, df, tau, opts).converged);
  }

  TEST_CASE("theta field trivial cases") {
    const LinkSpec l = std_link(Scheme::NDM, 3);
    InterfererField w;
    w.bin_width = 1e9;
    w.mu_start = 30e9;
    w.bins.assign(10, cplx{});
    const std::vector<double> f{0.0}, t{0.0, 1e-10, 3e-10};
    auto th = theta_field(w, l, f, t);
    for (const auto& v : th.values) CHECK(v == cplx{});
    CHECK(th.coarse);
    w.bins[4] = {1e-6, 2e-6};
    th = theta_field(w, l, f, t);
    CHECK(th.active_bins == 1);
    CHECK(std::abs(th.values[0] - th.values[2]) < 1e-15 * std::abs(th.values[0]));
  }

  TEST_CASE("Monte-Carlo theta statistics reproduce the model correlation") {
    // Reduced grid: 24 bins per band, 5 spans. theta(f, t) covariance against
    // R(0, df, tau) from the same midpoint discretization.
    const int m = 24;
    InterfererSpec spec;
    for (Scheme s : {Scheme::NDM, Scheme::CDM}) {
      const LinkSpec l = std_link(s, 5);
      const std::vector<double> f{0.0, 10e9};
      const double period = m / spec.bandwidth;  // theta is periodic in t with 1/bin_width
      std::vector<double> t;
      for (int k = 0; k < 8; ++k) t.push_back(k * period / 8);
      Rng rng(77);
      const int realizations = 600;
      std::vector<cplx> mean(f.size() * t.size());
      std::vector<std::vector<cplx>> samples;
      for (int r = 0; r < realizations; ++r) {
        const auto th = theta_field(draw_field(spec, m, rng), l, f, t);
        samples.push_back(th.values);
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += th.values[i] / static_cast<double>(realizations);
      }
      // Lag 0 and lag period/8 at frequency offsets 0 and 10 GHz, averaged over t.
      for (std::size_t fi : {0u, 1u})
        for (std::size_t lag : {0u, 1u}) {
          cplx est{};
          for (const auto& v : samples)
            for (std::size_t ti = 0; ti < t.size(); ++ti) {
              const std::size_t tj = (ti + lag) % t.size();
              est += (v[ti] - mean[ti]) * std::conj(v[fi * t.size() + tj] - mean[fi * t.size() + tj]);
            }
          est /= static_cast<double>(samples.size() * t.size());
          const auto model = xpm_autocorr(0.0, f[fi], static_cast<double>(lag) * period / 8, l, spec, m);
          const auto r0 = xpm_autocorr(0.0, 0.0, 0.0, l, spec, m);
          CHECK(std::abs(est - model) < 0.15 * std::abs(r0));
        }
    }
  }

  TEST_CASE("interferers from a WDM spec") {
    WdmSpec wdm;
    wdm.n_channels = 5;
    wdm.oversampling = 6;
    wdm.channel_power = 2e-3;
    const auto s = InterfererSpec::from_wdm(wdm);
    CHECK(s.total_power == doctest::Approx(4e-3));
    REQUIRE(s.center_offsets.size() == 2);
    CHECK(s.center_offsets[1] == doctest::Approx(100e9));
  }
}

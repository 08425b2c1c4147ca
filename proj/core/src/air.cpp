#include "fiberair/air.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "fiberair/genetic.hpp"

namespace fiberair {

std::string_view to_string(PhaseModel m) {
  switch (m) {
    case PhaseModel::AWGN: return "AWGN";
    case PhaseModel::AR1: return "AR1";
    case PhaseModel::HOAR: return "HOAR";
  }
  return "?";
}

PhaseModel parse_phase_model(std::string_view text) {
  if (text == "AWGN") return PhaseModel::AWGN;
  if (text == "AR1") return PhaseModel::AR1;
  if (text == "HOAR") return PhaseModel::HOAR;
  throw std::invalid_argument("unknown phase model '" + std::string(text) + "'");
}

void AuxChannelParams::validate() const {
  if (!(h0 >= 0.0) || !std::isfinite(h0)) throw std::invalid_argument("AuxChannelParams: h0 must be >= 0");
  if (!(sigma_n > 0.0) || !std::isfinite(sigma_n)) throw std::invalid_argument("AuxChannelParams: sigma_n must be > 0");
  if (!(sigma_z >= 0.0)) throw std::invalid_argument("AuxChannelParams: sigma_z must be >= 0");
  if (!(a_mix >= 0.0 && a_mix <= 1.0)) throw std::invalid_argument("AuxChannelParams: a_mix must be in [0,1]");
  if (phase_model == PhaseModel::HOAR && l0 < 2) throw std::invalid_argument("AuxChannelParams: l0 must be >= 2");
}

void ParticleConfig::validate() const {
  if (n_particles < 2) throw std::invalid_argument("ParticleConfig: n_particles must be >= 2");
  if (!(resample_threshold > 0.0 && resample_threshold <= 1.0))
    throw std::invalid_argument("ParticleConfig: resample_threshold must be in (0,1]");
}

void GaConfig::validate() const {
  if (population < 4) throw std::invalid_argument("GaConfig: population must be >= 4");
  if (generations < 1) throw std::invalid_argument("GaConfig: generations must be >= 1");
  if (!(sigma_z_min > 0.0 && sigma_z_max >= sigma_z_min)) throw std::invalid_argument("GaConfig: empty sigma_z bounds");
  if (!(a_mix_min >= 0.0 && a_mix_max <= 1.0 && a_mix_max >= a_mix_min))
    throw std::invalid_argument("GaConfig: empty a_mix bounds");
  if (!(l0_min >= 2 && l0_max >= l0_min)) throw std::invalid_argument("GaConfig: empty l0 bounds");
}

double log_bessel_i0(double z) {
  z = std::abs(z);
  if (z < 50.0) return std::log(std::cyl_bessel_i(0.0, z));
  const double iz = 1.0 / z;
  const double series = 1.0 + iz * (1.0 / 8.0 + iz * (9.0 / 128.0 + iz * (225.0 / 3072.0 + iz * 11025.0 / 98304.0)));
  return z - 0.5 * std::log(kTwoPi * z) + std::log(series);
}

double log_power_likelihood(double r, double a, double sigma2) {
  return -std::log(sigma2) - (r + a) / sigma2 + log_bessel_i0(2.0 * std::sqrt(r * a) / sigma2);
}

namespace {

void check_pairs(std::span<const cplx> x, std::span<const cplx> y, std::size_t min_size, const char* who) {
  if (x.size() != y.size()) throw std::invalid_argument(std::string(who) + ": x and y lengths differ");
  if (x.size() < min_size)
    throw std::invalid_argument(std::string(who) + ": need at least " + std::to_string(min_size) + " pairs");
}

double mean_power(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& c : v) s += std::norm(c);
  return s / static_cast<double>(v.size());
}

// Mean and blockwise standard error of per-symbol information densities (nats -> bits).
void summarize(const std::vector<double>& info_nats, int blocks, AirResult& out) {
  const std::size_t n = info_nats.size();
  const auto nb = static_cast<std::size_t>(std::clamp<int>(blocks, 2, static_cast<int>(n)));
  const double to_bits = 1.0 / std::log(2.0);
  out.air = std::accumulate(info_nats.begin(), info_nats.end(), 0.0) / static_cast<double>(n) * to_bits;
  std::vector<double> means(nb, 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t lo = b * n / nb, hi = (b + 1) * n / nb;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += info_nats[i];
    means[b] = s / static_cast<double>(hi - lo) * to_bits;
  }
  const double m = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(nb);
  double var = 0.0;
  for (double v : means) var += (v - m) * (v - m);
  var /= static_cast<double>(nb - 1);
  out.std_error = std::sqrt(var / static_cast<double>(nb));
  out.n_eval = n;
}

// log q(y) for y ~ CN(0, v).
double log_output_marginal(const cplx& y, double v) { return -std::log(kPi * v) - std::norm(y) / v; }

}  // namespace

GainNoiseEstimate estimate_gain_noise(std::span<const cplx> x, std::span<const cplx> y) {
  check_pairs(x, y, 100, "estimate_gain_noise");
  const std::size_t n = x.size();
  std::vector<double> r(n), px(n);
  double sum_r = 0.0, sum_px = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = std::norm(y[i]);
    px[i] = std::norm(x[i]);
    sum_r += r[i];
    sum_px += px[i];
  }
  if (!(sum_px > 0.0) || !(sum_r > 0.0)) throw std::invalid_argument("estimate_gain_noise: zero-power data");

  const double rms_y = std::sqrt(sum_r / static_cast<double>(n));
  const double log_lo = std::log(1e-6 * rms_y);
  const double log_hi = std::log(10.0 * rms_y);

  GainNoiseEstimate est;
  double h2 = sum_r / sum_px;
  double sigma = 0.0;
  for (int it = 1; it <= 100; ++it) {
    auto neg_loglik = [&](double log_sigma) {
      const double s2 = std::exp(2.0 * log_sigma);
      double ll = 0.0;
      for (std::size_t i = 0; i < n; ++i) ll += log_power_likelihood(r[i], h2 * px[i], s2);
      return -ll;
    };
    const auto [log_sigma, _] = boost::math::tools::brent_find_minima(neg_loglik, log_lo, log_hi, 45);
    const double new_sigma = std::exp(log_sigma);
    if (!(new_sigma > 0.0)) throw std::runtime_error("estimate_gain_noise: sigma_n^2 estimate <= 0");
    const double new_h2 = std::max(0.0, (sum_r - static_cast<double>(n) * new_sigma * new_sigma) / sum_px);
    const double dh = std::abs(std::sqrt(new_h2) - std::sqrt(h2)) / std::max(std::sqrt(new_h2), 1e-300);
    const double ds = sigma > 0.0 ? std::abs(new_sigma - sigma) / new_sigma : 1.0;
    h2 = new_h2;
    sigma = new_sigma;
    est.iterations = it;
    if ((dh <= 1e-6 || new_h2 == 0.0) && ds <= 1e-6) {
      est.h0 = std::sqrt(h2);
      est.sigma_n = sigma;
      est.degenerate = std::log(sigma) - log_lo < 0.01;
      return est;
    }
  }
  throw std::runtime_error("estimate_gain_noise: no fixed point after 100 alternations");
}

double estimate_common_phase(std::span<const cplx> x, std::span<const cplx> y) {
  check_pairs(x, y, 1, "estimate_common_phase");
  cplx acc{};
  for (std::size_t i = 0; i < x.size(); ++i) acc += y[i] * std::conj(x[i]);
  return std::arg(acc);
}

AirResult air_awgn(std::span<const cplx> x, std::span<const cplx> y, const AuxChannelParams& params, int blocks) {
  check_pairs(x, y, 2, "air_awgn");
  params.validate();
  const double s2 = params.sigma_n * params.sigma_n;
  const double v = params.h0 * params.h0 * mean_power(x) + s2;
  std::vector<double> info(x.size());
  for (std::size_t l = 0; l < x.size(); ++l) {
    const double cond = -std::log(kPi * s2) - std::norm(y[l] - params.h0 * x[l]) / s2;
    info[l] = cond - log_output_marginal(y[l], v);
  }
  AirResult out;
  out.params = params;
  summarize(info, blocks, out);
  return out;
}

namespace {

// Phase particles. AR1 keeps one wrapped phase per particle; HOAR keeps the
// last l0 unwrapped phases in a ring buffer (the convex combination of the
// two lags is only meaningful on unwrapped phases).
class ParticleCloud {
 public:
  ParticleCloud(const AuxChannelParams& p, int n, Rng& rng)
      : model_(p.phase_model), n_(static_cast<std::size_t>(n)), depth_(model_ == PhaseModel::HOAR ? static_cast<std::size_t>(p.l0) : 1),
        a_(p.a_mix), sz_(p.sigma_z), hist_(n_ * depth_), scratch_(n_ * depth_), current_(n_) {
    std::uniform_real_distribution<double> uni(0.0, kTwoPi);
    for (std::size_t i = 0; i < n_; ++i) {
      const double th = uni(rng);
      for (std::size_t d = 0; d < depth_; ++d) hist_[i * depth_ + d] = th;
      current_[i] = th;
    }
  }

  std::size_t size() const { return n_; }
  const std::vector<double>& phases() const { return current_; }

  // Advances every particle one step: head_ points at theta_{l-1}; the slot
  // after it (mod l0) holds theta_{l-l0} and is overwritten with theta_l.
  void propagate(Rng& rng) {
    std::normal_distribution<double> normal(0.0, sz_);
    if (model_ == PhaseModel::AR1 || depth_ == 1) {
      for (std::size_t i = 0; i < n_; ++i) {
        double th = current_[i] + (sz_ > 0.0 ? normal(rng) : 0.0);
        th = std::fmod(th, kTwoPi);
        if (th < 0.0) th += kTwoPi;
        current_[i] = th;
        hist_[i] = th;
      }
      return;
    }
    const std::size_t oldest = (head_ + 1) % depth_;
    for (std::size_t i = 0; i < n_; ++i) {
      double* h = &hist_[i * depth_];
      const double th = a_ * h[head_] + (1.0 - a_) * h[oldest] + (sz_ > 0.0 ? normal(rng) : 0.0);
      h[oldest] = th;
      current_[i] = th;
    }
    head_ = oldest;
  }

  void resample(const std::vector<double>& weights, Rng& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0 / static_cast<double>(n_));
    double u = uni(rng);
    double c = weights[0];
    std::size_t src = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      while (u > c && src + 1 < n_) c += weights[++src];
      std::copy_n(&hist_[src * depth_], depth_, &scratch_[i * depth_]);
      u += 1.0 / static_cast<double>(n_);
    }
    hist_.swap(scratch_);
    for (std::size_t i = 0; i < n_; ++i) current_[i] = hist_[i * depth_ + head_];
  }

 private:
  PhaseModel model_;
  std::size_t n_, depth_;
  double a_, sz_;
  std::size_t head_ = 0;
  std::vector<double> hist_, scratch_, current_;
};

}  // namespace

AirResult air_particle(std::span<const cplx> x, std::span<const cplx> y, const AuxChannelParams& params,
                       const ParticleConfig& cfg, int blocks) {
  check_pairs(x, y, 2, "air_particle");
  params.validate();
  cfg.validate();
  if (params.phase_model == PhaseModel::AWGN)
    throw std::invalid_argument("air_particle: phase model must be AR1 or HOAR");

  Rng rng(cfg.seed);
  ParticleCloud cloud(params, cfg.n_particles, rng);
  const std::size_t np = cloud.size();
  const double s2 = params.sigma_n * params.sigma_n;
  const double inv_s2 = 1.0 / s2;
  const double v = params.h0 * params.h0 * mean_power(x) + s2;
  const double log_norm = -std::log(kPi * s2);

  std::vector<double> w(np, 1.0 / static_cast<double>(np)), ll(np);
  std::vector<double> info(x.size());
  for (std::size_t l = 0; l < x.size(); ++l) {
    if (l > 0) cloud.propagate(rng);
    const cplx hx = params.h0 * x[l];
    const double base = std::norm(y[l]) + std::norm(hx);
    const cplx p = std::conj(y[l]) * hx;  // Re(p e^{j theta}) is the cross term
    const auto& th = cloud.phases();
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < np; ++i) {
      const double c = std::cos(th[i]), s = std::sin(th[i]);
      const double d2 = base - 2.0 * (p.real() * c - p.imag() * s);
      ll[i] = -d2 * inv_s2;
      if (w[i] > 0.0) mx = std::max(mx, ll[i]);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
      w[i] *= std::exp(ll[i] - mx);
      total += w[i];
    }
    if (!(total > 0.0) || !std::isfinite(total) || !std::isfinite(mx))
      throw EstimatorFailure("air_particle: all particle weights vanished at symbol " + std::to_string(l), l);
    // Predictive density: sum_i w_i(prev, normalized) p(y_l | theta_i).
    const double log_pred = log_norm + mx + std::log(total);
    info[l] = log_pred - log_output_marginal(y[l], v);

    double sum_sq = 0.0;
    for (auto& wi : w) {
      wi /= total;
      sum_sq += wi * wi;
    }
    if (1.0 / sum_sq < cfg.resample_threshold * static_cast<double>(np)) {
      cloud.resample(w, rng);
      std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(np));
    }
  }
  AirResult out;
  out.params = params;
  out.seed = cfg.seed;
  summarize(info, blocks, out);
  return out;
}

AirResult air_estimate(std::span<const cplx> x, std::span<const cplx> y, const AuxChannelParams& params,
                       const ParticleConfig& cfg, int blocks) {
  if (params.phase_model == PhaseModel::AWGN) return air_awgn(x, y, params, blocks);
  return air_particle(x, y, params, cfg, blocks);
}

AuxChannelParams fit_phase_model(std::span<const cplx> x_train, std::span<const cplx> y_train, PhaseModel variant,
                                 double h0, double sigma_n, const GaConfig& ga, const ParticleConfig& particles,
                                 const std::optional<AuxChannelParams>& warm_start) {
  if (variant == PhaseModel::AWGN) throw std::invalid_argument("fit_phase_model: variant must be AR1 or HOAR");
  ga.validate();
  particles.validate();
  check_pairs(x_train, y_train, 2, "fit_phase_model");
  const bool hoar = variant == PhaseModel::HOAR;
  if (hoar && x_train.size() < 10 * static_cast<std::size_t>(ga.l0_max))
    throw std::invalid_argument("fit_phase_model: training block shorter than 10 * l0_max");

  AuxChannelParams base;
  base.h0 = h0;
  base.sigma_n = sigma_n;
  base.phase_model = variant;
  base.validate();

  std::vector<Gene> genes{{ga.sigma_z_min, ga.sigma_z_max, false, true}};
  if (hoar) {
    genes.push_back({ga.a_mix_min, ga.a_mix_max, false, false});
    genes.push_back({static_cast<double>(ga.l0_min), static_cast<double>(ga.l0_max), true, false});
  }
  auto to_params = [&](std::span<const double> g) {
    AuxChannelParams p = base;
    p.sigma_z = g[0];
    if (hoar) {
      p.a_mix = g[1];
      p.l0 = static_cast<int>(std::lround(g[2]));
    }
    return p;
  };

  std::vector<std::vector<double>> seeds;
  if (warm_start) {
    std::vector<double> s{std::clamp(warm_start->sigma_z, ga.sigma_z_min, ga.sigma_z_max)};
    if (hoar) {
      s.push_back(std::clamp(warm_start->phase_model == PhaseModel::HOAR ? warm_start->a_mix : 1.0, ga.a_mix_min,
                             ga.a_mix_max));
      s.push_back(std::clamp<double>(warm_start->l0, ga.l0_min, ga.l0_max));
    }
    seeds.push_back(std::move(s));
  }

  GaOptions opts;
  opts.population = ga.population;
  opts.generations = ga.generations;
  opts.seed = ga.seed;
  opts.threads = ga.threads;
  const auto best = ga_maximize(
      genes,
      [&](std::span<const double> g) {
        try {
          return air_particle(x_train, y_train, to_params(g), particles).air;
        } catch (const EstimatorFailure&) {
          return -std::numeric_limits<double>::infinity();
        }
      },
      opts, seeds);
  return to_params(best.best);
}

std::vector<double> simulate_phase(std::size_t n, const AuxChannelParams& params, Rng& rng,
                                   std::optional<double> theta0) {
  params.validate();
  std::vector<double> out(n, 0.0);
  if (n == 0 || params.phase_model == PhaseModel::AWGN) return out;
  std::uniform_real_distribution<double> uni(0.0, kTwoPi);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double start = theta0 ? *theta0 : uni(rng);
  // Unwrapped recursion; history before l = 0 equals theta_0.
  std::vector<double> raw(n);
  raw[0] = start;
  const bool hoar = params.phase_model == PhaseModel::HOAR;
  for (std::size_t l = 1; l < n; ++l) {
    const double z = params.sigma_z * normal(rng);
    if (hoar) {
      const double far = l >= static_cast<std::size_t>(params.l0) ? raw[l - static_cast<std::size_t>(params.l0)] : start;
      raw[l] = params.a_mix * raw[l - 1] + (1.0 - params.a_mix) * far + z;
    } else {
      raw[l] = raw[l - 1] + z;
    }
  }
  for (std::size_t l = 0; l < n; ++l) {
    double th = std::fmod(raw[l], kTwoPi);
    out[l] = th < 0.0 ? th + kTwoPi : th;
  }
  return out;
}

SymbolSeq simulate_aux(std::span<const cplx> x, const AuxChannelParams& params, Rng& rng,
                       std::optional<double> theta0) {
  AuxChannelParams checked = params;
  if (checked.sigma_n == 0.0) checked.sigma_n = 1.0;  // noiseless generation is allowed here
  checked.validate();
  const auto theta = simulate_phase(x.size(), checked, rng, theta0);
  std::normal_distribution<double> normal(0.0, checked.sigma_n / std::sqrt(2.0));
  const bool noisy = params.sigma_n > 0.0;
  SymbolSeq y(x.size());
  for (std::size_t l = 0; l < x.size(); ++l) {
    y[l] = params.h0 * x[l] * std::polar(1.0, theta[l]);
    if (noisy) {
      const double re = normal(rng);
      const double im = normal(rng);
      y[l] += cplx{re, im};
    }
  }
  return y;
}

}  // namespace fiberair

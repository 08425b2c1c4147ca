#include "fiberair/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fiberair/io.hpp"
#include "fiberair/parallel.hpp"
#include "fiberair/rng.hpp"

namespace fiberair {

using nlohmann::json;

namespace {

// Rejects keys outside `allowed` so typos cannot silently fall back to defaults.
void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument("config: '" + where + "' must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw std::invalid_argument("config: unknown key '" + where + "." + it.key() + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument("config: bad value for '" + where + "." + key + "': " + e.what());
  }
}

json config_to_json(const ExperimentConfig& c, bool with_output_dir) {
  json schemes = json::array(), receivers = json::array();
  for (auto s : c.schemes) schemes.push_back(std::string(to_string(s)));
  for (auto r : c.receivers) receivers.push_back(std::string(to_string(r)));
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["seed"] = c.seed;
  j["wdm"] = {{"n_channels", c.wdm.n_channels},
              {"grid_spacing_hz", c.wdm.grid_spacing},
              {"symbol_rate_baud", c.wdm.symbol_rate},
              {"oversampling", c.wdm.oversampling},
              {"n_symbols", c.wdm.n_symbols}};
  j["link"] = {{"span_length_m", c.link.span.length},
               {"attenuation_db_per_km", c.link.span.attenuation_db_per_km},
               {"dispersion_ps_per_nm_km", c.link.span.dispersion / units::ps_per_nm_km(1.0)},
               {"gamma_per_w_km", c.link.span.gamma / units::per_W_km(1.0)},
               {"wavelength_m", c.link.span.wavelength},
               {"n_spans", c.link.n_spans},
               {"channel_bandwidth_hz", c.link.channel_bandwidth},
               {"noise_figure_db", c.link.amplifier.noise_figure_db},
               {"noiseless", c.link.amplifier.noiseless},
               {"ase_placement", std::string(to_string(c.link.ase_placement))}};
  j["ssfm"] = {{"steps_per_span", c.ssfm.steps_per_span}};
  j["sweep"] = {{"launch_power_dbm", c.launch_power_dbm},
                {"schemes", schemes},
                {"receivers", receivers},
                {"n_train", c.n_train}};
  j["particles"] = {{"n_particles", c.particles.n_particles},
                    {"resample_threshold", c.particles.resample_threshold}};
  j["ga"] = {{"population", c.ga.population},     {"generations", c.ga.generations},
             {"sigma_z_min", c.ga.sigma_z_min},   {"sigma_z_max", c.ga.sigma_z_max},
             {"a_mix_min", c.ga.a_mix_min},       {"a_mix_max", c.ga.a_mix_max},
             {"l0_min", c.ga.l0_min},             {"l0_max", c.ga.l0_max}};
  if (with_output_dir) j["output_dir"] = c.output_dir;
  return j;
}

std::uint64_t power_tag(double dbm) { return fnv1a(format_double(dbm)); }

std::uint64_t scheme_tag(Scheme s) { return fnv1a(to_string(s)); }

std::uint64_t receiver_tag(PhaseModel m) { return fnv1a(to_string(m)); }

// Presets are JSON documents so the shipped files and the built-ins share one parser.
constexpr const char* kDeskPreset = R"({
  "schema_version": 1,
  "seed": 20170601,
  "wdm": {"n_channels": 3, "grid_spacing_hz": 50e9, "symbol_rate_baud": 50e9,
          "oversampling": 4, "n_symbols": 10000},
  "link": {"span_length_m": 100e3, "attenuation_db_per_km": 0.2,
           "dispersion_ps_per_nm_km": 17, "gamma_per_w_km": 1.27,
           "wavelength_m": 1550e-9, "n_spans": 10, "channel_bandwidth_hz": 50e9,
           "noise_figure_db": 5, "ase_placement": "inline"},
  "ssfm": {"steps_per_span": 800},
  "sweep": {"launch_power_dbm": [-2, 0, 2, 4, 6],
            "schemes": ["NDM", "DM", "CDM"], "receivers": ["AWGN", "AR1", "HOAR"], "n_train": 1000},
  "particles": {"n_particles": 512, "resample_threshold": 0.5},
  "ga": {"population": 20, "generations": 30, "sigma_z_min": 1e-4, "sigma_z_max": 1,
         "a_mix_min": 0, "a_mix_max": 1, "l0_min": 2, "l0_max": 64},
  "output_dir": "out/desk"
})";

constexpr const char* kPaperPreset = R"({
  "schema_version": 1,
  "seed": 20170601,
  "wdm": {"n_channels": 3, "grid_spacing_hz": 50e9, "symbol_rate_baud": 50e9,
          "oversampling": 4, "n_symbols": 100000},
  "link": {"span_length_m": 100e3, "attenuation_db_per_km": 0.2,
           "dispersion_ps_per_nm_km": 17, "gamma_per_w_km": 1.27,
           "wavelength_m": 1550e-9, "n_spans": 20, "channel_bandwidth_hz": 50e9,
           "noise_figure_db": 5, "ase_placement": "inline"},
  "ssfm": {"steps_per_span": 800},
  "sweep": {"launch_power_dbm": [-2, 0, 2, 4, 6],
            "schemes": ["NDM", "DM", "CDM"], "receivers": ["AWGN", "AR1", "HOAR"], "n_train": 2000},
  "particles": {"n_particles": 512, "resample_threshold": 0.5},
  "ga": {"population": 20, "generations": 30, "sigma_z_min": 1e-4, "sigma_z_max": 1,
         "a_mix_min": 0, "a_mix_max": 1, "l0_min": 2, "l0_max": 64},
  "output_dir": "out/paper"
})";

}  // namespace

void ExperimentConfig::validate() const {
  wdm.validate();
  link.validate();
  ssfm.validate();
  particles.validate();
  ga.validate();
  if (launch_power_dbm.empty()) throw std::invalid_argument("config: launch_power_dbm is empty");
  if (schemes.empty()) throw std::invalid_argument("config: schemes is empty");
  if (receivers.empty()) throw std::invalid_argument("config: receivers is empty");
  for (double p : launch_power_dbm)
    if (!std::isfinite(p)) throw std::invalid_argument("config: launch power must be finite");
  if (std::set<double>(launch_power_dbm.begin(), launch_power_dbm.end()).size() != launch_power_dbm.size())
    throw std::invalid_argument("config: duplicate launch power");
  if (std::set<Scheme>(schemes.begin(), schemes.end()).size() != schemes.size())
    throw std::invalid_argument("config: duplicate scheme");
  if (std::set<PhaseModel>(receivers.begin(), receivers.end()).size() != receivers.size())
    throw std::invalid_argument("config: duplicate receiver");
  const std::size_t nt = training_symbols();
  if (nt < 100) throw std::invalid_argument("config: training block needs at least 100 symbols");
  if (nt + 100 > wdm.n_symbols) throw std::invalid_argument("config: evaluation block needs at least 100 symbols");
  if (std::find(receivers.begin(), receivers.end(), PhaseModel::HOAR) != receivers.end() &&
      nt < 10 * static_cast<std::size_t>(ga.l0_max))
    throw std::invalid_argument("config: HOAR needs n_train >= 10 * l0_max");
}

std::size_t ExperimentConfig::training_symbols() const {
  if (n_train > 0) return n_train;
  return static_cast<std::size_t>(std::llround(0.02 * static_cast<double>(wdm.n_symbols)));
}

std::string ExperimentConfig::digest() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(config_to_json(*this, false).dump())));
  return buf;
}

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  check_keys(j, {"schema_version", "seed", "wdm", "link", "ssfm", "sweep", "particles", "ga", "output_dir"}, "");
  if (!j.contains("schema_version")) throw std::invalid_argument("config: missing schema_version");
  if (j.at("schema_version") != kConfigSchemaVersion)
    throw std::invalid_argument("config: unsupported schema_version " + j.at("schema_version").dump());

  ExperimentConfig c;
  read(j, "seed", c.seed, "");
  read(j, "output_dir", c.output_dir, "");
  if (j.contains("wdm")) {
    const auto& w = j["wdm"];
    check_keys(w, {"n_channels", "grid_spacing_hz", "symbol_rate_baud", "oversampling", "n_symbols"}, "wdm");
    read(w, "n_channels", c.wdm.n_channels, "wdm");
    read(w, "grid_spacing_hz", c.wdm.grid_spacing, "wdm");
    read(w, "symbol_rate_baud", c.wdm.symbol_rate, "wdm");
    read(w, "oversampling", c.wdm.oversampling, "wdm");
    read(w, "n_symbols", c.wdm.n_symbols, "wdm");
  }
  if (j.contains("link")) {
    const auto& l = j["link"];
    check_keys(l, {"span_length_m", "attenuation_db_per_km", "dispersion_ps_per_nm_km", "gamma_per_w_km",
                   "wavelength_m", "n_spans", "channel_bandwidth_hz", "noise_figure_db", "noiseless",
                   "ase_placement"},
               "link");
    double d = c.link.span.dispersion / units::ps_per_nm_km(1.0);
    double g = c.link.span.gamma / units::per_W_km(1.0);
    std::string placement(to_string(c.link.ase_placement));
    read(l, "span_length_m", c.link.span.length, "link");
    read(l, "attenuation_db_per_km", c.link.span.attenuation_db_per_km, "link");
    read(l, "dispersion_ps_per_nm_km", d, "link");
    read(l, "gamma_per_w_km", g, "link");
    read(l, "wavelength_m", c.link.span.wavelength, "link");
    read(l, "n_spans", c.link.n_spans, "link");
    read(l, "channel_bandwidth_hz", c.link.channel_bandwidth, "link");
    read(l, "noise_figure_db", c.link.amplifier.noise_figure_db, "link");
    read(l, "noiseless", c.link.amplifier.noiseless, "link");
    read(l, "ase_placement", placement, "link");
    c.link.span.dispersion = units::ps_per_nm_km(d);
    c.link.span.gamma = units::per_W_km(g);
    c.link.ase_placement = parse_ase_placement(placement);
  }
  if (j.contains("ssfm")) {
    check_keys(j["ssfm"], {"steps_per_span"}, "ssfm");
    read(j["ssfm"], "steps_per_span", c.ssfm.steps_per_span, "ssfm");
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    check_keys(s, {"launch_power_dbm", "schemes", "receivers", "n_train"}, "sweep");
    read(s, "launch_power_dbm", c.launch_power_dbm, "sweep");
    read(s, "n_train", c.n_train, "sweep");
    if (s.contains("schemes")) {
      std::vector<std::string> names;
      read(s, "schemes", names, "sweep");
      c.schemes.clear();
      for (const auto& n : names) c.schemes.push_back(parse_scheme(n));
    }
    if (s.contains("receivers")) {
      std::vector<std::string> names;
      read(s, "receivers", names, "sweep");
      c.receivers.clear();
      for (const auto& n : names) c.receivers.push_back(parse_phase_model(n));
    }
  }
  if (j.contains("particles")) {
    const auto& p = j["particles"];
    check_keys(p, {"n_particles", "resample_threshold"}, "particles");
    read(p, "n_particles", c.particles.n_particles, "particles");
    read(p, "resample_threshold", c.particles.resample_threshold, "particles");
  }
  if (j.contains("ga")) {
    const auto& g = j["ga"];
    check_keys(g, {"population", "generations", "sigma_z_min", "sigma_z_max", "a_mix_min", "a_mix_max", "l0_min",
                   "l0_max"},
               "ga");
    read(g, "population", c.ga.population, "ga");
    read(g, "generations", c.ga.generations, "ga");
    read(g, "sigma_z_min", c.ga.sigma_z_min, "ga");
    read(g, "sigma_z_max", c.ga.sigma_z_max, "ga");
    read(g, "a_mix_min", c.ga.a_mix_min, "ga");
    read(g, "a_mix_max", c.ga.a_mix_max, "ga");
    read(g, "l0_min", c.ga.l0_min, "ga");
    read(g, "l0_max", c.ga.l0_max, "ga");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& cfg) { return config_to_json(cfg, true).dump(2) + "\n"; }

ExperimentConfig preset(std::string_view name) {
  if (name == "desk") return parse_config(kDeskPreset);
  if (name == "paper") return parse_config(kPaperPreset);
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() { return {"desk", "paper"}; }

CellData simulate_cell(const ExperimentConfig& cfg, Scheme scheme, double power_dbm) {
  WdmSpec wdm = cfg.wdm;
  wdm.channel_power = units::dbm_to_watt(power_dbm);
  wdm.validate();
  LinkSpec link = cfg.link;
  link.scheme = scheme;

  const std::uint64_t ptag = power_tag(power_dbm);
  const int kmax = wdm.max_channel_index();
  CellData data;
  std::vector<SampledSignal> waves;
  waves.reserve(static_cast<std::size_t>(wdm.n_channels));
  for (int k = -kmax; k <= kmax; ++k) {
    Rng rng(derive_seed(cfg.seed, {fnv1a("tx"), ptag, static_cast<std::uint64_t>(k + 1024)}));
    SymbolSeq s = generate_gaussian_symbols(wdm.n_symbols, wdm.channel_power, rng);
    waves.push_back(modulate(s, wdm));
    if (k == 0) data.x = std::move(s);
  }
  const SampledSignal tx = wdm_mux(waves, wdm);
  waves.clear();

  Rng ase_rng(derive_seed(cfg.seed, {fnv1a("ase"), ptag}));
  const SampledSignal rx = run_link(tx, link, cfg.ssfm, ase_rng);
  const SampledSignal coi = wdm_demux(rx, 0, wdm);
  const SampledSignal bp = dbp(coi, link, cfg.ssfm);
  data.y = matched_filter_and_sample(bp, wdm.symbol_rate);
  return data;
}

std::vector<RunRecord> evaluate_receivers(const ExperimentConfig& cfg, Scheme scheme, double power_dbm,
                                          const CellData& data) {
  const std::size_t nt = cfg.training_symbols();
  if (data.x.size() != data.y.size() || data.x.size() <= nt)
    throw std::invalid_argument("evaluate_receivers: symbol block shorter than the training prefix");
  const std::uint64_t ptag = power_tag(power_dbm);
  const std::string digest = cfg.digest();

  std::span<const cplx> x_all(data.x);
  SymbolSeq y = data.y;
  const double phi0 = estimate_common_phase(x_all.first(nt), std::span<const cplx>(y).first(nt));
  const cplx rot = std::polar(1.0, -phi0);
  for (auto& v : y) v *= rot;

  const auto x_tr = x_all.first(nt), x_ev = x_all.subspan(nt);
  const auto y_tr = std::span<const cplx>(y).first(nt), y_ev = std::span<const cplx>(y).subspan(nt);
  const GainNoiseEstimate gn = estimate_gain_noise(x_tr, y_tr);

  auto seeds_for = [&](PhaseModel m) {
    ParticleConfig pc = cfg.particles;
    pc.seed = derive_seed(cfg.seed, {fnv1a("pf"), scheme_tag(scheme), ptag, receiver_tag(m)});
    GaConfig ga = cfg.ga;
    ga.seed = derive_seed(cfg.seed, {fnv1a("ga"), scheme_tag(scheme), ptag, receiver_tag(m)});
    return std::pair{pc, ga};
  };

  std::optional<AuxChannelParams> ar1_fit;
  const bool want_ar1 = std::find(cfg.receivers.begin(), cfg.receivers.end(), PhaseModel::AR1) != cfg.receivers.end();
  const bool want_hoar =
      std::find(cfg.receivers.begin(), cfg.receivers.end(), PhaseModel::HOAR) != cfg.receivers.end();
  if (want_ar1 || want_hoar) {
    auto [pc, ga] = seeds_for(PhaseModel::AR1);
    ar1_fit = fit_phase_model(x_tr, y_tr, PhaseModel::AR1, gn.h0, gn.sigma_n, ga, pc);
  }

  std::vector<RunRecord> out;
  for (PhaseModel m : cfg.receivers) {
    RunRecord r;
    r.scheme = scheme;
    r.receiver = m;
    r.power_dbm = power_dbm;
    r.phase_offset = phi0;
    r.degenerate_noise = gn.degenerate;
    auto [pc, ga] = seeds_for(m);
    AuxChannelParams params;
    params.h0 = gn.h0;
    params.sigma_n = gn.sigma_n;
    if (m == PhaseModel::AR1) {
      params = *ar1_fit;
    } else if (m == PhaseModel::HOAR) {
      std::optional<AuxChannelParams> warm;
      if (ar1_fit) {
        warm = *ar1_fit;
        warm->phase_model = PhaseModel::HOAR;
        warm->a_mix = 1.0;
        warm->l0 = cfg.ga.l0_min;
      }
      params = fit_phase_model(x_tr, y_tr, PhaseModel::HOAR, gn.h0, gn.sigma_n, ga, pc, warm);
    }
    r.result = air_estimate(x_ev, y_ev, params, pc);
    r.result.n_train = nt;
    r.result.config_digest = digest;
    out.push_back(std::move(r));
  }
  return out;
}

void sort_records(std::vector<RunRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    if (a.scheme != b.scheme) return a.scheme < b.scheme;
    if (a.power_dbm != b.power_dbm) return a.power_dbm < b.power_dbm;
    return a.receiver < b.receiver;
  });
}

std::optional<RunRecord> best_record(const std::vector<RunRecord>& records, Scheme scheme, PhaseModel receiver) {
  std::optional<RunRecord> best;
  for (const auto& r : records) {
    if (!r.ok || r.scheme != scheme || r.receiver != receiver) continue;
    if (!best || r.result.air > best->result.air) best = r;
  }
  return best;
}

double accumulated_ase_power(const ExperimentConfig& cfg) {
  if (cfg.link.amplifier.noiseless) return 0.0;
  return cfg.link.n_spans * ase_psd(cfg.link.span, cfg.link.amplifier.noise_figure_db) * cfg.wdm.symbol_rate;
}

std::string record_to_json(const RunRecord& r) {
  const auto& a = r.result;
  json j = {{"scheme", std::string(to_string(r.scheme))},
            {"receiver", std::string(to_string(r.receiver))},
            {"power_dbm", r.power_dbm},
            {"air", a.air},
            {"std_error", a.std_error},
            {"h0", a.params.h0},
            {"sigma_n", a.params.sigma_n},
            {"phase_model", std::string(to_string(a.params.phase_model))},
            {"sigma_z", a.params.sigma_z},
            {"a_mix", a.params.a_mix},
            {"l0", a.params.l0},
            {"n_train", a.n_train},
            {"n_eval", a.n_eval},
            {"seed", a.seed},
            {"config_digest", a.config_digest},
            {"phase_offset", r.phase_offset},
            {"degenerate_noise", r.degenerate_noise},
            {"ok", r.ok},
            {"error", r.error},
            {"wall_time_s", r.wall_time_s}};
  return j.dump();
}

RunRecord record_from_json(std::string_view line) {
  const json j = json::parse(line);
  RunRecord r;
  r.scheme = parse_scheme(j.at("scheme").get<std::string>());
  r.receiver = parse_phase_model(j.at("receiver").get<std::string>());
  r.power_dbm = j.at("power_dbm").get<double>();
  auto& a = r.result;
  // Non-finite doubles serialize as null.
  auto num = [&](const char* k) {
    return j.at(k).is_null() ? std::numeric_limits<double>::quiet_NaN() : j.at(k).get<double>();
  };
  a.air = num("air");
  a.std_error = num("std_error");
  a.params.h0 = num("h0");
  a.params.sigma_n = num("sigma_n");
  a.params.phase_model = parse_phase_model(j.at("phase_model").get<std::string>());
  a.params.sigma_z = num("sigma_z");
  a.params.a_mix = num("a_mix");
  a.params.l0 = j.at("l0").get<int>();
  a.n_train = j.at("n_train").get<std::size_t>();
  a.n_eval = j.at("n_eval").get<std::size_t>();
  a.seed = j.at("seed").get<std::uint64_t>();
  a.config_digest = j.at("config_digest").get<std::string>();
  r.phase_offset = num("phase_offset");
  r.degenerate_noise = j.at("degenerate_noise").get<bool>();
  r.ok = j.at("ok").get<bool>();
  r.error = j.at("error").get<std::string>();
  r.wall_time_s = num("wall_time_s");
  return r;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  const auto journal = dir / "records.jsonl";
  const std::string digest = cfg.digest();

  using Key = std::tuple<Scheme, double, PhaseModel>;
  std::map<Key, RunRecord> done;
  if (opts.resume && std::filesystem::exists(journal)) {
    std::ifstream in(journal);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      RunRecord r;
      try {
        r = record_from_json(line);
      } catch (const std::exception&) {
        continue;  // a torn final line from an interrupted write
      }
      if (r.result.config_digest != digest || !r.ok) continue;
      done[{r.scheme, r.power_dbm, r.receiver}] = r;
    }
  } else {
    std::ofstream(journal, std::ios::trunc);
  }

  struct Cell {
    Scheme scheme;
    double power;
  };
  std::vector<Cell> todo;
  for (Scheme s : cfg.schemes)
    for (double p : cfg.launch_power_dbm) {
      bool complete = true;
      for (PhaseModel m : cfg.receivers) complete = complete && done.count({s, p, m});
      if (!complete) todo.push_back({s, p});
    }
  if (todo.size() > opts.max_new_cells) todo.resize(opts.max_new_cells);

  const unsigned threads = std::max(1u, opts.threads);
  const unsigned cell_threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, todo.size())));
  ExperimentConfig inner = cfg;
  inner.ga.threads = std::max(1u, threads / cell_threads);

  std::mutex mu;
  std::ofstream out(journal, std::ios::app);
  std::vector<std::vector<RunRecord>> fresh(todo.size());
  parallel_for(todo.size(), cell_threads, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    const Cell c = todo[i];
    std::vector<RunRecord> recs;
    try {
      const CellData data = simulate_cell(inner, c.scheme, c.power);
      if (opts.dump_symbols) {
        const auto name = "symbols_" + std::string(to_string(c.scheme)) + "_" + format_double(c.power) + "dBm.csv";
        write_symbols_csv(data, dir / name);
      }
      recs = evaluate_receivers(inner, c.scheme, c.power, data);
    } catch (const std::exception& e) {
      recs.clear();
      for (PhaseModel m : cfg.receivers) {
        RunRecord r;
        r.scheme = c.scheme;
        r.receiver = m;
        r.power_dbm = c.power;
        r.ok = false;
        r.error = e.what();
        r.result.air = std::numeric_limits<double>::quiet_NaN();
        r.result.std_error = std::numeric_limits<double>::quiet_NaN();
        r.result.params.phase_model = m;
        r.result.config_digest = digest;
        recs.push_back(std::move(r));
      }
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::lock_guard lock(mu);
    for (auto& r : recs) {
      r.wall_time_s = dt;
      out << record_to_json(r) << '\n';
      if (opts.on_record) opts.on_record(r);
    }
    out.flush();
    fresh[i] = std::move(recs);
  });

  for (auto& v : fresh)
    for (auto& r : v) done[{r.scheme, r.power_dbm, r.receiver}] = std::move(r);
  std::vector<RunRecord> records;
  for (auto& [k, r] : done) {
    const auto& [s, p, m] = k;
    const bool wanted = std::find(cfg.schemes.begin(), cfg.schemes.end(), s) != cfg.schemes.end() &&
                        std::find(cfg.launch_power_dbm.begin(), cfg.launch_power_dbm.end(), p) !=
                            cfg.launch_power_dbm.end() &&
                        std::find(cfg.receivers.begin(), cfg.receivers.end(), m) != cfg.receivers.end();
    if (wanted) records.push_back(r);
  }
  sort_records(records);
  export_csv(records, dir / "records.csv");
  return records;
}

}  // namespace fiberair

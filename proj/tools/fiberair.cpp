#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "fiberair/harness.hpp"
#include "fiberair/io.hpp"
#include "fiberair/parallel.hpp"
#include "fiberair/plot.hpp"
#include "fiberair/xpm.hpp"

using namespace fiberair;
namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string config;
  std::string preset_name;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  unsigned threads = 1;
};

ExperimentConfig resolve_config(const Globals& g) {
  ExperimentConfig cfg;
  if (!g.config.empty() && !g.preset_name.empty()) throw std::invalid_argument("use either --config or --preset");
  if (!g.config.empty())
    cfg = load_config(g.config);
  else
    cfg = preset(g.preset_name.empty() ? "desk" : g.preset_name);
  if (g.seed) cfg.seed = *g.seed;
  if (g.out) cfg.output_dir = *g.out;
  cfg.validate();
  return cfg;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  return v;
}

int run_correlate(const Globals& g, const std::vector<std::string>& schemes, int channels, double df_max_ghz,
                  int df_points, double tau_max_sym, int tau_points, int m) {
  ExperimentConfig cfg = resolve_config(g);
  WdmSpec wdm = cfg.wdm;
  wdm.n_channels = channels;
  wdm.channel_power = 1e-3;
  const auto interferer = InterfererSpec::from_wdm(wdm);
  auto df = linspace(-df_max_ghz * 1e9, df_max_ghz * 1e9, df_points);
  auto tau = linspace(-tau_max_sym / wdm.symbol_rate, tau_max_sym / wdm.symbol_rate, tau_points);
  // Sections need exact zeros on both axes.
  df[static_cast<std::size_t>(df_points / 2)] = 0.0;
  tau[static_cast<std::size_t>(tau_points / 2)] = 0.0;

  const fs::path out(cfg.output_dir);
  std::vector<LabeledGrid> grids;
  GridOptions opts;
  opts.points_per_axis = m;
  opts.threads = g.threads;
  for (const auto& name : schemes) {
    LinkSpec link = cfg.link;
    link.scheme = parse_scheme(name);
    const auto grid = correlation_grid(link, interferer, df, tau, opts);
    const std::string label = std::string(to_string(link.scheme));
    export_csv(grid, out / fmt::format("xpm_{}.csv", label));
    export_sections_csv(grid, out / fmt::format("xpm_{}_sections.csv", label));
    fmt::print("{}: R(0,0,0) = {:.6e} rad^2, M = {}, converged = {}, max change = {:.2e}\n", label,
               grid.at(grid.delta_f_zero_index(), grid.tau_zero_index()).real(), grid.points_per_axis,
               grid.converged ? "yes" : "no", grid.max_rel_change);
    grids.push_back({label, grid});
  }
  for (const auto& p : render_correlation_plots(grids, out)) fmt::print("wrote {}\n", p.string());
  return 0;
}

void print_records(const std::vector<RunRecord>& recs) {
  fmt::print("{:<5} {:<5} {:>9} {:>10} {:>9}  {}\n", "link", "rx", "P [dBm]", "AIR", "std err", "params");
  for (const auto& r : recs) {
    if (!r.ok) {
      fmt::print("{:<5} {:<5} {:>9.2f} {:>10} {:>9}  error: {}\n", to_string(r.scheme), to_string(r.receiver),
                 r.power_dbm, "-", "-", r.error);
      continue;
    }
    const auto& p = r.result.params;
    std::string extra = fmt::format("h0={:.4f} sigma_n={:.3e}", p.h0, p.sigma_n);
    if (p.phase_model != PhaseModel::AWGN) extra += fmt::format(" sigma_z={:.3e}", p.sigma_z);
    if (p.phase_model == PhaseModel::HOAR) extra += fmt::format(" a={:.3f} l0={}", p.a_mix, p.l0);
    fmt::print("{:<5} {:<5} {:>9.2f} {:>10.5f} {:>9.5f}  {}\n", to_string(r.scheme), to_string(r.receiver),
               r.power_dbm, r.result.air, r.result.std_error, extra);
  }
}

int run_sweep(const Globals& g, bool no_resume, std::size_t max_cells, bool dump_symbols) {
  const ExperimentConfig cfg = resolve_config(g);
  RunOptions opts;
  opts.threads = g.threads;
  opts.resume = !no_resume;
  opts.max_new_cells = max_cells;
  opts.dump_symbols = dump_symbols;
  opts.on_record = [](const RunRecord& r) {
    fmt::print(stderr, "[{} {} {:+.2f} dBm] {}\n", to_string(r.scheme), to_string(r.receiver), r.power_dbm,
               r.ok ? fmt::format("AIR {:.5f} +- {:.5f}", r.result.air, r.result.std_error) : "FAILED: " + r.error);
  };
  fmt::print("config digest {} -> {}\n", cfg.digest(), cfg.output_dir);
  const auto recs = run_experiment(cfg, opts);
  const fs::path out(cfg.output_dir);
  {
    std::FILE* f = std::fopen((out / "config.json").string().c_str(), "w");
    if (f) {
      std::fputs(dump_config(cfg).c_str(), f);
      std::fclose(f);
    }
  }
  print_records(recs);
  bool any_ok = false, all_ok = true;
  for (const auto& r : recs) {
    any_ok = any_ok || r.ok;
    all_ok = all_ok && r.ok;
  }
  if (any_ok) render_air_plot(recs, out / "air_vs_power.svg", accumulated_ase_power(cfg));
  const std::size_t expected = cfg.schemes.size() * cfg.launch_power_dbm.size() * cfg.receivers.size();
  if (recs.size() < expected) fmt::print("{} of {} records present (sweep incomplete)\n", recs.size(), expected);
  return all_ok && recs.size() == expected ? 0 : 1;
}

// symbols_<SCHEME>_<P>dBm.csv as written by `sweep --dump-symbols`.
std::pair<Scheme, double> cell_from_filename(const std::string& file) {
  const std::string stem = fs::path(file).stem().string();
  const auto a = stem.find('_'), b = stem.rfind('_');
  if (stem.rfind("symbols_", 0) == 0 && a != b && stem.size() > b + 4 && stem.ends_with("dBm")) {
    try {
      return {parse_scheme(stem.substr(a + 1, b - a - 1)), std::stod(stem.substr(b + 1, stem.size() - b - 4))};
    } catch (const std::exception&) {
    }
  }
  return {Scheme::NDM, 0.0};
}

int run_air(const Globals& g, const std::vector<std::string>& files, const std::vector<std::string>& receivers,
            std::size_t n_train) {
  ExperimentConfig cfg = resolve_config(g);
  cfg.receivers.clear();
  for (const auto& r : receivers) cfg.receivers.push_back(parse_phase_model(r));
  if (n_train > 0) cfg.n_train = n_train;
  cfg.ga.threads = g.threads;
  std::vector<RunRecord> all;
  bool ok = true;
  for (const auto& file : files) {
    const CellData data = read_symbols_csv(file);
    ExperimentConfig local = cfg;
    local.wdm.n_symbols = data.x.size();
    try {
      local.validate();
      const auto [scheme, dbm] = cell_from_filename(file);
      auto recs = evaluate_receivers(local, scheme, dbm, data);
      for (auto& r : recs) {
        fmt::print("{} {}\n", file, record_to_json(r));
        all.push_back(std::move(r));
      }
    } catch (const std::exception& e) {
      fmt::print(stderr, "{}: {}\n", file, e.what());
      ok = false;
    }
  }
  export_csv(all, fs::path(cfg.output_dir) / "air_records.csv");
  return ok ? 0 : 1;
}

int run_plot(const Globals& g, const std::string& records, const std::vector<std::string>& grids) {
  if (records.empty() && grids.empty()) throw std::invalid_argument("plot: give --records and/or --grid");
  std::optional<ExperimentConfig> cfg;
  if (!g.config.empty() || !g.preset_name.empty()) cfg = resolve_config(g);
  const fs::path out = g.out ? fs::path(*g.out) : cfg ? fs::path(cfg->output_dir) : fs::path(".");
  if (!records.empty()) {
    const auto recs = read_records_csv(records);
    std::optional<double> noise;
    if (cfg) noise = accumulated_ase_power(*cfg);
    render_air_plot(recs, out / "air_vs_power.svg", noise);
    fmt::print("wrote {}\n", (out / "air_vs_power.svg").string());
  }
  if (!grids.empty()) {
    std::vector<LabeledGrid> lg;
    for (const auto& file : grids) {
      std::string label = fs::path(file).stem().string();
      if (label.rfind("xpm_", 0) == 0) label = label.substr(4);
      lg.push_back({label, read_grid_csv(file)});
    }
    for (const auto& p : render_correlation_plots(lg, out)) fmt::print("wrote {}\n", p.string());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fiber-optic WDM link simulation and achievable-information-rate estimation"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "experiment config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--preset", g.preset_name, "built-in config: desk or paper (default desk)");
  std::uint64_t seed = 0;
  std::string out;
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides the config)");
  auto* out_opt = app.add_option("--out", out, "output directory (overrides the config)");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::Range(1u, 1024u));

  auto* correlate = app.add_subcommand("correlate", "XPM phase correlation grids, CSV and SVG");
  std::vector<std::string> schemes{"NDM", "DM", "CDM"};
  int channels = 3, df_points = 51, tau_points = 161, m = 256;
  double df_max = 25.0, tau_max = 80.0;
  correlate->add_option("--schemes", schemes, "links to evaluate")->delimiter(',');
  correlate->add_option("--channels", channels, "WDM channels (odd)");
  correlate->add_option("--df-max-ghz", df_max, "half-range of the frequency offset axis");
  correlate->add_option("--df-points", df_points, "points on the frequency axis (odd)");
  correlate->add_option("--tau-max-symbols", tau_max, "half-range of the delay axis in symbols");
  correlate->add_option("--tau-points", tau_points, "points on the delay axis (odd)");
  correlate->add_option("--points-per-axis", m, "initial quadrature points per band axis");

  auto* sweep = app.add_subcommand("sweep", "run the power/scheme/receiver sweep");
  bool no_resume = false, dump = false;
  std::size_t max_cells = std::numeric_limits<std::size_t>::max();
  sweep->add_flag("--no-resume", no_resume, "ignore and overwrite the existing journal");
  sweep->add_option("--max-cells", max_cells, "stop after computing this many new cells");
  sweep->add_flag("--dump-symbols", dump, "write each cell's x/y symbols as CSV");

  auto* air = app.add_subcommand("air", "estimate AIRs from stored symbol files (x_re,x_im,y_re,y_im)");
  std::vector<std::string> files, receivers{"AWGN", "AR1"};
  std::size_t n_train = 0;
  air->add_option("files", files, "symbol CSV files; link and power are taken from symbols_<LINK>_<P>dBm names")->required()->check(CLI::ExistingFile);
  air->add_option("--receivers", receivers, "auxiliary channels")->delimiter(',');
  air->add_option("--train", n_train, "training prefix length (default from config)");

  auto* plot = app.add_subcommand("plot", "render SVGs from CSV outputs");
  std::string records;
  std::vector<std::string> grid_files;
  plot->add_option("--records", records, "records CSV from sweep or air")->check(CLI::ExistingFile);
  plot->add_option("--grid", grid_files, "correlation grid CSV (repeatable)")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count()) g.seed = seed;
  if (out_opt->count()) g.out = out;

  try {
    if (*correlate) {
      if (channels < 1 || channels % 2 == 0) throw std::invalid_argument("--channels must be odd");
      if (df_points % 2 == 0 || tau_points % 2 == 0) throw std::invalid_argument("axis point counts must be odd");
      return run_correlate(g, schemes, channels, df_max, df_points, tau_max, tau_points, m);
    }
    if (*sweep) return run_sweep(g, no_resume, max_cells, dump);
    if (*air) return run_air(g, files, receivers, n_train);
    if (*plot) return run_plot(g, records, grid_files);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 0;
}

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fiberair/air.hpp"
#include "fiberair/link.hpp"
#include "fiberair/transceiver.hpp"

namespace fiberair {

inline constexpr int kConfigSchemaVersion = 1;

/// Everything needed to reproduce a sweep. `wdm.channel_power` is ignored;
/// the per-channel launch power comes from `launch_power_dbm`.
struct ExperimentConfig {
  WdmSpec wdm;
  LinkSpec link;  // link.scheme is overridden per cell
  SsfmConfig ssfm;
  std::vector<double> launch_power_dbm;
  std::vector<Scheme> schemes{Scheme::NDM, Scheme::DM, Scheme::CDM};
  std::vector<PhaseModel> receivers{PhaseModel::AWGN, PhaseModel::AR1};
  std::size_t n_train = 0;  // 0: 2% of the frame (2000 of 10^5)
  ParticleConfig particles;
  GaConfig ga;
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  void validate() const;
  std::size_t training_symbols() const;
  /// Hex FNV-1a digest of the canonical JSON form, excluding output_dir.
  std::string digest() const;
};

/// Parses the versioned JSON document; unknown keys are errors.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical JSON form (round-trips through parse_config).
std::string dump_config(const ExperimentConfig& cfg);

/// Built-in presets: "desk" (3 channels, 10 spans, 10^4 symbols) and "paper"
/// (100 km x 20 spans, 10^5 symbols).
ExperimentConfig preset(std::string_view name);
std::vector<std::string> preset_names();

struct RunRecord {
  Scheme scheme = Scheme::NDM;
  PhaseModel receiver = PhaseModel::AWGN;
  double power_dbm = 0.0;
  AirResult result;
  double phase_offset = 0.0;   // common phase removed by the receiver front end, rad
  bool degenerate_noise = false;  // sigma_n hit its lower search bound
  bool ok = true;
  std::string error;
  double wall_time_s = 0.0;    // journal only; not part of the CSV
};

/// Received channel-of-interest symbols of one (scheme, power) cell.
struct CellData {
  SymbolSeq x;  // transmitted COI symbols
  SymbolSeq y;  // after DBP and matched filter
};

/// Runs the physical chain for one cell: symbols -> modulate -> mux ->
/// link -> demux COI -> DBP -> matched filter. Transmitted symbols and ASE
/// draw from streams seeded by (seed, power), shared by all schemes.
CellData simulate_cell(const ExperimentConfig& cfg, Scheme scheme, double power_dbm);

/// Fits and evaluates every configured receiver on one cell's symbols.
std::vector<RunRecord> evaluate_receivers(const ExperimentConfig& cfg, Scheme scheme, double power_dbm,
                                          const CellData& data);

struct RunOptions {
  unsigned threads = 1;
  bool resume = true;
  /// Stop after this many newly computed cells (used to exercise resume).
  std::size_t max_new_cells = std::numeric_limits<std::size_t>::max();
  bool dump_symbols = false;
  std::function<void(const RunRecord&)> on_record;
};

/// Sweeps every (scheme, power) cell and every receiver, appending each
/// finished cell to <output_dir>/records.jsonl and writing records.csv.
/// Cells already in the journal with a matching digest are not recomputed.
/// Records come back sorted by (scheme, power, receiver).
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Stable sort order used for exports.
void sort_records(std::vector<RunRecord>& records);

/// The record with the highest AIR for (scheme, receiver), if any succeeded.
std::optional<RunRecord> best_record(const std::vector<RunRecord>& records, Scheme scheme, PhaseModel receiver);

/// Noise power of the accumulated ASE in the channel bandwidth, N_s S_ASE R_s.
double accumulated_ase_power(const ExperimentConfig& cfg);

std::string record_to_json(const RunRecord& r);
RunRecord record_from_json(std::string_view line);

}  // namespace fiberair

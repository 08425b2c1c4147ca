#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fiberair/harness.hpp"
#include "fiberair/xpm.hpp"

namespace fiberair {

/// records.csv: one row per RunRecord, '.' decimal, doubles printed with
/// 17 significant digits so that reading back is lossless.
void export_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path);
std::vector<RunRecord> read_records_csv(const std::filesystem::path& path);
std::string records_csv_header();

/// Grid CSV: delta_f_hz,tau_s,re,im with one row per grid point.
void export_csv(const CorrelationGrid& grid, const std::filesystem::path& path);
CorrelationGrid read_grid_csv(const std::filesystem::path& path);

/// Normalized cross-sections: section,coordinate,value with section in
/// {frequency, time}; frequency rows are |R(0,df,0)|/peak over delta_f_hz,
/// time rows are Re R(0,0,tau)/peak over tau_s.
void export_sections_csv(const CorrelationGrid& grid, const std::filesystem::path& path);

/// Symbol file for the `air` subcommand: x_re,x_im,y_re,y_im.
void write_symbols_csv(const CellData& data, const std::filesystem::path& path);
CellData read_symbols_csv(const std::filesystem::path& path);

/// Format helper: shortest text that reads back to the same double.
std::string format_double(double v);

}  // namespace fiberair

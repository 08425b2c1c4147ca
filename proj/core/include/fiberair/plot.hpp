#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fiberair/harness.hpp"
#include "fiberair/xpm.hpp"

namespace fiberair {

/// AIR versus launch power, one polyline per (scheme, receiver). When
/// `noise_power_w` is set, log2(1 + P/noise) is drawn as the AWGN reference.
void render_air_plot(const std::vector<RunRecord>& records, const std::filesystem::path& svg_path,
                     std::optional<double> noise_power_w = std::nullopt);

struct LabeledGrid {
  std::string label;
  CorrelationGrid grid;
};

/// Writes <stem>_<label>_contour.svg for every grid plus <stem>_freq.svg and
/// <stem>_time.svg with the cross-sections of all grids, normalized so the
/// overall maximum is one. Returns the written paths.
std::vector<std::filesystem::path> render_correlation_plots(const std::vector<LabeledGrid>& grids,
                                                            const std::filesystem::path& dir,
                                                            const std::string& stem = "xpm");

}  // namespace fiberair

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace fiberair {

/// One real-valued or integer parameter searched by the genetic optimizer.
struct Gene {
  double lo = 0.0;
  double hi = 1.0;
  bool integer = false;
  bool log_scale = false;  // search uniformly in log(value); needs lo > 0
};

struct GaOptions {
  int population = 20;
  /// Generation 0 is the initial population, so generations == 1 evaluates
  /// only the initial population.
  int generations = 30;
  int elites = 2;
  double crossover_rate = 0.9;
  double mutation_rate = 0.25;  // per gene
  double mutation_scale = 0.1;  // std dev in normalized [0,1] units
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct GaResult {
  std::vector<double> best;
  double fitness = 0.0;
  int evaluations = 0;
  std::vector<double> best_per_generation;
};

using FitnessFn = std::function<double(std::span<const double>)>;

/// Maximizes `fitness` over the box defined by `genes` with a real-coded GA
/// (binary tournament, BLX-0.3 crossover, Gaussian mutation, elitism).
/// `seeds` are decoded parameter vectors inserted into the initial
/// population. Deterministic for a given seed regardless of `threads`.
GaResult ga_maximize(std::span<const Gene> genes, const FitnessFn& fitness, const GaOptions& opts,
                     std::span<const std::vector<double>> seeds = {});

}  // namespace fiberair

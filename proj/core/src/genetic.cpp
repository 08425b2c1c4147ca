#include "fiberair/genetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "fiberair/parallel.hpp"
#include "fiberair/rng.hpp"

namespace fiberair {

namespace {

struct Individual {
  std::vector<double> unit;  // normalized genome in [0,1]^n
  double fitness = 0.0;
  bool evaluated = false;
};

double decode_one(const Gene& g, double u) {
  double v = g.log_scale ? std::exp(std::log(g.lo) + u * (std::log(g.hi) - std::log(g.lo)))
                         : g.lo + u * (g.hi - g.lo);
  if (g.integer) v = std::clamp(std::round(v), std::ceil(g.lo), std::floor(g.hi));
  return std::clamp(v, g.lo, g.hi);
}

double encode_one(const Gene& g, double v) {
  v = std::clamp(v, g.lo, g.hi);
  if (g.hi == g.lo) return 0.0;
  if (g.log_scale) return (std::log(v) - std::log(g.lo)) / (std::log(g.hi) - std::log(g.lo));
  return (v - g.lo) / (g.hi - g.lo);
}

std::vector<double> decode(std::span<const Gene> genes, const std::vector<double>& unit) {
  std::vector<double> out(genes.size());
  for (std::size_t i = 0; i < genes.size(); ++i) out[i] = decode_one(genes[i], unit[i]);
  return out;
}

}  // namespace

GaResult ga_maximize(std::span<const Gene> genes, const FitnessFn& fitness, const GaOptions& opts,
                     std::span<const std::vector<double>> seeds) {
  if (genes.empty()) throw std::invalid_argument("ga_maximize: no genes");
  if (opts.population < 4) throw std::invalid_argument("ga_maximize: population must be >= 4");
  if (opts.generations < 1) throw std::invalid_argument("ga_maximize: generations must be >= 1");
  for (const auto& g : genes) {
    if (!(g.hi >= g.lo)) throw std::invalid_argument("ga_maximize: empty gene bounds");
    if (g.log_scale && !(g.lo > 0.0)) throw std::invalid_argument("ga_maximize: log-scale gene needs lo > 0");
    if (g.integer && std::ceil(g.lo) > std::floor(g.hi)) throw std::invalid_argument("ga_maximize: no integer in bounds");
  }

  Rng rng(opts.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n_genes = genes.size();
  const auto pop_size = static_cast<std::size_t>(opts.population);

  std::vector<Individual> pop(pop_size);
  for (std::size_t p = 0; p < pop_size; ++p) {
    pop[p].unit.resize(n_genes);
    if (p < seeds.size()) {
      if (seeds[p].size() != n_genes) throw std::invalid_argument("ga_maximize: seed genome has wrong length");
      for (std::size_t i = 0; i < n_genes; ++i) pop[p].unit[i] = encode_one(genes[i], seeds[p][i]);
    } else {
      for (auto& u : pop[p].unit) u = uni(rng);
    }
  }

  GaResult result;
  auto evaluate = [&](std::vector<Individual>& group) {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < group.size(); ++i)
      if (!group[i].evaluated) todo.push_back(i);
    parallel_for(todo.size(), opts.threads, [&](std::size_t t) {
      auto& ind = group[todo[t]];
      const auto params = decode(genes, ind.unit);
      const double f = fitness(params);
      ind.fitness = std::isfinite(f) ? f : -std::numeric_limits<double>::infinity();
      ind.evaluated = true;
    });
    result.evaluations += static_cast<int>(todo.size());
  };
  auto by_fitness = [](const Individual& a, const Individual& b) { return a.fitness > b.fitness; };

  evaluate(pop);
  std::stable_sort(pop.begin(), pop.end(), by_fitness);
  result.best_per_generation.push_back(pop.front().fitness);

  auto tournament = [&]() -> const Individual& {
    const auto a = static_cast<std::size_t>(uni(rng) * pop_size) % pop_size;
    const auto b = static_cast<std::size_t>(uni(rng) * pop_size) % pop_size;
    return pop[a].fitness >= pop[b].fitness ? pop[a] : pop[b];
  };

  const auto elites = std::min<std::size_t>(static_cast<std::size_t>(std::max(opts.elites, 1)), pop_size);
  for (int gen = 1; gen < opts.generations; ++gen) {
    std::vector<Individual> next(pop.begin(), pop.begin() + static_cast<std::ptrdiff_t>(elites));
    while (next.size() < pop_size) {
      const auto& pa = tournament();
      const auto& pb = tournament();
      Individual child;
      child.unit.resize(n_genes);
      const bool cross = uni(rng) < opts.crossover_rate;
      for (std::size_t i = 0; i < n_genes; ++i) {
        double v = pa.unit[i];
        if (cross) {
          const double lo = std::min(pa.unit[i], pb.unit[i]);
          const double hi = std::max(pa.unit[i], pb.unit[i]);
          const double span = hi - lo;
          v = lo - 0.3 * span + uni(rng) * 1.6 * span;
        }
        if (uni(rng) < opts.mutation_rate) v += opts.mutation_scale * normal(rng);
        child.unit[i] = std::clamp(v, 0.0, 1.0);
      }
      next.push_back(std::move(child));
    }
    pop = std::move(next);
    evaluate(pop);
    std::stable_sort(pop.begin(), pop.end(), by_fitness);
    result.best_per_generation.push_back(pop.front().fitness);
  }

  result.best = decode(genes, pop.front().unit);
  result.fitness = pop.front().fitness;
  return result;
}

}  // namespace fiberair

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "modex/codec_config.hpp"
#include "modex/pareto.hpp"

namespace modex {

struct DseConfig {
  int population_size = 40;
  int generations = 200;
  int qp = 20;
  double crossover_prob = 0.9;
  double order_swap_prob = 0.5;       // per depth: swap two order positions
  double guard_point_prob = 0.5;      // per depth: redraw one guard slot >= 2
  double guard_always_init_prob = 0.25;
  uint64_t seed = 1;
  int threads = 1;                    // 0 = hardware concurrency
  std::optional<size_t> archive_capacity;
  CodecConfig codec;
};

struct Individual {
  Genotype genotype;
  std::optional<ObjectiveVector> objectives;
  int rank = -1;
  double crowding = 0.0;
};

// Order crossover on the mode orders of two same-depth plans: a contiguous
// segment of one parent stays in place, the rest fills in the other parent's
// relative order. Guards travel with their modes; slots 0 and 1 come out
// unconditional. Throws DepthMismatchError for different depths.
std::pair<DepthPlan, DepthPlan> order_crossover(const DepthPlan& a,
                                                const DepthPlan& b, Rng& rng);

Genotype crossover_genotypes(const Genotype& a, const Genotype& b, Rng& rng,
                             const DseConfig& config);

// Per depth: with order_swap_prob swap two order positions, with
// guard_point_prob redraw one guard slot >= 2 (unconditional or a random
// valid target). Output always validates.
Genotype mutate(const Genotype& genotype, Rng& rng, const DseConfig& config);

struct GenerationInfo {
  int generation = 0;  // 0 = initial population
  const std::vector<Individual>& population;
  const ParetoArchive& archive;
  uint64_t evaluations = 0;
};
using DseObserver = std::function<void(const GenerationInfo&)>;

struct DseResult {
  ParetoArchive archive;
  std::vector<Individual> final_population;
  ObjectiveVector exhaustive_baseline;
  uint64_t evaluations = 0;
  int generations_run = 0;
};

// One NSGA-II run at config.qp: binary tournament on (rank, crowding),
// order-crossover + mutation variation, elitist mu+lambda environmental
// selection. Objectives are averaged over all training sequences. Every
// evaluated individual is offered to the archive. Fully reproducible from
// config.seed; parallel evaluation does not change any result.
DseResult run_dse(const DseConfig& config, const std::vector<Sequence>& training,
                  const EnergyTable& table, const DseObserver& observer = {});

// Objective weights for picking one archive point per QP: each archive is
// min-max normalized per objective and the entry minimizing the weighted
// distance to the ideal corner wins (ties keep the earliest entry).
struct SelectionAnchor {
  double rate = 1.0;
  double distortion = 1.0;  // applied to -psnr
  double effort = 1.0;
  double energy = 1.0;
};

struct CombinedSolution {
  std::map<int, Genotype> per_qp;
  bool operator==(const CombinedSolution&) const = default;
};

// Throws EmptyArchiveError when any archive has no entries.
CombinedSolution combine_across_qps(const std::map<int, ParetoArchive>& archives,
                                    const SelectionAnchor& anchor);

std::string serialize_combined(const CombinedSolution& combined);
CombinedSolution parse_combined(std::string_view text);

}  // namespace modex

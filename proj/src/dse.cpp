#include "modex/dse.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "modex/error.hpp"

namespace modex {

std::pair<DepthPlan, DepthPlan> order_crossover(const DepthPlan& a,
                                                const DepthPlan& b, Rng& rng) {
  if (a.depth != b.depth) {
    throw DepthMismatchError("cannot cross depth " + std::to_string(a.depth) +
                             " with depth " + std::to_string(b.depth));
  }
  const size_t n = a.order.size();
  size_t cut1 = rng.next_below(n);
  size_t cut2 = rng.next_below(n);
  if (cut1 > cut2) std::swap(cut1, cut2);

  auto make_child = [&](const DepthPlan& keep, const DepthPlan& fill) {
    DepthPlan child;
    child.depth = keep.depth;
    child.order.assign(n, ModeId::kIntra2Nx2N);
    child.guards.assign(n, Guard::always_test());
    std::vector<bool> used(kNumModes, false);
    for (size_t i = cut1; i <= cut2; ++i) {
      child.order[i] = keep.order[i];
      child.guards[i] = keep.guards[i];
      used[mode_index(keep.order[i])] = true;
    }
    // Remaining slots cycle from just after the kept segment, taking the
    // other parent's modes in relative order; a mode's guard travels with it.
    size_t write = (cut2 + 1) % n;
    for (size_t step = 0; step < n; ++step) {
      const size_t read = (cut2 + 1 + step) % n;
      const ModeId mode = fill.order[read];
      if (used[mode_index(mode)]) continue;
      used[mode_index(mode)] = true;
      child.order[write] = mode;
      child.guards[write] = fill.guards[read];
      write = (write + 1) % n;
    }
    child.guards[0] = Guard::always_test();
    child.guards[1] = Guard::always_test();
    return child;
  };

  return {make_child(a, b), make_child(b, a)};
}

Genotype crossover_genotypes(const Genotype& a, const Genotype& b, Rng& rng,
                             const DseConfig& config) {
  if (!rng.next_bool(config.crossover_prob)) return a;
  Genotype child;
  for (int d = 0; d <= kMaxDepth; ++d) {
    child.at(d) = order_crossover(a.at(d), b.at(d), rng).first;
  }
  return child;
}

Genotype mutate(const Genotype& genotype, Rng& rng, const DseConfig& config) {
  Genotype out = genotype;
  for (int d = 0; d <= kMaxDepth; ++d) {
    DepthPlan& plan = out.at(d);
    const size_t n = plan.order.size();
    if (rng.next_bool(config.order_swap_prob)) {
      const size_t i = rng.next_below(n);
      const size_t j = rng.next_below(n);
      std::swap(plan.order[i], plan.order[j]);
    }
    if (rng.next_bool(config.guard_point_prob)) {
      const size_t slot = 2 + rng.next_below(n - 2);
      if (rng.next_bool(config.guard_always_init_prob)) {
        plan.guards[slot] = Guard::always_test();
      } else {
        const std::vector<ModeId>& valid = valid_modes_at_depth(d);
        plan.guards[slot] =
            Guard::require_best(valid[rng.next_below(valid.size())]);
      }
    }
  }
  return out;
}

namespace {

std::vector<double> to_vec(const ObjectiveVector& obj) {
  const auto a = obj.to_min();
  return std::vector<double>(a.begin(), a.end());
}

// Averages each objective over the training sequences.
ObjectiveVector evaluate_genotype(const Genotype& genotype,
                                  const std::vector<Sequence>& training, int qp,
                                  const CodecConfig& codec,
                                  const EnergyTable& table) {
  ObjectiveVector mean;
  for (const Sequence& seq : training) {
    const EncodeReport report = encode_sequence(seq, genotype, qp, codec);
    const ObjectiveVector obj = collect_objectives(report, table);
    mean.rate_bits += obj.rate_bits;
    mean.psnr += obj.psnr;
    mean.effort += obj.effort;
    mean.energy += obj.energy;
  }
  const double count = static_cast<double>(training.size());
  mean.rate_bits /= count;
  mean.psnr /= count;
  mean.effort /= count;
  mean.energy /= count;
  return mean;
}

class Evaluator {
 public:
  Evaluator(const std::vector<Sequence>& training, const EnergyTable& table,
            int qp, const CodecConfig& codec, int threads)
      : training_(training), table_(table), qp_(qp), codec_(codec) {
    threads_ = threads > 0
                   ? threads
                   : static_cast<int>(std::thread::hardware_concurrency());
    if (threads_ < 1) threads_ = 1;
  }

  // Fills objectives for every individual (cache hit or fresh encode). The
  // cache is sound because evaluation is a pure function of the genotype.
  void evaluate(std::vector<Individual>& population, uint64_t& evaluations) {
    std::vector<size_t> todo;
    for (size_t i = 0; i < population.size(); ++i) {
      if (population[i].objectives) continue;
      const std::string key = serialize_genotype_line(population[i].genotype);
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = cache_.find(key);
      if (it != cache_.end()) {
        population[i].objectives = it->second;
      } else {
        todo.push_back(i);
      }
    }

    std::atomic<size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const size_t slot = next.fetch_add(1);
        if (slot >= todo.size()) break;
        Individual& ind = population[todo[slot]];
        ind.objectives =
            evaluate_genotype(ind.genotype, training_, qp_, codec_, table_);
      }
    };
    if (threads_ == 1 || todo.size() <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      const int workers = std::min<int>(threads_, static_cast<int>(todo.size()));
      pool.reserve(workers);
      for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
      for (std::thread& t : pool) t.join();
    }

    evaluations += todo.size();
    std::lock_guard<std::mutex> lock(mutex_);
    for (size_t i : todo) {
      cache_[serialize_genotype_line(population[i].genotype)] =
          *population[i].objectives;
    }
  }

 private:
  const std::vector<Sequence>& training_;
  const EnergyTable& table_;
  int qp_;
  CodecConfig codec_;
  int threads_;
  std::mutex mutex_;
  std::unordered_map<std::string, ObjectiveVector> cache_;
};

// Assigns rank and crowding over the whole population.
void assign_rank_and_crowding(std::vector<Individual>& population) {
  std::vector<std::vector<double>> objs;
  objs.reserve(population.size());
  for (const Individual& ind : population) objs.push_back(to_vec(*ind.objectives));
  const auto fronts = nondominated_sort(objs);
  for (size_t f = 0; f < fronts.size(); ++f) {
    std::vector<std::vector<double>> front_objs;
    front_objs.reserve(fronts[f].size());
    for (size_t idx : fronts[f]) front_objs.push_back(objs[idx]);
    const std::vector<double> crowd = crowding_distance(front_objs);
    for (size_t i = 0; i < fronts[f].size(); ++i) {
      population[fronts[f][i]].rank = static_cast<int>(f);
      population[fronts[f][i]].crowding = crowd[i];
    }
  }
}

// (rank asc, crowding desc); false on tie so the first contestant wins.
bool tournament_better(const Individual& a, const Individual& b) {
  if (a.rank != b.rank) return a.rank < b.rank;
  return a.crowding > b.crowding;
}

const Individual& tournament_pick(const std::vector<Individual>& population,
                                  Rng& rng) {
  const Individual& a = population[rng.next_below(population.size())];
  const Individual& b = population[rng.next_below(population.size())];
  return tournament_better(b, a) ? b : a;
}

// Elitist mu+lambda truncation by (front, crowding).
std::vector<Individual> environmental_selection(std::vector<Individual> pool,
                                                size_t mu) {
  std::vector<std::vector<double>> objs;
  objs.reserve(pool.size());
  for (const Individual& ind : pool) objs.push_back(to_vec(*ind.objectives));
  const auto fronts = nondominated_sort(objs);

  std::vector<Individual> selected;
  selected.reserve(mu);
  for (const std::vector<size_t>& front : fronts) {
    if (selected.size() >= mu) break;
    std::vector<std::vector<double>> front_objs;
    for (size_t idx : front) front_objs.push_back(objs[idx]);
    const std::vector<double> crowd = crowding_distance(front_objs);

    std::vector<size_t> local(front.size());
    std::iota(local.begin(), local.end(), size_t{0});
    if (selected.size() + front.size() > mu) {
      std::stable_sort(local.begin(), local.end(), [&](size_t a, size_t b) {
        return crowd[a] > crowd[b];
      });
    }
    for (size_t i : local) {
      if (selected.size() >= mu) break;
      Individual ind = pool[front[i]];
      ind.crowding = crowd[i];
      selected.push_back(std::move(ind));
    }
  }
  return selected;
}

void offer_to_archive(ParetoArchive& archive, const std::vector<Individual>& batch) {
  for (const Individual& ind : batch) {
    archive.insert(ArchiveEntry{ind.genotype,
                                serialize_genotype_line(ind.genotype),
                                *ind.objectives});
  }
}

}  // namespace

DseResult run_dse(const DseConfig& config, const std::vector<Sequence>& training,
                  const EnergyTable& table, const DseObserver& observer) {
  if (config.population_size < 4) {
    throw ConfigError("population size must be >= 4");
  }
  if (training.empty()) {
    throw ConfigError("DSE needs at least one training sequence");
  }

  Rng rng(config.seed);
  Evaluator evaluator(training, table, config.qp, config.codec, config.threads);

  DseResult result;
  result.archive = ParetoArchive(config.archive_capacity);

  // Initial population: the exhaustive baseline, one heuristic plan, rest
  // random.
  std::vector<Individual> population;
  population.push_back(Individual{exhaustive_genotype(), std::nullopt, -1, 0.0});
  if (config.population_size > 1) {
    population.push_back(Individual{heuristic_genotype(), std::nullopt, -1, 0.0});
  }
  while (population.size() < static_cast<size_t>(config.population_size)) {
    population.push_back(Individual{
        random_genotype(rng, config.guard_always_init_prob), std::nullopt, -1, 0.0});
  }

  try {
    evaluator.evaluate(population, result.evaluations);
  } catch (const Error& e) {
    throw Error(std::string("evaluation failed during initialization: ") + e.what());
  }
  result.exhaustive_baseline = *population.front().objectives;
  assign_rank_and_crowding(population);
  offer_to_archive(result.archive, population);
  if (observer) {
    observer(GenerationInfo{0, population, result.archive, result.evaluations});
  }

  for (int gen = 1; gen <= config.generations; ++gen) {
    std::vector<Individual> offspring;
    offspring.reserve(population.size());
    while (offspring.size() < population.size()) {
      const Individual& p1 = tournament_pick(population, rng);
      const Individual& p2 = tournament_pick(population, rng);
      Genotype child_genotype = crossover_genotypes(p1.genotype, p2.genotype, rng, config);
      child_genotype = mutate(child_genotype, rng, config);
      offspring.push_back(Individual{std::move(child_genotype), std::nullopt, -1, 0.0});
    }

    try {
      evaluator.evaluate(offspring, result.evaluations);
    } catch (const Error& e) {
      std::string diagnostic = "evaluation failed in generation " +
                               std::to_string(gen) + ": " + e.what();
      for (const Individual& ind : offspring) {
        if (!ind.objectives) {
          diagnostic += "\n  genotype: " + serialize_genotype_line(ind.genotype);
          break;
        }
      }
      throw Error(diagnostic);
    }
    offer_to_archive(result.archive, offspring);

    std::vector<Individual> pool = std::move(population);
    pool.insert(pool.end(), std::make_move_iterator(offspring.begin()),
                std::make_move_iterator(offspring.end()));
    population = environmental_selection(std::move(pool),
                                         static_cast<size_t>(config.population_size));
    assign_rank_and_crowding(population);

    if (observer) {
      observer(GenerationInfo{gen, population, result.archive, result.evaluations});
    }
  }

  result.final_population = std::move(population);
  result.generations_run = config.generations;
  return result;
}

CombinedSolution combine_across_qps(const std::map<int, ParetoArchive>& archives,
                                    const SelectionAnchor& anchor) {
  CombinedSolution combined;
  for (const auto& [qp, archive] : archives) {
    if (archive.empty()) {
      throw EmptyArchiveError("archive for qp " + std::to_string(qp) + " is empty");
    }
    const std::vector<std::vector<double>> objs = archive.objective_matrix();
    const size_t m = objs.front().size();
    std::vector<double> lo(m, 0.0), hi(m, 0.0);
    for (size_t k = 0; k < m; ++k) {
      lo[k] = hi[k] = objs[0][k];
      for (const auto& row : objs) {
        lo[k] = std::min(lo[k], row[k]);
        hi[k] = std::max(hi[k], row[k]);
      }
    }
    const std::array<double, 4> weights{anchor.rate, anchor.distortion,
                                        anchor.effort, anchor.energy};
    size_t best = 0;
    double best_distance = 0.0;
    for (size_t i = 0; i < objs.size(); ++i) {
      double distance = 0.0;
      for (size_t k = 0; k < m; ++k) {
        const double range = hi[k] - lo[k];
        const double normalized = range > 0.0 ? (objs[i][k] - lo[k]) / range : 0.0;
        distance += weights[k] * normalized * normalized;
      }
      if (i == 0 || distance < best_distance) {
        best = i;
        best_distance = distance;
      }
    }
    combined.per_qp[qp] = archive.entries()[best].genotype;
  }
  return combined;
}

std::string serialize_combined(const CombinedSolution& combined) {
  std::string out;
  for (const auto& [qp, genotype] : combined.per_qp) {
    out += "qp=" + std::to_string(qp) + "\n";
    out += serialize_genotype(genotype);
  }
  return out;
}

CombinedSolution parse_combined(std::string_view text) {
  CombinedSolution combined;
  std::string current_block;
  int current_qp = -1;
  auto flush = [&]() {
    if (current_qp >= 0) {
      if (current_block.empty()) {
        throw ParseError("qp=" + std::to_string(current_qp) + " has no genotype");
      }
      combined.per_qp[current_qp] = parse_genotype(current_block);
    }
    current_block.clear();
  };

  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t eol = text.find('\n', pos);
    const std::string line(text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos));
    if (line.rfind("qp=", 0) == 0) {
      flush();
      try {
        current_qp = std::stoi(line.substr(3));
      } catch (const std::exception&) {
        throw ParseError("malformed qp line: '" + line + "'");
      }
    } else if (!line.empty()) {
      if (current_qp < 0) throw ParseError("genotype line before any qp= header");
      current_block += line;
      current_block += '\n';
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  flush();
  if (combined.per_qp.empty()) throw ParseError("no qp sections found");
  return combined;
}

}  // namespace modex

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "modex/genotype.hpp"
#include "modex/objectives.hpp"

namespace modex {

// All vectors are minimization-oriented. a dominates b iff a <= b everywhere
// and a < b somewhere.
bool dominates(const std::vector<double>& a, const std::vector<double>& b);

// Fast nondominated sorting (domination counts + dominated lists).
// fronts[0] is the nondominated set; every index appears in exactly one
// front.
std::vector<std::vector<size_t>> nondominated_sort(
    const std::vector<std::vector<double>>& objectives);

// Crowding distances for one front. Boundaries per objective get infinity;
// interior points sum normalized neighbor gaps; zero-range objectives
// contribute nothing.
std::vector<double> crowding_distance(
    const std::vector<std::vector<double>>& front);

// Exact dominated hypervolume w.r.t. a reference point that should weakly
// dominate none of the points (coordinates beyond the reference contribute
// no volume). WFG-style recursive exclusive-contribution computation.
double hypervolume(const std::vector<std::vector<double>>& points,
                   const std::vector<double>& reference);

struct ArchiveEntry {
  Genotype genotype;
  std::string genotype_text;  // canonical single-line form
  ObjectiveVector objectives;
};

// Insertion-ordered set of mutually nondominated solutions. Newcomers
// dominated by (or duplicating the objectives of) an entry are rejected;
// entries dominated by a newcomer are dropped. With a capacity bound the
// least crowded entry is evicted, which voids the hypervolume-growth
// guarantee of the unbounded archive.
class ParetoArchive {
 public:
  ParetoArchive() = default;
  explicit ParetoArchive(std::optional<size_t> capacity) : capacity_(capacity) {}

  bool insert(ArchiveEntry entry);
  const std::vector<ArchiveEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  std::vector<std::vector<double>> objective_matrix() const;

 private:
  std::optional<size_t> capacity_;
  std::vector<ArchiveEntry> entries_;
};

}  // namespace modex

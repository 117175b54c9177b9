#include "modex/pareto.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <numeric>

namespace modex {

bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
  assert(a.size() == b.size());
  bool strictly_better = false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strictly_better = true;
  }
  return strictly_better;
}

std::vector<std::vector<size_t>> nondominated_sort(
    const std::vector<std::vector<double>>& objectives) {
  const size_t n = objectives.size();
  std::vector<std::vector<size_t>> dominated_by(n);
  std::vector<size_t> domination_count(n, 0);
  std::vector<std::vector<size_t>> fronts;

  std::vector<size_t> current;
  for (size_t p = 0; p < n; ++p) {
    for (size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(objectives[p], objectives[q])) {
        dominated_by[p].push_back(q);
      } else if (dominates(objectives[q], objectives[p])) {
        ++domination_count[p];
      }
    }
    if (domination_count[p] == 0) current.push_back(p);
  }

  while (!current.empty()) {
    std::vector<size_t> next;
    for (size_t p : current) {
      for (size_t q : dominated_by[p]) {
        if (--domination_count[q] == 0) next.push_back(q);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> crowding_distance(
    const std::vector<std::vector<double>>& front) {
  const size_t n = front.size();
  std::vector<double> distance(n, 0.0);
  if (n == 0) return distance;
  const size_t m = front.front().size();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<size_t> idx(n);
  for (size_t obj = 0; obj < m; ++obj) {
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
      return front[a][obj] < front[b][obj];
    });
    distance[idx.front()] = kInf;
    distance[idx.back()] = kInf;
    const double range = front[idx.back()][obj] - front[idx.front()][obj];
    if (range <= 0.0) continue;
    for (size_t i = 1; i + 1 < n; ++i) {
      if (distance[idx[i]] == kInf) continue;
      distance[idx[i]] +=
          (front[idx[i + 1]][obj] - front[idx[i - 1]][obj]) / range;
    }
  }
  return distance;
}

namespace {

double inclusive_volume(const std::vector<double>& p,
                        const std::vector<double>& reference) {
  double v = 1.0;
  for (size_t i = 0; i < p.size(); ++i) {
    const double side = reference[i] - p[i];
    if (side <= 0.0) return 0.0;
    v *= side;
  }
  return v;
}

// Keeps only points not weakly dominated by another (minimization).
std::vector<std::vector<double>> nondominated_subset(
    std::vector<std::vector<double>> points) {
  std::vector<std::vector<double>> kept;
  for (size_t i = 0; i < points.size(); ++i) {
    bool drop = false;
    for (size_t j = 0; j < points.size() && !drop; ++j) {
      if (i == j) continue;
      bool weakly = true;
      bool equal = true;
      for (size_t k = 0; k < points[i].size(); ++k) {
        if (points[j][k] > points[i][k]) weakly = false;
        if (points[j][k] != points[i][k]) equal = false;
      }
      if (weakly && (!equal || j < i)) drop = true;
    }
    if (!drop) kept.push_back(points[i]);
  }
  return kept;
}

double wfg_hypervolume(std::vector<std::vector<double>> points,
                       const std::vector<double>& reference) {
  if (points.empty()) return 0.0;
  if (points.size() == 1) return inclusive_volume(points[0], reference);

  std::sort(points.begin(), points.end());
  double total = 0.0;
  for (size_t i = 0; i < points.size(); ++i) {
    // Exclusive contribution of points[i] against the points after it.
    std::vector<std::vector<double>> limited;
    limited.reserve(points.size() - i - 1);
    for (size_t j = i + 1; j < points.size(); ++j) {
      std::vector<double> q(points[j].size());
      for (size_t k = 0; k < q.size(); ++k) {
        q[k] = std::max(points[j][k], points[i][k]);
      }
      limited.push_back(std::move(q));
    }
    total += inclusive_volume(points[i], reference) -
             wfg_hypervolume(nondominated_subset(std::move(limited)), reference);
  }
  return total;
}

}  // namespace

double hypervolume(const std::vector<std::vector<double>>& points,
                   const std::vector<double>& reference) {
  std::vector<std::vector<double>> clipped;
  clipped.reserve(points.size());
  for (const auto& p : points) {
    assert(p.size() == reference.size());
    if (inclusive_volume(p, reference) > 0.0) clipped.push_back(p);
  }
  return wfg_hypervolume(nondominated_subset(std::move(clipped)), reference);
}

bool ParetoArchive::insert(ArchiveEntry entry) {
  const auto incoming_array = entry.objectives.to_min();
  const std::vector<double> incoming(incoming_array.begin(), incoming_array.end());
  for (const ArchiveEntry& existing : entries_) {
    const auto held = existing.objectives.to_min();
    const std::vector<double> held_vec{held.begin(), held.end()};
    if (held_vec == incoming || dominates(held_vec, incoming)) return false;
  }
  std::erase_if(entries_, [&](const ArchiveEntry& existing) {
    const auto held = existing.objectives.to_min();
    return dominates(incoming, std::vector<double>{held.begin(), held.end()});
  });
  entries_.push_back(std::move(entry));

  if (capacity_ && entries_.size() > *capacity_) {
    const std::vector<double> crowding = crowding_distance(objective_matrix());
    size_t victim = 0;
    for (size_t i = 1; i < crowding.size(); ++i) {
      if (crowding[i] < crowding[victim]) victim = i;
    }
    entries_.erase(entries_.begin() + static_cast<ptrdiff_t>(victim));
  }
  return true;
}

std::vector<std::vector<double>> ParetoArchive::objective_matrix() const {
  std::vector<std::vector<double>> out;
  out.reserve(entries_.size());
  for (const ArchiveEntry& e : entries_) {
    const auto v = e.objectives.to_min();
    out.emplace_back(v.begin(), v.end());
  }
  return out;
}

}  // namespace modex

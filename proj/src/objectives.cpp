#include "modex/objectives.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "modex/error.hpp"
#include "modex/util.hpp"

namespace modex {

EnergyTable EnergyTable::built_in_default() {
  // All values are dyadic rationals so count * energy and their sums stay
  // exact in double arithmetic.
  constexpr double kMcPerPixel = 13.0 / 16.0;
  constexpr double kMcOverhead = 48.0;
  constexpr double kIntraPerPixel = 1.0 / 2.0;
  constexpr double kIntraOverhead = 24.0;

  EnergyTable table;
  for (int size : {64, 32, 16, 8}) {
    const int q = size / 4;
    table.set(feature_mc(size, size), kMcOverhead + kMcPerPixel * size * size);
    for (auto [w, h] : {std::pair{size / 2, size}, std::pair{size, size / 2}}) {
      table.set(feature_mc(w, h), kMcOverhead + kMcPerPixel * w * h);
    }
    if (size > 8) {
      for (auto [w, h] : {std::pair{size, q}, std::pair{size, 3 * q},
                          std::pair{q, size}, std::pair{3 * q, size}}) {
        table.set(feature_mc(w, h), kMcOverhead + kMcPerPixel * w * h);
      }
    }
    table.set(feature_skip(size), 4.0);
  }
  for (int size : {64, 32, 16, 8, 4}) {
    table.set(feature_intra(size), kIntraOverhead + kIntraPerPixel * size * size);
  }
  table.set(feature_bits(), 1.0 / 4.0);
  table.set(feature_coeff(), 5.0 / 8.0);
  table.set(feature_split_flag(), 2.0);
  return table;
}

EnergyTable EnergyTable::load(const std::filesystem::path& path,
                              std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw FileNotFoundError("cannot open energy table: " + path.string());
  const EnergyTable known = built_in_default();

  EnergyTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream fields(line);
    std::string feature;
    double energy;
    if (!(fields >> feature)) continue;  // blank line
    if (!(fields >> energy) || energy < 0.0) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected 'feature <tab> non-negative energy'");
    }
    if (warnings && known.entries().find(feature) == known.entries().end()) {
      warnings->push_back("unknown feature '" + feature + "' at " +
                          path.string() + ":" + std::to_string(line_no));
    }
    table.set(feature, energy);
  }
  return table;
}

void EnergyTable::set(const std::string& feature, double energy) {
  energies_[feature] = energy;
}

double EnergyTable::energy_of(const std::string& feature) const {
  auto it = energies_.find(feature);
  if (it == energies_.end()) {
    throw UnknownFeatureError("no specific energy for feature '" + feature + "'");
  }
  return it->second;
}

double EnergyTable::estimate(const FeatureCounts& counts) const {
  double total = 0.0;
  for (const auto& [feature, n] : counts) {
    total += static_cast<double>(n) * energy_of(feature);
  }
  return total;
}

std::string EnergyTable::to_file_text() const {
  std::string out =
      "# specific decoding energies, nanojoules per feature occurrence\n";
  for (const auto& [feature, energy] : energies_) {
    out += feature;
    out += '\t';
    out += fmt_double(energy);
    out += '\n';
  }
  return out;
}

double estimate_energy(const FeatureCounts& counts, const EnergyTable& table) {
  return table.estimate(counts);
}

double psnr_db(uint64_t total_sse, uint64_t num_samples) {
  if (total_sse == 0) return 100.0;
  const double mse =
      static_cast<double>(total_sse) / static_cast<double>(num_samples);
  return std::min(100.0, 10.0 * std::log10(255.0 * 255.0 / mse));
}

FeatureCounts extract_features(const EncodeReport& report) {
  return report.features;
}

ObjectiveVector collect_objectives(const EncodeReport& report,
                                   const EnergyTable& table) {
  ObjectiveVector out;
  out.rate_bits = report.rate_bits;
  out.psnr = psnr_db(report.distortion_sse, report.num_samples);
  out.effort = report.effort;
  out.energy = table.estimate(report.features);
  return out;
}

}  // namespace modex

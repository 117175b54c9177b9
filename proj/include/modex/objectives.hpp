#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "modex/features.hpp"
#include "modex/pipeline.hpp"

namespace modex {

// Specific decoding energies per feature, nanojoules by convention. The
// built-in defaults are synthetic but ordering-faithful (motion compensation
// costs grow with block count, intra is cheaper than inter per sample, bits
// carry a parsing cost); measured tables can be substituted via the
// line-oriented `feature <tab> energy` file format.
class EnergyTable {
 public:
  static EnergyTable built_in_default();
  // `#` starts a comment; unknown feature ids load fine (they are reported
  // through `warnings` since only estimation cares about coverage).
  static EnergyTable load(const std::filesystem::path& path,
                          std::vector<std::string>* warnings = nullptr);

  void set(const std::string& feature, double energy);
  // Throws UnknownFeatureError for features without an entry.
  double energy_of(const std::string& feature) const;
  double estimate(const FeatureCounts& counts) const;

  const std::map<std::string, double>& entries() const { return energies_; }
  std::string to_file_text() const;

 private:
  std::map<std::string, double> energies_;
};

// weighted sum over counts: sum_f n_f * e_f.
double estimate_energy(const FeatureCounts& counts, const EnergyTable& table);

// 10*log10(255^2 / mse), capped at 100 dB (exact for zero SSE).
double psnr_db(uint64_t total_sse, uint64_t num_samples);

// The four objectives of one encode. Minimization views rate, -psnr, effort
// and energy.
struct ObjectiveVector {
  double rate_bits = 0.0;
  double psnr = 0.0;
  double effort = 0.0;
  double energy = 0.0;

  std::array<double, 4> to_min() const {
    return {rate_bits, -psnr, effort, energy};
  }
  bool operator==(const ObjectiveVector&) const = default;
};

// The occurrence counters accumulated while coding (identity view over the
// report; per-frame counters live in report.per_frame).
FeatureCounts extract_features(const EncodeReport& report);

ObjectiveVector collect_objectives(const EncodeReport& report,
                                   const EnergyTable& table);

}  // namespace modex

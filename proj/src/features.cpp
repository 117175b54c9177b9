#include "modex/features.hpp"

namespace modex {

std::string feature_mc(int w, int h) {
  return "mc_" + std::to_string(w) + "x" + std::to_string(h);
}

std::string feature_intra(int size) { return "intra_" + std::to_string(size); }

std::string feature_skip(int size) { return "skip_" + std::to_string(size); }

void merge_counts(FeatureCounts& into, const FeatureCounts& from) {
  for (const auto& [key, n] : from) into[key] += n;
}

FeatureCounts scale_counts(const FeatureCounts& counts, uint64_t factor) {
  FeatureCounts out;
  for (const auto& [key, n] : counts) out[key] = n * factor;
  return out;
}

}  // namespace modex

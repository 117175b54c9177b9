#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace modex {

// Occurrence counters for countable bitstream events. Keys are stable
// strings so that tables and reports stay human-editable; std::map keeps
// iteration order deterministic.
using FeatureCounts = std::map<std::string, uint64_t>;

// Feature key vocabulary.
std::string feature_mc(int w, int h);      // one motion-compensated PU
std::string feature_intra(int size);       // one intra-predicted square PU
std::string feature_skip(int size);        // one skip-coded CU
inline const char* feature_bits() { return "bit"; }
inline const char* feature_coeff() { return "coeff"; }
inline const char* feature_split_flag() { return "split_flag"; }

void merge_counts(FeatureCounts& into, const FeatureCounts& from);
FeatureCounts scale_counts(const FeatureCounts& counts, uint64_t factor);

}  // namespace modex

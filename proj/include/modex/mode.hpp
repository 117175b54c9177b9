#pragma once

#include <string>
#include <vector>

namespace modex {

constexpr int kCtuSize = 64;
constexpr int kMaxDepth = 3;
constexpr int kNumModes = 11;

// Mode-evaluation function indices of the reference mode-decision table.
enum class ModeId : int {
  kIntra2Nx2N = 0,
  kInter2Nx2N = 1,
  kMerge2Nx2N = 2,
  kInterNx2N = 3,
  kInter2NxN = 4,
  kInter2NxnU = 5,
  kInter2NxnD = 6,
  kInternLx2N = 7,
  kInternRx2N = 8,
  kIntraNxN = 9,
  kSplit = 10,
};

inline int mode_index(ModeId m) { return static_cast<int>(m); }

// Modes 0-4 run on every depth, 5-8 and 10 only above the smallest CU,
// 9 only on 8x8 CUs.
bool mode_valid_at_depth(ModeId m, int depth);

// Valid mode set at a depth, ascending by index (10 entries for depths 0-2,
// 6 entries for depth 3).
const std::vector<ModeId>& valid_modes_at_depth(int depth);

const char* mode_name(ModeId m);

// Modes usable on an all-intra frame: Intra2Nx2N, IntraNxN and Split.
bool mode_intra_capable(ModeId m);

inline int cu_size_at_depth(int depth) { return kCtuSize >> depth; }

}  // namespace modex

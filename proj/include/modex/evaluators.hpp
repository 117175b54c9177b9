#pragma once

#include <cstdint>
#include <vector>

#include "modex/features.hpp"
#include "modex/frame_state.hpp"
#include "modex/mode.hpp"
#include "modex/rdcost.hpp"

namespace modex {

enum class PuCoding { kSkip, kMerge, kInter, kIntra };

struct PuInfo {
  int x = 0, y = 0, w = 0, h = 0;  // absolute pixel rect
  PuCoding coding = PuCoding::kIntra;
  MotionVector mv;
};

// (depth, mode) of one CU in the quadtree a result covers.
struct CuChoice {
  int depth = 0;
  ModeId mode = ModeId::kIntra2Nx2N;
};

// Outcome of evaluating one mode on one CU. Effort counts sample operations:
// predicted samples, reference samples visited during search, residual
// samples quantized. Features describe the block as if this mode were chosen.
struct ModeResult {
  ModeId mode = ModeId::kIntra2Nx2N;
  RdCost rd;
  std::vector<uint8_t> reconstruction;  // size*size, row-major
  FeatureCounts features;
  double effort = 0.0;
  std::vector<PuInfo> pus;
  std::vector<CuChoice> cu_choices;  // this CU plus, for Split, all sub-CUs
};

enum class InterPartition { kNx2N, k2NxN, k2NxnU, k2NxnD, knLx2N, knRx2N };

ModeId partition_mode_id(InterPartition p);

// Full-pel exhaustive search over +/- window around the zero vector.
// Cost is SSE + lambda * mvd bits against predictor; ties broken by smaller
// |mv|^2 then raster order of the scan.
MotionVector motion_search(const PaddedPlane& ref, const uint8_t* orig,
                           int orig_stride, int x, int y, int w, int h,
                           MotionVector predictor, double lambda, int window);

ModeResult eval_intra_2nx2n(const CuContext& ctx);
ModeResult eval_inter_2nx2n(const CuContext& ctx);
ModeResult eval_merge_2nx2n(const CuContext& ctx);
ModeResult eval_inter_partitioned(const CuContext& ctx, InterPartition partition);
ModeResult eval_intra_nxn(const CuContext& ctx);

// Dispatch for every mode except Split (Split recurses through the decision
// pipeline and lives there).
ModeResult evaluate_leaf_mode(const CuContext& ctx, ModeId mode);

}  // namespace modex

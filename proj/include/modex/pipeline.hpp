#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "modex/codec_config.hpp"
#include "modex/evaluators.hpp"
#include "modex/genotype.hpp"
#include "modex/media_io.hpp"

namespace modex {

// One order position as seen by the decision loop.
struct EvalRecord {
  int position = 0;
  ModeId mode = ModeId::kIntra2Nx2N;
  Guard guard;
  bool auto_skipped = false;  // inter mode on an all-intra frame
  bool evaluated = false;
  double cost_j = 0.0;  // valid when evaluated
};

// Trace of one CU decision (split recursion appends one entry per sub-CU).
struct CuTrace {
  int x0 = 0, y0 = 0, depth = 0;
  bool intra_only = false;
  std::vector<EvalRecord> entries;
  bool forced_intra_fallback = false;
  ModeId chosen = ModeId::kIntra2Nx2N;
  double chosen_cost = 0.0;
};

struct DecisionTrace {
  std::vector<CuTrace> cus;
};

struct CuDecision {
  ModeResult best;
  double effort = 0.0;  // efforts of evaluated modes + guard-check costs
  uint64_t evaluated_modes = 0;
  uint64_t guard_checks = 0;
};

// Runs the mode order of genotype.at(depth) left to right. A position is
// evaluated iff its guard is unconditional or requires exactly the current
// best mode; the best mode is the minimum-J result so far (ties keep the
// earlier position). Split recurses with the genotype's next-depth vectors.
// Reads only committed state, so the decision is a pure function of
// (state, coordinates, genotype).
CuDecision decide_cu(const FrameCodingState& state, int x0, int y0, int depth,
                     const Genotype& genotype, DecisionTrace* trace = nullptr);

struct FrameStats {
  double rate_bits = 0.0;
  uint64_t distortion_sse = 0;  // on the unpadded region
  double effort = 0.0;
  FeatureCounts features;
  bool intra_only = false;
};

struct EncodeReport {
  std::string sequence;
  int width = 0;   // unpadded
  int height = 0;  // unpadded
  int frame_count = 0;
  int qp = 0;
  double rate_bits = 0.0;
  uint64_t distortion_sse = 0;
  uint64_t num_samples = 0;  // unpadded samples over all frames
  double effort = 0.0;
  FeatureCounts features;
  std::vector<FrameStats> per_frame;
  // chosen_modes[depth][mode]: how many committed CUs picked each mode.
  std::array<std::array<uint64_t, kNumModes>, kMaxDepth + 1> chosen_modes{};
  uint64_t evaluated_modes = 0;
  uint64_t guard_checks = 0;
  double wall_seconds = 0.0;  // informational only, never part of objectives
};

struct EncodeHooks {
  // Called for every CTU after its decision and before it is committed.
  std::function<void(const FrameCodingState& state, int ctu_x, int ctu_y,
                     const CuDecision& decision)>
      after_ctu;
};

// Low-delay encode: frame 0 uses only intra-capable modes (inter positions
// are auto-skipped; when no position fires, Intra2Nx2N is forced so at least
// one mode is always tested), later frames reference the previous frame's
// reconstruction. Throws InvalidGenotypeError for invalid genotypes.
EncodeReport encode_sequence(const Sequence& seq, const Genotype& genotype,
                             int qp, const CodecConfig& config = {},
                             DecisionTrace* trace = nullptr,
                             const EncodeHooks* hooks = nullptr);

std::string encode_report_to_json(const EncodeReport& report);

}  // namespace modex

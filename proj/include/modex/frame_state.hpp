#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "modex/codec_config.hpp"
#include "modex/media_io.hpp"
#include "modex/mode.hpp"

namespace modex {

struct MotionVector {
  int x = 0;
  int y = 0;
  bool operator==(const MotionVector&) const = default;
};

// Reference plane with an edge-replicated border so motion compensation and
// search never need per-sample clamping. Border must cover the largest motion
// vector magnitude in play (the search window).
struct PaddedPlane {
  int width = 0;
  int height = 0;
  int border = 0;
  int stride = 0;
  std::vector<uint8_t> data;

  static PaddedPlane from(const Frame& plane, int border);

  // Pointer to sample (x, y); x in [-border, width+border), same for y.
  const uint8_t* at(int x, int y) const {
    return data.data() +
           static_cast<size_t>(y + border) * stride + (x + border);
  }
};

// Motion info of committed CUs at 4x4 granularity. Granules of intra-coded
// PUs hold no vector.
class MotionField {
 public:
  MotionField() = default;
  MotionField(int width, int height);

  void set_rect(int x, int y, int w, int h, std::optional<MotionVector> mv);
  std::optional<MotionVector> at(int x, int y) const;

 private:
  int granules_x_ = 0;
  int granules_y_ = 0;
  std::vector<std::optional<MotionVector>> granules_;
};

// Per-frame encoder state. Mode evaluation only ever reads the parts that
// are already committed (whole CTUs, raster order), so evaluating a CU is a
// pure function of this state; results are committed once per CTU decision.
struct FrameCodingState {
  const Frame* original = nullptr;  // padded
  PaddedPlane reference;            // previous reconstructed frame, padded
  Frame recon;                      // committed reconstruction
  MotionField motion;               // committed motion
  int ctus_x = 0;
  int ctus_y = 0;
  int committed_ctus = 0;
  int qp = 0;
  double lambda = 0.0;
  bool intra_only = false;
  const CodecConfig* config = nullptr;

  static FrameCodingState create(const Frame& padded_original,
                                 const Frame& previous_recon, int qp,
                                 bool intra_only, const CodecConfig& config);

  bool sample_committed(int x, int y) const {
    if (x < 0 || y < 0 || x >= recon.width || y >= recon.height) return false;
    const int idx = (y / kCtuSize) * ctus_x + (x / kCtuSize);
    return idx < committed_ctus;
  }
};

// One coding-unit evaluation context. neighbor_motion holds at most two
// distinct candidates taken from the committed left and top granules.
struct CuContext {
  const FrameCodingState* state = nullptr;
  int x0 = 0;
  int y0 = 0;
  int depth = 0;
  int size = 0;
  int qp = 0;
  std::vector<MotionVector> neighbor_motion;
};

CuContext make_cu_context(const FrameCodingState& state, int x0, int y0,
                          int depth);

}  // namespace modex

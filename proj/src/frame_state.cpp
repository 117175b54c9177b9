#include "modex/frame_state.hpp"

#include <algorithm>
#include <cassert>

#include "modex/rdcost.hpp"

namespace modex {

PaddedPlane PaddedPlane::from(const Frame& plane, int border) {
  PaddedPlane out;
  out.width = plane.width;
  out.height = plane.height;
  out.border = border;
  out.stride = plane.width + 2 * border;
  out.data.resize(static_cast<size_t>(out.stride) * (plane.height + 2 * border));
  for (int y = -border; y < plane.height + border; ++y) {
    const uint8_t* src = plane.row(std::clamp(y, 0, plane.height - 1));
    uint8_t* dst = out.data.data() + static_cast<size_t>(y + border) * out.stride;
    for (int x = -border; x < plane.width + border; ++x) {
      dst[x + border] = src[std::clamp(x, 0, plane.width - 1)];
    }
  }
  return out;
}

MotionField::MotionField(int width, int height)
    : granules_x_(width / 4),
      granules_y_(height / 4),
      granules_(static_cast<size_t>(width / 4) * (height / 4)) {}

void MotionField::set_rect(int x, int y, int w, int h,
                           std::optional<MotionVector> mv) {
  for (int gy = y / 4; gy < (y + h) / 4; ++gy) {
    for (int gx = x / 4; gx < (x + w) / 4; ++gx) {
      granules_[static_cast<size_t>(gy) * granules_x_ + gx] = mv;
    }
  }
}

std::optional<MotionVector> MotionField::at(int x, int y) const {
  if (x < 0 || y < 0) return std::nullopt;
  const int gx = x / 4;
  const int gy = y / 4;
  if (gx >= granules_x_ || gy >= granules_y_) return std::nullopt;
  return granules_[static_cast<size_t>(gy) * granules_x_ + gx];
}

FrameCodingState FrameCodingState::create(const Frame& padded_original,
                                          const Frame& previous_recon, int qp,
                                          bool intra_only,
                                          const CodecConfig& config) {
  assert(padded_original.width % kCtuSize == 0);
  assert(padded_original.height % kCtuSize == 0);
  FrameCodingState state;
  state.original = &padded_original;
  state.reference = PaddedPlane::from(previous_recon, std::max(config.search_window, 1));
  state.recon = Frame{padded_original.width, padded_original.height,
                      std::vector<uint8_t>(padded_original.luma.size(), 128)};
  state.motion = MotionField(padded_original.width, padded_original.height);
  state.ctus_x = padded_original.width / kCtuSize;
  state.ctus_y = padded_original.height / kCtuSize;
  state.qp = qp;
  state.lambda = lambda_for_qp(qp);
  state.intra_only = intra_only;
  state.config = &config;
  return state;
}

CuContext make_cu_context(const FrameCodingState& state, int x0, int y0,
                          int depth) {
  CuContext ctx;
  ctx.state = &state;
  ctx.x0 = x0;
  ctx.y0 = y0;
  ctx.depth = depth;
  ctx.size = cu_size_at_depth(depth);
  ctx.qp = state.qp;

  // Left then top candidate, deduplicated.
  if (state.sample_committed(x0 - 1, y0)) {
    if (auto mv = state.motion.at(x0 - 1, y0)) ctx.neighbor_motion.push_back(*mv);
  }
  if (state.sample_committed(x0, y0 - 1)) {
    if (auto mv = state.motion.at(x0, y0 - 1)) {
      if (ctx.neighbor_motion.empty() || !(ctx.neighbor_motion[0] == *mv)) {
        ctx.neighbor_motion.push_back(*mv);
      }
    }
  }
  return ctx;
}

}  // namespace modex

#include "modex/evaluators.hpp"

#include <array>
#include <cassert>
#include <cmath>

#include "modex/error.hpp"
#include "modex/residual.hpp"
#include "modex/util.hpp"

namespace modex {

namespace {

void add_feature(FeatureCounts& fc, const std::string& key, uint64_t n) {
  if (n > 0) fc[key] += n;
}

void add_bits_feature(FeatureCounts& fc, double rate_bits) {
  add_feature(fc, feature_bits(), static_cast<uint64_t>(std::llround(rate_bits)));
}

const uint8_t* original_block(const CuContext& ctx, int x, int y) {
  return ctx.state->original->row(y) + x;
}

int original_stride(const CuContext& ctx) { return ctx.state->original->width; }

void copy_block(const uint8_t* src, int src_stride, uint8_t* dst,
                int dst_stride, int w, int h) {
  for (int y = 0; y < h; ++y) {
    std::copy_n(src + static_cast<ptrdiff_t>(y) * src_stride, w,
                dst + static_cast<ptrdiff_t>(y) * dst_stride);
  }
}

// ---------------------------------------------------------------------------
// Intra prediction: DC and a planar-style predictor over the top row and the
// left column. Missing neighbors are mid-gray (128).

struct IntraNeighbors {
  std::vector<uint8_t> top;   // w samples
  std::vector<uint8_t> left;  // h samples
  bool top_available = false;
  bool left_available = false;
};

// sample_at(x, y) returns a decoded sample or -1 when unavailable.
template <typename SampleAt>
IntraNeighbors gather_neighbors(int x, int y, int w, int h, SampleAt&& sample_at) {
  IntraNeighbors nb;
  nb.top.assign(w, 128);
  nb.left.assign(h, 128);
  int first = sample_at(x, y - 1);
  if (first >= 0) {
    nb.top_available = true;
    for (int i = 0; i < w; ++i) nb.top[i] = static_cast<uint8_t>(sample_at(x + i, y - 1));
  }
  first = sample_at(x - 1, y);
  if (first >= 0) {
    nb.left_available = true;
    for (int i = 0; i < h; ++i) nb.left[i] = static_cast<uint8_t>(sample_at(x - 1, y + i));
  }
  return nb;
}

void predict_dc(const IntraNeighbors& nb, uint8_t* out, int n) {
  uint32_t sum = 0;
  uint32_t count = 0;
  if (nb.top_available) {
    for (uint8_t s : nb.top) sum += s;
    count += static_cast<uint32_t>(nb.top.size());
  }
  if (nb.left_available) {
    for (uint8_t s : nb.left) sum += s;
    count += static_cast<uint32_t>(nb.left.size());
  }
  const uint8_t dc = count == 0 ? 128 : static_cast<uint8_t>((sum + count / 2) / count);
  std::fill_n(out, static_cast<size_t>(n) * n, dc);
}

void predict_planar(const IntraNeighbors& nb, uint8_t* out, int n) {
  int log2n = 0;
  while ((1 << log2n) < n) ++log2n;
  // Top-right / bottom-left corners are approximated by the last available
  // edge samples.
  const int top_right = nb.top[n - 1];
  const int bottom_left = nb.left[n - 1];
  for (int y = 0; y < n; ++y) {
    uint8_t* row = out + static_cast<size_t>(y) * n;
    for (int x = 0; x < n; ++x) {
      const int horizontal = (n - 1 - x) * nb.left[y] + (x + 1) * top_right;
      const int vertical = (n - 1 - y) * nb.top[x] + (y + 1) * bottom_left;
      row[x] = static_cast<uint8_t>((horizontal + vertical + n) >> (log2n + 1));
    }
  }
}

struct IntraBlockCode {
  ResidualCode code;
  double rate_bits = 0.0;  // header + residual
  double cost_j = 0.0;
};

// Tries DC then planar, returns the cheaper one (ties keep DC).
template <typename SampleAt>
IntraBlockCode code_intra_block(const CuContext& ctx, int x, int y, int n,
                                SampleAt&& sample_at) {
  const CodecConfig& cfg = *ctx.state->config;
  const double lambda = ctx.state->lambda;
  IntraNeighbors nb = gather_neighbors(x, y, n, n, sample_at);

  std::vector<uint8_t> prediction(static_cast<size_t>(n) * n);
  IntraBlockCode best;
  bool have_best = false;
  for (int predictor = 0; predictor < 2; ++predictor) {
    if (predictor == 0) {
      predict_dc(nb, prediction.data(), n);
    } else {
      predict_planar(nb, prediction.data(), n);
    }
    ResidualCode code = code_residual(original_block(ctx, x, y), original_stride(ctx),
                                      prediction.data(), n, n, n, ctx.qp, cfg);
    IntraBlockCode candidate;
    candidate.rate_bits = cfg.intra_header_bits + code.rate_bits;
    candidate.cost_j = static_cast<double>(code.distortion) + lambda * candidate.rate_bits;
    candidate.code = std::move(code);
    if (!have_best || candidate.cost_j < best.cost_j) {
      best = std::move(candidate);
      have_best = true;
    }
  }
  return best;
}

// Committed-canvas sample accessor.
auto committed_sample_fn(const FrameCodingState& state) {
  return [&state](int x, int y) -> int {
    if (!state.sample_committed(x, y)) return -1;
    return state.recon.at(x, y);
  };
}

// ---------------------------------------------------------------------------
// Inter helpers.

MotionVector mv_predictor(const CuContext& ctx) {
  return ctx.neighbor_motion.empty() ? MotionVector{} : ctx.neighbor_motion[0];
}

int mvd_bits(MotionVector mv, MotionVector predictor) {
  return signed_exp_golomb_bits(mv.x - predictor.x) +
         signed_exp_golomb_bits(mv.y - predictor.y);
}

std::vector<MotionVector> merge_candidates(const CuContext& ctx) {
  if (ctx.neighbor_motion.empty()) return {MotionVector{}};
  return ctx.neighbor_motion;
}

struct PuCode {
  PuInfo pu;
  double rate_bits = 0.0;
  uint64_t distortion = 0;
  uint64_t nonzero_coeffs = 0;
  std::vector<uint8_t> reconstruction;
  double cost_j = 0.0;
  double effort = 0.0;
};

// Best merge-candidate coding of a PU (residual coded, no motion vector
// difference). When allow_skip is set the uncoded-residual variant competes
// as well; its rate is candidate index + header bits only.
PuCode code_pu_merge(const CuContext& ctx, int x, int y, int w, int h,
                     bool allow_skip) {
  const FrameCodingState& state = *ctx.state;
  const CodecConfig& cfg = *state.config;
  const double lambda = state.lambda;
  const uint8_t* orig = original_block(ctx, x, y);
  const int ostride = original_stride(ctx);

  PuCode best;
  bool have_best = false;
  const std::vector<MotionVector> candidates = merge_candidates(ctx);
  for (size_t idx = 0; idx < candidates.size(); ++idx) {
    const MotionVector mv = candidates[idx];
    const uint8_t* pred = state.reference.at(x + mv.x, y + mv.y);
    const int pstride = state.reference.stride;
    const double index_bits = static_cast<double>(idx);

    if (allow_skip) {
      PuCode skip;
      skip.pu = PuInfo{x, y, w, h, PuCoding::kSkip, mv};
      skip.rate_bits = cfg.skip_header_bits + index_bits;
      skip.distortion = sse_block(orig, ostride, pred, pstride, w, h);
      skip.reconstruction.resize(static_cast<size_t>(w) * h);
      copy_block(pred, pstride, skip.reconstruction.data(), w, w, h);
      skip.cost_j = static_cast<double>(skip.distortion) + lambda * skip.rate_bits;
      skip.effort = static_cast<double>(w) * h;
      if (!have_best || skip.cost_j < best.cost_j) {
        best = std::move(skip);
        have_best = true;
      }
    }

    ResidualCode code = code_residual(orig, ostride, pred, pstride, w, h, ctx.qp, cfg);
    PuCode merge;
    merge.pu = PuInfo{x, y, w, h, PuCoding::kMerge, mv};
    merge.rate_bits = cfg.merge_header_bits + index_bits + code.rate_bits;
    merge.distortion = code.distortion;
    merge.nonzero_coeffs = code.nonzero_coeffs;
    merge.reconstruction = std::move(code.reconstruction);
    merge.cost_j = static_cast<double>(merge.distortion) + lambda * merge.rate_bits;
    merge.effort = 2.0 * w * h;
    if (!have_best || merge.cost_j < best.cost_j) {
      best = std::move(merge);
      have_best = true;
    }
  }
  // Effort covers all candidate evaluations, not only the winner.
  best.effort = static_cast<double>(candidates.size()) *
                (allow_skip ? 3.0 : 2.0) * w * h;
  return best;
}

struct PuRect {
  int x, y, w, h;
};

std::array<PuRect, 2> partition_geometry(const CuContext& ctx,
                                         InterPartition partition) {
  const int x = ctx.x0;
  const int y = ctx.y0;
  const int n = ctx.size;
  const int q = n / 4;
  switch (partition) {
    case InterPartition::kNx2N:
      return {{{x, y, n / 2, n}, {x + n / 2, y, n / 2, n}}};
    case InterPartition::k2NxN:
      return {{{x, y, n, n / 2}, {x, y + n / 2, n, n / 2}}};
    case InterPartition::k2NxnU:
      return {{{x, y, n, q}, {x, y + q, n, 3 * q}}};
    case InterPartition::k2NxnD:
      return {{{x, y, n, 3 * q}, {x, y + 3 * q, n, q}}};
    case InterPartition::knLx2N:
      return {{{x, y, q, n}, {x + q, y, 3 * q, n}}};
    case InterPartition::knRx2N:
      return {{{x, y, 3 * q, n}, {x + 3 * q, y, q, n}}};
  }
  return {{{x, y, n, n}, {x, y, n, n}}};
}

// Motion-searched coding of a PU.
PuCode code_pu_inter(const CuContext& ctx, int x, int y, int w, int h) {
  const FrameCodingState& state = *ctx.state;
  const CodecConfig& cfg = *state.config;
  const double lambda = state.lambda;
  const uint8_t* orig = original_block(ctx, x, y);
  const int ostride = original_stride(ctx);
  const MotionVector predictor = mv_predictor(ctx);
  const int window = cfg.search_window;

  const MotionVector mv = motion_search(state.reference, orig, ostride, x, y,
                                        w, h, predictor, lambda, window);
  const uint8_t* pred = state.reference.at(x + mv.x, y + mv.y);
  ResidualCode code =
      code_residual(orig, ostride, pred, state.reference.stride, w, h, ctx.qp, cfg);

  PuCode out;
  out.pu = PuInfo{x, y, w, h, PuCoding::kInter, mv};
  out.rate_bits = cfg.inter_header_bits + mvd_bits(mv, predictor) + code.rate_bits;
  out.distortion = code.distortion;
  out.nonzero_coeffs = code.nonzero_coeffs;
  out.reconstruction = std::move(code.reconstruction);
  out.cost_j = static_cast<double>(out.distortion) + lambda * out.rate_bits;
  const double positions = static_cast<double>(2 * window + 1) * (2 * window + 1);
  out.effort = (positions + 2.0) * w * h;
  return out;
}

}  // namespace

ModeId partition_mode_id(InterPartition p) {
  switch (p) {
    case InterPartition::kNx2N: return ModeId::kInterNx2N;
    case InterPartition::k2NxN: return ModeId::kInter2NxN;
    case InterPartition::k2NxnU: return ModeId::kInter2NxnU;
    case InterPartition::k2NxnD: return ModeId::kInter2NxnD;
    case InterPartition::knLx2N: return ModeId::kInternLx2N;
    case InterPartition::knRx2N: return ModeId::kInternRx2N;
  }
  return ModeId::kInterNx2N;
}

MotionVector motion_search(const PaddedPlane& ref, const uint8_t* orig,
                           int orig_stride, int x, int y, int w, int h,
                           MotionVector predictor, double lambda, int window) {
  assert(window <= ref.border);
  MotionVector best_mv{};
  double best_cost = -1.0;
  int best_mag2 = 0;
  for (int dy = -window; dy <= window; ++dy) {
    for (int dx = -window; dx <= window; ++dx) {
      const double bits = lambda * (signed_exp_golomb_bits(dx - predictor.x) +
                                    signed_exp_golomb_bits(dy - predictor.y));
      if (best_cost >= 0.0 && bits > best_cost) continue;
      uint64_t sse = 0;
      bool aborted = false;
      for (int row = 0; row < h; ++row) {
        sse += sse_rows(orig + static_cast<ptrdiff_t>(row) * orig_stride,
                        ref.at(x + dx, y + dy + row), w);
        if (best_cost >= 0.0 && static_cast<double>(sse) + bits > best_cost) {
          aborted = true;
          break;
        }
      }
      if (aborted) continue;
      const double cost = static_cast<double>(sse) + bits;
      const int mag2 = dx * dx + dy * dy;
      if (best_cost < 0.0 || cost < best_cost ||
          (cost == best_cost && mag2 < best_mag2)) {
        best_cost = cost;
        best_mag2 = mag2;
        best_mv = MotionVector{dx, dy};
      }
    }
  }
  return best_mv;
}

ModeResult eval_intra_2nx2n(const CuContext& ctx) {
  if (!mode_valid_at_depth(ModeId::kIntra2Nx2N, ctx.depth)) {
    throw InvalidDepthForModeError("Intra2Nx2N invalid at depth " +
                                   std::to_string(ctx.depth));
  }
  const int n = ctx.size;
  IntraBlockCode coded = code_intra_block(ctx, ctx.x0, ctx.y0, n,
                                          committed_sample_fn(*ctx.state));

  ModeResult result;
  result.mode = ModeId::kIntra2Nx2N;
  result.rd = RdCost::make(coded.rate_bits, coded.code.distortion, ctx.state->lambda);
  result.reconstruction = std::move(coded.code.reconstruction);
  add_feature(result.features, feature_intra(n), 1);
  add_feature(result.features, feature_coeff(), coded.code.nonzero_coeffs);
  add_bits_feature(result.features, result.rd.rate_bits);
  result.effort = 4.0 * n * n;  // two predictions + two residual passes
  result.pus = {PuInfo{ctx.x0, ctx.y0, n, n, PuCoding::kIntra, {}}};
  result.cu_choices = {CuChoice{ctx.depth, result.mode}};
  return result;
}

ModeResult eval_inter_2nx2n(const CuContext& ctx) {
  if (!mode_valid_at_depth(ModeId::kInter2Nx2N, ctx.depth)) {
    throw InvalidDepthForModeError("Inter2Nx2N invalid at depth " +
                                   std::to_string(ctx.depth));
  }
  const int n = ctx.size;
  PuCode pu = code_pu_inter(ctx, ctx.x0, ctx.y0, n, n);

  ModeResult result;
  result.mode = ModeId::kInter2Nx2N;
  result.rd = RdCost::make(pu.rate_bits, pu.distortion, ctx.state->lambda);
  result.reconstruction = std::move(pu.reconstruction);
  add_feature(result.features, feature_mc(n, n), 1);
  add_feature(result.features, feature_coeff(), pu.nonzero_coeffs);
  add_bits_feature(result.features, result.rd.rate_bits);
  result.effort = pu.effort;
  result.pus = {pu.pu};
  result.cu_choices = {CuChoice{ctx.depth, result.mode}};
  return result;
}

ModeResult eval_merge_2nx2n(const CuContext& ctx) {
  if (!mode_valid_at_depth(ModeId::kMerge2Nx2N, ctx.depth)) {
    throw InvalidDepthForModeError("Merge2Nx2N invalid at depth " +
                                   std::to_string(ctx.depth));
  }
  const int n = ctx.size;
  PuCode pu = code_pu_merge(ctx, ctx.x0, ctx.y0, n, n, /*allow_skip=*/true);

  ModeResult result;
  result.mode = ModeId::kMerge2Nx2N;
  result.rd = RdCost::make(pu.rate_bits, pu.distortion, ctx.state->lambda);
  result.reconstruction = std::move(pu.reconstruction);
  add_feature(result.features, feature_mc(n, n), 1);
  if (pu.pu.coding == PuCoding::kSkip) {
    add_feature(result.features, feature_skip(n), 1);
  } else {
    add_feature(result.features, feature_coeff(), pu.nonzero_coeffs);
  }
  add_bits_feature(result.features, result.rd.rate_bits);
  result.effort = pu.effort;
  result.pus = {pu.pu};
  result.cu_choices = {CuChoice{ctx.depth, result.mode}};
  return result;
}

ModeResult eval_inter_partitioned(const CuContext& ctx, InterPartition partition) {
  const ModeId mode = partition_mode_id(partition);
  const bool asymmetric = partition != InterPartition::kNx2N &&
                          partition != InterPartition::k2NxN;
  if (!mode_valid_at_depth(mode, ctx.depth)) {
    if (asymmetric) {
      throw InvalidDepthForPartitionError(
          std::string(mode_name(mode)) + ": asymmetric partitions only at depths 0-2, got depth " +
          std::to_string(ctx.depth));
    }
    throw InvalidDepthForModeError(std::string(mode_name(mode)) +
                                   " invalid at depth " + std::to_string(ctx.depth));
  }

  const int n = ctx.size;
  ModeResult result;
  result.mode = mode;
  result.reconstruction.resize(static_cast<size_t>(n) * n);

  double rate = 0.0;
  uint64_t distortion = 0;
  // Each PU independently takes the better of merge-candidate prediction and
  // motion search.
  for (const PuRect& rect : partition_geometry(ctx, partition)) {
    PuCode merge = code_pu_merge(ctx, rect.x, rect.y, rect.w, rect.h,
                                 /*allow_skip=*/false);
    PuCode inter = code_pu_inter(ctx, rect.x, rect.y, rect.w, rect.h);
    const double both_effort = merge.effort + inter.effort;
    PuCode& chosen = inter.cost_j < merge.cost_j ? inter : merge;

    rate += chosen.rate_bits;
    distortion += chosen.distortion;
    copy_block(chosen.reconstruction.data(), rect.w,
               result.reconstruction.data() +
                   static_cast<size_t>(rect.y - ctx.y0) * n + (rect.x - ctx.x0),
               n, rect.w, rect.h);
    add_feature(result.features, feature_mc(rect.w, rect.h), 1);
    add_feature(result.features, feature_coeff(), chosen.nonzero_coeffs);
    result.effort += both_effort;
    result.pus.push_back(chosen.pu);
  }

  result.rd = RdCost::make(rate, distortion, ctx.state->lambda);
  add_bits_feature(result.features, result.rd.rate_bits);
  result.cu_choices = {CuChoice{ctx.depth, result.mode}};
  return result;
}

ModeResult eval_intra_nxn(const CuContext& ctx) {
  if (ctx.depth != kMaxDepth) {
    throw InvalidDepthForModeError("IntraNxN requires depth 3, got depth " +
                                   std::to_string(ctx.depth));
  }
  const int n = ctx.size;  // 8
  const int pu = n / 2;    // 4
  const FrameCodingState& state = *ctx.state;

  std::vector<uint8_t> local(static_cast<size_t>(n) * n, 0);
  std::array<bool, 4> coded{};
  auto pu_index_of = [&](int x, int y) {
    const int lx = x - ctx.x0;
    const int ly = y - ctx.y0;
    return (ly / pu) * 2 + (lx / pu);
  };
  auto sample_at = [&](int x, int y) -> int {
    if (x >= ctx.x0 && x < ctx.x0 + n && y >= ctx.y0 && y < ctx.y0 + n) {
      if (coded[pu_index_of(x, y)]) {
        return local[static_cast<size_t>(y - ctx.y0) * n + (x - ctx.x0)];
      }
      return -1;
    }
    if (!state.sample_committed(x, y)) return -1;
    return state.recon.at(x, y);
  };

  double rate = 0.0;
  uint64_t distortion = 0;
  uint64_t nonzero = 0;
  // Z order: later PUs predict from earlier reconstructed PUs.
  const int offsets[4][2] = {{0, 0}, {pu, 0}, {0, pu}, {pu, pu}};
  for (int i = 0; i < 4; ++i) {
    const int px = ctx.x0 + offsets[i][0];
    const int py = ctx.y0 + offsets[i][1];
    IntraBlockCode coded_pu = code_intra_block(ctx, px, py, pu, sample_at);
    rate += coded_pu.rate_bits;
    distortion += coded_pu.code.distortion;
    nonzero += coded_pu.code.nonzero_coeffs;
    copy_block(coded_pu.code.reconstruction.data(), pu,
               local.data() + static_cast<size_t>(offsets[i][1]) * n + offsets[i][0],
               n, pu, pu);
    coded[i] = true;
  }

  ModeResult result;
  result.mode = ModeId::kIntraNxN;
  result.rd = RdCost::make(rate, distortion, state.lambda);
  result.reconstruction = std::move(local);
  add_feature(result.features, feature_intra(pu), 4);
  add_feature(result.features, feature_coeff(), nonzero);
  add_bits_feature(result.features, result.rd.rate_bits);
  result.effort = 4.0 * 4.0 * pu * pu;
  for (int i = 0; i < 4; ++i) {
    result.pus.push_back(PuInfo{ctx.x0 + offsets[i][0], ctx.y0 + offsets[i][1],
                                pu, pu, PuCoding::kIntra, {}});
  }
  result.cu_choices = {CuChoice{ctx.depth, result.mode}};
  return result;
}

ModeResult evaluate_leaf_mode(const CuContext& ctx, ModeId mode) {
  if (!mode_valid_at_depth(mode, ctx.depth)) {
    throw InvalidDepthForModeError(std::string(mode_name(mode)) +
                                   " invalid at depth " + std::to_string(ctx.depth));
  }
  switch (mode) {
    case ModeId::kIntra2Nx2N: return eval_intra_2nx2n(ctx);
    case ModeId::kInter2Nx2N: return eval_inter_2nx2n(ctx);
    case ModeId::kMerge2Nx2N: return eval_merge_2nx2n(ctx);
    case ModeId::kInterNx2N: return eval_inter_partitioned(ctx, InterPartition::kNx2N);
    case ModeId::kInter2NxN: return eval_inter_partitioned(ctx, InterPartition::k2NxN);
    case ModeId::kInter2NxnU: return eval_inter_partitioned(ctx, InterPartition::k2NxnU);
    case ModeId::kInter2NxnD: return eval_inter_partitioned(ctx, InterPartition::k2NxnD);
    case ModeId::kInternLx2N: return eval_inter_partitioned(ctx, InterPartition::knLx2N);
    case ModeId::kInternRx2N: return eval_inter_partitioned(ctx, InterPartition::knRx2N);
    case ModeId::kIntraNxN: return eval_intra_nxn(ctx);
    case ModeId::kSplit: break;
  }
  throw Error("Split is not a leaf mode");
}

}  // namespace modex

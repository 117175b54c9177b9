#include "modex/pipeline.hpp"

#include <chrono>
#include <cmath>

#include "json.hpp"
#include "modex/error.hpp"
#include "modex/util.hpp"

namespace modex {

namespace {

ModeResult eval_split(const FrameCodingState& state, const CuContext& ctx,
                      const Genotype& genotype, DecisionTrace* trace,
                      CuDecision& parent) {
  if (ctx.depth >= kMaxDepth) {
    throw InvalidDepthForModeError("Split invalid at depth " +
                                   std::to_string(ctx.depth));
  }
  const int n = ctx.size;
  const int half = n / 2;

  ModeResult result;
  result.mode = ModeId::kSplit;
  result.reconstruction.resize(static_cast<size_t>(n) * n);

  double rate = state.config->split_flag_bits;
  uint64_t distortion = 0;
  const int offsets[4][2] = {{0, 0}, {half, 0}, {0, half}, {half, half}};
  for (const auto& off : offsets) {
    CuDecision sub = decide_cu(state, ctx.x0 + off[0], ctx.y0 + off[1],
                               ctx.depth + 1, genotype, trace);
    rate += sub.best.rd.rate_bits;
    distortion += sub.best.rd.distortion;
    for (int y = 0; y < half; ++y) {
      std::copy_n(sub.best.reconstruction.data() + static_cast<size_t>(y) * half,
                  half,
                  result.reconstruction.data() +
                      static_cast<size_t>(off[1] + y) * n + off[0]);
    }
    merge_counts(result.features, sub.best.features);
    result.pus.insert(result.pus.end(), sub.best.pus.begin(), sub.best.pus.end());
    result.cu_choices.insert(result.cu_choices.end(), sub.best.cu_choices.begin(),
                             sub.best.cu_choices.end());
    // The cost of evaluating Split is the cost of the four sub-decisions.
    result.effort += sub.effort;
    parent.evaluated_modes += sub.evaluated_modes;
    parent.guard_checks += sub.guard_checks;
  }

  result.rd = RdCost::make(rate, distortion, state.lambda);
  result.features[feature_split_flag()] += 1;
  result.features[feature_bits()] +=
      static_cast<uint64_t>(std::llround(state.config->split_flag_bits));
  result.cu_choices.push_back(CuChoice{ctx.depth, ModeId::kSplit});
  return result;
}

}  // namespace

CuDecision decide_cu(const FrameCodingState& state, int x0, int y0, int depth,
                     const Genotype& genotype, DecisionTrace* trace) {
  const DepthPlan& plan = genotype.at(depth);
  CuContext ctx = make_cu_context(state, x0, y0, depth);

  CuDecision decision;
  bool have_best = false;
  CuTrace cu_trace;
  cu_trace.x0 = x0;
  cu_trace.y0 = y0;
  cu_trace.depth = depth;
  cu_trace.intra_only = state.intra_only;

  for (size_t i = 0; i < plan.order.size(); ++i) {
    const ModeId mode = plan.order[i];
    const Guard guard = plan.guards[i];
    decision.effort += state.config->guard_check_effort;
    ++decision.guard_checks;

    EvalRecord record;
    record.position = static_cast<int>(i);
    record.mode = mode;
    record.guard = guard;
    record.auto_skipped = state.intra_only && !mode_intra_capable(mode);

    const bool guard_passes =
        guard.always || (have_best && decision.best.mode == guard.target);
    if (guard_passes && !record.auto_skipped) {
      ModeResult result = mode == ModeId::kSplit
                              ? eval_split(state, ctx, genotype, trace, decision)
                              : evaluate_leaf_mode(ctx, mode);
      decision.effort += result.effort;
      ++decision.evaluated_modes;
      record.evaluated = true;
      record.cost_j = result.rd.cost_j;
      if (!have_best || result.rd.cost_j < decision.best.rd.cost_j) {
        decision.best = std::move(result);
        have_best = true;
      }
    }
    cu_trace.entries.push_back(record);
  }

  if (!have_best) {
    // Only possible on all-intra frames when every intra-capable position is
    // guarded away; at least one mode must always be tested.
    ModeResult fallback = eval_intra_2nx2n(ctx);
    decision.effort += fallback.effort;
    ++decision.evaluated_modes;
    decision.best = std::move(fallback);
    cu_trace.forced_intra_fallback = true;
  }

  cu_trace.chosen = decision.best.mode;
  cu_trace.chosen_cost = decision.best.rd.cost_j;
  if (trace) trace->cus.push_back(std::move(cu_trace));
  return decision;
}

namespace {

void commit_decision(FrameCodingState& state, int x0, int y0,
                     const CuDecision& decision) {
  const int n = kCtuSize;
  for (int y = 0; y < n; ++y) {
    std::copy_n(decision.best.reconstruction.data() + static_cast<size_t>(y) * n,
                n, state.recon.row(y0 + y) + x0);
  }
  for (const PuInfo& pu : decision.best.pus) {
    if (pu.coding == PuCoding::kIntra) {
      state.motion.set_rect(pu.x, pu.y, pu.w, pu.h, std::nullopt);
    } else {
      state.motion.set_rect(pu.x, pu.y, pu.w, pu.h, pu.mv);
    }
  }
  ++state.committed_ctus;
}

uint64_t cropped_sse(const Frame& reference, const Frame& padded_recon) {
  uint64_t sse = 0;
  for (int y = 0; y < reference.height; ++y) {
    sse += sse_rows(reference.row(y), padded_recon.row(y), reference.width);
  }
  return sse;
}

}  // namespace

EncodeReport encode_sequence(const Sequence& seq, const Genotype& genotype,
                             int qp, const CodecConfig& config,
                             DecisionTrace* trace, const EncodeHooks* hooks) {
  const std::vector<std::string> violations = validate_genotype(genotype);
  if (!violations.empty()) {
    std::string msg = "invalid genotype:";
    for (const std::string& v : violations) msg += "\n  " + v;
    throw InvalidGenotypeError(msg);
  }
  if (seq.frames.size() < 2) {
    throw InvalidDimensionsError("sequence needs at least 2 frames");
  }

  const auto start = std::chrono::steady_clock::now();

  EncodeReport report;
  report.sequence = seq.name;
  report.width = seq.width();
  report.height = seq.height();
  report.frame_count = static_cast<int>(seq.frames.size());
  report.qp = qp;

  Frame previous_recon;
  for (size_t f = 0; f < seq.frames.size(); ++f) {
    const Frame& original = seq.frames[f];
    check_dimensions(original.width, original.height);
    if (original.width != report.width || original.height != report.height) {
      throw DimensionMismatchError("frame " + std::to_string(f) +
                                   " dimensions differ from frame 0");
    }
    const Frame padded = pad_to_ctu(original);
    const bool intra_only = f == 0;
    if (intra_only) {
      previous_recon = Frame{padded.width, padded.height,
                             std::vector<uint8_t>(padded.luma.size(), 128)};
    }

    FrameCodingState state =
        FrameCodingState::create(padded, previous_recon, qp, intra_only, config);

    FrameStats stats;
    stats.intra_only = intra_only;
    for (int ctu_y = 0; ctu_y < state.ctus_y; ++ctu_y) {
      for (int ctu_x = 0; ctu_x < state.ctus_x; ++ctu_x) {
        CuDecision decision =
            decide_cu(state, ctu_x * kCtuSize, ctu_y * kCtuSize, 0, genotype, trace);
        if (hooks && hooks->after_ctu) {
          hooks->after_ctu(state, ctu_x, ctu_y, decision);
        }
        stats.rate_bits += decision.best.rd.rate_bits;
        stats.effort += decision.effort;
        merge_counts(stats.features, decision.best.features);
        report.evaluated_modes += decision.evaluated_modes;
        report.guard_checks += decision.guard_checks;
        for (const CuChoice& choice : decision.best.cu_choices) {
          report.chosen_modes[choice.depth][mode_index(choice.mode)] += 1;
        }
        commit_decision(state, ctu_x * kCtuSize, ctu_y * kCtuSize, decision);
      }
    }

    // Distortion is reported on the unpadded region only.
    stats.distortion_sse = cropped_sse(original, state.recon);
    report.rate_bits += stats.rate_bits;
    report.distortion_sse += stats.distortion_sse;
    report.effort += stats.effort;
    merge_counts(report.features, stats.features);
    report.per_frame.push_back(std::move(stats));

    previous_recon = std::move(state.recon);
  }
  report.num_samples = static_cast<uint64_t>(report.width) * report.height *
                       report.frame_count;

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

std::string encode_report_to_json(const EncodeReport& report) {
  nlohmann::json doc;
  doc["sequence"] = report.sequence;
  doc["width"] = report.width;
  doc["height"] = report.height;
  doc["frames"] = report.frame_count;
  doc["qp"] = report.qp;
  doc["rate_bits"] = report.rate_bits;
  doc["distortion_sse"] = report.distortion_sse;
  doc["num_samples"] = report.num_samples;
  doc["effort"] = report.effort;
  doc["evaluated_modes"] = report.evaluated_modes;
  doc["guard_checks"] = report.guard_checks;
  doc["wall_seconds"] = report.wall_seconds;
  doc["features"] = nlohmann::json::object();
  for (const auto& [key, n] : report.features) doc["features"][key] = n;
  doc["per_frame"] = nlohmann::json::array();
  for (const FrameStats& fs : report.per_frame) {
    nlohmann::json frame;
    frame["rate_bits"] = fs.rate_bits;
    frame["distortion_sse"] = fs.distortion_sse;
    frame["effort"] = fs.effort;
    frame["intra_only"] = fs.intra_only;
    doc["per_frame"].push_back(std::move(frame));
  }
  return doc.dump(2);
}

}  // namespace modex

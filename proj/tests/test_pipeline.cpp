#include <set>

#include "doctest.h"
#include "modex/error.hpp"
#include "modex/media_io.hpp"
#include "modex/pipeline.hpp"
#include "test_support.hpp"

using namespace modex;

namespace {

Genotype all_guarded_on(ModeId target) {
  Genotype g = exhaustive_genotype();
  for (int d = 0; d <= kMaxDepth; ++d) {
    for (size_t i = 2; i < g.at(d).guards.size(); ++i) {
      g.at(d).guards[i] = Guard::require_best(target);
    }
  }
  return g;
}

}  // namespace

TEST_CASE("validate_genotype") {
  SUBCASE("table literals validate cleanly") {
    CHECK(validate_genotype(parse_genotype(test::kGenotypePb)).empty());
    CHECK(validate_genotype(parse_genotype(test::kGenotypePe)).empty());
    CHECK(validate_genotype(exhaustive_genotype()).empty());
    CHECK(validate_genotype(heuristic_genotype()).empty());
  }

  SUBCASE("duplicate mode is not a permutation") {
    Genotype g = exhaustive_genotype();
    g.at(0).order[3] = g.at(0).order[2];
    const auto violations = validate_genotype(g);
    REQUIRE(!violations.empty());
    bool mentions_permutation = false;
    for (const auto& v : violations) {
      if (v.find("permutation") != std::string::npos) mentions_permutation = true;
    }
    CHECK(mentions_permutation);
  }

  SUBCASE("guard target invalid at depth") {
    Genotype g = exhaustive_genotype();
    g.at(0).guards[4] = Guard::require_best(ModeId::kIntraNxN);  // depth-3 only
    const auto violations = validate_genotype(g);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("invalid at depth") != std::string::npos);
  }

  SUBCASE("first two guards must be unconditional") {
    Genotype g = exhaustive_genotype();
    g.at(2).guards[1] = Guard::require_best(ModeId::kMerge2Nx2N);
    CHECK(!validate_genotype(g).empty());
  }

  SUBCASE("random genotypes always validate") {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
      CHECK(validate_genotype(random_genotype(rng)).empty());
    }
  }
}

TEST_CASE("genotype serialization") {
  SUBCASE("canonical text round-trips bitwise") {
    const Genotype pb = parse_genotype(test::kGenotypePb);
    CHECK(serialize_genotype(pb) == test::kGenotypePb);
    const Genotype pe = parse_genotype(test::kGenotypePe);
    CHECK(serialize_genotype(pe) == test::kGenotypePe);
  }

  SUBCASE("single-line form parses back to the same genotype") {
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
      const Genotype g = random_genotype(rng);
      CHECK(parse_genotype(serialize_genotype_line(g)) == g);
      CHECK(parse_genotype(serialize_genotype(g)) == g);
    }
  }

  SUBCASE("malformed inputs raise ParseError") {
    CHECK_THROWS_AS(parse_genotype("O(0)={1,2}"), ParseError);
    CHECK_THROWS_AS(parse_genotype("garbage"), ParseError);
    CHECK_THROWS_AS(parse_genotype(""), ParseError);
  }

  SUBCASE("valid syntax with broken invariants raises InvalidGenotypeError") {
    std::string text = test::kGenotypePb;
    const std::string from = "O(3)={1,3,2,4,0,9}";
    const std::string to = "O(3)={1,3,2,4,0,0}";
    text.replace(text.find(from), from.size(), to);
    CHECK_THROWS_AS(parse_genotype(text), InvalidGenotypeError);
  }

  SUBCASE("json export names every step") {
    const std::string json = genotype_to_json(parse_genotype(test::kGenotypePb));
    CHECK(json.find("\"Merge2Nx2N\"") != std::string::npos);
    CHECK(json.find("\"cu_size\": 64") != std::string::npos);
  }
}

TEST_CASE("decide_cu guard semantics") {
  CodecConfig cfg;
  cfg.search_window = 2;
  const Sequence seq = synthesize_sequence(SynthKind::kMovingBlock, 64, 64, 2, 17);
  const Frame& cur = seq.frames[1];
  const Frame& ref = seq.frames[0];

  SUBCASE("all guards unconditional: every mode evaluated, exhaustive minimum") {
    FrameCodingState state = test::make_state(cur, ref, 30, false, cfg, 0);
    DecisionTrace trace;
    const CuDecision decision = decide_cu(state, 0, 0, 0, exhaustive_genotype(), &trace);

    const CuTrace& top = trace.cus.back();  // the top-level CU is recorded last
    CHECK(top.depth == 0);
    double minimum = 0.0;
    bool first = true;
    for (const EvalRecord& record : top.entries) {
      CHECK(record.evaluated);
      if (first || record.cost_j < minimum) {
        minimum = record.cost_j;
        first = false;
      }
    }
    CHECK(decision.best.rd.cost_j == minimum);
    CHECK(decision.evaluated_modes >= top.entries.size());
  }

  SUBCASE("guards that can never fire leave exactly the first two evaluations") {
    // Require best == Split everywhere (Split is blocked before it could ever
    // run), so only positions 0 and 1 execute.
    Genotype g = all_guarded_on(ModeId::kSplit);
    for (size_t i = 2; i < g.at(3).guards.size(); ++i) {
      g.at(3).guards[i] = Guard::require_best(ModeId::kIntraNxN);
    }
    REQUIRE(validate_genotype(g).empty());
    FrameCodingState state = test::make_state(cur, ref, 30, false, cfg, 0);
    DecisionTrace trace;
    decide_cu(state, 0, 0, 0, g, &trace);
    REQUIRE(trace.cus.size() == 1);  // guards block Split, no recursion
    int evaluated = 0;
    for (const EvalRecord& r : trace.cus[0].entries) evaluated += r.evaluated;
    CHECK(evaluated == 2);
  }

  SUBCASE("depth-3 plan O={1,3,2,4,0,9}, G={-,-,1,3,2,4} gates as documented") {
    // Modes 1 and 3 always run; 2 runs iff best==1, 4 iff best==3,
    // 0 iff best==2, 9 iff best==4.
    const Genotype pb = parse_genotype(test::kGenotypePb);
    Rng rng(87);
    for (int trial = 0; trial < 30; ++trial) {
      const Sequence content = synthesize_sequence(
          trial % 2 ? SynthKind::kNoise : SynthKind::kMovingBlock, 64, 64, 2,
          500 + trial);
      FrameCodingState state = test::make_state(
          content.frames[1], content.frames[0],
          10 + static_cast<int>(rng.next_below(40)), false, cfg, 0);
      const int x0 = static_cast<int>(rng.next_below(8)) * 8;
      const int y0 = static_cast<int>(rng.next_below(8)) * 8;
      DecisionTrace trace;
      decide_cu(state, x0, y0, 3, pb, &trace);
      REQUIRE(trace.cus.size() == 1);
      const CuTrace& cu = trace.cus[0];
      REQUIRE(cu.entries.size() == 6);

      CHECK(cu.entries[0].evaluated);  // mode 1
      CHECK(cu.entries[1].evaluated);  // mode 3
      ModeId best = cu.entries[0].cost_j <= cu.entries[1].cost_j
                        ? ModeId::kInter2Nx2N
                        : ModeId::kInterNx2N;
      double best_cost = std::min(cu.entries[0].cost_j, cu.entries[1].cost_j);
      const ModeId expected_targets[6] = {
          ModeId::kIntra2Nx2N, ModeId::kIntra2Nx2N,  // unused for pos 0/1
          ModeId::kInter2Nx2N, ModeId::kInterNx2N, ModeId::kMerge2Nx2N,
          ModeId::kInter2NxN};
      for (size_t i = 2; i < 6; ++i) {
        CHECK(cu.entries[i].guard.target == expected_targets[i]);
        CHECK(cu.entries[i].evaluated == (best == expected_targets[i]));
        if (cu.entries[i].evaluated && cu.entries[i].cost_j < best_cost) {
          best = cu.entries[i].mode;
          best_cost = cu.entries[i].cost_j;
        }
      }
      CHECK(cu.chosen == best);
    }
  }

  SUBCASE("engine trace matches the reference interpreter on random genotypes") {
    Rng rng(23);
    for (int i = 0; i < 40; ++i) {
      FrameCodingState state = test::make_state(cur, ref, 18 + (i % 3) * 8, false,
                                                cfg, 0);
      DecisionTrace trace;
      decide_cu(state, 0, 0, 0, random_genotype(rng), &trace);
      for (const CuTrace& cu : trace.cus) {
        CHECK(test::trace_matches_reference(cu));
      }
    }
  }

  SUBCASE("first-two rule holds on inter frames") {
    Rng rng(31);
    for (int i = 0; i < 20; ++i) {
      FrameCodingState state = test::make_state(cur, ref, 30, false, cfg, 0);
      DecisionTrace trace;
      decide_cu(state, 0, 0, 0, random_genotype(rng), &trace);
      for (const CuTrace& cu : trace.cus) {
        int evaluated = 0;
        for (const EvalRecord& r : cu.entries) evaluated += r.evaluated;
        CHECK(evaluated >= 2);
      }
    }
  }

  SUBCASE("order permutation with unconditional guards keeps the chosen J") {
    Rng rng(41);
    FrameCodingState state = test::make_state(cur, ref, 30, false, cfg, 0);
    const double baseline =
        decide_cu(state, 0, 0, 0, exhaustive_genotype()).best.rd.cost_j;
    for (int i = 0; i < 10; ++i) {
      Genotype shuffled = exhaustive_genotype();
      for (int d = 0; d <= kMaxDepth; ++d) rng.shuffle(shuffled.at(d).order);
      CHECK(decide_cu(state, 0, 0, 0, shuffled).best.rd.cost_j == baseline);
    }
  }

  SUBCASE("guarded decisions never beat the exhaustive decision on the same state") {
    Rng rng(53);
    FrameCodingState state = test::make_state(cur, ref, 30, false, cfg, 0);
    const double exhaustive =
        decide_cu(state, 0, 0, 0, exhaustive_genotype()).best.rd.cost_j;
    for (int i = 0; i < 25; ++i) {
      const double guarded =
          decide_cu(state, 0, 0, 0, random_genotype(rng)).best.rd.cost_j;
      CHECK(exhaustive <= guarded);
    }
  }

  SUBCASE("more evaluations never cost less effort") {
    FrameCodingState state = test::make_state(cur, ref, 30, false, cfg, 0);
    const CuDecision exhaustive = decide_cu(state, 0, 0, 0, exhaustive_genotype());
    Rng rng(61);
    for (int i = 0; i < 10; ++i) {
      const CuDecision guarded = decide_cu(state, 0, 0, 0, random_genotype(rng));
      CHECK(guarded.effort <= exhaustive.effort);
    }
  }
}

TEST_CASE("split recursion") {
  CodecConfig cfg;
  cfg.search_window = 2;

  SUBCASE("split of a flat CU in a static scene yields four skips, zero distortion") {
    const Frame flat{64, 64, std::vector<uint8_t>(64 * 64, 100)};
    FrameCodingState state = test::make_state(flat, flat, 30, false, cfg, 0);
    DecisionTrace trace;
    decide_cu(state, 0, 0, 0, exhaustive_genotype(), &trace);

    int sub_cus = 0;
    for (const CuTrace& cu : trace.cus) {
      if (cu.depth == 1) {
        ++sub_cus;
        CHECK(cu.chosen == ModeId::kMerge2Nx2N);  // skip variant of merge
        CHECK(cu.chosen_cost < cfg.merge_header_bits * state.lambda + 1.0);
      }
    }
    CHECK(sub_cus == 4);
  }

  SUBCASE("split cost aggregates sub-decisions plus the split flag") {
    const Sequence seq = synthesize_sequence(SynthKind::kMovingBlock, 64, 64, 2, 70);
    FrameCodingState state = test::make_state(seq.frames[1], seq.frames[0], 30,
                                              false, cfg, 0);
    DecisionTrace trace;
    decide_cu(state, 0, 0, 0, exhaustive_genotype(), &trace);

    double split_cost = -1.0;
    const CuTrace& top = trace.cus.back();
    for (const EvalRecord& r : top.entries) {
      if (r.mode == ModeId::kSplit) split_cost = r.cost_j;
    }
    REQUIRE(split_cost >= 0.0);

    // Re-run the four depth-1 decisions on the same state and aggregate.
    double rate = cfg.split_flag_bits;
    uint64_t dist = 0;
    for (const auto& [dx, dy] : std::vector<std::pair<int, int>>{
             {0, 0}, {32, 0}, {0, 32}, {32, 32}}) {
      const CuDecision sub = decide_cu(state, dx, dy, 1, exhaustive_genotype());
      rate += sub.best.rd.rate_bits;
      dist += sub.best.rd.distortion;
    }
    CHECK(split_cost ==
          doctest::Approx(static_cast<double>(dist) + state.lambda * rate)
              .epsilon(1e-12));
  }

  SUBCASE("split at depth 3 is rejected") {
    const Frame flat{64, 64, std::vector<uint8_t>(64 * 64, 100)};
    FrameCodingState state = test::make_state(flat, flat, 30, false, cfg, 0);
    Genotype g = exhaustive_genotype();
    // Force a depth-3 plan that contains Split: not constructible through the
    // public surface, so check the validator instead.
    g.at(3).order[5] = ModeId::kSplit;
    CHECK(!validate_genotype(g).empty());
  }
}

TEST_CASE("encode_sequence") {
  CodecConfig cfg;
  cfg.search_window = 2;

  SUBCASE("flat static sequence: second frame fully skip-coded, zero distortion") {
    const Sequence seq = synthesize_sequence(SynthKind::kFlat, 64, 64, 2, 1);
    const EncodeReport report = encode_sequence(seq, exhaustive_genotype(), 30, cfg);
    CHECK(report.per_frame[1].distortion_sse == 0);
    CHECK(report.per_frame[1].features.count("skip_64") == 1);
    CHECK(report.per_frame[1].rate_bits == cfg.skip_header_bits);
  }

  SUBCASE("bitwise deterministic") {
    const Sequence seq = synthesize_sequence(SynthKind::kMovingBlock, 128, 64, 3, 5);
    const EncodeReport a = encode_sequence(seq, parse_genotype(test::kGenotypePb), 40, cfg);
    const EncodeReport b = encode_sequence(seq, parse_genotype(test::kGenotypePb), 40, cfg);
    CHECK(a.rate_bits == b.rate_bits);
    CHECK(a.distortion_sse == b.distortion_sse);
    CHECK(a.effort == b.effort);
    CHECK(a.features == b.features);
    CHECK(a.chosen_modes == b.chosen_modes);
  }

  SUBCASE("per-CTU subset-minimum against the exhaustive oracle") {
    const Sequence seq = synthesize_sequence(SynthKind::kMovingBlock, 128, 64, 4, 29);
    const Genotype exhaustive = exhaustive_genotype();
    Rng rng(71);
    for (int i = 0; i < 5; ++i) {
      const Genotype guarded = random_genotype(rng);
      int checked = 0;
      EncodeHooks hooks;
      hooks.after_ctu = [&](const FrameCodingState& state, int cx, int cy,
                            const CuDecision& decision) {
        const CuDecision oracle =
            decide_cu(state, cx * kCtuSize, cy * kCtuSize, 0, exhaustive);
        CHECK(oracle.best.rd.cost_j <= decision.best.rd.cost_j);
        ++checked;
      };
      encode_sequence(seq, guarded, 30, cfg, nullptr, &hooks);
      CHECK(checked == 2 * 4);
    }
  }

  SUBCASE("frame 0 is intra-only") {
    const Sequence seq = synthesize_sequence(SynthKind::kMovingBlock, 64, 64, 2, 3);
    DecisionTrace trace;
    encode_sequence(seq, exhaustive_genotype(), 30, cfg, &trace);
    for (const CuTrace& cu : trace.cus) {
      if (!cu.intra_only) continue;
      for (const EvalRecord& r : cu.entries) {
        if (r.evaluated) CHECK(mode_intra_capable(r.mode));
      }
    }
  }

  SUBCASE("invalid genotype is rejected up front") {
    Genotype broken = exhaustive_genotype();
    broken.at(1).order[2] = broken.at(1).order[3];
    const Sequence seq = synthesize_sequence(SynthKind::kFlat, 64, 64, 2, 1);
    CHECK_THROWS_AS(encode_sequence(seq, broken, 30, cfg), InvalidGenotypeError);
  }

  SUBCASE("padding: distortion is reported on the unpadded region") {
    // Mid-gray flat frames code losslessly (the intra fallback predicts 128
    // exactly), so both 72x40 frames must report zero distortion even though
    // coding happens on the padded 128x64 canvas.
    Frame f{72, 40, std::vector<uint8_t>(static_cast<size_t>(72) * 40, 128)};
    Sequence seq{"padded", {f, f}};
    const EncodeReport report = encode_sequence(seq, exhaustive_genotype(), 30, cfg);
    CHECK(report.num_samples == static_cast<uint64_t>(72) * 40 * 2);
    CHECK(report.distortion_sse == 0);
  }
}

TEST_CASE("intra-frame fallback guarantees at least one evaluation") {
  CodecConfig cfg;
  cfg.search_window = 1;
  // Positions 0 and 1 hold inter modes (auto-skipped on the intra frame) and
  // every later position requires best == Inter2Nx2N, which can never hold
  // there: the fallback must fire.
  auto make_plan = [](int depth, std::vector<int> order) {
    DepthPlan plan;
    plan.depth = depth;
    for (int id : order) plan.order.push_back(static_cast<ModeId>(id));
    plan.guards.assign(plan.order.size(), Guard::always_test());
    for (size_t i = 2; i < plan.guards.size(); ++i) {
      plan.guards[i] = Guard::require_best(ModeId::kInter2Nx2N);
    }
    return plan;
  };
  Genotype g;
  for (int d = 0; d <= 2; ++d) g.at(d) = make_plan(d, {1, 2, 3, 4, 5, 6, 7, 8, 0, 10});
  g.at(3) = make_plan(3, {1, 2, 3, 4, 0, 9});
  REQUIRE(validate_genotype(g).empty());

  const Sequence seq = synthesize_sequence(SynthKind::kGradient, 64, 64, 2, 1);
  DecisionTrace trace;
  encode_sequence(seq, g, 30, cfg, &trace);
  bool saw_fallback = false;
  for (const CuTrace& cu : trace.cus) {
    if (cu.forced_intra_fallback) {
      saw_fallback = true;
      CHECK(cu.intra_only);
      CHECK(cu.chosen == ModeId::kIntra2Nx2N);
    }
  }
  CHECK(saw_fallback);
}

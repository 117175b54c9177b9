#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "modex/mode.hpp"
#include "modex/rng.hpp"

namespace modex {

// Evaluation condition attached to one position of a mode order: either
// unconditional, or "test only when the best mode so far equals `target`".
struct Guard {
  bool always = true;
  ModeId target = ModeId::kIntra2Nx2N;  // meaningful when !always

  static Guard always_test() { return Guard{}; }
  static Guard require_best(ModeId m) { return Guard{false, m}; }
  bool operator==(const Guard&) const = default;
};

// Mode testing order and aligned guards for one depth. The order is a
// permutation of the valid mode set at the depth; the first two guards are
// always unconditional so a best mode can be established.
struct DepthPlan {
  int depth = 0;
  std::vector<ModeId> order;
  std::vector<Guard> guards;

  bool operator==(const DepthPlan&) const = default;
};

struct Genotype {
  std::array<DepthPlan, kMaxDepth + 1> depths;

  const DepthPlan& at(int depth) const { return depths[depth]; }
  DepthPlan& at(int depth) { return depths[depth]; }
  bool operator==(const Genotype&) const = default;
};

// Empty when every invariant holds; otherwise one message per violation.
std::vector<std::string> validate_genotype(const Genotype& genotype);

// All guards unconditional, modes in table order. This is the stand-in for
// the unmodified exhaustive encoder and the baseline for every relative
// number the toolkit reports.
Genotype exhaustive_genotype();

// Fixed hand-written plan: merge and split early, partition modes guarded on
// symmetric inter results, intra guarded on merge.
Genotype heuristic_genotype();

// Uniform random valid genotype; guard slots >= 2 are unconditional with
// probability always_prob, otherwise they require a uniformly drawn valid
// mode.
Genotype random_genotype(Rng& rng, double always_prob = 0.25);

// Canonical text form, one vector per line:
//   O(0)={10,2,...}
//   G(0)={-,-,10,...}
// serialize -> parse -> serialize is byte-identical.
std::string serialize_genotype(const Genotype& genotype);

// Same content on a single line, vectors joined by ';' (CSV-friendly).
std::string serialize_genotype_line(const Genotype& genotype);

// Accepts both forms. Throws ParseError on malformed input and
// InvalidGenotypeError when the parsed genotype violates invariants.
Genotype parse_genotype(std::string_view text);

// Structured export of the decision program a genotype unrolls to: per depth
// an ordered list of {mode, guard} steps. Returned as a JSON string.
std::string genotype_to_json(const Genotype& genotype);

// Per depth, per position: can this position ever execute? A guarded
// position is reachable only if its target mode appears earlier at an
// executable position.
std::array<std::vector<bool>, kMaxDepth + 1> reachable_positions(
    const Genotype& genotype);

}  // namespace modex

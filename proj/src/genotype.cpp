#include "modex/genotype.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "modex/error.hpp"

namespace modex {

std::vector<std::string> validate_genotype(const Genotype& genotype) {
  std::vector<std::string> violations;
  auto report = [&](int depth, const std::string& msg) {
    violations.push_back("depth " + std::to_string(depth) + ": " + msg);
  };

  for (int d = 0; d <= kMaxDepth; ++d) {
    const DepthPlan& plan = genotype.at(d);
    const std::vector<ModeId>& valid = valid_modes_at_depth(d);
    if (plan.depth != d) {
      report(d, "plan depth field is " + std::to_string(plan.depth));
    }
    if (plan.order.size() != valid.size()) {
      report(d, "order has " + std::to_string(plan.order.size()) +
                    " entries, expected " + std::to_string(valid.size()));
    }
    std::set<int> seen;
    for (ModeId m : plan.order) {
      if (!mode_valid_at_depth(m, d)) {
        report(d, std::string(mode_name(m)) + " invalid at this depth");
      }
      if (!seen.insert(mode_index(m)).second) {
        report(d, "not a permutation: duplicate mode " +
                      std::to_string(mode_index(m)));
      }
    }
    if (plan.guards.size() != plan.order.size()) {
      report(d, "guards have " + std::to_string(plan.guards.size()) +
                    " entries, expected " + std::to_string(plan.order.size()));
    }
    for (size_t i = 0; i < plan.guards.size() && i < 2; ++i) {
      if (!plan.guards[i].always) {
        report(d, "guard " + std::to_string(i) + " must be unconditional");
      }
    }
    for (size_t i = 0; i < plan.guards.size(); ++i) {
      const Guard& g = plan.guards[i];
      if (!g.always && !mode_valid_at_depth(g.target, d)) {
        report(d, "guard " + std::to_string(i) + " targets " +
                      mode_name(g.target) + ", mode invalid at depth");
      }
    }
  }
  return violations;
}

Genotype exhaustive_genotype() {
  Genotype g;
  for (int d = 0; d <= kMaxDepth; ++d) {
    DepthPlan& plan = g.at(d);
    plan.depth = d;
    plan.order = valid_modes_at_depth(d);
    plan.guards.assign(plan.order.size(), Guard::always_test());
  }
  return g;
}

Genotype heuristic_genotype() {
  auto make_plan = [](int depth, std::vector<int> order, std::vector<int> guards) {
    DepthPlan plan;
    plan.depth = depth;
    for (int id : order) plan.order.push_back(static_cast<ModeId>(id));
    for (int idx : guards) {
      plan.guards.push_back(idx < 0 ? Guard::always_test()
                                    : Guard::require_best(static_cast<ModeId>(idx)));
    }
    return plan;
  };
  Genotype g;
  // Merge and split first, symmetric inter next; asymmetric partitions only
  // after a symmetric partition won, intra only after merge won.
  for (int d = 0; d <= 2; ++d) {
    g.at(d) = make_plan(d, {2, 1, 10, 3, 4, 5, 6, 7, 8, 0},
                        {-1, -1, -1, 1, 1, 4, 4, 3, 3, 2});
  }
  g.at(3) = make_plan(3, {2, 1, 3, 4, 0, 9}, {-1, -1, 1, 1, 2, 0});
  return g;
}

Genotype random_genotype(Rng& rng, double always_prob) {
  Genotype g;
  for (int d = 0; d <= kMaxDepth; ++d) {
    DepthPlan& plan = g.at(d);
    plan.depth = d;
    plan.order = valid_modes_at_depth(d);
    rng.shuffle(plan.order);
    plan.guards.resize(plan.order.size());
    const std::vector<ModeId>& valid = valid_modes_at_depth(d);
    for (size_t i = 2; i < plan.guards.size(); ++i) {
      if (rng.next_bool(always_prob)) {
        plan.guards[i] = Guard::always_test();
      } else {
        plan.guards[i] =
            Guard::require_best(valid[rng.next_below(valid.size())]);
      }
    }
  }
  return g;
}

namespace {

std::string vector_line(char tag, int depth, const std::string& body) {
  std::string line;
  line += tag;
  line += '(';
  line += static_cast<char>('0' + depth);
  line += ")={";
  line += body;
  line += '}';
  return line;
}

std::vector<std::string> genotype_lines(const Genotype& genotype) {
  std::vector<std::string> lines;
  for (int d = 0; d <= kMaxDepth; ++d) {
    const DepthPlan& plan = genotype.at(d);
    std::string order_body;
    for (size_t i = 0; i < plan.order.size(); ++i) {
      if (i) order_body += ',';
      order_body += std::to_string(mode_index(plan.order[i]));
    }
    std::string guard_body;
    for (size_t i = 0; i < plan.guards.size(); ++i) {
      if (i) guard_body += ',';
      guard_body += plan.guards[i].always
                        ? "-"
                        : std::to_string(mode_index(plan.guards[i].target));
    }
    lines.push_back(vector_line('O', d, order_body));
    lines.push_back(vector_line('G', d, guard_body));
  }
  return lines;
}

std::vector<std::string> split_tokens(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (c == sep) {
      out.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  out.push_back(current);
  return out;
}

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int parse_mode_index(const std::string& token) {
  if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError("expected a mode index, got '" + token + "'");
  }
  int v = std::stoi(token);
  if (v < 0 || v >= kNumModes) {
    throw ParseError("mode index out of range: " + token);
  }
  return v;
}

}  // namespace

std::string serialize_genotype(const Genotype& genotype) {
  std::string out;
  for (const std::string& line : genotype_lines(genotype)) {
    out += line;
    out += '\n';
  }
  return out;
}

std::string serialize_genotype_line(const Genotype& genotype) {
  std::string out;
  for (const std::string& line : genotype_lines(genotype)) {
    if (!out.empty()) out += ';';
    out += line;
  }
  return out;
}

Genotype parse_genotype(std::string_view text) {
  Genotype genotype;
  std::array<bool, kMaxDepth + 1> have_order{};
  std::array<bool, kMaxDepth + 1> have_guards{};
  for (int d = 0; d <= kMaxDepth; ++d) genotype.at(d).depth = d;

  std::string normalized(text);
  std::replace(normalized.begin(), normalized.end(), ';', '\n');
  for (const std::string& raw : split_tokens(normalized, '\n')) {
    const std::string line = strip(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.size() < 7 || (line[0] != 'O' && line[0] != 'G') || line[1] != '(' ||
        line[3] != ')' || line[4] != '=' || line[5] != '{' || line.back() != '}') {
      throw ParseError("malformed genotype line: '" + line + "'");
    }
    const int depth = line[2] - '0';
    if (depth < 0 || depth > kMaxDepth) {
      throw ParseError("depth out of range in line: '" + line + "'");
    }
    const std::string body = line.substr(6, line.size() - 7);
    DepthPlan& plan = genotype.at(depth);
    if (line[0] == 'O') {
      if (have_order[depth]) throw ParseError("duplicate O(" + std::to_string(depth) + ")");
      have_order[depth] = true;
      plan.order.clear();
      for (const std::string& token : split_tokens(body, ',')) {
        plan.order.push_back(static_cast<ModeId>(parse_mode_index(strip(token))));
      }
    } else {
      if (have_guards[depth]) throw ParseError("duplicate G(" + std::to_string(depth) + ")");
      have_guards[depth] = true;
      plan.guards.clear();
      for (const std::string& token : split_tokens(body, ',')) {
        const std::string t = strip(token);
        if (t == "-") {
          plan.guards.push_back(Guard::always_test());
        } else {
          plan.guards.push_back(
              Guard::require_best(static_cast<ModeId>(parse_mode_index(t))));
        }
      }
    }
  }

  for (int d = 0; d <= kMaxDepth; ++d) {
    if (!have_order[d] || !have_guards[d]) {
      throw ParseError("missing O/G vectors for depth " + std::to_string(d));
    }
  }
  const std::vector<std::string> violations = validate_genotype(genotype);
  if (!violations.empty()) {
    std::string msg = "invalid genotype:";
    for (const std::string& v : violations) msg += "\n  " + v;
    throw InvalidGenotypeError(msg);
  }
  return genotype;
}

std::string genotype_to_json(const Genotype& genotype) {
  nlohmann::json doc;
  doc["depths"] = nlohmann::json::array();
  for (int d = 0; d <= kMaxDepth; ++d) {
    const DepthPlan& plan = genotype.at(d);
    nlohmann::json steps = nlohmann::json::array();
    for (size_t i = 0; i < plan.order.size(); ++i) {
      nlohmann::json step;
      step["mode"] = mode_index(plan.order[i]);
      step["name"] = mode_name(plan.order[i]);
      if (plan.guards[i].always) {
        step["guard"] = nullptr;
      } else {
        step["guard"] = mode_index(plan.guards[i].target);
      }
      steps.push_back(std::move(step));
    }
    nlohmann::json entry;
    entry["depth"] = d;
    entry["cu_size"] = cu_size_at_depth(d);
    entry["steps"] = std::move(steps);
    doc["depths"].push_back(std::move(entry));
  }
  return doc.dump(2);
}

std::array<std::vector<bool>, kMaxDepth + 1> reachable_positions(
    const Genotype& genotype) {
  std::array<std::vector<bool>, kMaxDepth + 1> out;
  for (int d = 0; d <= kMaxDepth; ++d) {
    const DepthPlan& plan = genotype.at(d);
    std::vector<bool> reachable(plan.order.size(), false);
    for (size_t i = 0; i < plan.order.size(); ++i) {
      if (plan.guards[i].always) {
        reachable[i] = true;
        continue;
      }
      // The target can only be the best mode once it has been evaluated at an
      // earlier executable position.
      for (size_t j = 0; j < i; ++j) {
        if (reachable[j] && plan.order[j] == plan.guards[i].target) {
          reachable[i] = true;
          break;
        }
      }
    }
    out[d] = std::move(reachable);
  }
  return out;
}

}  // namespace modex

#include "modex/campaign.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <set>

#include "json.hpp"
#include "modex/bd_metrics.hpp"
#include "modex/error.hpp"
#include "modex/pipeline.hpp"
#include "modex/util.hpp"

namespace modex {

Sequence realize_sequence(const SequenceSpec& spec) {
  if (spec.synthetic) {
    return synthesize_sequence(spec.kind, spec.width, spec.height, spec.frames,
                               spec.seed, spec.name);
  }
  return load_raw_video(spec.path, spec.width, spec.height, spec.frames,
                        spec.layout, spec.name);
}

namespace {

using nlohmann::json;

SequenceSpec parse_sequence_spec(const json& node,
                                 const std::filesystem::path& base_dir) {
  SequenceSpec spec;
  if (!node.contains("name")) throw ConfigError("sequence spec without a name");
  spec.name = node.at("name").get<std::string>();

  const bool has_synth = node.contains("synthetic");
  const bool has_raw = node.contains("raw");
  if (has_synth == has_raw) {
    throw ConfigError("sequence '" + spec.name +
                      "' needs exactly one of 'synthetic' or 'raw'");
  }
  const json& body = has_synth ? node.at("synthetic") : node.at("raw");
  spec.synthetic = has_synth;
  spec.width = body.value("width", 64);
  spec.height = body.value("height", 64);
  spec.frames = body.value("frames", 4);
  if (has_synth) {
    spec.kind = synth_kind_from_string(body.value("kind", "moving_block"));
    spec.seed = body.value("seed", uint64_t{1});
  } else {
    if (!body.contains("path")) {
      throw ConfigError("raw sequence '" + spec.name + "' needs a path");
    }
    std::filesystem::path p = body.at("path").get<std::string>();
    spec.path = p.is_absolute() ? p : base_dir / p;
    const std::string layout = body.value("layout", "luma");
    if (layout == "luma") {
      spec.layout = RawLayout::kLumaOnly;
    } else if (layout == "yuv420") {
      spec.layout = RawLayout::kYuv420;
    } else {
      throw ConfigError("unknown raw layout '" + layout + "'");
    }
  }
  return spec;
}

void check_disjoint(const CampaignConfig& config) {
  std::set<std::string> names;
  for (const SequenceSpec& s : config.training) {
    if (!names.insert(s.name).second) {
      throw ConfigError("duplicate training sequence name '" + s.name + "'");
    }
  }
  for (const SequenceSpec& s : config.validation) {
    if (!names.insert(s.name).second) {
      throw ConfigError("sequence name '" + s.name +
                        "' is not unique across training and validation sets");
    }
  }
}

}  // namespace

CampaignConfig parse_campaign_config(const std::string& json_text,
                                     const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  CampaignConfig config;
  try {
    for (const json& node : doc.value("training", json::array())) {
      config.training.push_back(parse_sequence_spec(node, base_dir));
    }
    for (const json& node : doc.value("validation", json::array())) {
      config.validation.push_back(parse_sequence_spec(node, base_dir));
    }
    if (doc.contains("qps")) {
      config.qps = doc.at("qps").get<std::vector<int>>();
    }
    config.dse.population_size = doc.value("population", config.dse.population_size);
    config.dse.generations = doc.value("generations", config.dse.generations);
    config.dse.crossover_prob = doc.value("crossover_prob", config.dse.crossover_prob);
    config.dse.order_swap_prob = doc.value("order_swap_prob", config.dse.order_swap_prob);
    config.dse.guard_point_prob = doc.value("guard_point_prob", config.dse.guard_point_prob);
    config.dse.guard_always_init_prob =
        doc.value("guard_always_init_prob", config.dse.guard_always_init_prob);
    config.dse.seed = doc.value("seed", config.dse.seed);
    config.dse.threads = doc.value("threads", config.dse.threads);
    if (doc.contains("archive_capacity")) {
      config.dse.archive_capacity = doc.at("archive_capacity").get<size_t>();
    }
    if (doc.contains("codec")) {
      const json& codec = doc.at("codec");
      CodecConfig& cc = config.dse.codec;
      cc.search_window = codec.value("search_window", cc.search_window);
      cc.skip_header_bits = codec.value("skip_header_bits", cc.skip_header_bits);
      cc.merge_header_bits = codec.value("merge_header_bits", cc.merge_header_bits);
      cc.inter_header_bits = codec.value("inter_header_bits", cc.inter_header_bits);
      cc.intra_header_bits = codec.value("intra_header_bits", cc.intra_header_bits);
      cc.split_flag_bits = codec.value("split_flag_bits", cc.split_flag_bits);
      cc.block_overhead_bits = codec.value("block_overhead_bits", cc.block_overhead_bits);
      cc.guard_check_effort = codec.value("guard_check_effort", cc.guard_check_effort);
    }
    if (doc.contains("energy_table")) {
      const std::string p = doc.at("energy_table").get<std::string>();
      if (!p.empty()) {
        std::filesystem::path path = p;
        config.energy_table = path.is_absolute() ? path : base_dir / path;
      }
    }
    if (doc.contains("output_dir")) {
      std::filesystem::path p = doc.at("output_dir").get<std::string>();
      config.output_dir = p.is_absolute() ? p : base_dir / p;
    }
    if (doc.contains("anchor")) {
      const json& anchor = doc.at("anchor");
      config.anchor.rate = anchor.value("rate", 1.0);
      config.anchor.distortion = anchor.value("distortion", 1.0);
      config.anchor.effort = anchor.value("effort", 1.0);
      config.anchor.energy = anchor.value("energy", 1.0);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed campaign config: ") + e.what());
  }

  if (const char* env = std::getenv("MODEX_OUTPUT_DIR"); env && *env) {
    config.output_dir = env;
  }
  check_disjoint(config);
  if (config.qps.empty()) throw ConfigError("qps must not be empty");
  return config;
}

CampaignConfig load_campaign_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFoundError("cannot open config: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_campaign_config(text, path.parent_path());
}

EnergyTable load_energy_table_for(const CampaignConfig& config,
                                  std::ostream& log) {
  if (config.energy_table.empty()) return EnergyTable::built_in_default();
  std::vector<std::string> warnings;
  EnergyTable table = EnergyTable::load(config.energy_table, &warnings);
  for (const std::string& w : warnings) log << "warning: " << w << "\n";
  return table;
}

namespace {

std::string csv_quote(const std::string& field) {
  return "\"" + field + "\"";  // genotype text never contains quotes
}

void write_file(const std::filesystem::path& path, const std::string& content,
                std::vector<std::filesystem::path>& written) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileNotFoundError("cannot write " + path.string());
  out << content;
  written.push_back(path);
}

}  // namespace

std::string archive_csv(int qp, const ParetoArchive& archive) {
  std::string out = "qp,genotype,rate_bits,psnr_db,effort,energy,rank\n";
  for (const ArchiveEntry& e : archive.entries()) {
    out += std::to_string(qp);
    out += ',';
    out += csv_quote(e.genotype_text);
    out += ',';
    out += fmt_double(e.objectives.rate_bits);
    out += ',';
    out += fmt_double(e.objectives.psnr);
    out += ',';
    out += fmt_double(e.objectives.effort);
    out += ',';
    out += fmt_double(e.objectives.energy);
    out += ",0\n";  // archive entries are mutually nondominated
  }
  return out;
}

std::string scatter_csv(int qp, const ParetoArchive& archive,
                        const ObjectiveVector& baseline) {
  std::string out =
      "qp,rate_increase_pct,effort_savings_pct,energy_savings_pct,psnr_delta_db,"
      "rate_bits,psnr_db,effort,energy,genotype\n";
  for (const ArchiveEntry& e : archive.entries()) {
    const ObjectiveVector& o = e.objectives;
    out += std::to_string(qp);
    out += ',';
    out += fmt_double((o.rate_bits / baseline.rate_bits - 1.0) * 100.0);
    out += ',';
    out += fmt_double((1.0 - o.effort / baseline.effort) * 100.0);
    out += ',';
    out += fmt_double((1.0 - o.energy / baseline.energy) * 100.0);
    out += ',';
    out += fmt_double(o.psnr - baseline.psnr);
    out += ',';
    out += fmt_double(o.rate_bits);
    out += ',';
    out += fmt_double(o.psnr);
    out += ',';
    out += fmt_double(o.effort);
    out += ',';
    out += fmt_double(o.energy);
    out += ',';
    out += csv_quote(e.genotype_text);
    out += '\n';
  }
  return out;
}

std::string baseline_csv(const std::map<int, ObjectiveVector>& baselines) {
  std::string out = "qp,rate_bits,psnr_db,effort,energy\n";
  for (const auto& [qp, o] : baselines) {
    out += std::to_string(qp);
    out += ',';
    out += fmt_double(o.rate_bits);
    out += ',';
    out += fmt_double(o.psnr);
    out += ',';
    out += fmt_double(o.effort);
    out += ',';
    out += fmt_double(o.energy);
    out += '\n';
  }
  return out;
}

TrainOutputs run_train(const CampaignConfig& config, std::ostream& log) {
  if (config.training.empty()) {
    throw ConfigError("training set must not be empty");
  }
  const EnergyTable table = load_energy_table_for(config, log);

  std::vector<Sequence> training;
  training.reserve(config.training.size());
  for (const SequenceSpec& spec : config.training) {
    training.push_back(realize_sequence(spec));
  }

  std::filesystem::create_directories(config.output_dir);

  TrainOutputs outputs;
  for (int qp : config.qps) {
    DseConfig dse = config.dse;
    dse.qp = qp;
    dse.seed = config.dse.seed + static_cast<uint64_t>(qp);
    log << "qp " << qp << ": dse over " << training.size() << " sequences, "
        << dse.population_size << " individuals, " << dse.generations
        << " generations\n";
    DseResult result = run_dse(dse, training, table);
    log << "qp " << qp << ": " << result.evaluations << " evaluations, archive "
        << result.archive.size() << " points\n";

    write_file(config.output_dir / ("archive_qp" + std::to_string(qp) + ".csv"),
               archive_csv(qp, result.archive), outputs.files_written);
    write_file(config.output_dir / ("scatter_qp" + std::to_string(qp) + ".csv"),
               scatter_csv(qp, result.archive, result.exhaustive_baseline),
               outputs.files_written);
    outputs.baselines[qp] = result.exhaustive_baseline;
    outputs.archives.emplace(qp, std::move(result.archive));
  }

  write_file(config.output_dir / "baseline.csv", baseline_csv(outputs.baselines),
             outputs.files_written);
  outputs.combined = combine_across_qps(outputs.archives, config.anchor);
  write_file(config.output_dir / "combined.txt",
             serialize_combined(outputs.combined), outputs.files_written);
  return outputs;
}

namespace {

RdPoint rd_point_from(const ObjectiveVector& o) {
  return RdPoint{o.rate_bits, o.psnr, o.energy, o.effort};
}

}  // namespace

ValidationReport run_validate(const CampaignConfig& config,
                              const CombinedSolution& combined,
                              std::ostream& log) {
  if (config.validation.empty()) {
    throw ConfigError("validation set must not be empty");
  }
  for (int qp : config.qps) {
    if (!combined.per_qp.count(qp)) {
      throw ConfigError("combined solution lacks a genotype for qp " +
                        std::to_string(qp));
    }
  }
  const EnergyTable table = load_energy_table_for(config, log);
  const Genotype baseline = exhaustive_genotype();

  ValidationReport report;
  for (const SequenceSpec& spec : config.validation) {
    const Sequence seq = realize_sequence(spec);
    std::array<RdPoint, 4> base_points{};
    std::array<RdPoint, 4> test_points{};
    if (config.qps.size() != base_points.size()) {
      throw ConfigError("validation needs exactly 4 QPs");
    }
    for (size_t i = 0; i < config.qps.size(); ++i) {
      const int qp = config.qps[i];
      base_points[i] = rd_point_from(collect_objectives(
          encode_sequence(seq, baseline, qp, config.dse.codec), table));
      test_points[i] = rd_point_from(collect_objectives(
          encode_sequence(seq, combined.per_qp.at(qp), qp, config.dse.codec), table));
    }
    const RdCurve reference(base_points);
    const RdCurve test(test_points);

    ValidationRow row;
    row.sequence = spec.name;
    row.bd_rate_pct = bd_rate(reference, test);
    row.bd_energy_pct = bd_energy(reference, test);
    row.effort_savings_pct = mean_effort_savings(reference, test);
    log << spec.name << ": bd-rate " << row.bd_rate_pct << "%, bd-energy "
        << row.bd_energy_pct << "%, effort savings " << row.effort_savings_pct
        << "%\n";
    report.rows.push_back(std::move(row));
  }

  const double n = static_cast<double>(report.rows.size());
  ValidationRow& mean = report.mean;
  mean.sequence = "mean";
  for (const ValidationRow& row : report.rows) {
    mean.bd_rate_pct += row.bd_rate_pct / n;
    mean.bd_energy_pct += row.bd_energy_pct / n;
    mean.effort_savings_pct += row.effort_savings_pct / n;
  }
  ValidationRow& stddev = report.stddev;
  stddev.sequence = "stddev";
  for (const ValidationRow& row : report.rows) {
    stddev.bd_rate_pct += (row.bd_rate_pct - mean.bd_rate_pct) *
                          (row.bd_rate_pct - mean.bd_rate_pct) / n;
    stddev.bd_energy_pct += (row.bd_energy_pct - mean.bd_energy_pct) *
                            (row.bd_energy_pct - mean.bd_energy_pct) / n;
    stddev.effort_savings_pct +=
        (row.effort_savings_pct - mean.effort_savings_pct) *
        (row.effort_savings_pct - mean.effort_savings_pct) / n;
  }
  stddev.bd_rate_pct = std::sqrt(stddev.bd_rate_pct);
  stddev.bd_energy_pct = std::sqrt(stddev.bd_energy_pct);
  stddev.effort_savings_pct = std::sqrt(stddev.effort_savings_pct);
  return report;
}

std::string validation_report_csv(const ValidationReport& report) {
  std::string out =
      "sequence,bd_rate_pct,bd_energy_pct,effort_savings_pct,"
      "bd_rate_std,bd_energy_std,effort_savings_std\n";
  for (const ValidationRow& row : report.rows) {
    out += row.sequence;
    out += ',';
    out += fmt_double(row.bd_rate_pct);
    out += ',';
    out += fmt_double(row.bd_energy_pct);
    out += ',';
    out += fmt_double(row.effort_savings_pct);
    out += ",,,\n";
  }
  out += report.mean.sequence;
  out += ',';
  out += fmt_double(report.mean.bd_rate_pct);
  out += ',';
  out += fmt_double(report.mean.bd_energy_pct);
  out += ',';
  out += fmt_double(report.mean.effort_savings_pct);
  out += ',';
  out += fmt_double(report.stddev.bd_rate_pct);
  out += ',';
  out += fmt_double(report.stddev.bd_energy_pct);
  out += ',';
  out += fmt_double(report.stddev.effort_savings_pct);
  out += '\n';
  return out;
}

std::string inspect_genotype(const Genotype& genotype) {
  const auto reachable = reachable_positions(genotype);
  std::string out;
  for (int d = 0; d <= kMaxDepth; ++d) {
    const DepthPlan& plan = genotype.at(d);
    const int size = cu_size_at_depth(d);
    out += "depth " + std::to_string(d) + " (" + std::to_string(size) + "x" +
           std::to_string(size) + "):\n";
    for (size_t i = 0; i < plan.order.size(); ++i) {
      out += "  pos " + std::to_string(i) + ": ";
      std::string name = mode_name(plan.order[i]);
      name.resize(12, ' ');
      out += name;
      if (plan.guards[i].always) {
        out += "always tested";
      } else {
        out += "requires best == ";
        out += mode_name(plan.guards[i].target);
      }
      if (!reachable[d][i]) out += "  [unreachable]";
      out += '\n';
    }
    std::string unreachable_list;
    for (size_t i = 0; i < plan.order.size(); ++i) {
      if (reachable[d][i]) continue;
      if (!unreachable_list.empty()) unreachable_list += ", ";
      unreachable_list += "pos " + std::to_string(i) + " (" +
                          mode_name(plan.order[i]) + ")";
    }
    out += "  unreachable: " +
           (unreachable_list.empty() ? std::string("none") : unreachable_list) +
           "\n";
  }
  return out;
}

}  // namespace modex

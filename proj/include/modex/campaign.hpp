#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "modex/dse.hpp"
#include "modex/media_io.hpp"

namespace modex {

// A named input sequence: either synthesized or read from a raw file.
struct SequenceSpec {
  std::string name;
  bool synthetic = true;
  // synthetic
  SynthKind kind = SynthKind::kMovingBlock;
  uint64_t seed = 1;
  // raw
  std::filesystem::path path;
  RawLayout layout = RawLayout::kLumaOnly;
  // shared
  int width = 64;
  int height = 64;
  int frames = 4;
};

Sequence realize_sequence(const SequenceSpec& spec);

struct CampaignConfig {
  std::vector<SequenceSpec> training;
  std::vector<SequenceSpec> validation;
  std::vector<int> qps{10, 20, 30, 40};
  DseConfig dse;  // qp and seed fields are set per run
  std::filesystem::path energy_table;  // empty -> built-in defaults
  std::filesystem::path output_dir = "out";
  SelectionAnchor anchor;
};

// Parses the JSON campaign file (schema documented in the README). Training
// and validation sets must be disjoint by name. The MODEX_OUTPUT_DIR
// environment variable overrides output_dir (and nothing else).
CampaignConfig load_campaign_config(const std::filesystem::path& path);
CampaignConfig parse_campaign_config(const std::string& json_text,
                                     const std::filesystem::path& base_dir);

EnergyTable load_energy_table_for(const CampaignConfig& config,
                                  std::ostream& log);

struct TrainOutputs {
  std::map<int, ParetoArchive> archives;
  std::map<int, ObjectiveVector> baselines;  // exhaustive genotype per qp
  CombinedSolution combined;
  std::vector<std::filesystem::path> files_written;
};

// One DSE per configured QP (seeded with config.dse.seed + qp); writes
// archive_qp*.csv, scatter_qp*.csv, baseline.csv and combined.txt into the
// output directory. Reruns with the same config are byte-identical.
TrainOutputs run_train(const CampaignConfig& config, std::ostream& log);

struct ValidationRow {
  std::string sequence;
  double bd_rate_pct = 0.0;
  double bd_energy_pct = 0.0;
  double effort_savings_pct = 0.0;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;  // one per validation sequence
  ValidationRow mean;               // plus population standard deviations
  ValidationRow stddev;
};

// Encodes every validation sequence at all configured QPs under the
// exhaustive baseline and the combined solution, then compares the two
// QP sweeps per sequence.
ValidationReport run_validate(const CampaignConfig& config,
                              const CombinedSolution& combined,
                              std::ostream& log);

// CSV writers (stable column order, locale-independent formatting).
std::string archive_csv(int qp, const ParetoArchive& archive);
std::string scatter_csv(int qp, const ParetoArchive& archive,
                        const ObjectiveVector& baseline);
std::string baseline_csv(const std::map<int, ObjectiveVector>& baselines);
std::string validation_report_csv(const ValidationReport& report);

// Human-readable decision summary with per-position guard reachability.
std::string inspect_genotype(const Genotype& genotype);

}  // namespace modex

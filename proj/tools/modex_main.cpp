#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "modex/campaign.hpp"
#include "modex/error.hpp"
#include "modex/pipeline.hpp"

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw modex::FileNotFoundError("cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw modex::FileNotFoundError("cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mode-decision design-space explorer for a toy quadtree encoder"};
  app.require_subcommand(1);

  std::string config_path;
  std::string combined_path;
  std::string genotype_path;
  std::string output_override;

  CLI::App* train = app.add_subcommand(
      "train", "Run the per-QP searches and write archives, scatter data and a "
               "combined solution");
  train->add_option("-c,--config", config_path, "campaign config JSON")->required();
  train->add_option("-o,--output-dir", output_override, "override output directory");

  CLI::App* validate = app.add_subcommand(
      "validate", "Compare a combined solution against the exhaustive baseline "
                  "on the validation sequences");
  validate->add_option("-c,--config", config_path, "campaign config JSON")->required();
  validate->add_option("-g,--combined", combined_path, "combined solution file")
      ->required();
  validate->add_option("-o,--output-dir", output_override, "override output directory");

  CLI::App* inspect = app.add_subcommand(
      "inspect", "Print the decision program of a genotype with guard "
                 "reachability analysis");
  inspect->add_option("-g,--genotype", genotype_path, "genotype text file")->required();
  bool inspect_json = false;
  inspect->add_flag("--json", inspect_json, "emit the structured export instead");

  CLI::App* encode = app.add_subcommand(
      "encode", "Encode one sequence under one genotype at one QP and print the "
                "report as JSON");
  int enc_qp = 32;
  std::string enc_raw, enc_synth = "moving_block";
  int enc_width = 64, enc_height = 64, enc_frames = 4;
  uint64_t enc_seed = 1;
  std::string enc_layout = "luma";
  std::string enc_energy_table;
  int enc_window = 8;
  std::string enc_out;
  encode->add_option("-g,--genotype", genotype_path, "genotype text file")->required();
  encode->add_option("-q,--qp", enc_qp, "quantization parameter")->required();
  encode->add_option("--raw", enc_raw, "raw video file (otherwise synthetic input)");
  encode->add_option("--layout", enc_layout, "raw layout: luma or yuv420");
  encode->add_option("--synth", enc_synth, "synthetic kind: flat, gradient, moving_block, noise");
  encode->add_option("--width", enc_width, "frame width");
  encode->add_option("--height", enc_height, "frame height");
  encode->add_option("--frames", enc_frames, "frame count");
  encode->add_option("--seed", enc_seed, "synthesis seed");
  encode->add_option("--energy-table", enc_energy_table, "energy table file");
  encode->add_option("--search-window", enc_window, "motion search window");
  encode->add_option("-o,--out", enc_out, "write the JSON report here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed() || validate->parsed()) {
      modex::CampaignConfig config = modex::load_campaign_config(config_path);
      if (!output_override.empty()) config.output_dir = output_override;

      if (train->parsed()) {
        modex::TrainOutputs outputs = modex::run_train(config, std::cout);
        for (const auto& file : outputs.files_written) {
          std::cout << "wrote " << file.string() << "\n";
        }
      } else {
        const modex::CombinedSolution combined =
            modex::parse_combined(read_file(combined_path));
        const modex::ValidationReport report =
            modex::run_validate(config, combined, std::cout);
        std::filesystem::create_directories(config.output_dir);
        const auto report_path = config.output_dir / "validation_report.csv";
        write_text(report_path, modex::validation_report_csv(report));
        std::cout << "wrote " << report_path.string() << "\n";
      }
    } else if (inspect->parsed()) {
      const modex::Genotype genotype = modex::parse_genotype(read_file(genotype_path));
      std::cout << (inspect_json ? modex::genotype_to_json(genotype)
                                 : modex::inspect_genotype(genotype));
    } else if (encode->parsed()) {
      const modex::Genotype genotype = modex::parse_genotype(read_file(genotype_path));
      modex::Sequence seq;
      if (!enc_raw.empty()) {
        const modex::RawLayout layout = enc_layout == "yuv420"
                                            ? modex::RawLayout::kYuv420
                                            : modex::RawLayout::kLumaOnly;
        seq = modex::load_raw_video(enc_raw, enc_width, enc_height, enc_frames, layout);
      } else {
        seq = modex::synthesize_sequence(modex::synth_kind_from_string(enc_synth),
                                         enc_width, enc_height, enc_frames, enc_seed);
      }
      modex::CodecConfig codec;
      codec.search_window = enc_window;
      const modex::EncodeReport report =
          modex::encode_sequence(seq, genotype, enc_qp, codec);

      // The JSON report additionally carries the four objectives.
      modex::EnergyTable table =
          enc_energy_table.empty()
              ? modex::EnergyTable::built_in_default()
              : modex::EnergyTable::load(enc_energy_table, nullptr);
      const modex::ObjectiveVector objectives =
          modex::collect_objectives(report, table);
      nlohmann::json doc = nlohmann::json::parse(modex::encode_report_to_json(report));
      doc["objectives"] = {{"rate_bits", objectives.rate_bits},
                           {"psnr_db", objectives.psnr},
                           {"effort", objectives.effort},
                           {"energy", objectives.energy}};
      const std::string json_text = doc.dump(2);
      if (enc_out.empty()) {
        std::cout << json_text << "\n";
      } else {
        write_text(enc_out, json_text + "\n");
        std::cout << "wrote " << enc_out << "\n";
      }
    }
  } catch (const modex::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

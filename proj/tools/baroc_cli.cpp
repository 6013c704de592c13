#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "baroc/experiment.hpp"
#include "baroc/predictor.hpp"
#include "baroc/synth.hpp"
#include "baroc/util.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitConfigError = 2;

baroc::ExperimentConfig load_config(const std::optional<std::string>& path) {
  if (!path) return baroc::ExperimentConfig{};
  return baroc::ExperimentConfig::load(*path);
}

void write_text(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-driven uplink video delivery lab: synthetic traces, regime-aware "
               "prediction, joint quality/FEC scheduling, and a packet-level simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path;
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::string out_path = "out";
  app.add_option("--config", config_path, "Experiment config JSON")->envname("BAROC_CONFIG");
  app.add_option("--seed", seed, "Root random seed")->each([&](const std::string&) {
    seed_given = true;
  });
  app.add_option("--out", out_path, "Output directory (or file for gen/label/fit)");

  auto* gen_net = app.add_subcommand("gen-net", "Generate a synthetic network trace CSV");
  int duration = 0;
  gen_net->add_option("--duration", duration, "Trace length in seconds");

  auto* gen_video = app.add_subcommand("gen-video", "Generate a synthetic video trace CSV");
  gen_video->add_option("--duration", duration, "Trace length in seconds");

  auto* label = app.add_subcommand("label", "Label a network trace CSV with regime flags");
  std::string input_path;
  label->add_option("--input", input_path, "Network trace CSV")->required();

  auto* fit = app.add_subcommand("fit-predictor",
                                 "Fit the regime-conditional predictor from a trace");
  fit->add_option("--input", input_path, "Labeled or raw network trace CSV");

  auto* run = app.add_subcommand("run", "Run the configured controllers and summarize");
  auto* bench = app.add_subcommand("bench", "Time the scheduler decision loop");

  CLI11_PARSE(app, argc, argv);

  try {
    baroc::ExperimentConfig config = load_config(config_path);
    if (seed_given) config.seeds = {seed};

    if (gen_net->parsed()) {
      int d = duration > 0 ? duration : config.duration_s;
      baroc::NetworkTrace trace = baroc::gen_synthetic_trace(d, seed, config.regime);
      write_text(out_path, baroc::network_trace_to_csv(trace));
      std::cout << "wrote " << d << "s network trace to " << out_path << "\n";
    } else if (gen_video->parsed()) {
      int d = duration > 0 ? duration : config.duration_s;
      baroc::VideoTrace trace = baroc::gen_synthetic_video(d, seed, config.rd);
      write_text(out_path, baroc::video_trace_to_csv(trace));
      std::cout << "wrote " << d << "s video trace to " << out_path << "\n";
    } else if (label->parsed()) {
      baroc::NetworkTrace trace = baroc::load_network_trace(input_path);
      trace = baroc::label_regimes(trace, config.regime.label_rules);
      std::size_t anomalies = 0, reallocs = 0;
      for (const auto& s : trace.samples) {
        anomalies += s.is_anomaly ? 1 : 0;
        reallocs += s.is_reallocation ? 1 : 0;
      }
      write_text(out_path, baroc::network_trace_to_csv(trace));
      std::cout << "labeled " << trace.samples.size() << " seconds ("
                << reallocs << " reallocation, " << anomalies << " anomalous); wrote "
                << out_path << "\n";
    } else if (fit->parsed()) {
      baroc::NetworkTrace trace;
      if (!input_path.empty()) {
        trace = baroc::label_regimes(baroc::load_network_trace(input_path),
                                     config.regime.label_rules);
      } else {
        trace = baroc::gen_synthetic_trace(config.train_duration_s, config.train_seed,
                                           config.regime);
      }
      baroc::BimodalFitOptions options;
      options.label_rules = config.regime.label_rules;
      options.bandwidth_grid = config.grid.bandwidth_grid();
      options.loss_grid = config.grid.loss_grid();
      baroc::BimodalModel model = baroc::fit_bimodal(trace, options);
      write_text(out_path, model.to_json_text());
      std::cout << "fitted regime model (p_anomaly_reallocation="
                << baroc::util::format_double(model.p_anomaly_reallocation)
                << ", p_anomaly_normal="
                << baroc::util::format_double(model.p_anomaly_normal) << "); wrote "
                << out_path << "\n";
    } else if (run->parsed()) {
      baroc::RunOutput output = baroc::cmd_run(config, fs::path(out_path));
      std::cout << "controller            mean_psnr  mean_fps  recovery  utility  stalls\n";
      for (const std::string& id : config.controllers) {
        const baroc::ControllerSummary& s = output.summaries.at(id);
        std::printf("%-20s  %9.3f  %8.2f  %8.4f  %7.4f  %6d\n", id.c_str(),
                    s.mean_psnr_db, s.mean_fps, s.mean_recovery_ratio,
                    s.mean_parity_utility, s.stall_count);
      }
      std::cout << "wrote per-second CSVs and summary.json to " << out_path << "\n";
    } else if (bench->parsed()) {
      baroc::BenchResult result = baroc::cmd_bench(config);
      std::cout << "solve_horizon: median "
                << baroc::util::format_double(result.median_ms) << " ms, std "
                << baroc::util::format_double(result.std_dev_ms) << " ms over "
                << result.iterations << " calls (horizon " << result.horizon << ")\n";
    }
  } catch (const baroc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

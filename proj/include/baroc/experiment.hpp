#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "baroc/controllers.hpp"
#include "baroc/simnet.hpp"
#include "baroc/synth.hpp"

namespace baroc {

inline const std::vector<std::string>& known_controller_ids() {
  static const std::vector<std::string> ids{
      "baroc",       "fbra_like",        "rfec_like",   "lightfec_ewma",
      "informer_vbr", "mtp_informer_cbr", "informer_cbr"};
  return ids;
}

struct GridSpec {
  double bandwidth_max_kbps = 15000.0;
  double bandwidth_interval_kbps = 500.0;
  double loss_interval = 0.02;

  Grid bandwidth_grid() const { return Grid(0.0, bandwidth_max_kbps, bandwidth_interval_kbps); }
  Grid loss_grid() const { return Grid(0.0, 1.0, loss_interval); }
};

struct BaselineParams {
  FbraParams fbra;
  RfecParams rfec;
  LightfecParams lightfec;
};

struct ExperimentConfig {
  int duration_s = 7200;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<std::string> controllers = known_controller_ids();

  int horizon = 5;
  QoeWeights qoe_weights{};
  std::string predictor = "bimodal";  // baroc's predictor: bimodal | ewma | oracle
  DecodePolicy decode_policy = DecodePolicy::kIndependentP;
  GridSpec grid{};

  std::optional<std::string> net_trace_path;    // otherwise synthesized per seed
  std::optional<std::string> video_trace_path;  // otherwise synthesized per seed
  std::optional<std::string> crf_defaults_path;
  std::optional<std::string> bimodal_model_path;

  RegimeParams regime{};
  RdParams rd{};
  BaselineParams baselines{};

  int train_duration_s = 36000;
  std::uint64_t train_seed = 9001;
  double cbr_psnr_penalty_db = 2.35;
  int bench_iterations = 1000;

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);
  std::string to_json_text() const;  // fully resolved
  void validate() const;             // throws ConfigError naming the field
};

struct ControllerSummary {
  std::string name;
  std::size_t seconds = 0;
  int stall_count = 0;
  double mean_psnr_db = 0.0;        // over non-stall seconds
  double mean_fps = 0.0;
  double mean_recovery_ratio = 0.0;
  double mean_parity_utility = 0.0;
  double mean_decision_time_ms = 0.0;
  std::vector<double> psnr_cdf;     // 101 quantile points each
  std::vector<double> fps_cdf;
  std::vector<double> recovery_cdf;
  std::vector<double> utility_cdf;
};

struct RunOutput {
  std::map<std::string, ControllerSummary> summaries;  // by controller id
  std::map<std::string, std::string> seconds_csv;      // by controller id
};

// Runs every configured controller over every seed with paired randomness,
// writes config.json, seconds_<controller>.csv and summary.json into
// `out_dir` (when given), and returns the aggregates.
RunOutput cmd_run(const ExperimentConfig& config,
                  const std::optional<std::filesystem::path>& out_dir);

struct BenchResult {
  double median_ms = 0.0;
  double std_dev_ms = 0.0;
  double mean_ms = 0.0;
  int iterations = 0;
  int horizon = 0;
};

// Times solve_horizon over realistic fitted inputs.
BenchResult cmd_bench(const ExperimentConfig& config);

// 101-point quantile CDF (0%, 1%, ..., 100%) of a metric sample.
std::vector<double> quantile_cdf(std::vector<double> values);

}  // namespace baroc

#include "baroc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "baroc/rng.hpp"
#include "baroc/util.hpp"

namespace baroc {

namespace {

using nlohmann::json;

constexpr std::uint64_t kTagNetTrace = 0xC1;
constexpr std::uint64_t kTagVideoTrace = 0xC2;

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("invalid value for field '") + key + "'");
  }
}

void read_field(const json& j, const char* key, std::optional<std::string>& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<std::string>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("invalid value for field '") + key + "'");
  }
}

RegimeParams regime_from_json(const json& j) {
  RegimeParams p;
  read_field(j, "p_anomaly_reallocation", p.p_anomaly_reallocation);
  read_field(j, "p_anomaly_normal", p.p_anomaly_normal);
  read_field(j, "bandwidth_mean_kbps", p.bandwidth_mean_kbps);
  read_field(j, "bandwidth_sigma_log", p.bandwidth_sigma_log);
  read_field(j, "anomaly_bandwidth_scale", p.anomaly_bandwidth_scale);
  read_field(j, "anomaly_bandwidth_sigma_log", p.anomaly_bandwidth_sigma_log);
  read_field(j, "loss_shift", p.loss_shift);
  read_field(j, "loss_exp_scale", p.loss_exp_scale);
  read_field(j, "anomaly_loss_mean_scale", p.anomaly_loss_mean_scale);
  read_field(j, "anomaly_loss_shift", p.anomaly_loss_shift);
  read_field(j, "latency_mean_ms", p.latency_mean_ms);
  read_field(j, "latency_sigma_log", p.latency_sigma_log);
  read_field(j, "anomaly_latency_scale", p.anomaly_latency_scale);
  read_field(j, "reallocation_schedule", p.label_rules.reallocation_schedule);
  read_field(j, "anomaly_threshold", p.label_rules.anomaly_threshold);
  return p;
}

json regime_to_json(const RegimeParams& p) {
  return json{{"p_anomaly_reallocation", p.p_anomaly_reallocation},
              {"p_anomaly_normal", p.p_anomaly_normal},
              {"bandwidth_mean_kbps", p.bandwidth_mean_kbps},
              {"bandwidth_sigma_log", p.bandwidth_sigma_log},
              {"anomaly_bandwidth_scale", p.anomaly_bandwidth_scale},
              {"anomaly_bandwidth_sigma_log", p.anomaly_bandwidth_sigma_log},
              {"loss_shift", p.loss_shift},
              {"loss_exp_scale", p.loss_exp_scale},
              {"anomaly_loss_mean_scale", p.anomaly_loss_mean_scale},
              {"anomaly_loss_shift", p.anomaly_loss_shift},
              {"latency_mean_ms", p.latency_mean_ms},
              {"latency_sigma_log", p.latency_sigma_log},
              {"anomaly_latency_scale", p.anomaly_latency_scale},
              {"reallocation_schedule", p.label_rules.reallocation_schedule},
              {"anomaly_threshold", p.label_rules.anomaly_threshold}};
}

RdParams rd_from_json(const json& j) {
  RdParams p;
  read_field(j, "base_bitrate_kbps", p.base_bitrate_kbps);
  read_field(j, "bitrate_halving_crf_step", p.bitrate_halving_crf_step);
  read_field(j, "vbr_sigma_log", p.vbr_sigma_log);
  read_field(j, "scene_calm_scale", p.scene_calm_scale);
  read_field(j, "scene_action_scale", p.scene_action_scale);
  read_field(j, "scene_stay_prob", p.scene_stay_prob);
  read_field(j, "action_psnr_drop_db", p.action_psnr_drop_db);
  read_field(j, "psnr_intercept_db", p.psnr_intercept_db);
  read_field(j, "psnr_slope_db_per_crf", p.psnr_slope_db_per_crf);
  read_field(j, "psnr_noise_std_db", p.psnr_noise_std_db);
  read_field(j, "intra_frame_weight", p.intra_frame_weight);
  return p;
}

json rd_to_json(const RdParams& p) {
  return json{{"base_bitrate_kbps", p.base_bitrate_kbps},
              {"bitrate_halving_crf_step", p.bitrate_halving_crf_step},
              {"vbr_sigma_log", p.vbr_sigma_log},
              {"scene_calm_scale", p.scene_calm_scale},
              {"scene_action_scale", p.scene_action_scale},
              {"scene_stay_prob", p.scene_stay_prob},
              {"action_psnr_drop_db", p.action_psnr_drop_db},
              {"psnr_intercept_db", p.psnr_intercept_db},
              {"psnr_slope_db_per_crf", p.psnr_slope_db_per_crf},
              {"psnr_noise_std_db", p.psnr_noise_std_db},
              {"intra_frame_weight", p.intra_frame_weight}};
}

BaselineParams baselines_from_json(const json& j) {
  BaselineParams p;
  if (j.contains("fbra")) {
    const json& f = j.at("fbra");
    read_field(f, "loss_threshold", p.fbra.loss_threshold);
    read_field(f, "down_after_lossy_s", p.fbra.down_after_lossy_s);
    read_field(f, "up_after_clean_s", p.fbra.up_after_clean_s);
    read_field(f, "probe_duration_s", p.fbra.probe_duration_s);
    read_field(f, "down_exit_clean_s", p.fbra.down_exit_clean_s);
    read_field(f, "initial_crf", p.fbra.initial_crf);
    read_field(f, "stay_fec_ratio", p.fbra.stay_fec_ratio);
    read_field(f, "down_fec_ratio", p.fbra.down_fec_ratio);
  }
  if (j.contains("rfec")) {
    const json& f = j.at("rfec");
    read_field(f, "video_budget_fraction", p.rfec.video_budget_fraction);
    read_field(f, "max_fec_ratio", p.rfec.max_fec_ratio);
    read_field(f, "ewma_alpha", p.rfec.ewma_alpha);
    read_field(f, "ewma_window_s", p.rfec.ewma_window_s);
  }
  if (j.contains("lightfec")) {
    const json& f = j.at("lightfec");
    read_field(f, "max_fec_ratio", p.lightfec.max_fec_ratio);
    read_field(f, "max_loss_estimate", p.lightfec.max_loss_estimate);
    read_field(f, "ewma_alpha", p.lightfec.ewma_alpha);
    read_field(f, "ewma_window_s", p.lightfec.ewma_window_s);
  }
  return p;
}

json baselines_to_json(const BaselineParams& p) {
  return json{{"fbra",
               {{"loss_threshold", p.fbra.loss_threshold},
                {"down_after_lossy_s", p.fbra.down_after_lossy_s},
                {"up_after_clean_s", p.fbra.up_after_clean_s},
                {"probe_duration_s", p.fbra.probe_duration_s},
                {"down_exit_clean_s", p.fbra.down_exit_clean_s},
                {"initial_crf", p.fbra.initial_crf},
                {"stay_fec_ratio", p.fbra.stay_fec_ratio},
                {"down_fec_ratio", p.fbra.down_fec_ratio}}},
              {"rfec",
               {{"video_budget_fraction", p.rfec.video_budget_fraction},
                {"max_fec_ratio", p.rfec.max_fec_ratio},
                {"ewma_alpha", p.rfec.ewma_alpha},
                {"ewma_window_s", p.rfec.ewma_window_s}}},
              {"lightfec",
               {{"max_fec_ratio", p.lightfec.max_fec_ratio},
                {"max_loss_estimate", p.lightfec.max_loss_estimate},
                {"ewma_alpha", p.lightfec.ewma_alpha},
                {"ewma_window_s", p.lightfec.ewma_window_s}}}};
}

// Per-controller inputs resolved once per seed.
struct SeedInputs {
  NetworkTrace net;
  VideoTrace video_vbr;
  VideoTrace video_cbr;
};

bool controller_uses_cbr(const std::string& id) {
  return id == "mtp_informer_cbr" || id == "informer_cbr";
}

struct RunContext {
  const ExperimentConfig* config = nullptr;
  const BimodalModel* bimodal = nullptr;
  const CrfDefaults* defaults = nullptr;
};

std::unique_ptr<Controller> make_controller(const std::string& id, const RunContext& ctx,
                                            const NetworkTrace& net_for_oracle) {
  const ExperimentConfig& cfg = *ctx.config;
  Grid bw = cfg.grid.bandwidth_grid();
  Grid loss = cfg.grid.loss_grid();
  auto make_baroc_predictor = [&]() -> std::shared_ptr<const Predictor> {
    if (cfg.predictor == "bimodal") {
      return std::make_shared<BimodalPredictor>(*ctx.bimodal);
    }
    if (cfg.predictor == "ewma") {
      return std::make_shared<EwmaPredictor>(PredictorConfig{}, bw, loss);
    }
    if (cfg.predictor == "oracle") {
      return std::make_shared<OraclePredictor>(net_for_oracle, bw, loss);
    }
    throw ConfigError("unknown predictor '" + cfg.predictor + "'");
  };

  if (id == "baroc") {
    return std::make_unique<BarocController>("baroc", make_baroc_predictor(), cfg.horizon,
                                             cfg.qoe_weights);
  }
  if (id == "fbra_like") {
    return std::make_unique<FbraController>(cfg.baselines.fbra);
  }
  if (id == "rfec_like") {
    return std::make_unique<RfecLikeController>(cfg.baselines.rfec);
  }
  if (id == "lightfec_ewma") {
    return std::make_unique<LightfecEwmaController>(cfg.baselines.lightfec);
  }
  if (id == "informer_vbr") {
    auto pred = std::make_shared<EwmaPredictor>(PredictorConfig{}, bw, loss);
    return std::make_unique<BarocController>("informer_vbr", pred, cfg.horizon,
                                             cfg.qoe_weights);
  }
  if (id == "mtp_informer_cbr") {
    auto inner = std::make_shared<BimodalPredictor>(*ctx.bimodal);
    auto pred = std::make_shared<PointCollapsePredictor>(inner, bw, loss);
    return std::make_unique<BarocController>("mtp_informer_cbr", pred, cfg.horizon,
                                             cfg.qoe_weights);
  }
  if (id == "informer_cbr") {
    auto pred = std::make_shared<EwmaPredictor>(PredictorConfig{}, bw, loss);
    return std::make_unique<BarocController>("informer_cbr", pred, cfg.horizon,
                                             cfg.qoe_weights);
  }
  throw ConfigError("unknown controller '" + id + "'");
}

void write_text(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  read_field(j, "duration_s", cfg.duration_s);
  read_field(j, "seeds", cfg.seeds);
  read_field(j, "controllers", cfg.controllers);
  read_field(j, "horizon", cfg.horizon);
  if (j.contains("qoe_weights")) {
    const json& q = j.at("qoe_weights");
    read_field(q, "frame_rate", cfg.qoe_weights.frame_rate);
    read_field(q, "quality", cfg.qoe_weights.quality);
    read_field(q, "smoothness", cfg.qoe_weights.smoothness);
  }
  read_field(j, "predictor", cfg.predictor);
  if (j.contains("decode_policy")) {
    std::string policy = j.at("decode_policy").get<std::string>();
    if (policy == "independent_p") {
      cfg.decode_policy = DecodePolicy::kIndependentP;
    } else if (policy == "cascade_after_loss") {
      cfg.decode_policy = DecodePolicy::kCascadeAfterLoss;
    } else {
      throw ConfigError("invalid value for field 'decode_policy'");
    }
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    read_field(g, "bandwidth_max_kbps", cfg.grid.bandwidth_max_kbps);
    read_field(g, "bandwidth_interval_kbps", cfg.grid.bandwidth_interval_kbps);
    read_field(g, "loss_interval", cfg.grid.loss_interval);
  }
  read_field(j, "net_trace", cfg.net_trace_path);
  read_field(j, "video_trace", cfg.video_trace_path);
  read_field(j, "crf_defaults", cfg.crf_defaults_path);
  read_field(j, "bimodal_model", cfg.bimodal_model_path);
  if (j.contains("regime")) cfg.regime = regime_from_json(j.at("regime"));
  if (j.contains("rd")) cfg.rd = rd_from_json(j.at("rd"));
  if (j.contains("baselines")) cfg.baselines = baselines_from_json(j.at("baselines"));
  read_field(j, "train_duration_s", cfg.train_duration_s);
  read_field(j, "train_seed", cfg.train_seed);
  read_field(j, "cbr_psnr_penalty_db", cfg.cbr_psnr_penalty_db);
  read_field(j, "bench_iterations", cfg.bench_iterations);
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string ExperimentConfig::to_json_text() const {
  json j{
      {"duration_s", duration_s},
      {"seeds", seeds},
      {"controllers", controllers},
      {"horizon", horizon},
      {"qoe_weights",
       {{"frame_rate", qoe_weights.frame_rate},
        {"quality", qoe_weights.quality},
        {"smoothness", qoe_weights.smoothness}}},
      {"predictor", predictor},
      {"decode_policy", decode_policy == DecodePolicy::kIndependentP
                            ? "independent_p"
                            : "cascade_after_loss"},
      {"grid",
       {{"bandwidth_max_kbps", grid.bandwidth_max_kbps},
        {"bandwidth_interval_kbps", grid.bandwidth_interval_kbps},
        {"loss_interval", grid.loss_interval}}},
      {"regime", regime_to_json(regime)},
      {"rd", rd_to_json(rd)},
      {"baselines", baselines_to_json(baselines)},
      {"train_duration_s", train_duration_s},
      {"train_seed", train_seed},
      {"cbr_psnr_penalty_db", cbr_psnr_penalty_db},
      {"bench_iterations", bench_iterations},
  };
  if (net_trace_path) j["net_trace"] = *net_trace_path;
  if (video_trace_path) j["video_trace"] = *video_trace_path;
  if (crf_defaults_path) j["crf_defaults"] = *crf_defaults_path;
  if (bimodal_model_path) j["bimodal_model"] = *bimodal_model_path;
  return j.dump(2) + "\n";
}

void ExperimentConfig::validate() const {
  if (duration_s < 1) throw ConfigError("field 'duration_s' must be at least 1");
  if (seeds.empty()) throw ConfigError("field 'seeds' must not be empty");
  if (controllers.empty()) throw ConfigError("field 'controllers' must not be empty");
  for (const std::string& id : controllers) {
    const auto& known = known_controller_ids();
    if (std::find(known.begin(), known.end(), id) == known.end()) {
      throw ConfigError("field 'controllers' has unknown id '" + id + "'");
    }
  }
  if (horizon < 1 || horizon > 10) throw ConfigError("field 'horizon' must lie in [1, 10]");
  if (predictor != "bimodal" && predictor != "ewma" && predictor != "oracle") {
    throw ConfigError("field 'predictor' must be bimodal, ewma, or oracle");
  }
  if (qoe_weights.frame_rate < 0.0 || qoe_weights.frame_rate > 1.0 ||
      qoe_weights.quality < 0.0 || qoe_weights.quality > 1.0 ||
      qoe_weights.smoothness < 0.0 || qoe_weights.smoothness > 1.0) {
    throw ConfigError("field 'qoe_weights' entries must lie in [0, 1]");
  }
  if (grid.bandwidth_max_kbps <= 0.0 || grid.bandwidth_interval_kbps <= 0.0 ||
      grid.loss_interval <= 0.0 || grid.loss_interval > 1.0) {
    throw ConfigError("field 'grid' parameters must be positive");
  }
  if (train_duration_s < 60) {
    throw ConfigError("field 'train_duration_s' must be at least 60");
  }
  if (bench_iterations < 1) {
    throw ConfigError("field 'bench_iterations' must be positive");
  }
  auto check_exists = [](const std::optional<std::string>& path, const char* field) {
    if (path && !std::filesystem::exists(*path)) {
      throw ConfigError(std::string("field '") + field + "' references a missing file: " +
                        *path);
    }
  };
  check_exists(net_trace_path, "net_trace");
  check_exists(video_trace_path, "video_trace");
  check_exists(crf_defaults_path, "crf_defaults");
  check_exists(bimodal_model_path, "bimodal_model");
}

std::vector<double> quantile_cdf(std::vector<double> values) {
  std::vector<double> cdf(101, 0.0);
  if (values.empty()) return cdf;
  std::sort(values.begin(), values.end());
  for (int q = 0; q <= 100; ++q) {
    double pos = static_cast<double>(q) / 100.0 * static_cast<double>(values.size() - 1);
    cdf[static_cast<std::size_t>(q)] = values[static_cast<std::size_t>(std::llround(pos))];
  }
  return cdf;
}

RunOutput cmd_run(const ExperimentConfig& config,
                  const std::optional<std::filesystem::path>& out_dir) {
  config.validate();

  CrfDefaults defaults = config.crf_defaults_path
                             ? CrfDefaults::load(*config.crf_defaults_path)
                             : CrfDefaults::builtin();

  // Fit (or load) the regime model once; it is shared across seeds.
  BimodalModel bimodal = [&] {
    if (config.bimodal_model_path) {
      std::ifstream in(*config.bimodal_model_path);
      std::ostringstream buf;
      buf << in.rdbuf();
      return BimodalModel::from_json_text(buf.str());
    }
    NetworkTrace train =
        gen_synthetic_trace(config.train_duration_s, config.train_seed, config.regime);
    BimodalFitOptions options;
    options.label_rules = config.regime.label_rules;
    options.bandwidth_grid = config.grid.bandwidth_grid();
    options.loss_grid = config.grid.loss_grid();
    return fit_bimodal(train, options);
  }();

  // Resolve per-seed inputs. Loaded traces are reused across seeds; synthetic
  // ones derive from the seed so runs stay paired across controllers.
  std::vector<SeedInputs> inputs;
  inputs.reserve(config.seeds.size());
  for (std::uint64_t seed : config.seeds) {
    SeedInputs in;
    if (config.net_trace_path) {
      in.net = label_regimes(load_network_trace(*config.net_trace_path),
                             config.regime.label_rules);
    } else {
      in.net = gen_synthetic_trace(config.duration_s, rng::derive(seed, kTagNetTrace),
                                   config.regime);
    }
    if (config.video_trace_path) {
      in.video_vbr = load_video_trace(*config.video_trace_path);
    } else {
      in.video_vbr = gen_synthetic_video(config.duration_s,
                                         rng::derive(seed, kTagVideoTrace), config.rd);
    }
    if (in.video_vbr.duration() != in.net.duration()) {
      in.video_vbr = tile_video(in.video_vbr, in.net.duration());
    }
    in.video_cbr = to_cbr(in.video_vbr, config.cbr_psnr_penalty_db);
    inputs.push_back(std::move(in));
  }

  RunContext ctx{&config, &bimodal, &defaults};

  struct RunResult {
    std::vector<SecondReport> reports;
    std::vector<double> decide_ms;
  };
  // Fan out runs; results are joined in fixed (controller, seed) order.
  std::vector<std::future<RunResult>> futures;
  for (const std::string& id : config.controllers) {
    for (std::size_t s = 0; s < config.seeds.size(); ++s) {
      futures.push_back(std::async(std::launch::async, [&, id, s]() -> RunResult {
        const SeedInputs& in = inputs[s];
        std::unique_ptr<Controller> controller = make_controller(id, ctx, in.net);
        RunResult result;
        RunOptions options;
        options.decode_policy = config.decode_policy;
        options.crf_defaults = defaults;
        options.decide_millis_out = &result.decide_ms;
        const VideoTrace& video =
            controller_uses_cbr(id) ? in.video_cbr : in.video_vbr;
        result.reports = run_experiment(in.net, video, *controller, config.seeds[s],
                                        options);
        return result;
      }));
    }
  }

  RunOutput output;
  std::size_t future_idx = 0;
  for (const std::string& id : config.controllers) {
    std::vector<SecondReport> pooled;
    std::vector<double> decide_ms;
    for (std::size_t s = 0; s < config.seeds.size(); ++s) {
      RunResult r = futures[future_idx++].get();
      pooled.insert(pooled.end(), r.reports.begin(), r.reports.end());
      decide_ms.insert(decide_ms.end(), r.decide_ms.begin(), r.decide_ms.end());
    }

    ControllerSummary summary;
    summary.name = id;
    summary.seconds = pooled.size();
    std::vector<double> psnr, fps, recovery, utility;
    for (const SecondReport& r : pooled) {
      if (r.stall) {
        ++summary.stall_count;
      } else {
        psnr.push_back(r.psnr_db);
      }
      fps.push_back(static_cast<double>(r.frames_delivered));
      recovery.push_back(r.recovery_ratio());
      utility.push_back(r.parity_utility());
    }
    auto mean = [](const std::vector<double>& v) {
      return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) /
                                   static_cast<double>(v.size());
    };
    summary.mean_psnr_db = mean(psnr);
    summary.mean_fps = mean(fps);
    summary.mean_recovery_ratio = mean(recovery);
    summary.mean_parity_utility = mean(utility);
    summary.mean_decision_time_ms = mean(decide_ms);
    summary.psnr_cdf = quantile_cdf(psnr);
    summary.fps_cdf = quantile_cdf(fps);
    summary.recovery_cdf = quantile_cdf(recovery);
    summary.utility_cdf = quantile_cdf(utility);

    output.seconds_csv[id] = second_reports_to_csv(pooled);
    output.summaries[id] = std::move(summary);
  }

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    write_text(*out_dir / "config.json", config.to_json_text());
    for (const auto& [id, csv] : output.seconds_csv) {
      write_text(*out_dir / ("seconds_" + id + ".csv"), csv);
    }
    json summary_json = json::object();
    for (const auto& [id, s] : output.summaries) {
      summary_json[id] = {
          {"seconds", s.seconds},
          {"stall_count", s.stall_count},
          {"mean_psnr_db", s.mean_psnr_db},
          {"mean_fps", s.mean_fps},
          {"mean_recovery_ratio", s.mean_recovery_ratio},
          {"mean_parity_utility", s.mean_parity_utility},
          {"mean_decision_time_ms", s.mean_decision_time_ms},
          {"psnr_cdf", s.psnr_cdf},
          {"fps_cdf", s.fps_cdf},
          {"recovery_cdf", s.recovery_cdf},
          {"utility_cdf", s.utility_cdf},
      };
    }
    write_text(*out_dir / "summary.json", summary_json.dump(2) + "\n");
  }
  return output;
}

BenchResult cmd_bench(const ExperimentConfig& config) {
  config.validate();

  // Realistic inputs: a fitted regime model, a bitrate model warmed from the
  // synthetic encoder, and predictions straddling reallocation seconds.
  NetworkTrace train = gen_synthetic_trace(std::max(config.train_duration_s, 3600),
                                           config.train_seed, config.regime);
  BimodalFitOptions fit_options;
  fit_options.label_rules = config.regime.label_rules;
  fit_options.bandwidth_grid = config.grid.bandwidth_grid();
  fit_options.loss_grid = config.grid.loss_grid();
  BimodalPredictor predictor(fit_bimodal(train, fit_options));

  NetworkTrace net = gen_synthetic_trace(600, config.train_seed + 1, config.regime);
  VideoTrace video = gen_synthetic_video(600, config.train_seed + 2, config.rd);
  CrfBitrateModel model;
  rng::Stream crf_picks(config.train_seed + 3);
  for (std::size_t t = 0; t < video.duration(); ++t) {
    int crf = kCrfLevels[crf_picks.next_below(kCrfLevels.size())];
    model.observe(crf, video.seconds[t].at_crf(crf).bitrate_kbps,
                  static_cast<std::int64_t>(t));
  }

  std::vector<double> times_ms;
  times_ms.reserve(static_cast<std::size_t>(config.bench_iterations));
  int prev_crf = kCrfLevels.back();
  for (int i = 0; i < config.bench_iterations; ++i) {
    std::size_t now = 60 + static_cast<std::size_t>(i) % 480;
    std::span<const NetworkSample> history(net.samples.data(), now);
    auto started = std::chrono::steady_clock::now();
    std::vector<PredictionStep> steps = predictor.predict(history, config.horizon);
    HorizonPlan plan = solve_horizon(steps, model, prev_crf, config.qoe_weights);
    times_ms.push_back(std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - started)
                           .count());
    prev_crf = plan.decisions.front().crf;
  }

  std::vector<double> sorted = times_ms;
  std::sort(sorted.begin(), sorted.end());
  BenchResult result;
  result.iterations = config.bench_iterations;
  result.horizon = config.horizon;
  result.median_ms = sorted[sorted.size() / 2];
  result.mean_ms = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
                   static_cast<double>(sorted.size());
  double var = 0.0;
  for (double t : times_ms) var += (t - result.mean_ms) * (t - result.mean_ms);
  result.std_dev_ms = std::sqrt(var / static_cast<double>(times_ms.size()));
  return result;
}

}  // namespace baroc

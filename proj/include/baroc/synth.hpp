#pragma once

#include <cstdint>
#include <vector>

#include "baroc/traces.hpp"

namespace baroc {

// Two-regime link model: per second the sampler draws either the normal or
// the anomalous regime, with the anomaly probability depending on whether
// the second is a reallocation second. Bandwidth and latency are log-normal;
// loss is a shifted exponential so that anomalous draws always clear the
// labeling threshold while normal draws rarely do.
struct RegimeParams {
  double p_anomaly_reallocation = 0.3073;
  double p_anomaly_normal = 0.0432;

  double bandwidth_mean_kbps = 10000.0;
  double bandwidth_sigma_log = 0.18;
  double anomaly_bandwidth_scale = 0.76;
  double anomaly_bandwidth_sigma_log = 0.30;

  // Normal-regime loss = loss_shift + Exp(loss_exp_scale).
  double loss_shift = 0.012;
  double loss_exp_scale = 0.0018;
  // Anomalous mean = anomaly_loss_mean_scale * normal mean; draws are shifted
  // by anomaly_loss_shift so every anomalous second is labelable.
  double anomaly_loss_mean_scale = 16.0;
  double anomaly_loss_shift = 0.02;

  double latency_mean_ms = 50.0;
  double latency_sigma_log = 0.15;
  double anomaly_latency_scale = 4.49;

  LabelRules label_rules{};

  double normal_loss_mean() const { return loss_shift + loss_exp_scale; }
  double anomaly_loss_mean() const { return anomaly_loss_mean_scale * normal_loss_mean(); }
};

struct SyntheticNetResult {
  NetworkTrace trace;                    // labeled
  std::vector<std::uint8_t> anomalous_regime;  // 1 iff the second drew the anomalous regime
};

NetworkTrace gen_synthetic_trace(int duration_s, std::uint64_t seed,
                                 const RegimeParams& params = {});
SyntheticNetResult gen_synthetic_trace_detailed(int duration_s, std::uint64_t seed,
                                                const RegimeParams& params = {});

// Rate-distortion model for the synthetic encoder: per-CRF mean bitrate
// halves every `bitrate_halving_crf_step` CRF steps, scenes follow a sticky
// two-state chain scaling the bitrate, and PSNR falls linearly in CRF with a
// shared per-second offset (so it stays monotone across the ladder).
struct RdParams {
  double base_bitrate_kbps = 14000.0;  // scene-neutral mean at the lowest CRF
  double bitrate_halving_crf_step = 6.0;
  double vbr_sigma_log = 0.13;  // per-second log-normal factor shared by all CRFs

  double scene_calm_scale = 0.85;
  double scene_action_scale = 1.30;
  double scene_stay_prob = 0.96;
  double action_psnr_drop_db = 1.0;

  double psnr_intercept_db = 55.0;
  double psnr_slope_db_per_crf = 0.45;
  double psnr_noise_std_db = 1.2;

  int intra_frame_weight = 4;  // I-frame size relative to a P-frame
};

VideoTrace gen_synthetic_video(int duration_s, std::uint64_t seed,
                               const RdParams& params = {});

// Constant-bitrate variant: per-CRF bitrate becomes the trace-wide mean (so
// total file size matches), with a flat PSNR penalty for the lost encoding
// efficiency.
VideoTrace to_cbr(const VideoTrace& video, double psnr_penalty_db = 2.35);

}  // namespace baroc

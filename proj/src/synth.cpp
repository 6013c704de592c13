#include "baroc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "baroc/rng.hpp"

namespace baroc {

namespace {

constexpr std::uint64_t kTagNet = 0xA1;
constexpr std::uint64_t kTagVideo = 0xA2;

void validate(const RegimeParams& p) {
  if (p.bandwidth_mean_kbps <= 0.0 || p.latency_mean_ms <= 0.0) {
    throw std::invalid_argument("regime means must be positive");
  }
  if (p.loss_shift < 0.0 || p.loss_exp_scale < 0.0) {
    throw std::invalid_argument("loss parameters must be non-negative");
  }
  if (p.p_anomaly_reallocation < 0.0 || p.p_anomaly_reallocation > 1.0 ||
      p.p_anomaly_normal < 0.0 || p.p_anomaly_normal > 1.0) {
    throw std::invalid_argument("anomaly probabilities must lie in [0, 1]");
  }
  if (p.anomaly_loss_mean() <= p.anomaly_loss_shift) {
    throw std::invalid_argument("anomalous loss mean must exceed its shift");
  }
}

}  // namespace

SyntheticNetResult gen_synthetic_trace_detailed(int duration_s, std::uint64_t seed,
                                                const RegimeParams& params) {
  if (duration_s < 1) throw std::invalid_argument("duration must be at least 1 second");
  validate(params);

  rng::Stream stream(rng::derive(seed, kTagNet));
  SyntheticNetResult result;
  result.trace.samples.reserve(static_cast<std::size_t>(duration_s));
  result.anomalous_regime.reserve(static_cast<std::size_t>(duration_s));

  for (int t = 0; t < duration_s; ++t) {
    bool realloc = is_reallocation_second(t, params.label_rules.reallocation_schedule);
    double p_anom = realloc ? params.p_anomaly_reallocation : params.p_anomaly_normal;
    bool anomalous = stream.next_unit() < p_anom;

    NetworkSample s;
    s.t = t;
    if (anomalous) {
      s.bandwidth_kbps = stream.next_lognormal(
          params.bandwidth_mean_kbps * params.anomaly_bandwidth_scale,
          params.anomaly_bandwidth_sigma_log);
      s.loss_ratio = params.anomaly_loss_shift +
                     stream.next_exponential(params.anomaly_loss_mean() -
                                             params.anomaly_loss_shift);
      s.latency_ms = stream.next_lognormal(
          params.latency_mean_ms * params.anomaly_latency_scale, params.latency_sigma_log);
    } else {
      s.bandwidth_kbps =
          stream.next_lognormal(params.bandwidth_mean_kbps, params.bandwidth_sigma_log);
      s.loss_ratio = params.loss_shift + stream.next_exponential(params.loss_exp_scale);
      s.latency_ms = stream.next_lognormal(params.latency_mean_ms, params.latency_sigma_log);
    }
    s.loss_ratio = std::min(s.loss_ratio, 1.0);
    result.trace.samples.push_back(s);
    result.anomalous_regime.push_back(anomalous ? 1 : 0);
  }
  result.trace = label_regimes(std::move(result.trace), params.label_rules);
  return result;
}

NetworkTrace gen_synthetic_trace(int duration_s, std::uint64_t seed,
                                 const RegimeParams& params) {
  return gen_synthetic_trace_detailed(duration_s, seed, params).trace;
}

VideoTrace gen_synthetic_video(int duration_s, std::uint64_t seed, const RdParams& params) {
  if (duration_s < 1) throw std::invalid_argument("duration must be at least 1 second");
  if (params.base_bitrate_kbps <= 0.0) {
    throw std::invalid_argument("base bitrate must be positive");
  }

  rng::Stream stream(rng::derive(seed, kTagVideo));
  VideoTrace trace;
  trace.seconds.reserve(static_cast<std::size_t>(duration_s));

  bool action_scene = stream.next_unit() < 0.5;
  for (int t = 0; t < duration_s; ++t) {
    if (stream.next_unit() > params.scene_stay_prob) action_scene = !action_scene;
    double scene_scale = action_scene ? params.scene_action_scale : params.scene_calm_scale;
    double vbr_factor =
        std::exp(stream.next_normal(-0.5 * params.vbr_sigma_log * params.vbr_sigma_log,
                                    params.vbr_sigma_log));
    double psnr_offset = stream.next_normal(0.0, params.psnr_noise_std_db) -
                         (action_scene ? params.action_psnr_drop_db : 0.0);

    VideoSecond sec;
    sec.t = t;
    for (std::size_t c = 0; c < kCrfLevels.size(); ++c) {
      int crf = kCrfLevels[c];
      double mean = params.base_bitrate_kbps *
                    std::exp2(-(crf - kCrfLevels.front()) / params.bitrate_halving_crf_step);
      CrfEncoding enc;
      enc.bitrate_kbps = mean * scene_scale * vbr_factor;
      enc.psnr_db =
          params.psnr_intercept_db - params.psnr_slope_db_per_crf * crf + psnr_offset;

      // GOP: frame 0 is the I-frame at intra_frame_weight P-frame sizes; the
      // sizes sum exactly to the recorded bitrate.
      std::int64_t total_bits = std::llround(enc.bitrate_kbps * 1000.0);
      std::int64_t weight_units = params.intra_frame_weight + (kFramesPerSecond - 1);
      std::int64_t p_bits = total_bits / weight_units;
      enc.frame_sizes_bits.assign(kFramesPerSecond, p_bits);
      enc.frame_sizes_bits[0] = total_bits - p_bits * (kFramesPerSecond - 1);
      enc.frame_types.assign(kFramesPerSecond, FrameType::kPredicted);
      enc.frame_types[0] = FrameType::kIntra;
      sec.encodings[c] = std::move(enc);
    }
    trace.seconds.push_back(std::move(sec));
  }
  return trace;
}

VideoTrace to_cbr(const VideoTrace& video, double psnr_penalty_db) {
  if (video.seconds.empty()) {
    throw std::invalid_argument("cannot convert an empty video trace");
  }
  std::array<double, kCrfLevels.size()> mean_bitrate{};
  for (const VideoSecond& sec : video.seconds) {
    for (std::size_t c = 0; c < kCrfLevels.size(); ++c) {
      mean_bitrate[c] += sec.encodings[c].bitrate_kbps;
    }
  }
  for (double& m : mean_bitrate) m /= static_cast<double>(video.seconds.size());

  VideoTrace out;
  out.seconds.reserve(video.seconds.size());
  for (const VideoSecond& sec : video.seconds) {
    VideoSecond cbr_sec;
    cbr_sec.t = sec.t;
    for (std::size_t c = 0; c < kCrfLevels.size(); ++c) {
      CrfEncoding enc;
      enc.bitrate_kbps = mean_bitrate[c];
      enc.psnr_db = sec.encodings[c].psnr_db - psnr_penalty_db;
      std::int64_t total_bits = std::llround(enc.bitrate_kbps * 1000.0);
      std::int64_t weight_units = 4 + (kFramesPerSecond - 1);
      std::int64_t p_bits = total_bits / weight_units;
      enc.frame_sizes_bits.assign(kFramesPerSecond, p_bits);
      enc.frame_sizes_bits[0] = total_bits - p_bits * (kFramesPerSecond - 1);
      enc.frame_types.assign(kFramesPerSecond, FrameType::kPredicted);
      enc.frame_types[0] = FrameType::kIntra;
      cbr_sec.encodings[c] = std::move(enc);
    }
    out.seconds.push_back(std::move(cbr_sec));
  }
  return out;
}

}  // namespace baroc

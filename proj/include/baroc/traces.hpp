#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace baroc {

// One second of measured link state. The reallocation/anomaly flags are
// derived by label_regimes; loaders leave them false.
struct NetworkSample {
  std::int64_t t = 0;
  double bandwidth_kbps = 0.0;
  double loss_ratio = 0.0;
  double latency_ms = 0.0;
  bool is_reallocation = false;
  bool is_anomaly = false;
};

struct NetworkTrace {
  std::vector<NetworkSample> samples;
  bool labeled = false;

  std::size_t duration() const { return samples.size(); }
};

struct LabelRules {
  // Seconds-within-minute at which the uplink is rescheduled.
  std::vector<int> reallocation_schedule{12, 27, 42, 57};
  // Inclusive loss-ratio threshold marking a second as anomalous.
  double anomaly_threshold = 0.02;
};

bool is_reallocation_second(std::int64_t t, const std::vector<int>& schedule);

// Sets is_reallocation from the schedule and is_anomaly from the loss
// threshold (inclusive). Idempotent.
NetworkTrace label_regimes(NetworkTrace trace, const LabelRules& rules = {});

// CSV schema: header `t,bandwidth_kbps,loss_ratio,latency_ms`, one row per
// second, LF line endings. Loading validates row syntax, value ranges and
// strictly increasing timestamps; labeling is not applied.
std::string network_trace_to_csv(const NetworkTrace& trace);
NetworkTrace network_trace_from_csv(std::string_view csv);
void save_network_trace(const NetworkTrace& trace, const std::filesystem::path& path);
NetworkTrace load_network_trace(const std::filesystem::path& path);

// Quality ladder used throughout: lower CRF = higher quality and bitrate.
inline constexpr std::array<int, 6> kCrfLevels{26, 31, 36, 41, 46, 51};
inline constexpr int kCrfMax = 51;
inline constexpr int kFramesPerSecond = 60;

// Index of `crf` in kCrfLevels; throws if the value is not a ladder level.
std::size_t crf_index(int crf);

enum class FrameType : std::uint8_t { kIntra, kPredicted };

// Per-second encoder output for one CRF level.
struct CrfEncoding {
  double bitrate_kbps = 0.0;
  double psnr_db = 0.0;
  std::vector<std::int64_t> frame_sizes_bits;  // kFramesPerSecond entries
  std::vector<FrameType> frame_types;          // frame 0 is the I-frame
};

struct VideoSecond {
  std::int64_t t = 0;
  std::array<CrfEncoding, kCrfLevels.size()> encodings;  // kCrfLevels order

  const CrfEncoding& at_crf(int crf) const { return encodings[crf_index(crf)]; }
};

struct VideoTrace {
  std::vector<VideoSecond> seconds;

  std::size_t duration() const { return seconds.size(); }
};

// CSV schema: header `t,crf,bitrate_kbps,psnr_db,frame_sizes_bits`; one row
// per (second, CRF); frame_sizes_bits is a `;`-separated list of 60 sizes.
std::string video_trace_to_csv(const VideoTrace& trace);
VideoTrace video_trace_from_csv(std::string_view csv);
void save_video_trace(const VideoTrace& trace, const std::filesystem::path& path);
VideoTrace load_video_trace(const std::filesystem::path& path);

// Repeats (or truncates) the video to cover `duration_s` seconds, re-indexing
// timestamps from zero.
VideoTrace tile_video(const VideoTrace& video, std::size_t duration_s);

}  // namespace baroc

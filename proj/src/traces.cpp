#include "baroc/traces.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "baroc/util.hpp"

namespace baroc {

namespace {

constexpr std::string_view kNetworkHeader = "t,bandwidth_kbps,loss_ratio,latency_ms";
constexpr std::string_view kVideoHeader = "t,crf,bitrate_kbps,psnr_db,frame_sizes_bits";

[[noreturn]] void fail_line(std::size_t line_no, const std::string& message) {
  throw std::runtime_error("line " + std::to_string(line_no) + ": " + message);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << contents;
}

void validate_encoding(const CrfEncoding& enc, std::size_t line_no) {
  if (enc.frame_sizes_bits.size() != static_cast<std::size_t>(kFramesPerSecond)) {
    fail_line(line_no, "expected " + std::to_string(kFramesPerSecond) + " frame sizes");
  }
  std::int64_t sum = 0;
  for (std::int64_t s : enc.frame_sizes_bits) {
    if (s < 0) fail_line(line_no, "negative frame size");
    sum += s;
  }
  double total_kbit = static_cast<double>(sum) / 1000.0;
  if (enc.bitrate_kbps > 0.0 &&
      std::abs(total_kbit - enc.bitrate_kbps) > 0.01 * enc.bitrate_kbps) {
    fail_line(line_no, "frame sizes disagree with bitrate by more than 1%");
  }
}

}  // namespace

bool is_reallocation_second(std::int64_t t, const std::vector<int>& schedule) {
  int within_minute = static_cast<int>(((t % 60) + 60) % 60);
  return std::find(schedule.begin(), schedule.end(), within_minute) != schedule.end();
}

NetworkTrace label_regimes(NetworkTrace trace, const LabelRules& rules) {
  if (trace.samples.empty()) {
    throw std::invalid_argument("cannot label an empty trace");
  }
  if (!(rules.anomaly_threshold > 0.0 && rules.anomaly_threshold < 1.0)) {
    throw std::invalid_argument("anomaly threshold must lie in (0, 1)");
  }
  for (NetworkSample& s : trace.samples) {
    s.is_reallocation = is_reallocation_second(s.t, rules.reallocation_schedule);
    s.is_anomaly = s.loss_ratio >= rules.anomaly_threshold;
  }
  trace.labeled = true;
  return trace;
}

std::string network_trace_to_csv(const NetworkTrace& trace) {
  std::string out(kNetworkHeader);
  out += '\n';
  for (const NetworkSample& s : trace.samples) {
    out += std::to_string(s.t);
    out += ',';
    out += util::format_double(s.bandwidth_kbps);
    out += ',';
    out += util::format_double(s.loss_ratio);
    out += ',';
    out += util::format_double(s.latency_ms);
    out += '\n';
  }
  return out;
}

NetworkTrace network_trace_from_csv(std::string_view csv) {
  auto lines = util::split(csv, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines[0] != kNetworkHeader) {
    throw std::runtime_error("line 1: expected header '" + std::string(kNetworkHeader) + "'");
  }
  NetworkTrace trace;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::size_t line_no = i + 1;
    auto fields = util::split(lines[i], ',');
    if (fields.size() != 4) fail_line(line_no, "expected 4 fields");
    std::string ctx = "line " + std::to_string(line_no);
    NetworkSample s;
    s.t = util::parse_int(fields[0], ctx);
    s.bandwidth_kbps = util::parse_double(fields[1], ctx);
    s.loss_ratio = util::parse_double(fields[2], ctx);
    s.latency_ms = util::parse_double(fields[3], ctx);
    if (s.bandwidth_kbps < 0.0) fail_line(line_no, "bandwidth must be non-negative");
    if (s.loss_ratio < 0.0 || s.loss_ratio > 1.0) {
      fail_line(line_no, "loss_ratio must lie in [0, 1]");
    }
    if (s.latency_ms < 0.0) fail_line(line_no, "latency must be non-negative");
    if (!trace.samples.empty() && s.t <= trace.samples.back().t) {
      fail_line(line_no, "timestamps must be strictly increasing");
    }
    trace.samples.push_back(s);
  }
  return trace;
}

void save_network_trace(const NetworkTrace& trace, const std::filesystem::path& path) {
  write_file(path, network_trace_to_csv(trace));
}

NetworkTrace load_network_trace(const std::filesystem::path& path) {
  return network_trace_from_csv(read_file(path));
}

std::size_t crf_index(int crf) {
  for (std::size_t i = 0; i < kCrfLevels.size(); ++i) {
    if (kCrfLevels[i] == crf) return i;
  }
  throw std::invalid_argument("unknown CRF level " + std::to_string(crf));
}

std::string video_trace_to_csv(const VideoTrace& trace) {
  std::string out(kVideoHeader);
  out += '\n';
  for (const VideoSecond& sec : trace.seconds) {
    for (std::size_t c = 0; c < kCrfLevels.size(); ++c) {
      const CrfEncoding& enc = sec.encodings[c];
      out += std::to_string(sec.t);
      out += ',';
      out += std::to_string(kCrfLevels[c]);
      out += ',';
      out += util::format_double(enc.bitrate_kbps);
      out += ',';
      out += util::format_double(enc.psnr_db);
      out += ',';
      for (std::size_t f = 0; f < enc.frame_sizes_bits.size(); ++f) {
        if (f > 0) out += ';';
        out += std::to_string(enc.frame_sizes_bits[f]);
      }
      out += '\n';
    }
  }
  return out;
}

VideoTrace video_trace_from_csv(std::string_view csv) {
  auto lines = util::split(csv, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines[0] != kVideoHeader) {
    throw std::runtime_error("line 1: expected header '" + std::string(kVideoHeader) + "'");
  }
  VideoTrace trace;
  std::array<bool, kCrfLevels.size()> seen{};
  auto finish_second = [&](std::size_t line_no) {
    if (trace.seconds.empty()) return;
    for (std::size_t c = 0; c < kCrfLevels.size(); ++c) {
      if (!seen[c]) {
        fail_line(line_no, "second " + std::to_string(trace.seconds.back().t) +
                               " is missing CRF " + std::to_string(kCrfLevels[c]));
      }
    }
    const VideoSecond& sec = trace.seconds.back();
    for (std::size_t c = 1; c < kCrfLevels.size(); ++c) {
      if (sec.encodings[c].psnr_db > sec.encodings[c - 1].psnr_db) {
        fail_line(line_no, "psnr must be non-increasing in CRF");
      }
    }
    seen.fill(false);
  };
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::size_t line_no = i + 1;
    auto fields = util::split(lines[i], ',');
    if (fields.size() != 5) fail_line(line_no, "expected 5 fields");
    std::string ctx = "line " + std::to_string(line_no);
    std::int64_t t = util::parse_int(fields[0], ctx);
    std::int64_t crf = util::parse_int(fields[1], ctx);
    std::size_t c;
    try {
      c = crf_index(static_cast<int>(crf));
    } catch (const std::invalid_argument&) {
      fail_line(line_no, "unknown CRF level " + std::to_string(crf));
    }
    if (trace.seconds.empty() || trace.seconds.back().t != t) {
      if (!trace.seconds.empty() && t <= trace.seconds.back().t) {
        fail_line(line_no, "timestamps must be strictly increasing");
      }
      finish_second(line_no);
      trace.seconds.push_back(VideoSecond{.t = t, .encodings = {}});
    }
    if (seen[c]) fail_line(line_no, "duplicate CRF for second " + std::to_string(t));
    seen[c] = true;
    CrfEncoding enc;
    enc.bitrate_kbps = util::parse_double(fields[2], ctx);
    enc.psnr_db = util::parse_double(fields[3], ctx);
    if (enc.bitrate_kbps <= 0.0) fail_line(line_no, "bitrate must be positive");
    auto sizes = util::split(fields[4], ';');
    enc.frame_sizes_bits.reserve(sizes.size());
    for (auto part : sizes) {
      enc.frame_sizes_bits.push_back(util::parse_int(part, ctx));
    }
    enc.frame_types.assign(enc.frame_sizes_bits.size(), FrameType::kPredicted);
    if (!enc.frame_types.empty()) enc.frame_types[0] = FrameType::kIntra;
    validate_encoding(enc, line_no);
    trace.seconds.back().encodings[c] = std::move(enc);
  }
  finish_second(lines.size() + 1);
  return trace;
}

void save_video_trace(const VideoTrace& trace, const std::filesystem::path& path) {
  write_file(path, video_trace_to_csv(trace));
}

VideoTrace load_video_trace(const std::filesystem::path& path) {
  return video_trace_from_csv(read_file(path));
}

VideoTrace tile_video(const VideoTrace& video, std::size_t duration_s) {
  if (video.seconds.empty()) {
    throw std::invalid_argument("cannot tile an empty video trace");
  }
  VideoTrace out;
  out.seconds.reserve(duration_s);
  for (std::size_t i = 0; i < duration_s; ++i) {
    VideoSecond sec = video.seconds[i % video.seconds.size()];
    sec.t = static_cast<std::int64_t>(i);
    out.seconds.push_back(std::move(sec));
  }
  return out;
}

}  // namespace baroc

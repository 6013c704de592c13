#include "baroc/simnet.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "baroc/rng.hpp"
#include "baroc/util.hpp"

namespace baroc {

namespace {

constexpr std::uint64_t kTagTrim = 0xB1;
constexpr std::uint64_t kTagShed = 0xB2;
constexpr std::uint64_t kTagLoss = 0xB3;
constexpr std::uint64_t kPacketKeyStride = 8192;  // packets per frame fit well below this

}  // namespace

int packetize(std::int64_t frame_size_bits, int mtu_bits) {
  if (frame_size_bits < 0) throw std::invalid_argument("frame size must be non-negative");
  if (frame_size_bits == 0) return 0;
  return static_cast<int>((frame_size_bits + mtu_bits - 1) / mtu_bits);
}

bool frame_recoverable(int arrived_total, int data_packets) {
  return arrived_total >= data_packets;
}

int decode_delivered(std::span<const FrameOutcome> outcomes, DecodePolicy policy) {
  if (outcomes.empty()) return 0;
  bool intra_delivered = false;
  for (const FrameOutcome& f : outcomes) {
    if (f.type == FrameType::kIntra) {
      intra_delivered = f.delivered;
      break;
    }
  }
  if (!intra_delivered) return 0;

  int delivered = 0;
  for (const FrameOutcome& f : outcomes) {
    if (!f.delivered) {
      if (policy == DecodePolicy::kCascadeAfterLoss) break;
      continue;
    }
    ++delivered;
  }
  return delivered;
}

std::string second_report_csv_header() {
  return "t,crf,gamma,alpha,sent_data,sent_parity,lost,recovered,frames_delivered,"
         "psnr_db,stall";
}

std::string second_reports_to_csv(std::span<const SecondReport> reports) {
  std::string out = second_report_csv_header();
  out += '\n';
  for (const SecondReport& r : reports) {
    out += std::to_string(r.t);
    out += ',';
    out += std::to_string(r.decision.crf);
    out += ',';
    out += std::to_string(r.decision.frame_rate);
    out += ',';
    out += util::format_double(r.decision.fec_ratio);
    out += ',';
    out += std::to_string(r.sent_data);
    out += ',';
    out += std::to_string(r.sent_parity);
    out += ',';
    out += std::to_string(r.lost);
    out += ',';
    out += std::to_string(r.recovered);
    out += ',';
    out += std::to_string(r.frames_delivered);
    out += ',';
    out += util::format_double(r.psnr_db);
    out += ',';
    out += r.stall ? '1' : '0';
    out += '\n';
  }
  return out;
}

namespace detail {

std::vector<int> trim_frame_indices(int frame_rate, std::uint64_t trim_seed) {
  if (frame_rate <= 0) return {};
  std::vector<int> kept{0};  // the I-frame always stays
  if (frame_rate == 1) return kept;

  std::vector<int> p_frames(kFramesPerSecond - 1);
  std::iota(p_frames.begin(), p_frames.end(), 1);
  rng::Stream stream(trim_seed);
  for (std::size_t i = p_frames.size(); i-- > 1;) {
    std::size_t j = stream.next_below(static_cast<std::uint32_t>(i + 1));
    std::swap(p_frames[i], p_frames[j]);
  }
  p_frames.resize(static_cast<std::size_t>(frame_rate - 1));
  std::sort(p_frames.begin(), p_frames.end());
  kept.insert(kept.end(), p_frames.begin(), p_frames.end());
  return kept;
}

void shed_frames(std::vector<FramePackets>& frames, double bandwidth_kbit,
                 double mtu_kbit, std::uint64_t shed_seed) {
  auto total_kbit = [&] {
    double packets = 0.0;
    for (const FramePackets& f : frames) packets += f.total_packets();
    return packets * mtu_kbit;
  };
  if (total_kbit() <= bandwidth_kbit) return;

  // Shedding along a seeded priority permutation of the full GOP index space
  // is distributed like repeated uniform removal, and larger overloads shed
  // supersets of smaller ones.
  std::vector<int> priority(kFramesPerSecond);
  std::iota(priority.begin(), priority.end(), 0);
  rng::Stream stream(shed_seed);
  for (std::size_t i = priority.size(); i-- > 1;) {
    std::size_t j = stream.next_below(static_cast<std::uint32_t>(i + 1));
    std::swap(priority[i], priority[j]);
  }

  auto shed_one = [&](bool intra_allowed) {
    for (int idx : priority) {
      auto it = std::find_if(frames.begin(), frames.end(), [&](const FramePackets& f) {
        return f.frame_index == idx &&
               (intra_allowed || f.type != FrameType::kIntra);
      });
      if (it != frames.end()) {
        frames.erase(it);
        return true;
      }
    }
    return false;
  };

  while (!frames.empty() && total_kbit() > bandwidth_kbit) {
    if (!shed_one(/*intra_allowed=*/false)) shed_one(/*intra_allowed=*/true);
  }
}

std::vector<FrameOutcome> transmit_and_recover(std::span<const FramePackets> frames,
                                               double loss_ratio, std::uint64_t seed,
                                               std::int64_t t) {
  if (loss_ratio < 0.0 || loss_ratio > 1.0) {
    throw std::invalid_argument("loss ratio must lie in [0, 1]");
  }
  std::uint64_t loss_root = rng::derive(rng::derive(seed, static_cast<std::uint64_t>(t)),
                                        kTagLoss);
  std::vector<FrameOutcome> outcomes;
  outcomes.reserve(frames.size());
  for (const FramePackets& f : frames) {
    FrameOutcome out;
    out.frame_index = f.frame_index;
    out.type = f.type;
    out.data_packets = f.data_packets;
    out.parity_packets = f.parity_packets;
    for (int j = 0; j < f.total_packets(); ++j) {
      std::uint64_t key =
          static_cast<std::uint64_t>(f.frame_index) * kPacketKeyStride +
          static_cast<std::uint64_t>(j);
      bool lost = rng::to_unit(rng::derive(loss_root, key)) < loss_ratio;
      if (lost) {
        if (j < f.data_packets) {
          ++out.lost_data;
        } else {
          ++out.lost_parity;
        }
      }
    }
    int arrived = f.total_packets() - out.lost_data - out.lost_parity;
    out.delivered = frame_recoverable(arrived, f.data_packets);
    out.recovered = out.delivered ? out.lost_data : 0;
    outcomes.push_back(out);
  }
  return outcomes;
}

}  // namespace detail

std::vector<SecondReport> run_experiment(const NetworkTrace& net, const VideoTrace& video,
                                         Controller& controller, std::uint64_t seed,
                                         const RunOptions& options) {
  if (net.duration() != video.duration()) {
    throw std::invalid_argument("network and video traces must cover the same duration");
  }
  if (net.samples.empty()) throw std::invalid_argument("traces must not be empty");

  CrfBitrateModel model(options.crf_defaults);
  double mtu_kbit = static_cast<double>(options.mtu_bits) / 1000.0;
  int prev_crf = options.initial_crf;
  std::vector<SecondReport> reports;
  reports.reserve(net.duration());

  for (std::size_t i = 0; i < net.samples.size(); ++i) {
    const NetworkSample& link = net.samples[i];
    const VideoSecond& content = video.seconds[i];
    std::span<const NetworkSample> history(net.samples.data(), i);

    auto started = std::chrono::steady_clock::now();
    Decision decision = controller.decide(history, model, prev_crf);
    double decide_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                  started)
            .count();
    if (options.decide_millis_out != nullptr) {
      options.decide_millis_out->push_back(decide_ms);
    }

    const CrfEncoding& encoding = content.at_crf(decision.crf);
    std::uint64_t second_seed = rng::derive(seed, static_cast<std::uint64_t>(link.t));

    std::vector<FramePackets> frames;
    for (int idx :
         detail::trim_frame_indices(decision.frame_rate,
                                    rng::derive(second_seed, kTagTrim))) {
      int data = packetize(encoding.frame_sizes_bits[static_cast<std::size_t>(idx)],
                           options.mtu_bits);
      if (data == 0) continue;
      frames.push_back(FramePackets{
          .frame_index = idx,
          .type = encoding.frame_types[static_cast<std::size_t>(idx)],
          .data_packets = data,
          .parity_packets = parity_packet_count(decision.fec_ratio, data),
      });
    }
    detail::shed_frames(frames, link.bandwidth_kbps, mtu_kbit,
                        rng::derive(second_seed, kTagShed));

    std::vector<FrameOutcome> outcomes =
        detail::transmit_and_recover(frames, link.loss_ratio, seed, link.t);

    SecondReport report;
    report.t = link.t;
    report.decision = decision;
    for (const FrameOutcome& f : outcomes) {
      report.sent_data += f.data_packets;
      report.sent_parity += f.parity_packets;
      report.lost += f.lost_data + f.lost_parity;
      report.lost_data += f.lost_data;
      report.recovered += f.recovered;
    }
    report.frames_offered = static_cast<int>(outcomes.size());
    report.frames_delivered = decode_delivered(outcomes, options.decode_policy);
    if (report.frames_delivered == 0 || decision.frame_rate == 0) {
      report.stall = true;
      report.psnr_db = 0.0;
    } else {
      report.psnr_db = encoding.psnr_db * static_cast<double>(report.frames_delivered) /
                       static_cast<double>(decision.frame_rate);
    }
    reports.push_back(report);

    model.observe(decision.crf, encoding.bitrate_kbps, link.t);
    controller.observe(report);
    prev_crf = decision.crf;
  }
  return reports;
}

}  // namespace baroc

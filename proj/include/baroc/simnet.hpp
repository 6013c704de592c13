#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "baroc/crf_model.hpp"
#include "baroc/scheduler.hpp"
#include "baroc/traces.hpp"

namespace baroc {

// Packetized frame queued for one second of transmission. frame_index is the
// position in the original 60-frame GOP, which keys the per-packet loss
// draws so runs with different parity counts stay coupled.
struct FramePackets {
  int frame_index = 0;
  FrameType type = FrameType::kPredicted;
  int data_packets = 0;
  int parity_packets = 0;

  int total_packets() const { return data_packets + parity_packets; }
};

// Data packets for a frame: ceil(size / MTU); empty frames packetize to 0.
int packetize(std::int64_t frame_size_bits, int mtu_bits = kMtuBits);

// Delivery outcome for one transmitted frame.
struct FrameOutcome {
  int frame_index = 0;
  FrameType type = FrameType::kPredicted;
  int data_packets = 0;
  int parity_packets = 0;
  int lost_data = 0;
  int lost_parity = 0;
  bool delivered = false;   // enough packets arrived to reconstruct
  int recovered = 0;        // lost data packets repaired by parity
};

// Erasure-code recovery rule: a frame reconstructs iff the arrivals across
// data and parity reach the original data packet count.
bool frame_recoverable(int arrived_total, int data_packets);

enum class DecodePolicy {
  kIndependentP,     // losing a P-frame costs only that frame
  kCascadeAfterLoss  // every frame after the first undelivered one is void
};

// Frames counted as decodable: the I-frame gates its whole second.
int decode_delivered(std::span<const FrameOutcome> outcomes, DecodePolicy policy);

// Per-second accounting written to the seconds CSV.
struct SecondReport {
  std::int64_t t = 0;
  int sent_data = 0;
  int sent_parity = 0;
  int lost = 0;               // all lost packets, data and parity
  int lost_data = 0;          // the subset recovery can act on
  int recovered = 0;
  int frames_offered = 0;     // frames transmitted after trimming and shedding
  int frames_delivered = 0;   // frames decodable after recovery
  double psnr_db = 0.0;       // quality-weighted contribution; 0 on stall
  bool stall = false;         // no decodable frames this second
  Decision decision;

  // Fraction of lost video packets that were reconstructed. Parity losses
  // are overhead, not content, so they stay out of the denominator.
  double recovery_ratio() const {
    return lost_data == 0
               ? 1.0
               : static_cast<double>(recovered) / static_cast<double>(lost_data);
  }
  double parity_utility() const {
    return sent_parity == 0
               ? 0.0
               : static_cast<double>(recovered) / static_cast<double>(sent_parity);
  }
};

// CSV schema for per-second reports.
std::string second_reports_to_csv(std::span<const SecondReport> reports);
std::string second_report_csv_header();

// Per-second controller contract. decide() sees only past samples; observe()
// receives the realized accounting for feedback-driven strategies.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual Decision decide(std::span<const NetworkSample> history, CrfBitrateModel& model,
                          int prev_crf) = 0;
  virtual void observe(const SecondReport& /*report*/) {}
  virtual std::string name() const = 0;
};

struct RunOptions {
  DecodePolicy decode_policy = DecodePolicy::kIndependentP;
  int initial_crf = kCrfMax;
  int mtu_bits = kMtuBits;
  CrfDefaults crf_defaults = CrfDefaults::builtin();
  // Filled per second with the controller's decision latency.
  std::vector<double>* decide_millis_out = nullptr;
};

// Deterministic second-by-second delivery loop. Every random draw derives
// from (seed, second, purpose[, frame, packet]), so results never depend on
// decision history and equal packet layouts see equal loss randomness.
std::vector<SecondReport> run_experiment(const NetworkTrace& net, const VideoTrace& video,
                                         Controller& controller, std::uint64_t seed,
                                         const RunOptions& options = {});

namespace detail {

// Exposed for tests: trims the GOP to `frame_rate` frames (the I-frame plus
// a seeded random subset of P-frames, original order preserved).
std::vector<int> trim_frame_indices(int frame_rate, std::uint64_t trim_seed);

// Sheds frames until the packet budget fits the actual bandwidth: random
// P-frames first (seeded priority order), I-frames only when no P remains.
void shed_frames(std::vector<FramePackets>& frames, double bandwidth_kbit,
                 double mtu_kbit, std::uint64_t shed_seed);

// Bernoulli packet transmission at the given loss ratio plus recovery; the
// draw for packet j of GOP frame f depends only on (seed, t, f, j).
std::vector<FrameOutcome> transmit_and_recover(std::span<const FramePackets> frames,
                                               double loss_ratio, std::uint64_t seed,
                                               std::int64_t t);

}  // namespace detail

}  // namespace baroc

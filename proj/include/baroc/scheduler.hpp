#pragma once

#include <span>
#include <vector>

#include "baroc/crf_model.hpp"
#include "baroc/distributions.hpp"
#include "baroc/predictor.hpp"

namespace baroc {

// Packet size: 12 kbit (1500 bytes). Bandwidth is kbps, so over one second
// a bandwidth w carries at most w / kMtuKbit packets.
inline constexpr double kMtuKbit = 12.0;
inline constexpr int kMtuBits = 12000;
inline constexpr int kGammaMax = kFramesPerSecond;

struct QoeWeights {
  double frame_rate = 1.0;   // reward per normalized frame rate
  double quality = 1.0;      // penalty per normalized CRF
  double smoothness = 0.5;   // penalty per normalized CRF change
};

// Scheduler output for one second.
struct Decision {
  int crf = kCrfMax;
  int frame_rate = 0;
  double fec_ratio = 0.0;
  double predicted_bitrate_kbps = 0.0;
};

// One (bandwidth, frame-rate, FEC) combination with its joint probability.
// bitrate_kbps <= 0 marks an infeasible combination (kept so the atom
// probabilities still sum to 1).
struct BitrateAtom {
  double bitrate_kbps = 0.0;
  double probability = 0.0;
  double bandwidth_kbps = 0.0;  // provenance
  int frame_rate = 0;           // provenance
  double fec_ratio = 0.0;       // provenance
};

// Smallest FEC ratio recovering every frame at loss ratio l: l / (1 - l).
// Total loss (l = 1) is uncoverable and raises an error.
double min_fec_ratio(double loss_ratio);

// Parity packets for a frame of `data_packets` packets at ratio alpha:
// ceil(alpha * u) with a tolerance so exact products stay exact.
int parity_packet_count(double fec_ratio, int data_packets);

// Pushes a loss PMF through min_fec_ratio onto the FEC grid. Mass at l = 1
// clamps to the top of the grid (reported through `stats`).
Pmf fec_ratio_distribution(const Pmf& loss, const Grid& fec_grid = default_fec_grid(),
                           TransformStats* stats = nullptr);

// Largest frame rate sustainable at bandwidth w: max{g : w - g*MTU > 0},
// capped at gamma_max; zero when no positive rate fits.
int frame_rate_for_bandwidth(double bandwidth_kbps, double mtu_kbit = kMtuKbit,
                             int gamma_max = kGammaMax);

struct FrameRateDistribution {
  Pmf pmf;                                  // over Grid(0, gamma_max, 1)
  std::vector<int> gamma_by_bandwidth_index;  // provenance, per bandwidth grid point
};

FrameRateDistribution frame_rate_distribution(const Pmf& bandwidth,
                                              double mtu_kbit = kMtuKbit,
                                              int gamma_max = kGammaMax);

// Cartesian product of bandwidth support (with its implied frame rate) and
// FEC support: b = (w - gamma*MTU) / (alpha + 1), probability P(w) * P(alpha).
std::vector<BitrateAtom> available_bitrate_atoms(
    const Pmf& bandwidth, const FrameRateDistribution& frame_rates, const Pmf& fec,
    double mtu_kbit = kMtuKbit);

// Expected-reward CRF choice: argmax_c sum over atoms of
// P(b) * P(encoded bitrate < b | c) * E[bitrate | c]. Ties break toward the
// larger CRF (lower quality); infeasible atoms contribute zero.
int select_crf(std::span<const BitrateAtom> atoms, const CrfBitrateModel& model);

// The most confident atom for a fixed CRF (same per-atom score as
// select_crf). Ties break by larger bitrate, then larger frame rate, then
// smaller FEC ratio.
Decision backtrack_decision(int crf, std::span<const BitrateAtom> atoms,
                            const CrfBitrateModel& model);

// Single-second objective with all terms normalized to [0, 1].
double qoe_step(int frame_rate, int crf, int prev_crf, const QoeWeights& weights = {},
                int gamma_max = kGammaMax, int crf_max = kCrfMax);

struct HorizonPlan {
  std::vector<Decision> decisions;  // one per step; front() is executed
  double total_qoe = 0.0;
};

// Dynamic program over the horizon: per step the candidate CRFs are those no
// better than that step's expected-reward optimum, each bound to its
// backtracked (frame rate, FEC) pair; the table accumulates QoE with the
// quality-change coupling and the best final node is traced back to step 1.
HorizonPlan solve_horizon(std::span<const PredictionStep> predictions,
                          const CrfBitrateModel& model, int prev_crf,
                          const QoeWeights& weights = {});

}  // namespace baroc

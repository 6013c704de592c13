#pragma once

#include <memory>
#include <string>

#include "baroc/predictor.hpp"
#include "baroc/scheduler.hpp"
#include "baroc/simnet.hpp"

namespace baroc {

// Horizon scheduler driven by any probabilistic predictor. The ablation
// variants are this controller with point-mass predictors.
class BarocController : public Controller {
 public:
  BarocController(std::string name, std::shared_ptr<const Predictor> predictor,
                  int horizon = 5, QoeWeights weights = {});

  Decision decide(std::span<const NetworkSample> history, CrfBitrateModel& model,
                  int prev_crf) override;
  std::string name() const override { return name_; }

 private:
  std::string name_;
  std::shared_ptr<const Predictor> predictor_;
  int horizon_;
  QoeWeights weights_;
};

// Loss-driven four-state machine (UP / STAY / DOWN / PROBE): lossy or
// congested seconds force the bottom quality with a fixed FEC ratio,
// sustained clean seconds probe one quality level up and revert on any loss.
struct FbraParams {
  double loss_threshold = 0.02;
  int down_after_lossy_s = 1;
  int up_after_clean_s = 10;
  int probe_duration_s = 3;
  int down_exit_clean_s = 5;
  int initial_crf = 41;
  double stay_fec_ratio = 0.05;
  double down_fec_ratio = 0.1;
};

class FbraController : public Controller {
 public:
  explicit FbraController(FbraParams params = {});

  Decision decide(std::span<const NetworkSample> history, CrfBitrateModel& model,
                  int prev_crf) override;
  // Shed frames mean the send rate exceeded the link; treated like loss.
  void observe(const SecondReport& report) override;
  std::string name() const override { return "fbra_like"; }

  enum class State { kUp, kStay, kDown, kProbe };
  State state() const { return state_; }

 private:
  FbraParams params_;
  State state_ = State::kStay;
  int crf_;
  int lossy_run_ = 0;
  int clean_run_ = 0;
  int probe_left_ = 0;
  bool congested_ = false;
};

// Saturating-FEC strategy: pick the largest quality whose expected bitrate
// fits half the EWMA bandwidth estimate, then spend the whole remaining
// budget on parity.
struct RfecParams {
  double video_budget_fraction = 0.5;
  double max_fec_ratio = 2.0;
  double ewma_alpha = 0.3;
  int ewma_window_s = 180;
};

class RfecLikeController : public Controller {
 public:
  explicit RfecLikeController(RfecParams params = {});

  Decision decide(std::span<const NetworkSample> history, CrfBitrateModel& model,
                  int prev_crf) override;
  std::string name() const override { return "rfec_like"; }

 private:
  RfecParams params_;
  EwmaPredictor estimator_;
};

// EWMA point estimates for bandwidth and loss; FEC ratio set to the minimal
// covering ratio for the loss estimate, quality to the largest level whose
// protected bitrate fits the bandwidth estimate. (The original system's
// learned predictor is replaced by the EWMA estimator, as the name states.)
struct LightfecParams {
  double max_fec_ratio = 2.0;
  double max_loss_estimate = 0.95;
  double ewma_alpha = 0.3;
  int ewma_window_s = 180;
};

class LightfecEwmaController : public Controller {
 public:
  explicit LightfecEwmaController(LightfecParams params = {});

  Decision decide(std::span<const NetworkSample> history, CrfBitrateModel& model,
                  int prev_crf) override;
  std::string name() const override { return "lightfec_ewma"; }

 private:
  LightfecParams params_;
  EwmaPredictor estimator_;
};

}  // namespace baroc

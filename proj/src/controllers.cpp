#include "baroc/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace baroc {

namespace {

// Conservative first-second decision before any history exists.
Decision startup_decision(const CrfBitrateModel& model, int crf, double fec_ratio) {
  return Decision{
      .crf = crf,
      .frame_rate = kGammaMax,
      .fec_ratio = fec_ratio,
      .predicted_bitrate_kbps = model.expected_bitrate(crf),
  };
}

}  // namespace

BarocController::BarocController(std::string name,
                                 std::shared_ptr<const Predictor> predictor, int horizon,
                                 QoeWeights weights)
    : name_(std::move(name)),
      predictor_(std::move(predictor)),
      horizon_(horizon),
      weights_(weights) {
  if (!predictor_) throw std::invalid_argument("predictor must not be null");
  if (horizon_ < 1 || horizon_ > 10) {
    throw std::invalid_argument("horizon must lie in [1, 10]");
  }
}

Decision BarocController::decide(std::span<const NetworkSample> history,
                                 CrfBitrateModel& model, int prev_crf) {
  if (history.empty()) {
    return startup_decision(model, prev_crf, 0.05);
  }
  std::vector<PredictionStep> steps = predictor_->predict(history, horizon_);
  HorizonPlan plan = solve_horizon(steps, model, prev_crf, weights_);
  return plan.decisions.front();
}

FbraController::FbraController(FbraParams params)
    : params_(params), crf_(params.initial_crf) {
  crf_index(crf_);  // validate
}

void FbraController::observe(const SecondReport& report) {
  congested_ = report.frames_offered < report.decision.frame_rate;
}

Decision FbraController::decide(std::span<const NetworkSample> history,
                                CrfBitrateModel& model, int /*prev_crf*/) {
  if (!history.empty()) {
    bool lossy = history.back().loss_ratio >= params_.loss_threshold || congested_;
    if (lossy) {
      ++lossy_run_;
      clean_run_ = 0;
    } else {
      ++clean_run_;
      lossy_run_ = 0;
    }

    auto step_down_one = [&] {
      std::size_t idx = crf_index(crf_);
      if (idx + 1 < kCrfLevels.size()) crf_ = kCrfLevels[idx + 1];
    };
    switch (state_) {
      case State::kStay:
        if (lossy_run_ >= params_.down_after_lossy_s) {
          state_ = State::kDown;
          crf_ = kCrfLevels.back();
        } else if (clean_run_ >= params_.up_after_clean_s) {
          // Step one level toward higher quality, then probe the new level.
          state_ = State::kUp;
          std::size_t idx = crf_index(crf_);
          if (idx > 0) crf_ = kCrfLevels[idx - 1];
          clean_run_ = 0;
        }
        break;
      case State::kUp:
        if (lossy) {
          step_down_one();
          state_ = State::kStay;
        } else {
          state_ = State::kProbe;
          probe_left_ = params_.probe_duration_s;
        }
        break;
      case State::kProbe:
        if (lossy) {
          step_down_one();
          state_ = State::kStay;
        } else if (--probe_left_ <= 0) {
          state_ = State::kStay;
        }
        break;
      case State::kDown:
        if (lossy) {
          crf_ = kCrfLevels.back();
        }
        if (clean_run_ >= params_.down_exit_clean_s) {
          state_ = State::kStay;
        }
        break;
    }
  }

  double alpha = state_ == State::kDown ? params_.down_fec_ratio : params_.stay_fec_ratio;
  return Decision{
      .crf = crf_,
      .frame_rate = kGammaMax,
      .fec_ratio = alpha,
      .predicted_bitrate_kbps = model.expected_bitrate(crf_),
  };
}

RfecLikeController::RfecLikeController(RfecParams params)
    : params_(params),
      estimator_(PredictorConfig{.input_length = params.ewma_window_s,
                                 .horizon = 1,
                                 .ewma_alpha = params.ewma_alpha}) {}

Decision RfecLikeController::decide(std::span<const NetworkSample> history,
                                    CrfBitrateModel& model, int /*prev_crf*/) {
  if (history.empty()) {
    return startup_decision(model, kCrfLevels.back(), params_.max_fec_ratio);
  }
  auto [bandwidth, loss] = estimator_.point_estimate(history);
  (void)loss;

  // Largest quality whose expected bitrate fits the video budget share.
  int chosen = kCrfLevels.back();
  double budget = params_.video_budget_fraction * bandwidth;
  for (int crf : kCrfLevels) {
    if (model.expected_bitrate(crf) <= budget) {
      chosen = crf;
      break;
    }
  }
  double video_bitrate = model.expected_bitrate(chosen);
  double residual = bandwidth - video_bitrate - kGammaMax * kMtuKbit;
  double alpha = video_bitrate > 0.0 ? residual / video_bitrate : 0.0;
  alpha = std::clamp(alpha, 0.0, params_.max_fec_ratio);
  return Decision{
      .crf = chosen,
      .frame_rate = kGammaMax,
      .fec_ratio = alpha,
      .predicted_bitrate_kbps = video_bitrate,
  };
}

LightfecEwmaController::LightfecEwmaController(LightfecParams params)
    : params_(params),
      estimator_(PredictorConfig{.input_length = params.ewma_window_s,
                                 .horizon = 1,
                                 .ewma_alpha = params.ewma_alpha}) {}

Decision LightfecEwmaController::decide(std::span<const NetworkSample> history,
                                        CrfBitrateModel& model, int /*prev_crf*/) {
  if (history.empty()) {
    return startup_decision(model, kCrfLevels.back(), 0.05);
  }
  auto [bandwidth, loss] = estimator_.point_estimate(history);
  double alpha = min_fec_ratio(std::min(loss, params_.max_loss_estimate));
  alpha = std::min(alpha, params_.max_fec_ratio);

  // Largest quality whose protected bitrate fits the bandwidth estimate.
  int chosen = kCrfLevels.back();
  for (int crf : kCrfLevels) {
    if ((1.0 + alpha) * model.expected_bitrate(crf) + kGammaMax * kMtuKbit <= bandwidth) {
      chosen = crf;
      break;
    }
  }
  return Decision{
      .crf = chosen,
      .frame_rate = kGammaMax,
      .fec_ratio = alpha,
      .predicted_bitrate_kbps = model.expected_bitrate(chosen),
  };
}

}  // namespace baroc

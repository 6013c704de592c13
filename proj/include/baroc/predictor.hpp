#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "baroc/distributions.hpp"
#include "baroc/traces.hpp"

namespace baroc {

// One future second: a bandwidth PMF and a loss-ratio PMF.
struct PredictionStep {
  Pmf bandwidth;
  Pmf loss;
};

struct PredictorConfig {
  int input_length = 180;  // observation window in seconds
  int horizon = 5;         // seconds predicted per call, 1..10
  double ewma_alpha = 0.3;
};

// Probabilistic forecaster contract: per future second, a bandwidth PMF and
// a loss PMF. Implementations are pure functions of (history, fitted state).
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::vector<PredictionStep> predict(std::span<const NetworkSample> history,
                                              int horizon) const = 0;
  virtual std::string name() const = 0;
};

// Point-mass forecasts at the true future trace values; the upper bound any
// predictor can reach on a known trace.
class OraclePredictor : public Predictor {
 public:
  explicit OraclePredictor(const NetworkTrace& truth,
                           Grid bandwidth_grid = default_bandwidth_grid(),
                           Grid loss_grid = default_loss_grid());
  std::vector<PredictionStep> predict(std::span<const NetworkSample> history,
                                      int horizon) const override;
  std::string name() const override { return "oracle"; }

 private:
  const NetworkTrace* truth_;
  Grid bandwidth_grid_;
  Grid loss_grid_;
};

// Exponentially weighted moving average over the observation window, emitted
// as point-mass PMFs for every step. Histories shorter than the window
// behave as if padded in front with their first sample.
class EwmaPredictor : public Predictor {
 public:
  explicit EwmaPredictor(PredictorConfig config = {},
                         Grid bandwidth_grid = default_bandwidth_grid(),
                         Grid loss_grid = default_loss_grid());
  std::vector<PredictionStep> predict(std::span<const NetworkSample> history,
                                      int horizon) const override;
  std::string name() const override { return "ewma"; }

  // Scalar estimates (bandwidth_kbps, loss_ratio) before grid snapping.
  std::pair<double, double> point_estimate(std::span<const NetworkSample> history) const;

 private:
  PredictorConfig config_;
  Grid bandwidth_grid_;
  Grid loss_grid_;
};

// Regime-conditional histograms fitted from a labeled trace: bandwidth and
// loss each get an anomalous and a normal empirical distribution plus the
// regime frequencies, estimated separately for reallocation seconds.
struct BimodalModel {
  Pmf bandwidth_normal;
  Pmf bandwidth_anomaly;
  Pmf loss_normal;
  Pmf loss_anomaly;
  double p_anomaly_reallocation = 0.0;
  double p_anomaly_normal = 0.0;
  std::vector<int> reallocation_schedule;
  // True when a regime had too few samples and pooled histograms were used.
  bool pooled_fallback = false;

  std::string to_json_text() const;
  static BimodalModel from_json_text(const std::string& text);
};

struct BimodalFitOptions {
  int min_regime_samples = 30;
  LabelRules label_rules{};
  Grid bandwidth_grid = default_bandwidth_grid();
  Grid loss_grid = default_loss_grid();
};

BimodalModel fit_bimodal(const NetworkTrace& labeled_trace,
                         const BimodalFitOptions& options = {});

// Per-step schedule-aware mixture of the fitted regime histograms.
class BimodalPredictor : public Predictor {
 public:
  explicit BimodalPredictor(BimodalModel model);
  std::vector<PredictionStep> predict(std::span<const NetworkSample> history,
                                      int horizon) const override;
  std::string name() const override { return "bimodal"; }

  const BimodalModel& model() const { return model_; }

 private:
  BimodalModel model_;
};

// Lifts per-step scalar predictions (bandwidth_kbps, loss_ratio) into
// point-mass PMFs, clamping out-of-grid values.
std::vector<PredictionStep> as_point_mass(
    std::span<const std::pair<double, double>> scalars,
    const Grid& bandwidth_grid = default_bandwidth_grid(),
    const Grid& loss_grid = default_loss_grid());

// Per-step (E[bandwidth], E[loss]) of a probabilistic prediction.
std::vector<std::pair<double, double>> collapse_to_expectation(
    std::span<const PredictionStep> steps);

// Ablation adapter: collapses an inner predictor's distributions to their
// expectations and re-emits them as point masses.
class PointCollapsePredictor : public Predictor {
 public:
  explicit PointCollapsePredictor(std::shared_ptr<const Predictor> inner,
                                  Grid bandwidth_grid = default_bandwidth_grid(),
                                  Grid loss_grid = default_loss_grid());
  std::vector<PredictionStep> predict(std::span<const NetworkSample> history,
                                      int horizon) const override;
  std::string name() const override { return inner_->name() + "_collapsed"; }

 private:
  std::shared_ptr<const Predictor> inner_;
  Grid bandwidth_grid_;
  Grid loss_grid_;
};

}  // namespace baroc

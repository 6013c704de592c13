#include "baroc/predictor.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

namespace baroc {

namespace {

void check_horizon(int horizon) {
  if (horizon < 1 || horizon > 10) {
    throw std::invalid_argument("horizon must lie in [1, 10]");
  }
}

void check_history(std::span<const NetworkSample> history) {
  if (history.empty()) {
    throw std::invalid_argument("history must not be empty");
  }
}

nlohmann::json pmf_to_json(const Pmf& p) {
  return nlohmann::json{
      {"grid",
       {{"min", p.grid().min_value()},
        {"max", p.grid().max_value()},
        {"interval", p.grid().interval()}}},
      {"probabilities", p.probabilities()}};
}

Pmf pmf_from_json(const nlohmann::json& j) {
  Grid grid(j.at("grid").at("min").get<double>(), j.at("grid").at("max").get<double>(),
            j.at("grid").at("interval").get<double>());
  return Pmf(grid, j.at("probabilities").get<std::vector<double>>());
}

}  // namespace

OraclePredictor::OraclePredictor(const NetworkTrace& truth, Grid bandwidth_grid,
                                 Grid loss_grid)
    : truth_(&truth), bandwidth_grid_(bandwidth_grid), loss_grid_(loss_grid) {
  if (truth.samples.empty()) {
    throw std::invalid_argument("oracle needs a non-empty truth trace");
  }
}

std::vector<PredictionStep> OraclePredictor::predict(
    std::span<const NetworkSample> history, int horizon) const {
  check_history(history);
  check_horizon(horizon);
  std::int64_t now = history.back().t;
  // Locate `now` in the truth trace by timestamp.
  auto it = std::lower_bound(
      truth_->samples.begin(), truth_->samples.end(), now,
      [](const NetworkSample& s, std::int64_t t) { return s.t < t; });
  std::size_t base = static_cast<std::size_t>(it - truth_->samples.begin());

  std::vector<PredictionStep> steps;
  steps.reserve(static_cast<std::size_t>(horizon));
  for (int k = 1; k <= horizon; ++k) {
    std::size_t idx = std::min(base + static_cast<std::size_t>(k),
                               truth_->samples.size() - 1);
    const NetworkSample& s = truth_->samples[idx];
    steps.push_back(PredictionStep{Pmf::point_mass(bandwidth_grid_, s.bandwidth_kbps),
                                   Pmf::point_mass(loss_grid_, s.loss_ratio)});
  }
  return steps;
}

EwmaPredictor::EwmaPredictor(PredictorConfig config, Grid bandwidth_grid, Grid loss_grid)
    : config_(config), bandwidth_grid_(bandwidth_grid), loss_grid_(loss_grid) {}

std::pair<double, double> EwmaPredictor::point_estimate(
    std::span<const NetworkSample> history) const {
  check_history(history);
  std::size_t window = std::min(history.size(),
                                static_cast<std::size_t>(config_.input_length));
  std::span<const NetworkSample> recent = history.subspan(history.size() - window);
  double bw = recent.front().bandwidth_kbps;
  double loss = recent.front().loss_ratio;
  for (std::size_t i = 1; i < recent.size(); ++i) {
    bw = config_.ewma_alpha * recent[i].bandwidth_kbps + (1.0 - config_.ewma_alpha) * bw;
    loss = config_.ewma_alpha * recent[i].loss_ratio + (1.0 - config_.ewma_alpha) * loss;
  }
  return {bw, loss};
}

std::vector<PredictionStep> EwmaPredictor::predict(std::span<const NetworkSample> history,
                                                   int horizon) const {
  check_horizon(horizon);
  auto [bw, loss] = point_estimate(history);
  std::vector<PredictionStep> steps;
  steps.reserve(static_cast<std::size_t>(horizon));
  for (int k = 0; k < horizon; ++k) {
    steps.push_back(PredictionStep{Pmf::point_mass(bandwidth_grid_, bw),
                                   Pmf::point_mass(loss_grid_, loss)});
  }
  return steps;
}

BimodalModel fit_bimodal(const NetworkTrace& labeled_trace,
                         const BimodalFitOptions& options) {
  if (!labeled_trace.labeled) {
    throw std::invalid_argument("trace must be labeled before fitting");
  }
  std::vector<double> bw_normal, bw_anomaly, loss_normal, loss_anomaly;
  std::size_t realloc_total = 0, realloc_anomalous = 0;
  std::size_t normal_total = 0, normal_anomalous = 0;
  for (const NetworkSample& s : labeled_trace.samples) {
    if (s.is_anomaly) {
      bw_anomaly.push_back(s.bandwidth_kbps);
      loss_anomaly.push_back(s.loss_ratio);
    } else {
      bw_normal.push_back(s.bandwidth_kbps);
      loss_normal.push_back(s.loss_ratio);
    }
    if (s.is_reallocation) {
      ++realloc_total;
      if (s.is_anomaly) ++realloc_anomalous;
    } else {
      ++normal_total;
      if (s.is_anomaly) ++normal_anomalous;
    }
  }

  BimodalModel model{
      .bandwidth_normal = Pmf::point_mass(options.bandwidth_grid, 0.0),
      .bandwidth_anomaly = Pmf::point_mass(options.bandwidth_grid, 0.0),
      .loss_normal = Pmf::point_mass(options.loss_grid, 0.0),
      .loss_anomaly = Pmf::point_mass(options.loss_grid, 0.0),
      .p_anomaly_reallocation = 0.0,
      .p_anomaly_normal = 0.0,
      .reallocation_schedule = {},
      .pooled_fallback = false,
  };
  bool enough = static_cast<int>(bw_anomaly.size()) >= options.min_regime_samples &&
                static_cast<int>(bw_normal.size()) >= options.min_regime_samples;
  if (enough) {
    model.bandwidth_normal = Pmf::from_samples(bw_normal, options.bandwidth_grid);
    model.bandwidth_anomaly = Pmf::from_samples(bw_anomaly, options.bandwidth_grid);
    model.loss_normal = Pmf::from_samples(loss_normal, options.loss_grid);
    model.loss_anomaly = Pmf::from_samples(loss_anomaly, options.loss_grid);
  } else {
    // One regime is underrepresented: fall back to pooled histograms.
    std::vector<double> bw_all, loss_all;
    for (const NetworkSample& s : labeled_trace.samples) {
      bw_all.push_back(s.bandwidth_kbps);
      loss_all.push_back(s.loss_ratio);
    }
    Pmf bw = Pmf::from_samples(bw_all, options.bandwidth_grid);
    Pmf loss = Pmf::from_samples(loss_all, options.loss_grid);
    model.bandwidth_normal = bw;
    model.bandwidth_anomaly = bw;
    model.loss_normal = loss;
    model.loss_anomaly = loss;
    model.pooled_fallback = true;
  }
  model.p_anomaly_reallocation =
      realloc_total == 0 ? 0.0
                         : static_cast<double>(realloc_anomalous) /
                               static_cast<double>(realloc_total);
  model.p_anomaly_normal = normal_total == 0
                               ? 0.0
                               : static_cast<double>(normal_anomalous) /
                                     static_cast<double>(normal_total);
  model.reallocation_schedule = options.label_rules.reallocation_schedule;
  return model;
}

std::string BimodalModel::to_json_text() const {
  nlohmann::json j{
      {"bandwidth_normal", pmf_to_json(bandwidth_normal)},
      {"bandwidth_anomaly", pmf_to_json(bandwidth_anomaly)},
      {"loss_normal", pmf_to_json(loss_normal)},
      {"loss_anomaly", pmf_to_json(loss_anomaly)},
      {"p_anomaly_reallocation", p_anomaly_reallocation},
      {"p_anomaly_normal", p_anomaly_normal},
      {"reallocation_schedule", reallocation_schedule},
      {"pooled_fallback", pooled_fallback},
  };
  return j.dump(2) + "\n";
}

BimodalModel BimodalModel::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  return BimodalModel{
      .bandwidth_normal = pmf_from_json(j.at("bandwidth_normal")),
      .bandwidth_anomaly = pmf_from_json(j.at("bandwidth_anomaly")),
      .loss_normal = pmf_from_json(j.at("loss_normal")),
      .loss_anomaly = pmf_from_json(j.at("loss_anomaly")),
      .p_anomaly_reallocation = j.at("p_anomaly_reallocation").get<double>(),
      .p_anomaly_normal = j.at("p_anomaly_normal").get<double>(),
      .reallocation_schedule = j.at("reallocation_schedule").get<std::vector<int>>(),
      .pooled_fallback = j.at("pooled_fallback").get<bool>(),
  };
}

BimodalPredictor::BimodalPredictor(BimodalModel model) : model_(std::move(model)) {}

std::vector<PredictionStep> BimodalPredictor::predict(
    std::span<const NetworkSample> history, int horizon) const {
  check_history(history);
  check_horizon(horizon);
  std::int64_t now = history.back().t;
  std::vector<PredictionStep> steps;
  steps.reserve(static_cast<std::size_t>(horizon));
  for (int k = 1; k <= horizon; ++k) {
    bool realloc = is_reallocation_second(now + k, model_.reallocation_schedule);
    double p_anom = realloc ? model_.p_anomaly_reallocation : model_.p_anomaly_normal;
    steps.push_back(PredictionStep{
        mix(model_.bandwidth_anomaly, model_.bandwidth_normal, p_anom),
        mix(model_.loss_anomaly, model_.loss_normal, p_anom)});
  }
  return steps;
}

std::vector<PredictionStep> as_point_mass(
    std::span<const std::pair<double, double>> scalars, const Grid& bandwidth_grid,
    const Grid& loss_grid) {
  std::vector<PredictionStep> steps;
  steps.reserve(scalars.size());
  for (const auto& [bw, loss] : scalars) {
    steps.push_back(PredictionStep{Pmf::point_mass(bandwidth_grid, bw),
                                   Pmf::point_mass(loss_grid, loss)});
  }
  return steps;
}

std::vector<std::pair<double, double>> collapse_to_expectation(
    std::span<const PredictionStep> steps) {
  std::vector<std::pair<double, double>> out;
  out.reserve(steps.size());
  for (const PredictionStep& s : steps) {
    out.emplace_back(s.bandwidth.expectation(), s.loss.expectation());
  }
  return out;
}

PointCollapsePredictor::PointCollapsePredictor(std::shared_ptr<const Predictor> inner,
                                               Grid bandwidth_grid, Grid loss_grid)
    : inner_(std::move(inner)),
      bandwidth_grid_(bandwidth_grid),
      loss_grid_(loss_grid) {
  if (!inner_) throw std::invalid_argument("inner predictor must not be null");
}

std::vector<PredictionStep> PointCollapsePredictor::predict(
    std::span<const NetworkSample> history, int horizon) const {
  auto scalars = collapse_to_expectation(inner_->predict(history, horizon));
  return as_point_mass(scalars, bandwidth_grid_, loss_grid_);
}

}  // namespace baroc

#include "baroc/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace baroc {

namespace {

struct ScoredCrf {
  double score = 0.0;
  std::size_t best_atom = 0;
  bool has_atom = false;
};

// Shared scoring pass for select_crf and backtrack_decision: accumulates the
// expected reward in fixed atom order and tracks the best single atom with
// the documented tie-breaks.
ScoredCrf score_crf(int crf, std::span<const BitrateAtom> atoms,
                    const CrfBitrateModel& model) {
  double expected = model.expected_bitrate(crf);
  ScoredCrf out;
  double best = -1.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const BitrateAtom& atom = atoms[i];
    double term = 0.0;
    if (atom.bitrate_kbps > 0.0) {
      term = atom.probability * model.cdf_below(crf, atom.bitrate_kbps) * expected;
    }
    out.score += term;
    bool better = term > best;
    if (!better && term == best && out.has_atom) {
      const BitrateAtom& incumbent = atoms[out.best_atom];
      if (atom.bitrate_kbps != incumbent.bitrate_kbps) {
        better = atom.bitrate_kbps > incumbent.bitrate_kbps;
      } else if (atom.frame_rate != incumbent.frame_rate) {
        better = atom.frame_rate > incumbent.frame_rate;
      } else if (atom.fec_ratio != incumbent.fec_ratio) {
        better = atom.fec_ratio < incumbent.fec_ratio;
      }
    }
    if (better) {
      best = term;
      out.best_atom = i;
      out.has_atom = true;
    }
  }
  return out;
}

}  // namespace

double min_fec_ratio(double loss_ratio) {
  if (loss_ratio < 0.0 || loss_ratio > 1.0) {
    throw std::invalid_argument("loss ratio must lie in [0, 1]");
  }
  if (loss_ratio == 1.0) {
    throw std::domain_error("total loss uncoverable");
  }
  return loss_ratio / (1.0 - loss_ratio);
}

int parity_packet_count(double fec_ratio, int data_packets) {
  if (fec_ratio <= 0.0 || data_packets <= 0) return 0;
  // Products that are integers up to rounding noise must not gain a packet.
  double scaled = fec_ratio * static_cast<double>(data_packets);
  return static_cast<int>(std::ceil(scaled - 1e-6));
}

Pmf fec_ratio_distribution(const Pmf& loss, const Grid& fec_grid, TransformStats* stats) {
  return transform(
      loss,
      [](double l) {
        if (l >= 1.0) return std::numeric_limits<double>::infinity();
        return l / (1.0 - l);
      },
      fec_grid, stats);
}

int frame_rate_for_bandwidth(double bandwidth_kbps, double mtu_kbit, int gamma_max) {
  if (bandwidth_kbps <= mtu_kbit) return 0;
  double quotient = bandwidth_kbps / mtu_kbit;
  int g = static_cast<int>(std::floor(quotient));
  // The constraint is strict: g * MTU must stay below the bandwidth.
  if (static_cast<double>(g) * mtu_kbit >= bandwidth_kbps - 1e-9) g -= 1;
  return std::min(g, gamma_max);
}

FrameRateDistribution frame_rate_distribution(const Pmf& bandwidth, double mtu_kbit,
                                              int gamma_max) {
  Grid gamma_grid(0.0, static_cast<double>(gamma_max), 1.0);
  std::vector<double> probs(gamma_grid.size(), 0.0);
  std::vector<int> gamma_by_index(bandwidth.size(), 0);
  for (std::size_t i = 0; i < bandwidth.size(); ++i) {
    int g = frame_rate_for_bandwidth(bandwidth.grid().value(i), mtu_kbit, gamma_max);
    gamma_by_index[i] = g;
    probs[static_cast<std::size_t>(g)] += bandwidth.probability(i);
  }
  return FrameRateDistribution{Pmf(gamma_grid, std::move(probs)),
                               std::move(gamma_by_index)};
}

std::vector<BitrateAtom> available_bitrate_atoms(const Pmf& bandwidth,
                                                 const FrameRateDistribution& frame_rates,
                                                 const Pmf& fec, double mtu_kbit) {
  if (frame_rates.gamma_by_bandwidth_index.size() != bandwidth.size()) {
    throw std::invalid_argument("frame-rate provenance does not match the bandwidth grid");
  }
  std::vector<BitrateAtom> atoms;
  for (std::size_t i = 0; i < bandwidth.size(); ++i) {
    double pw = bandwidth.probability(i);
    if (pw == 0.0) continue;
    double w = bandwidth.grid().value(i);
    int gamma = frame_rates.gamma_by_bandwidth_index[i];
    double data_budget = w - static_cast<double>(gamma) * mtu_kbit;
    for (std::size_t j = 0; j < fec.size(); ++j) {
      double pa = fec.probability(j);
      if (pa == 0.0) continue;
      double alpha = fec.grid().value(j);
      double b = data_budget / (alpha + 1.0);
      atoms.push_back(BitrateAtom{
          .bitrate_kbps = b > 0.0 ? b : 0.0,
          .probability = pw * pa,
          .bandwidth_kbps = w,
          .frame_rate = gamma,
          .fec_ratio = alpha,
      });
    }
  }
  return atoms;
}

int select_crf(std::span<const BitrateAtom> atoms, const CrfBitrateModel& model) {
  if (atoms.empty()) throw std::invalid_argument("atom list must not be empty");
  int best_crf = kCrfLevels.front();
  double best_score = -1.0;
  for (int crf : kCrfLevels) {
    double score = score_crf(crf, atoms, model).score;
    if (score >= best_score) {  // ties resolve to the larger CRF
      best_score = score;
      best_crf = crf;
    }
  }
  return best_crf;
}

Decision backtrack_decision(int crf, std::span<const BitrateAtom> atoms,
                            const CrfBitrateModel& model) {
  if (atoms.empty()) throw std::invalid_argument("atom list must not be empty");
  ScoredCrf scored = score_crf(crf, atoms, model);
  const BitrateAtom& atom = atoms[scored.best_atom];
  return Decision{
      .crf = crf,
      .frame_rate = atom.frame_rate,
      .fec_ratio = atom.fec_ratio,
      .predicted_bitrate_kbps = atom.bitrate_kbps,
  };
}

double qoe_step(int frame_rate, int crf, int prev_crf, const QoeWeights& weights,
                int gamma_max, int crf_max) {
  double g = static_cast<double>(frame_rate) / static_cast<double>(gamma_max);
  double c = static_cast<double>(crf) / static_cast<double>(crf_max);
  double change = static_cast<double>(std::abs(crf - prev_crf)) /
                  static_cast<double>(crf_max);
  return weights.frame_rate * g - weights.quality * c - weights.smoothness * change;
}

HorizonPlan solve_horizon(std::span<const PredictionStep> predictions,
                          const CrfBitrateModel& model, int prev_crf,
                          const QoeWeights& weights) {
  if (predictions.empty()) throw std::invalid_argument("predictions must not be empty");
  if (predictions.size() > 10) throw std::invalid_argument("horizon must lie in [1, 10]");

  struct Node {
    Decision decision;
    double cumulative_qoe = 0.0;
    std::size_t parent = 0;
  };
  std::vector<std::vector<Node>> layers;
  layers.reserve(predictions.size());

  for (const PredictionStep& step : predictions) {
    Pmf fec = fec_ratio_distribution(step.loss);
    FrameRateDistribution rates = frame_rate_distribution(step.bandwidth);
    std::vector<BitrateAtom> atoms = available_bitrate_atoms(step.bandwidth, rates, fec);

    int step_best = select_crf(atoms, model);
    std::vector<Node> layer;
    for (int crf : kCrfLevels) {
      if (crf < step_best) continue;  // candidates are qualities no better than the optimum
      Node node;
      node.decision = backtrack_decision(crf, atoms, model);
      if (layers.empty()) {
        node.cumulative_qoe =
            qoe_step(node.decision.frame_rate, crf, prev_crf, weights);
        node.parent = 0;
      } else {
        const std::vector<Node>& prev = layers.back();
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_parent = 0;
        for (std::size_t p = 0; p < prev.size(); ++p) {
          double total = prev[p].cumulative_qoe +
                         qoe_step(node.decision.frame_rate, crf,
                                  prev[p].decision.crf, weights);
          if (total > best) {
            best = total;
            best_parent = p;
          }
        }
        node.cumulative_qoe = best;
        node.parent = best_parent;
      }
      layer.push_back(node);
    }
    layers.push_back(std::move(layer));
  }

  const std::vector<Node>& final_layer = layers.back();
  std::size_t best_final = 0;
  for (std::size_t i = 1; i < final_layer.size(); ++i) {
    if (final_layer[i].cumulative_qoe > final_layer[best_final].cumulative_qoe) {
      best_final = i;
    }
  }

  HorizonPlan plan;
  plan.total_qoe = final_layer[best_final].cumulative_qoe;
  plan.decisions.resize(layers.size());
  std::size_t idx = best_final;
  for (std::size_t layer = layers.size(); layer-- > 0;) {
    plan.decisions[layer] = layers[layer][idx].decision;
    idx = layers[layer][idx].parent;
  }
  return plan;
}

}  // namespace baroc

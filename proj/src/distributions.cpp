#include "baroc/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace baroc {

namespace {
constexpr double kSumTolerance = 1e-9;
}

Grid::Grid(double min_value, double max_value, double interval)
    : min_value_(min_value), max_value_(max_value), interval_(interval) {
  if (!(interval > 0.0)) {
    throw std::invalid_argument("grid interval must be positive");
  }
  if (!(max_value > min_value)) {
    throw std::invalid_argument("grid max must exceed min");
  }
  double steps = (max_value - min_value) / interval;
  double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9) {
    throw std::invalid_argument("grid span is not a multiple of the interval");
  }
  size_ = static_cast<std::size_t>(rounded) + 1;
}

std::size_t Grid::index_of(double v) const {
  double offset = (v - min_value_) / interval_;
  double idx = std::floor(offset + 0.5);  // halfway rounds toward +inf
  if (idx < 0.0) return 0;
  if (idx >= static_cast<double>(size_)) return size_ - 1;
  std::size_t i = static_cast<std::size_t>(idx);
  return i >= size_ ? size_ - 1 : i;
}

Pmf::Pmf(Grid grid, std::vector<double> probabilities)
    : grid_(grid), probs_(std::move(probabilities)) {
  if (probs_.size() != grid_.size()) {
    throw std::invalid_argument("probability vector length must match grid size");
  }
  double sum = 0.0;
  for (double p : probs_) {
    if (p < 0.0) throw std::invalid_argument("probabilities must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument("probabilities must sum to 1");
  }
}

Pmf Pmf::point_mass(const Grid& grid, double value) {
  std::vector<double> probs(grid.size(), 0.0);
  probs[grid.index_of(value)] = 1.0;
  return Pmf(grid, std::move(probs));
}

Pmf Pmf::from_samples(std::span<const double> samples, const Grid& grid) {
  if (samples.empty()) {
    throw std::invalid_argument("no samples");
  }
  std::vector<double> counts(grid.size(), 0.0);
  for (double s : samples) {
    counts[grid.index_of(s)] += 1.0;
  }
  double total = static_cast<double>(samples.size());
  for (double& c : counts) c /= total;
  return Pmf(grid, std::move(counts));
}

double Pmf::expectation() const {
  double e = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    e += grid_.value(i) * probs_[i];
  }
  return e;
}

Pmf mix(const Pmf& a, const Pmf& b, double weight_a) {
  if (!(a.grid() == b.grid())) {
    throw std::invalid_argument("cannot mix pmfs on different grids");
  }
  if (weight_a < 0.0 || weight_a > 1.0) {
    throw std::invalid_argument("mix weight must lie in [0, 1]");
  }
  std::vector<double> probs(a.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] = weight_a * a.probability(i) + (1.0 - weight_a) * b.probability(i);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
  return Pmf(a.grid(), std::move(probs));
}

Pmf transform(const Pmf& p, const std::function<double(double)>& map,
              const Grid& out_grid, TransformStats* stats) {
  std::vector<double> probs(out_grid.size(), 0.0);
  TransformStats local;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double mass = p.probability(i);
    if (mass == 0.0) continue;
    double y = map(p.grid().value(i));
    if (std::isnan(y) || y == std::numeric_limits<double>::infinity()) {
      local.clamped_high += mass;
      probs.back() += mass;
      continue;
    }
    if (y > out_grid.max_value()) {
      local.clamped_high += mass;
      probs.back() += mass;
    } else if (y < out_grid.min_value()) {
      local.clamped_low += mass;
      probs.front() += mass;
    } else {
      probs[out_grid.index_of(y)] += mass;
    }
  }
  if (stats != nullptr) *stats = local;
  return Pmf(out_grid, std::move(probs));
}

double crps(const Pmf& forecast, double observed) {
  const Grid& g = forecast.grid();
  double cumulative = 0.0;
  double score = 0.0;
  for (std::size_t i = 0; i < forecast.size(); ++i) {
    cumulative += forecast.probability(i);
    double indicator = g.value(i) >= observed ? 1.0 : 0.0;
    double d = cumulative - indicator;
    score += d * d * g.interval();
  }
  return score;
}

const Grid& default_bandwidth_grid() {
  static const Grid grid(0.0, 15000.0, 500.0);
  return grid;
}

const Grid& default_loss_grid() {
  static const Grid grid(0.0, 1.0, 0.02);
  return grid;
}

const Grid& default_fec_grid() {
  static const Grid grid(0.0, 2.0, 0.01);
  return grid;
}

}  // namespace baroc

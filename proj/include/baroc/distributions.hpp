#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace baroc {

// Uniformly spaced value grid [min_value, max_value] with step `interval`.
// (max_value - min_value) must be an integer multiple of the interval.
class Grid {
 public:
  Grid(double min_value, double max_value, double interval);

  double min_value() const { return min_value_; }
  double max_value() const { return max_value_; }
  double interval() const { return interval_; }

  std::size_t size() const { return size_; }
  double value(std::size_t index) const {
    return min_value_ + interval_ * static_cast<double>(index);
  }

  // Nearest grid index for `v`. Halfway points round toward +inf,
  // out-of-range values clamp to the grid ends.
  std::size_t index_of(double v) const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.min_value_ == b.min_value_ && a.max_value_ == b.max_value_ &&
           a.interval_ == b.interval_;
  }

 private:
  double min_value_;
  double max_value_;
  double interval_;
  std::size_t size_;
};

// Discrete probability mass function over a Grid. Immutable after
// construction; probabilities are non-negative and sum to 1 within 1e-9.
class Pmf {
 public:
  Pmf(Grid grid, std::vector<double> probabilities);

  static Pmf point_mass(const Grid& grid, double value);
  // Histogram estimator: snaps each sample to the nearest grid point
  // (clamping out-of-range values) and normalizes the counts.
  static Pmf from_samples(std::span<const double> samples, const Grid& grid);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& probabilities() const { return probs_; }
  double probability(std::size_t index) const { return probs_[index]; }
  std::size_t size() const { return probs_.size(); }

  double expectation() const;

 private:
  Grid grid_;
  std::vector<double> probs_;
};

// Convex combination weight_a * a + (1 - weight_a) * b on a shared grid.
Pmf mix(const Pmf& a, const Pmf& b, double weight_a);

// Mass that a transform pushed outside the output grid (accumulated onto
// the nearest end point).
struct TransformStats {
  double clamped_low = 0.0;
  double clamped_high = 0.0;
};

// Pushes `p` through a monotone map, accumulating the probability of each
// input point onto the nearest output grid point. Non-finite map results
// count as +inf and clamp to the top of the output grid. Total mass is
// conserved exactly (no renormalization).
Pmf transform(const Pmf& p, const std::function<double(double)>& map,
              const Grid& out_grid, TransformStats* stats = nullptr);

// Continuous ranked probability score of a grid forecast against a scalar
// observation; zero iff the forecast is a point mass at the observation's
// grid point.
double crps(const Pmf& forecast, double observed);

// Canonical grids shared by the predictor and scheduler.
const Grid& default_bandwidth_grid();  // kbps: [0, 15000] step 500
const Grid& default_loss_grid();       // ratio: [0, 1] step 0.02
const Grid& default_fec_grid();        // ratio: [0, 2] step 0.01

}  // namespace baroc

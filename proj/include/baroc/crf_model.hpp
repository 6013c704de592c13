#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "baroc/traces.hpp"

namespace baroc {

struct GaussianComponent {
  double weight = 1.0;
  double mean = 0.0;
  double std_dev = 1.0;
};

// One- or two-component Gaussian mixture over encoded bitrate (kbps).
struct GaussianMixture {
  std::vector<GaussianComponent> components;

  double cdf(double x) const;   // P(value < x)
  double mean() const;          // sum of weight * mean
};

struct MixtureFitOptions {
  int min_samples = 10;          // startup threshold before a fit is allowed
  int max_iterations = 100;
  double log_likelihood_tol = 1e-6;
  double std_floor_kbps = 1.0;   // degenerate components collapse below this
  double weight_floor = 0.02;
};

// Expectation-maximization fit of a 2-component Gaussian mixture, seeded from
// the 25%/75% sample quantiles (deterministic given the samples). Degenerate
// solutions collapse to a single Gaussian with a floored standard deviation.
GaussianMixture fit_mixture(std::span<const double> samples,
                            const MixtureFitOptions& options = {});

// Startup table: single Gaussian per CRF, used until a queue holds enough
// recent observations to fit.
class CrfDefaults {
 public:
  CrfDefaults() = default;
  explicit CrfDefaults(std::map<int, GaussianComponent> table);

  // Computed once from the synthetic encoder with a fixed seed.
  static const CrfDefaults& builtin();
  static CrfDefaults from_video_trace(const VideoTrace& video);

  static CrfDefaults from_json_text(const std::string& text);
  std::string to_json_text() const;
  static CrfDefaults load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  const GaussianComponent& for_crf(int crf) const;

 private:
  std::map<int, GaussianComponent> table_;
};

// Sliding-window bitrate model per CRF level: keeps the most recent
// window_s seconds of observed bitrates per CRF and refits the mixture after
// each observation once the startup threshold is met.
class CrfBitrateModel {
 public:
  explicit CrfBitrateModel(CrfDefaults defaults = CrfDefaults::builtin(),
                           MixtureFitOptions fit_options = {}, int window_s = 55);

  void observe(int crf, double bitrate_kbps, std::int64_t t);

  double cdf_below(int crf, double bitrate_kbps) const;
  double expected_bitrate(int crf) const;
  const GaussianMixture& distribution_for(int crf) const;

  bool using_default(int crf) const;
  std::size_t queue_size(int crf) const;
  int window_seconds() const { return window_s_; }

 private:
  struct PerCrf {
    std::deque<std::pair<std::int64_t, double>> queue;
    GaussianMixture active;  // fitted or default
    bool fitted = false;
  };

  CrfDefaults defaults_;
  MixtureFitOptions fit_options_;
  int window_s_;
  std::array<PerCrf, kCrfLevels.size()> per_crf_;
};

}  // namespace baroc

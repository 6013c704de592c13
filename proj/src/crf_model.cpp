#include "baroc/crf_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "baroc/synth.hpp"

namespace baroc {

namespace {

double normal_cdf(double x, double mean, double std_dev) {
  return 0.5 * std::erfc(-(x - mean) / (std_dev * 1.4142135623730950488));
}

double normal_pdf(double x, double mean, double std_dev) {
  double z = (x - mean) / std_dev;
  return std::exp(-0.5 * z * z) / (std_dev * 2.5066282746310005024);
}

GaussianMixture single_gaussian(std::span<const double> samples, double std_floor) {
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var /= static_cast<double>(samples.size());
  double std_dev = std::max(std::sqrt(var), std_floor);
  return GaussianMixture{{GaussianComponent{1.0, mean, std_dev}}};
}

}  // namespace

double GaussianMixture::cdf(double x) const {
  double p = 0.0;
  for (const GaussianComponent& c : components) {
    p += c.weight * normal_cdf(x, c.mean, c.std_dev);
  }
  return p;
}

double GaussianMixture::mean() const {
  double m = 0.0;
  for (const GaussianComponent& c : components) m += c.weight * c.mean;
  return m;
}

GaussianMixture fit_mixture(std::span<const double> samples,
                            const MixtureFitOptions& options) {
  if (static_cast<int>(samples.size()) < options.min_samples) {
    throw std::invalid_argument("not enough samples to fit a mixture");
  }

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  double q25 = sorted[(n - 1) / 4];
  double q75 = sorted[3 * (n - 1) / 4];
  if (q75 - q25 < options.std_floor_kbps) {
    return single_gaussian(samples, options.std_floor_kbps);
  }

  GaussianComponent a{0.5, q25, 0.0};
  GaussianComponent b{0.5, q75, 0.0};
  {
    GaussianMixture overall = single_gaussian(samples, options.std_floor_kbps);
    a.std_dev = b.std_dev = std::max(overall.components[0].std_dev / 2.0,
                                     options.std_floor_kbps);
  }

  std::vector<double> resp(n);  // responsibility of component a
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double pa = a.weight * normal_pdf(sorted[i], a.mean, a.std_dev);
      double pb = b.weight * normal_pdf(sorted[i], b.mean, b.std_dev);
      double total = pa + pb;
      if (total <= 0.0) {
        // Far-tail underflow: assign to the nearer component.
        resp[i] = std::abs(sorted[i] - a.mean) <= std::abs(sorted[i] - b.mean) ? 1.0 : 0.0;
        ll += -745.0;  // log of the smallest normal double, caps the penalty
        continue;
      }
      resp[i] = pa / total;
      ll += std::log(total);
    }

    double na = 0.0;
    for (double r : resp) na += r;
    double nb = static_cast<double>(n) - na;
    if (na < 1e-9 || nb < 1e-9) break;

    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mean_a += resp[i] * sorted[i];
      mean_b += (1.0 - resp[i]) * sorted[i];
    }
    mean_a /= na;
    mean_b /= nb;
    double var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      var_a += resp[i] * (sorted[i] - mean_a) * (sorted[i] - mean_a);
      var_b += (1.0 - resp[i]) * (sorted[i] - mean_b) * (sorted[i] - mean_b);
    }
    a = GaussianComponent{na / static_cast<double>(n), mean_a,
                          std::max(std::sqrt(var_a / na), options.std_floor_kbps)};
    b = GaussianComponent{nb / static_cast<double>(n), mean_b,
                          std::max(std::sqrt(var_b / nb), options.std_floor_kbps)};

    if (std::abs(ll - prev_ll) < options.log_likelihood_tol) break;
    prev_ll = ll;
  }

  bool degenerate = a.weight < options.weight_floor || b.weight < options.weight_floor ||
                    a.std_dev <= options.std_floor_kbps || b.std_dev <= options.std_floor_kbps;
  if (degenerate) {
    return single_gaussian(samples, options.std_floor_kbps);
  }
  if (a.mean > b.mean) std::swap(a, b);
  return GaussianMixture{{a, b}};
}

CrfDefaults::CrfDefaults(std::map<int, GaussianComponent> table) : table_(std::move(table)) {
  for (int crf : kCrfLevels) {
    if (table_.find(crf) == table_.end()) {
      throw std::invalid_argument("defaults table is missing CRF " + std::to_string(crf));
    }
  }
}

const CrfDefaults& CrfDefaults::builtin() {
  static const CrfDefaults defaults = [] {
    VideoTrace video = gen_synthetic_video(300, 424242, RdParams{});
    return from_video_trace(video);
  }();
  return defaults;
}

CrfDefaults CrfDefaults::from_video_trace(const VideoTrace& video) {
  if (video.seconds.empty()) {
    throw std::invalid_argument("cannot derive defaults from an empty video trace");
  }
  std::map<int, GaussianComponent> table;
  for (std::size_t c = 0; c < kCrfLevels.size(); ++c) {
    double mean = 0.0;
    for (const VideoSecond& sec : video.seconds) mean += sec.encodings[c].bitrate_kbps;
    mean /= static_cast<double>(video.seconds.size());
    double var = 0.0;
    for (const VideoSecond& sec : video.seconds) {
      double d = sec.encodings[c].bitrate_kbps - mean;
      var += d * d;
    }
    var /= static_cast<double>(video.seconds.size());
    table[kCrfLevels[c]] =
        GaussianComponent{1.0, mean, std::max(std::sqrt(var), 1.0)};
  }
  return CrfDefaults(std::move(table));
}

CrfDefaults CrfDefaults::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::map<int, GaussianComponent> table;
  for (auto it = j.begin(); it != j.end(); ++it) {
    int crf = std::stoi(it.key());
    table[crf] = GaussianComponent{1.0, it.value().at("mean_kbps").get<double>(),
                                   it.value().at("std_kbps").get<double>()};
  }
  return CrfDefaults(std::move(table));
}

std::string CrfDefaults::to_json_text() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [crf, comp] : table_) {
    j[std::to_string(crf)] = {{"mean_kbps", comp.mean}, {"std_kbps", comp.std_dev}};
  }
  return j.dump(2) + "\n";
}

CrfDefaults CrfDefaults::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

void CrfDefaults::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json_text();
}

const GaussianComponent& CrfDefaults::for_crf(int crf) const {
  auto it = table_.find(crf);
  if (it == table_.end()) {
    throw std::invalid_argument("no default distribution for CRF " + std::to_string(crf));
  }
  return it->second;
}

CrfBitrateModel::CrfBitrateModel(CrfDefaults defaults, MixtureFitOptions fit_options,
                                 int window_s)
    : defaults_(std::move(defaults)), fit_options_(fit_options), window_s_(window_s) {
  for (std::size_t c = 0; c < kCrfLevels.size(); ++c) {
    per_crf_[c].active =
        GaussianMixture{{defaults_.for_crf(kCrfLevels[c])}};
  }
}

void CrfBitrateModel::observe(int crf, double bitrate_kbps, std::int64_t t) {
  if (bitrate_kbps <= 0.0) throw std::invalid_argument("bitrate must be positive");
  PerCrf& entry = per_crf_[crf_index(crf)];
  entry.queue.emplace_back(t, bitrate_kbps);
  while (!entry.queue.empty() && entry.queue.front().first <= t - window_s_) {
    entry.queue.pop_front();
  }
  if (static_cast<int>(entry.queue.size()) >= fit_options_.min_samples) {
    std::vector<double> samples;
    samples.reserve(entry.queue.size());
    for (const auto& [ts, b] : entry.queue) samples.push_back(b);
    entry.active = fit_mixture(samples, fit_options_);
    entry.fitted = true;
  } else {
    entry.active = GaussianMixture{{defaults_.for_crf(crf)}};
    entry.fitted = false;
  }
}

double CrfBitrateModel::cdf_below(int crf, double bitrate_kbps) const {
  return per_crf_[crf_index(crf)].active.cdf(bitrate_kbps);
}

double CrfBitrateModel::expected_bitrate(int crf) const {
  return per_crf_[crf_index(crf)].active.mean();
}

const GaussianMixture& CrfBitrateModel::distribution_for(int crf) const {
  return per_crf_[crf_index(crf)].active;
}

bool CrfBitrateModel::using_default(int crf) const {
  return !per_crf_[crf_index(crf)].fitted;
}

std::size_t CrfBitrateModel::queue_size(int crf) const {
  return per_crf_[crf_index(crf)].queue.size();
}

}  // namespace baroc

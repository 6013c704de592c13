// End-to-end acceptance suite. Each numbered check prints one PASS/FAIL line;
// the process exits non-zero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "baroc/controllers.hpp"
#include "baroc/experiment.hpp"
#include "baroc/rng.hpp"
#include "baroc/scheduler.hpp"
#include "baroc/simnet.hpp"
#include "baroc/synth.hpp"

using namespace baroc;

namespace {

namespace fs = std::filesystem;

int failures = 0;

void report(int number, const std::string& name, bool pass, double seconds,
            const std::string& detail) {
  std::printf("[%d] %-28s %s  (%.2fs)  %s\n", number, name.c_str(),
              pass ? "PASS" : "FAIL", seconds, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void run_check(int number, const std::string& name,
               const std::function<bool(std::string&)>& body) {
  auto started = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  report(number, name, pass, elapsed, detail);
}

// Exact integer oracle for the recovery rule, loss kept rational.
int brute_force_min_parity(int u, int loss_num, int loss_den) {
  for (int p = 0;; ++p) {
    std::int64_t arrived_scaled =
        static_cast<std::int64_t>(u + p) * (loss_den - loss_num);
    if (arrived_scaled / loss_den >= u) return p;
  }
}

Pmf random_support_pmf(const Grid& grid, rng::Stream& stream, int support_points) {
  std::vector<double> probs(grid.size(), 0.0);
  double sum = 0.0;
  for (int k = 0; k < support_points; ++k) {
    std::size_t i = stream.next_below(static_cast<std::uint32_t>(grid.size()));
    double w = 0.1 + stream.next_unit();
    probs[i] += w;
    sum += w;
  }
  for (double& p : probs) p /= sum;
  return Pmf(grid, probs);
}

CrfBitrateModel random_model(rng::Stream& stream) {
  std::map<int, GaussianComponent> table;
  double mean = 14000.0;
  for (int crf : kCrfLevels) {
    mean *= 0.55 + 0.2 * stream.next_unit();
    table[crf] = GaussianComponent{1.0, mean, 200.0 + 600.0 * stream.next_unit()};
  }
  return CrfBitrateModel(CrfDefaults(table));
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool check_fec_minimality(std::string& detail) {
  long checked = 0;
  for (int k = 0; k < 50; ++k) {
    double alpha = min_fec_ratio(0.02 * k);
    for (int u = 1; u <= 200; ++u) {
      if (parity_packet_count(alpha, u) != brute_force_min_parity(u, k, 50)) {
        detail = "mismatch at l=" + std::to_string(0.02 * k) + " u=" + std::to_string(u);
        return false;
      }
      ++checked;
    }
  }
  detail = std::to_string(checked) + " (l, u) pairs exact";
  return true;
}

bool check_dp_exactness(std::string& detail) {
  rng::Stream stream(20240);
  const Grid& bw_grid = default_bandwidth_grid();
  const Grid& loss_grid = default_loss_grid();
  for (int trial = 0; trial < 100; ++trial) {
    int horizon = 1 + static_cast<int>(stream.next_below(3));
    CrfBitrateModel model = random_model(stream);
    std::vector<PredictionStep> steps;
    for (int k = 0; k < horizon; ++k) {
      steps.push_back(PredictionStep{random_support_pmf(bw_grid, stream, 4),
                                     random_support_pmf(loss_grid, stream, 3)});
    }
    int prev = kCrfLevels[stream.next_below(kCrfLevels.size())];

    std::vector<std::vector<Decision>> candidates;
    for (const PredictionStep& step : steps) {
      Pmf fec = fec_ratio_distribution(step.loss);
      FrameRateDistribution rates = frame_rate_distribution(step.bandwidth);
      auto atoms = available_bitrate_atoms(step.bandwidth, rates, fec);
      int c_star = select_crf(atoms, model);
      std::vector<Decision> layer;
      for (int crf : kCrfLevels) {
        if (crf >= c_star) layer.push_back(backtrack_decision(crf, atoms, model));
      }
      candidates.push_back(layer);
    }
    double best_total = -1e18;
    std::vector<std::size_t> index(candidates.size(), 0);
    while (true) {
      double total = 0.0;
      int last = prev;
      for (std::size_t k = 0; k < candidates.size(); ++k) {
        const Decision& d = candidates[k][index[k]];
        total = total + qoe_step(d.frame_rate, d.crf, last);
        last = d.crf;
      }
      if (total > best_total) best_total = total;
      std::size_t pos = 0;
      while (pos < index.size() && ++index[pos] == candidates[pos].size()) {
        index[pos] = 0;
        ++pos;
      }
      if (pos == index.size()) break;
    }

    HorizonPlan plan = solve_horizon(steps, model, prev);
    if (plan.total_qoe != best_total) {
      detail = "trial " + std::to_string(trial) + ": dp=" +
               std::to_string(plan.total_qoe) + " exhaustive=" +
               std::to_string(best_total);
      return false;
    }
  }
  detail = "100 seeded cases, exact equality";
  return true;
}

bool check_distribution_algebra(std::string& detail) {
  rng::Stream stream(555);
  Grid grids[] = {default_bandwidth_grid(), default_loss_grid(), default_fec_grid()};
  long ops = 0;
  double worst_norm = 0.0;
  for (int trial = 0; trial < 2500; ++trial) {
    const Grid& g = grids[trial % 3];
    Pmf a = random_support_pmf(g, stream, 1 + static_cast<int>(stream.next_below(12)));
    Pmf b = random_support_pmf(g, stream, 1 + static_cast<int>(stream.next_below(12)));
    Pmf m = mix(a, b, stream.next_unit());
    double scale = 0.25 + 1.5 * stream.next_unit();
    double shift = stream.next_unit() * g.interval() * 3.0;
    Pmf t = transform(m, [&](double v) { return scale * v + shift; },
                      grids[(trial + 1) % 3]);
    ops += 4;

    for (const Pmf* p : {&a, &b, &m, &t}) {
      double sum = 0.0;
      for (std::size_t i = 0; i < p->size(); ++i) sum += p->probability(i);
      worst_norm = std::max(worst_norm, std::abs(sum - 1.0));
      if (std::abs(sum - 1.0) > 1e-9) {
        detail = "normalization drift " + std::to_string(std::abs(sum - 1.0));
        return false;
      }
    }
    double in_mass = 0.0, out_mass = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) in_mass += m.probability(i);
    for (std::size_t i = 0; i < t.size(); ++i) out_mass += t.probability(i);
    if (std::abs(in_mass - out_mass) > 1e-12 * static_cast<double>(t.size())) {
      detail = "transform mass drift " + std::to_string(std::abs(in_mass - out_mass));
      return false;
    }
  }
  std::ostringstream out;
  out << ops << " ops, worst normalization drift " << worst_norm;
  detail = out.str();
  return true;
}

bool check_determinism(std::string& detail) {
  ExperimentConfig cfg;
  cfg.duration_s = 300;
  cfg.seeds = {11, 12};
  cfg.controllers = {"baroc", "rfec_like", "informer_cbr"};
  cfg.train_duration_s = 4000;

  fs::path dir_a = fs::temp_directory_path() / "baroc_accept_det_a";
  fs::path dir_b = fs::temp_directory_path() / "baroc_accept_det_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  cmd_run(cfg, dir_a);
  cmd_run(cfg, dir_b);
  for (const std::string& id : cfg.controllers) {
    std::string a = slurp(dir_a / ("seconds_" + id + ".csv"));
    std::string b = slurp(dir_b / ("seconds_" + id + ".csv"));
    if (a.empty() || a != b) {
      detail = "seconds_" + id + ".csv differs between runs";
      return false;
    }
  }
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  detail = "byte-identical seconds CSVs across independent runs";
  return true;
}

// Shared by checks 5 and 6.
RunOutput directional_output;
bool directional_ready = false;

const RunOutput& directional_run() {
  if (!directional_ready) {
    ExperimentConfig cfg;  // defaults: 7200 s, seeds 1..5, all controllers
    directional_output = cmd_run(cfg, std::nullopt);
    directional_ready = true;
  }
  return directional_output;
}

bool check_directional_ordering(std::string& detail) {
  const RunOutput& out = directional_run();
  const auto& s = out.summaries;
  double baroc_psnr = s.at("baroc").mean_psnr_db;
  std::ostringstream log;
  log.setf(std::ios::fixed);
  log.precision(3);
  bool pass = true;
  for (const std::string& other :
       {"fbra_like", "rfec_like", "lightfec_ewma", "informer_vbr", "mtp_informer_cbr",
        "informer_cbr"}) {
    double v = s.at(other).mean_psnr_db;
    log << other << "=" << v << " ";
    if (!(baroc_psnr > v)) pass = false;
  }
  log << "| baroc=" << baroc_psnr;
  double baroc_utility = s.at("baroc").mean_parity_utility;
  double rfec_utility = s.at("rfec_like").mean_parity_utility;
  if (!(baroc_utility > rfec_utility)) pass = false;
  log << " | utility baroc=" << baroc_utility << " rfec=" << rfec_utility;
  double rfec_recovery = s.at("rfec_like").mean_recovery_ratio;
  for (const auto& [id, summary] : s) {
    if (!(rfec_recovery >= summary.mean_recovery_ratio)) pass = false;
  }
  log << " | rfec recovery=" << rfec_recovery;
  detail = log.str();
  return pass;
}

bool check_ablation_monotonicity(std::string& detail) {
  const auto& s = directional_run().summaries;
  double baroc = s.at("baroc").mean_psnr_db;
  double vbr = s.at("informer_vbr").mean_psnr_db;
  double cbr = s.at("informer_cbr").mean_psnr_db;
  double mtp_cbr = s.at("mtp_informer_cbr").mean_psnr_db;
  std::ostringstream log;
  log.setf(std::ios::fixed);
  log.precision(3);
  log << "baroc=" << baroc << " informer_vbr=" << vbr << " informer_cbr=" << cbr
      << " mtp_informer_cbr=" << mtp_cbr;
  detail = log.str();
  return baroc >= vbr && vbr >= cbr && baroc >= mtp_cbr;
}

bool check_predictor_quality(std::string& detail) {
  RegimeParams params;  // reallocation anomaly probability 0.3073
  NetworkTrace trace = gen_synthetic_trace(36000, 777, params);
  BimodalPredictor bimodal(fit_bimodal(trace));
  EwmaPredictor ewma;
  const Grid& bw_grid = default_bandwidth_grid();
  const Grid& loss_grid = default_loss_grid();

  double crps_bimodal = 0.0, crps_ewma = 0.0;
  long predictions = 0;
  for (std::size_t now = 180; now + 6 < trace.samples.size(); now += 3) {
    std::span<const NetworkSample> history(trace.samples.data(), now);
    auto steps_b = bimodal.predict(history, 5);
    auto steps_e = ewma.predict(history, 5);
    for (int k = 0; k < 5; ++k) {
      const NetworkSample& actual = trace.samples[now + k];
      double bw_true = bw_grid.value(bw_grid.index_of(actual.bandwidth_kbps));
      double loss_true = loss_grid.value(loss_grid.index_of(actual.loss_ratio));
      crps_bimodal += crps(steps_b[k].bandwidth, bw_true) / bw_grid.max_value() +
                      crps(steps_b[k].loss, loss_true);
      crps_ewma += crps(steps_e[k].bandwidth, bw_true) / bw_grid.max_value() +
                   crps(steps_e[k].loss, loss_true);
      ++predictions;
    }
  }
  std::ostringstream log;
  log << predictions << " predictions, mean crps bimodal="
      << crps_bimodal / predictions << " ewma=" << crps_ewma / predictions;
  detail = log.str();
  return predictions >= 10000 && crps_bimodal < crps_ewma;
}

bool check_decision_latency(std::string& detail) {
  ExperimentConfig cfg;
  cfg.bench_iterations = 1000;
  cfg.train_duration_s = 4000;
  BenchResult result = cmd_bench(cfg);
  std::ostringstream log;
  log << "median " << result.median_ms << " ms, std " << result.std_dev_ms << " ms over "
      << result.iterations << " calls";
  detail = log.str();
  return result.median_ms < 20.0;
}

bool check_labeling_recall(std::string& detail) {
  RegimeParams params;
  SyntheticNetResult result = gen_synthetic_trace_detailed(100000, 31337, params);
  NetworkTrace relabeled = label_regimes(result.trace, params.label_rules);
  long injected = 0, recovered = 0;
  for (std::size_t i = 0; i < relabeled.samples.size(); ++i) {
    if (result.anomalous_regime[i]) {
      ++injected;
      if (relabeled.samples[i].is_anomaly) ++recovered;
    }
  }
  double recall = injected == 0 ? 0.0
                                : static_cast<double>(recovered) /
                                      static_cast<double>(injected);
  std::ostringstream log;
  log << recovered << "/" << injected << " injected anomalies labeled (recall "
      << recall << ")";
  detail = log.str();
  return recall >= 0.99;
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  run_check(1, "fec minimality oracle", check_fec_minimality);
  run_check(2, "dp exactness", check_dp_exactness);
  run_check(3, "distribution algebra", check_distribution_algebra);
  run_check(4, "determinism", check_determinism);
  run_check(5, "directional ordering", check_directional_ordering);
  run_check(6, "ablation monotonicity", check_ablation_monotonicity);
  run_check(7, "predictor quality", check_predictor_quality);
  run_check(8, "decision latency", check_decision_latency);
  run_check(9, "anomaly labeling recall", check_labeling_recall);
  std::printf("ACCEPTANCE: %d/9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}

#include <doctest.h>

#include <cmath>
#include <map>
#include <memory>
#include <vector>

#include "baroc/controllers.hpp"
#include "baroc/rng.hpp"
#include "baroc/simnet.hpp"
#include "baroc/synth.hpp"

using namespace baroc;

namespace {

CrfDefaults ladder_defaults() {
  std::map<int, GaussianComponent> table;
  double means[] = {12000, 8000, 5000, 3000, 1500, 800};
  for (std::size_t i = 0; i < kCrfLevels.size(); ++i) {
    table[kCrfLevels[i]] = GaussianComponent{1.0, means[i], 400.0};
  }
  return CrfDefaults(table);
}

NetworkTrace trace_with_loss(std::vector<double> losses, double bandwidth = 9000.0) {
  NetworkTrace trace;
  for (std::size_t t = 0; t < losses.size(); ++t) {
    trace.samples.push_back(NetworkSample{.t = static_cast<std::int64_t>(t),
                                          .bandwidth_kbps = bandwidth,
                                          .loss_ratio = losses[t],
                                          .latency_ms = 40.0});
  }
  return label_regimes(trace);
}

}  // namespace

TEST_CASE("fbra state machine") {
  CrfBitrateModel model(ladder_defaults());

  SUBCASE("documented initialization") {
    FbraController fbra;
    Decision d = fbra.decide({}, model, 51);
    CHECK(fbra.state() == FbraController::State::kStay);
    CHECK(d.crf == 41);
    CHECK(d.fec_ratio == doctest::Approx(0.05));
    CHECK(d.frame_rate == 60);
  }

  SUBCASE("sustained loss forces the down state at the bottom quality") {
    FbraController fbra;
    NetworkTrace trace = trace_with_loss({0.05, 0.05, 0.05, 0.05});
    Decision d{};
    for (std::size_t t = 0; t <= trace.samples.size(); ++t) {
      std::span<const NetworkSample> history(trace.samples.data(), t);
      d = fbra.decide(history, model, 41);
    }
    CHECK(fbra.state() == FbraController::State::kDown);
    CHECK(d.crf == 51);
    CHECK(d.fec_ratio == doctest::Approx(0.1));
  }

  SUBCASE("congested seconds count as lossy") {
    FbraController fbra;
    NetworkTrace trace = trace_with_loss(std::vector<double>(3, 0.001));
    SecondReport shed;
    shed.decision = Decision{41, 60, 0.05, 3000.0};
    shed.frames_offered = 40;  // frames were shed
    Decision d{};
    for (std::size_t t = 0; t <= trace.samples.size(); ++t) {
      std::span<const NetworkSample> history(trace.samples.data(), t);
      d = fbra.decide(history, model, 41);
      fbra.observe(shed);
    }
    CHECK(fbra.state() == FbraController::State::kDown);
    CHECK(d.crf == 51);
  }

  SUBCASE("ten clean seconds step the quality up one level") {
    FbraController fbra;
    NetworkTrace trace = trace_with_loss(std::vector<double>(10, 0.001));
    Decision d{};
    for (std::size_t t = 0; t <= trace.samples.size(); ++t) {
      std::span<const NetworkSample> history(trace.samples.data(), t);
      d = fbra.decide(history, model, 41);
    }
    CHECK(d.crf == 36);  // one level better than the initial 41
    CHECK(fbra.state() == FbraController::State::kUp);
  }

  SUBCASE("a lossy probe reverts the step") {
    FbraController fbra;
    std::vector<double> losses(10, 0.001);
    losses.push_back(0.05);  // observed right after the step
    NetworkTrace trace = trace_with_loss(losses);
    Decision d{};
    for (std::size_t t = 0; t <= trace.samples.size(); ++t) {
      std::span<const NetworkSample> history(trace.samples.data(), t);
      d = fbra.decide(history, model, 41);
    }
    CHECK(d.crf == 41);
    CHECK(fbra.state() == FbraController::State::kStay);
  }
}

TEST_CASE("rfec-like controller") {
  CrfBitrateModel model(ladder_defaults());

  SUBCASE("fills the residual budget with parity") {
    RfecLikeController rfec;
    NetworkTrace trace = trace_with_loss(std::vector<double>(50, 0.001), 10000.0);
    std::span<const NetworkSample> history(trace.samples.data(), trace.samples.size());
    Decision d = rfec.decide(history, model, 51);
    // Budget 0.5 * 10000 picks the 5000 kbps level; parity gets the rest:
    // (10000 - 5000 - 60*12) / 5000 = 0.856.
    CHECK(d.crf == 36);
    CHECK(d.fec_ratio == doctest::Approx(0.856).epsilon(1e-6));
    CHECK(d.frame_rate == 60);
  }

  SUBCASE("bandwidth below the ladder floor still yields the bottom level") {
    RfecLikeController rfec;
    NetworkTrace trace = trace_with_loss(std::vector<double>(50, 0.001), 900.0);
    std::span<const NetworkSample> history(trace.samples.data(), trace.samples.size());
    Decision d = rfec.decide(history, model, 51);
    CHECK(d.crf == 51);
    CHECK(d.fec_ratio >= 0.0);
    CHECK(d.fec_ratio <= 2.0);
  }

  SUBCASE("ratio saturates at the cap when bandwidth is plentiful") {
    RfecLikeController rfec;
    NetworkTrace trace = trace_with_loss(std::vector<double>(50, 0.001), 15000.0);
    std::span<const NetworkSample> history(trace.samples.data(), trace.samples.size());
    Decision d = rfec.decide(history, model, 51);
    CHECK(d.crf == 36);  // 0.5 * 15000 = 7500 < 8000, still the 5000 level
    CHECK(d.fec_ratio == doctest::Approx(std::min((15000.0 - 5000.0 - 720.0) / 5000.0, 2.0)));
  }
}

TEST_CASE("lightfec-like controller") {
  CrfBitrateModel model(ladder_defaults());

  SUBCASE("ratio covers the loss estimate") {
    LightfecEwmaController lf;
    NetworkTrace trace = trace_with_loss(std::vector<double>(200, 0.04), 10000.0);
    std::span<const NetworkSample> history(trace.samples.data(), trace.samples.size());
    Decision d = lf.decide(history, model, 51);
    CHECK(d.fec_ratio == doctest::Approx(0.04 / 0.96).epsilon(1e-6));
    // Largest level with (1 + a) * mean + 720 <= 10000 is the 8000 level.
    CHECK(d.crf == 31);
  }

  SUBCASE("low bandwidth steps the quality down") {
    LightfecEwmaController lf;
    NetworkTrace trace = trace_with_loss(std::vector<double>(200, 0.04), 4000.0);
    std::span<const NetworkSample> history(trace.samples.data(), trace.samples.size());
    Decision d = lf.decide(history, model, 51);
    CHECK(d.crf == 41);  // (1.0417)*3000 + 720 <= 4000
  }

  SUBCASE("extreme loss estimates are clamped") {
    LightfecEwmaController lf;
    NetworkTrace trace = trace_with_loss(std::vector<double>(200, 1.0), 10000.0);
    std::span<const NetworkSample> history(trace.samples.data(), trace.samples.size());
    Decision d = lf.decide(history, model, 51);
    CHECK(d.fec_ratio <= 2.0);
  }
}

TEST_CASE("point prediction with the full scheduler matches oracle point masses") {
  // The single-point ablation with oracle scalars must equal the full
  // controller fed oracle point-mass distributions.
  NetworkTrace net = gen_synthetic_trace(240, 19);
  VideoTrace video = gen_synthetic_video(240, 19);

  class OracleScalarPredictor : public Predictor {
   public:
    explicit OracleScalarPredictor(const NetworkTrace& truth) : oracle_(truth) {}
    std::vector<PredictionStep> predict(std::span<const NetworkSample> history,
                                        int horizon) const override {
      // Scalars from the truth, re-emitted as 100%-probability points.
      auto steps = oracle_.predict(history, horizon);
      std::vector<std::pair<double, double>> scalars;
      for (const PredictionStep& s : steps) {
        scalars.emplace_back(s.bandwidth.expectation(), s.loss.expectation());
      }
      return as_point_mass(scalars);
    }
    std::string name() const override { return "oracle_scalar"; }

   private:
    OraclePredictor oracle_;
  };

  auto point = std::make_shared<OracleScalarPredictor>(net);
  auto dist = std::make_shared<OraclePredictor>(net);
  BarocController point_ctl("point", point, 5);
  BarocController dist_ctl("dist", dist, 5);

  auto ra = run_experiment(net, video, point_ctl, 7);
  auto rb = run_experiment(net, video, dist_ctl, 7);
  CHECK(second_reports_to_csv(ra) == second_reports_to_csv(rb));
}

TEST_CASE("expected-value collapse under-protects a bimodal loss forecast") {
  // Anomaly-heavy bimodal loss: mass 0.4 at zero loss, 0.6 at 32% loss.
  const Grid& loss_grid = default_loss_grid();
  const Grid& bw_grid = default_bandwidth_grid();
  std::vector<double> loss_probs(loss_grid.size(), 0.0);
  loss_probs[loss_grid.index_of(0.0)] = 0.4;
  loss_probs[loss_grid.index_of(0.32)] = 0.6;
  Pmf loss_pmf(loss_grid, loss_probs);
  Pmf bw_pmf = Pmf::point_mass(bw_grid, 10000.0);

  class StubPredictor : public Predictor {
   public:
    StubPredictor(Pmf bw, Pmf loss) : bw_(std::move(bw)), loss_(std::move(loss)) {}
    std::vector<PredictionStep> predict(std::span<const NetworkSample>,
                                        int horizon) const override {
      return std::vector<PredictionStep>(static_cast<std::size_t>(horizon),
                                         PredictionStep{bw_, loss_});
    }
    std::string name() const override { return "stub"; }

   private:
    Pmf bw_;
    Pmf loss_;
  };

  auto full = std::make_shared<StubPredictor>(bw_pmf, loss_pmf);
  auto collapsed = std::make_shared<PointCollapsePredictor>(full);

  BarocController full_ctl("full", full, 1);
  BarocController collapsed_ctl("collapsed", collapsed, 1);

  // Actual loss realizes the anomalous branch.
  NetworkTrace net = trace_with_loss(std::vector<double>(60, 0.32), 12000.0);
  VideoTrace video = gen_synthetic_video(60, 3);
  auto r_full = run_experiment(net, video, full_ctl, 11);
  auto r_collapsed = run_experiment(net, video, collapsed_ctl, 11);

  // The distribution-aware run covers the 32% branch; the collapsed run
  // schedules for the 19.2% expectation and recovers less.
  double full_recovery = 0.0, collapsed_recovery = 0.0;
  for (std::size_t t = 1; t < net.samples.size(); ++t) {
    full_recovery += r_full[t].recovery_ratio();
    collapsed_recovery += r_collapsed[t].recovery_ratio();
  }
  CHECK(r_full[10].decision.fec_ratio > r_collapsed[10].decision.fec_ratio);
  CHECK(full_recovery > collapsed_recovery);
}

TEST_CASE("controllers emit valid decisions deterministically") {
  NetworkTrace net = gen_synthetic_trace(400, 23);
  CrfBitrateModel model(ladder_defaults());

  std::vector<std::unique_ptr<Controller>> controllers;
  controllers.push_back(std::make_unique<FbraController>());
  controllers.push_back(std::make_unique<RfecLikeController>());
  controllers.push_back(std::make_unique<LightfecEwmaController>());
  controllers.push_back(std::make_unique<BarocController>(
      "baroc", std::make_shared<EwmaPredictor>(), 5));

  for (auto& controller : controllers) {
    int prev = 51;
    for (std::size_t t = 0; t < net.samples.size(); t += 7) {
      std::span<const NetworkSample> history(net.samples.data(), t);
      Decision d = controller->decide(history, model, prev);
      CHECK(crf_index(d.crf) < kCrfLevels.size());
      CHECK(d.frame_rate >= 0);
      CHECK(d.frame_rate <= 60);
      CHECK(d.fec_ratio >= 0.0);
      CHECK(d.fec_ratio <= 2.0);
      prev = d.crf;
    }
  }
}

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <optional>

#include "baroc/controllers.hpp"
#include "baroc/experiment.hpp"
#include "baroc/predictor.hpp"
#include "baroc/scheduler.hpp"
#include "baroc/simnet.hpp"
#include "baroc/synth.hpp"

namespace py = pybind11;
using namespace baroc;

namespace {

// Keeps a run's controller and its predictor inputs alive together.
std::vector<SecondReport> run_experiment_by_id(const NetworkTrace& net,
                                               const VideoTrace& video,
                                               const std::string& controller_id,
                                               std::uint64_t seed,
                                               const std::string& predictor,
                                               int horizon) {
  ExperimentConfig cfg;
  cfg.controllers = {controller_id};
  cfg.predictor = predictor;
  cfg.horizon = horizon;
  cfg.validate();

  std::unique_ptr<Controller> controller;
  std::shared_ptr<const Predictor> pred;
  if (predictor == "ewma") {
    pred = std::make_shared<EwmaPredictor>();
  } else if (predictor == "oracle") {
    pred = std::make_shared<OraclePredictor>(net);
  } else {
    BimodalFitOptions options;
    NetworkTrace labeled = net.labeled ? net : label_regimes(net);
    pred = std::make_shared<BimodalPredictor>(fit_bimodal(labeled, options));
  }
  if (controller_id == "baroc") {
    controller = std::make_unique<BarocController>("baroc", pred, horizon);
  } else if (controller_id == "fbra_like") {
    controller = std::make_unique<FbraController>();
  } else if (controller_id == "rfec_like") {
    controller = std::make_unique<RfecLikeController>();
  } else if (controller_id == "lightfec_ewma") {
    controller = std::make_unique<LightfecEwmaController>();
  } else {
    throw std::invalid_argument("unknown controller id '" + controller_id + "'");
  }
  return run_experiment(net, video, *controller, seed);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Probabilistic uplink video scheduling lab: PMF algebra, synthetic "
            "traces, regime-aware prediction, joint quality/FEC scheduling, and a "
            "deterministic packet-level delivery simulator.";

  py::class_<Grid>(m, "Grid")
      .def(py::init<double, double, double>(), py::arg("min_value"),
           py::arg("max_value"), py::arg("interval"))
      .def_property_readonly("min_value", &Grid::min_value)
      .def_property_readonly("max_value", &Grid::max_value)
      .def_property_readonly("interval", &Grid::interval)
      .def("__len__", &Grid::size)
      .def("value", &Grid::value, py::arg("index"))
      .def("index_of", &Grid::index_of, py::arg("value"))
      .def("__eq__", [](const Grid& a, const Grid& b) { return a == b; });

  py::class_<Pmf>(m, "Pmf")
      .def(py::init<Grid, std::vector<double>>(), py::arg("grid"),
           py::arg("probabilities"))
      .def_static("point_mass", &Pmf::point_mass, py::arg("grid"), py::arg("value"))
      .def_static(
          "from_samples",
          [](const std::vector<double>& samples, const Grid& grid) {
            return Pmf::from_samples(samples, grid);
          },
          py::arg("samples"), py::arg("grid"))
      .def_property_readonly("grid", &Pmf::grid)
      .def_property_readonly("probabilities", &Pmf::probabilities)
      .def("expectation", &Pmf::expectation)
      .def("__len__", &Pmf::size);

  m.def("mix", &mix, py::arg("a"), py::arg("b"), py::arg("weight_a"));
  m.def(
      "transform",
      [](const Pmf& p, const std::function<double(double)>& map, const Grid& out) {
        TransformStats stats;
        Pmf result = transform(p, map, out, &stats);
        return py::make_tuple(result, stats.clamped_low, stats.clamped_high);
      },
      py::arg("pmf"), py::arg("map"), py::arg("out_grid"),
      "Returns (pmf, clamped_low_mass, clamped_high_mass).");
  m.def("crps", &crps, py::arg("forecast"), py::arg("observed"));
  m.def("default_bandwidth_grid", &default_bandwidth_grid,
        py::return_value_policy::copy);
  m.def("default_loss_grid", &default_loss_grid, py::return_value_policy::copy);
  m.def("default_fec_grid", &default_fec_grid, py::return_value_policy::copy);

  py::class_<NetworkSample>(m, "NetworkSample")
      .def(py::init<>())
      .def_readwrite("t", &NetworkSample::t)
      .def_readwrite("bandwidth_kbps", &NetworkSample::bandwidth_kbps)
      .def_readwrite("loss_ratio", &NetworkSample::loss_ratio)
      .def_readwrite("latency_ms", &NetworkSample::latency_ms)
      .def_readwrite("is_reallocation", &NetworkSample::is_reallocation)
      .def_readwrite("is_anomaly", &NetworkSample::is_anomaly);

  py::class_<NetworkTrace>(m, "NetworkTrace")
      .def(py::init<>())
      .def_readwrite("samples", &NetworkTrace::samples)
      .def_readwrite("labeled", &NetworkTrace::labeled)
      .def("__len__", &NetworkTrace::duration);

  py::class_<LabelRules>(m, "LabelRules")
      .def(py::init<>())
      .def_readwrite("reallocation_schedule", &LabelRules::reallocation_schedule)
      .def_readwrite("anomaly_threshold", &LabelRules::anomaly_threshold);

  m.def("label_regimes", &label_regimes, py::arg("trace"),
        py::arg("rules") = LabelRules{});
  m.def("is_reallocation_second", &is_reallocation_second, py::arg("t"),
        py::arg("schedule"));
  m.def("network_trace_to_csv", &network_trace_to_csv);
  m.def("network_trace_from_csv",
        [](const std::string& csv) { return network_trace_from_csv(csv); });
  m.def("save_network_trace", &save_network_trace, py::arg("trace"), py::arg("path"));
  m.def("load_network_trace", &load_network_trace, py::arg("path"));

  py::enum_<FrameType>(m, "FrameType")
      .value("INTRA", FrameType::kIntra)
      .value("PREDICTED", FrameType::kPredicted);

  py::class_<CrfEncoding>(m, "CrfEncoding")
      .def_readonly("bitrate_kbps", &CrfEncoding::bitrate_kbps)
      .def_readonly("psnr_db", &CrfEncoding::psnr_db)
      .def_readonly("frame_sizes_bits", &CrfEncoding::frame_sizes_bits);

  py::class_<VideoSecond>(m, "VideoSecond")
      .def_readonly("t", &VideoSecond::t)
      .def("at_crf", &VideoSecond::at_crf, py::arg("crf"),
           py::return_value_policy::reference_internal);

  py::class_<VideoTrace>(m, "VideoTrace")
      .def(py::init<>())
      .def_readonly("seconds", &VideoTrace::seconds)
      .def("__len__", &VideoTrace::duration);

  m.def("video_trace_to_csv", &video_trace_to_csv);
  m.def("video_trace_from_csv",
        [](const std::string& csv) { return video_trace_from_csv(csv); });
  m.def("save_video_trace", &save_video_trace, py::arg("trace"), py::arg("path"));
  m.def("load_video_trace", &load_video_trace, py::arg("path"));
  m.def("tile_video", &tile_video, py::arg("video"), py::arg("duration_s"));
  m.attr("CRF_LEVELS") = std::vector<int>(kCrfLevels.begin(), kCrfLevels.end());

  py::class_<RegimeParams>(m, "RegimeParams")
      .def(py::init<>())
      .def_readwrite("p_anomaly_reallocation", &RegimeParams::p_anomaly_reallocation)
      .def_readwrite("p_anomaly_normal", &RegimeParams::p_anomaly_normal)
      .def_readwrite("bandwidth_mean_kbps", &RegimeParams::bandwidth_mean_kbps)
      .def_readwrite("bandwidth_sigma_log", &RegimeParams::bandwidth_sigma_log)
      .def_readwrite("anomaly_bandwidth_scale", &RegimeParams::anomaly_bandwidth_scale)
      .def_readwrite("anomaly_bandwidth_sigma_log",
                     &RegimeParams::anomaly_bandwidth_sigma_log)
      .def_readwrite("loss_shift", &RegimeParams::loss_shift)
      .def_readwrite("loss_exp_scale", &RegimeParams::loss_exp_scale)
      .def_readwrite("anomaly_loss_mean_scale", &RegimeParams::anomaly_loss_mean_scale)
      .def_readwrite("anomaly_loss_shift", &RegimeParams::anomaly_loss_shift)
      .def_readwrite("latency_mean_ms", &RegimeParams::latency_mean_ms)
      .def_readwrite("anomaly_latency_scale", &RegimeParams::anomaly_latency_scale)
      .def_readwrite("label_rules", &RegimeParams::label_rules);

  py::class_<RdParams>(m, "RdParams")
      .def(py::init<>())
      .def_readwrite("base_bitrate_kbps", &RdParams::base_bitrate_kbps)
      .def_readwrite("bitrate_halving_crf_step", &RdParams::bitrate_halving_crf_step)
      .def_readwrite("vbr_sigma_log", &RdParams::vbr_sigma_log)
      .def_readwrite("scene_calm_scale", &RdParams::scene_calm_scale)
      .def_readwrite("scene_action_scale", &RdParams::scene_action_scale)
      .def_readwrite("scene_stay_prob", &RdParams::scene_stay_prob)
      .def_readwrite("psnr_intercept_db", &RdParams::psnr_intercept_db)
      .def_readwrite("psnr_slope_db_per_crf", &RdParams::psnr_slope_db_per_crf);

  m.def("gen_synthetic_trace", &gen_synthetic_trace, py::arg("duration_s"),
        py::arg("seed"), py::arg("params") = RegimeParams{});
  m.def("gen_synthetic_video", &gen_synthetic_video, py::arg("duration_s"),
        py::arg("seed"), py::arg("params") = RdParams{});
  m.def("to_cbr", &to_cbr, py::arg("video"), py::arg("psnr_penalty_db") = 2.35);

  py::class_<PredictionStep>(m, "PredictionStep")
      .def_readonly("bandwidth", &PredictionStep::bandwidth)
      .def_readonly("loss", &PredictionStep::loss);

  py::class_<BimodalModel>(m, "BimodalModel")
      .def_readonly("bandwidth_normal", &BimodalModel::bandwidth_normal)
      .def_readonly("bandwidth_anomaly", &BimodalModel::bandwidth_anomaly)
      .def_readonly("loss_normal", &BimodalModel::loss_normal)
      .def_readonly("loss_anomaly", &BimodalModel::loss_anomaly)
      .def_readonly("p_anomaly_reallocation", &BimodalModel::p_anomaly_reallocation)
      .def_readonly("p_anomaly_normal", &BimodalModel::p_anomaly_normal)
      .def_readonly("pooled_fallback", &BimodalModel::pooled_fallback)
      .def("to_json", &BimodalModel::to_json_text)
      .def_static("from_json", &BimodalModel::from_json_text, py::arg("text"));

  m.def(
      "fit_bimodal",
      [](const NetworkTrace& trace) { return fit_bimodal(trace); },
      py::arg("labeled_trace"));

  py::class_<Predictor, std::shared_ptr<Predictor>>(m, "Predictor")
      .def("predict",
           [](const Predictor& p, const std::vector<NetworkSample>& history,
              int horizon) { return p.predict(history, horizon); },
           py::arg("history"), py::arg("horizon"))
      .def("name", &Predictor::name);

  py::class_<OraclePredictor, Predictor, std::shared_ptr<OraclePredictor>>(
      m, "OraclePredictor")
      .def(py::init<const NetworkTrace&>(), py::arg("truth"), py::keep_alive<1, 2>());
  py::class_<EwmaPredictor, Predictor, std::shared_ptr<EwmaPredictor>>(
      m, "EwmaPredictor")
      .def(py::init<>());
  py::class_<BimodalPredictor, Predictor, std::shared_ptr<BimodalPredictor>>(
      m, "BimodalPredictor")
      .def(py::init<BimodalModel>(), py::arg("model"));

  m.def(
      "as_point_mass",
      [](const std::vector<std::pair<double, double>>& scalars) {
        return as_point_mass(scalars);
      },
      py::arg("scalars"));
  m.def(
      "collapse_to_expectation",
      [](const std::vector<PredictionStep>& steps) {
        return collapse_to_expectation(steps);
      },
      py::arg("steps"));

  py::class_<GaussianComponent>(m, "GaussianComponent")
      .def(py::init<double, double, double>(), py::arg("weight"), py::arg("mean"),
           py::arg("std_dev"))
      .def_readonly("weight", &GaussianComponent::weight)
      .def_readonly("mean", &GaussianComponent::mean)
      .def_readonly("std_dev", &GaussianComponent::std_dev);

  py::class_<GaussianMixture>(m, "GaussianMixture")
      .def_readonly("components", &GaussianMixture::components)
      .def("cdf", &GaussianMixture::cdf, py::arg("x"))
      .def("mean", &GaussianMixture::mean);

  m.def(
      "fit_mixture",
      [](const std::vector<double>& samples) { return fit_mixture(samples); },
      py::arg("samples"));

  py::class_<CrfDefaults>(m, "CrfDefaults")
      .def_static("builtin", [] { return CrfDefaults::builtin(); })
      .def_static("from_video_trace", &CrfDefaults::from_video_trace, py::arg("video"))
      .def_static("from_json", &CrfDefaults::from_json_text, py::arg("text"))
      .def("to_json", &CrfDefaults::to_json_text);

  py::class_<CrfBitrateModel>(m, "CrfBitrateModel")
      .def(py::init<>())
      .def(py::init<CrfDefaults>(), py::arg("defaults"))
      .def("observe", &CrfBitrateModel::observe, py::arg("crf"),
           py::arg("bitrate_kbps"), py::arg("t"))
      .def("cdf_below", &CrfBitrateModel::cdf_below, py::arg("crf"),
           py::arg("bitrate_kbps"))
      .def("expected_bitrate", &CrfBitrateModel::expected_bitrate, py::arg("crf"))
      .def("using_default", &CrfBitrateModel::using_default, py::arg("crf"))
      .def("queue_size", &CrfBitrateModel::queue_size, py::arg("crf"));

  py::class_<QoeWeights>(m, "QoeWeights")
      .def(py::init<>())
      .def_readwrite("frame_rate", &QoeWeights::frame_rate)
      .def_readwrite("quality", &QoeWeights::quality)
      .def_readwrite("smoothness", &QoeWeights::smoothness);

  py::class_<Decision>(m, "Decision")
      .def_readonly("crf", &Decision::crf)
      .def_readonly("frame_rate", &Decision::frame_rate)
      .def_readonly("fec_ratio", &Decision::fec_ratio)
      .def_readonly("predicted_bitrate_kbps", &Decision::predicted_bitrate_kbps);

  py::class_<BitrateAtom>(m, "BitrateAtom")
      .def_readonly("bitrate_kbps", &BitrateAtom::bitrate_kbps)
      .def_readonly("probability", &BitrateAtom::probability)
      .def_readonly("bandwidth_kbps", &BitrateAtom::bandwidth_kbps)
      .def_readonly("frame_rate", &BitrateAtom::frame_rate)
      .def_readonly("fec_ratio", &BitrateAtom::fec_ratio);

  m.def("min_fec_ratio", &min_fec_ratio, py::arg("loss_ratio"));
  m.def("parity_packet_count", &parity_packet_count, py::arg("fec_ratio"),
        py::arg("data_packets"));
  m.def(
      "fec_ratio_distribution",
      [](const Pmf& loss) { return fec_ratio_distribution(loss); },
      py::arg("loss"));
  m.def("frame_rate_for_bandwidth", &frame_rate_for_bandwidth, py::arg("bandwidth_kbps"),
        py::arg("mtu_kbit") = kMtuKbit, py::arg("gamma_max") = kGammaMax);
  m.def(
      "available_bitrate_atoms",
      [](const Pmf& bandwidth, const Pmf& fec) {
        return available_bitrate_atoms(bandwidth, frame_rate_distribution(bandwidth),
                                       fec);
      },
      py::arg("bandwidth"), py::arg("fec"));
  m.def(
      "select_crf",
      [](const std::vector<BitrateAtom>& atoms, const CrfBitrateModel& model) {
        return select_crf(atoms, model);
      },
      py::arg("atoms"), py::arg("model"));
  m.def(
      "backtrack_decision",
      [](int crf, const std::vector<BitrateAtom>& atoms, const CrfBitrateModel& model) {
        return backtrack_decision(crf, atoms, model);
      },
      py::arg("crf"), py::arg("atoms"), py::arg("model"));
  m.def("qoe_step",
        [](int frame_rate, int crf, int prev_crf, const QoeWeights& weights) {
          return qoe_step(frame_rate, crf, prev_crf, weights);
        },
        py::arg("frame_rate"), py::arg("crf"), py::arg("prev_crf"),
        py::arg("weights") = QoeWeights{});

  py::class_<HorizonPlan>(m, "HorizonPlan")
      .def_readonly("decisions", &HorizonPlan::decisions)
      .def_readonly("total_qoe", &HorizonPlan::total_qoe);

  m.def(
      "solve_horizon",
      [](const std::vector<PredictionStep>& predictions, const CrfBitrateModel& model,
         int prev_crf, const QoeWeights& weights) {
        return solve_horizon(predictions, model, prev_crf, weights);
      },
      py::arg("predictions"), py::arg("model"), py::arg("prev_crf"),
      py::arg("weights") = QoeWeights{});

  py::class_<SecondReport>(m, "SecondReport")
      .def_readonly("t", &SecondReport::t)
      .def_readonly("sent_data", &SecondReport::sent_data)
      .def_readonly("sent_parity", &SecondReport::sent_parity)
      .def_readonly("lost", &SecondReport::lost)
      .def_readonly("lost_data", &SecondReport::lost_data)
      .def_readonly("recovered", &SecondReport::recovered)
      .def_readonly("frames_offered", &SecondReport::frames_offered)
      .def_readonly("frames_delivered", &SecondReport::frames_delivered)
      .def_readonly("psnr_db", &SecondReport::psnr_db)
      .def_readonly("stall", &SecondReport::stall)
      .def_readonly("decision", &SecondReport::decision)
      .def("recovery_ratio", &SecondReport::recovery_ratio)
      .def("parity_utility", &SecondReport::parity_utility);

  m.def("second_reports_to_csv",
        [](const std::vector<SecondReport>& reports) {
          return second_reports_to_csv(reports);
        },
        py::arg("reports"));

  m.def("run_experiment", &run_experiment_by_id, py::arg("net"), py::arg("video"),
        py::arg("controller"), py::arg("seed"), py::arg("predictor") = "bimodal",
        py::arg("horizon") = 5,
        "Runs one controller over paired traces; controller is one of 'baroc', "
        "'fbra_like', 'rfec_like', 'lightfec_ewma'.");
}

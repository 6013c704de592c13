#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "baroc/synth.hpp"
#include "baroc/traces.hpp"

using namespace baroc;

TEST_CASE("regime labeling") {
  NetworkTrace trace;
  trace.samples = {
      {.t = 72, .bandwidth_kbps = 9000, .loss_ratio = 0.001, .latency_ms = 40},
      {.t = 73, .bandwidth_kbps = 9000, .loss_ratio = 0.05, .latency_ms = 40},
      {.t = 120, .bandwidth_kbps = 9000, .loss_ratio = 0.02, .latency_ms = 40},
  };
  NetworkTrace labeled = label_regimes(trace);

  // 72 mod 60 = 12 is on the schedule; 73 and 120 (0) are not.
  CHECK(labeled.samples[0].is_reallocation);
  CHECK_FALSE(labeled.samples[0].is_anomaly);
  CHECK_FALSE(labeled.samples[1].is_reallocation);
  CHECK(labeled.samples[1].is_anomaly);
  // The threshold is inclusive.
  CHECK_FALSE(labeled.samples[2].is_reallocation);
  CHECK(labeled.samples[2].is_anomaly);
  CHECK(labeled.labeled);

  SUBCASE("idempotent") {
    NetworkTrace twice = label_regimes(labeled);
    for (std::size_t i = 0; i < twice.samples.size(); ++i) {
      CHECK(twice.samples[i].is_reallocation == labeled.samples[i].is_reallocation);
      CHECK(twice.samples[i].is_anomaly == labeled.samples[i].is_anomaly);
    }
  }

  SUBCASE("empty trace rejected") {
    CHECK_THROWS_AS(label_regimes(NetworkTrace{}), std::invalid_argument);
  }
}

TEST_CASE("synthetic network traces") {
  SUBCASE("deterministic for a fixed seed") {
    NetworkTrace a = gen_synthetic_trace(60, 7);
    NetworkTrace b = gen_synthetic_trace(60, 7);
    CHECK(network_trace_to_csv(a) == network_trace_to_csv(b));
    NetworkTrace c = gen_synthetic_trace(60, 8);
    CHECK(network_trace_to_csv(a) != network_trace_to_csv(c));
  }

  SUBCASE("zero anomaly probability leaves only normal-regime tails") {
    RegimeParams params;
    params.p_anomaly_reallocation = 0.0;
    params.p_anomaly_normal = 0.0;
    NetworkTrace trace = gen_synthetic_trace(20000, 3, params);
    std::size_t flagged = 0;
    for (const NetworkSample& s : trace.samples) flagged += s.is_anomaly ? 1 : 0;
    // Normal draws are loss_shift + Exp(scale); the tail above the threshold
    // is exp(-(threshold - shift)/scale).
    double tail =
        std::exp(-(params.label_rules.anomaly_threshold - params.loss_shift) /
                 params.loss_exp_scale);
    double expected = tail * 20000.0;
    CHECK(flagged < 2.5 * expected + 20.0);
  }

  SUBCASE("anomalous bandwidth mean matches the scaled regime") {
    RegimeParams params;
    params.bandwidth_mean_kbps = 10000.0;
    SyntheticNetResult result = gen_synthetic_trace_detailed(100000, 17, params);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < result.trace.samples.size(); ++i) {
      if (result.anomalous_regime[i]) {
        sum += result.trace.samples[i].bandwidth_kbps;
        ++n;
      }
    }
    REQUIRE(n > 1000);
    double mean = sum / static_cast<double>(n);
    CHECK(mean == doctest::Approx(7600.0).epsilon(0.02));
  }

  SUBCASE("regime frequencies reproduce the configured probabilities") {
    RegimeParams params;
    SyntheticNetResult result = gen_synthetic_trace_detailed(150000, 29, params);
    std::size_t realloc_total = 0, realloc_anom = 0, normal_total = 0, normal_anom = 0;
    for (std::size_t i = 0; i < result.trace.samples.size(); ++i) {
      if (result.trace.samples[i].is_reallocation) {
        ++realloc_total;
        realloc_anom += result.anomalous_regime[i];
      } else {
        ++normal_total;
        normal_anom += result.anomalous_regime[i];
      }
    }
    double p_realloc = static_cast<double>(realloc_anom) / realloc_total;
    double p_normal = static_cast<double>(normal_anom) / normal_total;
    CHECK(std::abs(p_realloc - params.p_anomaly_reallocation) < 0.01);
    CHECK(std::abs(p_normal - params.p_anomaly_normal) < 0.01);
  }

  SUBCASE("invalid parameters are rejected") {
    RegimeParams params;
    params.bandwidth_mean_kbps = -5.0;
    CHECK_THROWS_AS(gen_synthetic_trace(10, 1, params), std::invalid_argument);
  }
}

TEST_CASE("synthetic video traces") {
  SUBCASE("deterministic for a fixed seed") {
    VideoTrace a = gen_synthetic_video(30, 5);
    VideoTrace b = gen_synthetic_video(30, 5);
    CHECK(video_trace_to_csv(a) == video_trace_to_csv(b));
  }

  SUBCASE("psnr is monotone in CRF for every second") {
    VideoTrace trace = gen_synthetic_video(120, 9);
    for (const VideoSecond& sec : trace.seconds) {
      CHECK(sec.at_crf(26).psnr_db > sec.at_crf(51).psnr_db);
      for (std::size_t c = 1; c < kCrfLevels.size(); ++c) {
        CHECK(sec.encodings[c].psnr_db <= sec.encodings[c - 1].psnr_db);
      }
    }
  }

  SUBCASE("frame sizes are self-consistent with the bitrate") {
    VideoTrace trace = gen_synthetic_video(120, 13);
    for (const VideoSecond& sec : trace.seconds) {
      for (const CrfEncoding& enc : sec.encodings) {
        REQUIRE(enc.frame_sizes_bits.size() == 60);
        CHECK(enc.frame_types[0] == FrameType::kIntra);
        std::int64_t sum = 0;
        for (std::int64_t bits : enc.frame_sizes_bits) sum += bits;
        CHECK(std::abs(sum / 1000.0 - enc.bitrate_kbps) <= 0.01 * enc.bitrate_kbps);
      }
    }
  }

  SUBCASE("cbr variant holds per-CRF bitrate constant and lowers psnr") {
    VideoTrace vbr = gen_synthetic_video(200, 21);
    VideoTrace cbr = to_cbr(vbr, 2.35);
    for (std::size_t c = 0; c < kCrfLevels.size(); ++c) {
      double expected = 0.0;
      for (const VideoSecond& sec : vbr.seconds) expected += sec.encodings[c].bitrate_kbps;
      expected /= static_cast<double>(vbr.seconds.size());
      for (const VideoSecond& sec : cbr.seconds) {
        CHECK(sec.encodings[c].bitrate_kbps == doctest::Approx(expected));
      }
    }
    for (std::size_t t = 0; t < vbr.seconds.size(); ++t) {
      CHECK(cbr.seconds[t].at_crf(36).psnr_db ==
            doctest::Approx(vbr.seconds[t].at_crf(36).psnr_db - 2.35));
    }
  }
}

TEST_CASE("network trace CSV round trip and validation") {
  SUBCASE("well-formed rows parse") {
    std::string csv =
        "t,bandwidth_kbps,loss_ratio,latency_ms\n"
        "0,9000.5,0.01,40\n"
        "1,9100,0.02,41\n"
        "2,8900,0,39.5\n";
    NetworkTrace trace = network_trace_from_csv(csv);
    CHECK(trace.samples.size() == 3);
    CHECK(trace.samples[0].bandwidth_kbps == 9000.5);
    CHECK_FALSE(trace.labeled);
  }

  SUBCASE("schema violations carry line numbers") {
    std::string bad_loss =
        "t,bandwidth_kbps,loss_ratio,latency_ms\n"
        "0,9000,1.2,40\n";
    CHECK_THROWS_WITH_AS(network_trace_from_csv(bad_loss),
                         "line 2: loss_ratio must lie in [0, 1]", std::runtime_error);

    std::string bad_field =
        "t,bandwidth_kbps,loss_ratio,latency_ms\n"
        "0,9000,0.01,40\n"
        "1,abc,0.01,40\n";
    CHECK_THROWS_WITH_AS(network_trace_from_csv(bad_field),
                         "line 3: invalid number 'abc'", std::runtime_error);

    std::string non_monotone =
        "t,bandwidth_kbps,loss_ratio,latency_ms\n"
        "5,9000,0.01,40\n"
        "5,9000,0.01,40\n";
    CHECK_THROWS_WITH_AS(network_trace_from_csv(non_monotone),
                         "line 3: timestamps must be strictly increasing",
                         std::runtime_error);
  }

  SUBCASE("round trip is lossless") {
    NetworkTrace trace = gen_synthetic_trace(500, 31);
    NetworkTrace loaded = network_trace_from_csv(network_trace_to_csv(trace));
    REQUIRE(loaded.samples.size() == trace.samples.size());
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
      CHECK(loaded.samples[i].t == trace.samples[i].t);
      CHECK(loaded.samples[i].bandwidth_kbps == trace.samples[i].bandwidth_kbps);
      CHECK(loaded.samples[i].loss_ratio == trace.samples[i].loss_ratio);
      CHECK(loaded.samples[i].latency_ms == trace.samples[i].latency_ms);
    }
  }
}

TEST_CASE("video trace CSV round trip and validation") {
  SUBCASE("round trip is lossless") {
    VideoTrace trace = gen_synthetic_video(40, 37);
    VideoTrace loaded = video_trace_from_csv(video_trace_to_csv(trace));
    REQUIRE(loaded.seconds.size() == trace.seconds.size());
    CHECK(video_trace_to_csv(loaded) == video_trace_to_csv(trace));
  }

  SUBCASE("incomplete seconds are rejected") {
    VideoTrace trace = gen_synthetic_video(2, 41);
    std::string csv = video_trace_to_csv(trace);
    // Drop the last row (CRF 51 of the last second).
    std::size_t cut = csv.rfind('\n', csv.size() - 2);
    CHECK_THROWS_AS(video_trace_from_csv(csv.substr(0, cut + 1)), std::runtime_error);
  }
}

TEST_CASE("video tiling") {
  VideoTrace video = gen_synthetic_video(10, 43);
  VideoTrace tiled = tile_video(video, 25);
  REQUIRE(tiled.seconds.size() == 25);
  for (std::size_t i = 0; i < tiled.seconds.size(); ++i) {
    CHECK(tiled.seconds[i].t == static_cast<std::int64_t>(i));
    CHECK(tiled.seconds[i].at_crf(26).bitrate_kbps ==
          video.seconds[i % 10].at_crf(26).bitrate_kbps);
  }
}

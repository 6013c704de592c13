"""Smoke tests for the python surface of the C++ core."""

import math

import pytest

import baroc


def test_pmf_basics():
    grid = baroc.Grid(0.0, 15000.0, 500.0)
    assert len(grid) == 31
    pmf = baroc.Pmf.from_samples([1000.0, 1000.0, 2000.0], grid)
    assert pmf.probabilities[grid.index_of(1000.0)] == pytest.approx(2 / 3)
    assert pmf.expectation() == pytest.approx(4000.0 / 3.0)

    point = baroc.Pmf.point_mass(grid, 500.0)
    mixed = baroc.mix(point, baroc.Pmf.point_mass(grid, 1500.0), 0.25)
    assert mixed.expectation() == pytest.approx(0.25 * 500 + 0.75 * 1500)

    with pytest.raises(ValueError):
        baroc.Pmf.from_samples([], grid)


def test_transform_reports_clamping():
    loss_grid = baroc.default_loss_grid()
    fec_grid = baroc.default_fec_grid()
    pmf = baroc.Pmf.point_mass(loss_grid, 0.5)
    out, clamped_low, clamped_high = baroc.transform(
        pmf, lambda l: l / (1.0 - l), fec_grid
    )
    assert out.probabilities[fec_grid.index_of(1.0)] == pytest.approx(1.0)
    assert clamped_low == 0.0 and clamped_high == 0.0


def test_min_fec_ratio():
    assert baroc.min_fec_ratio(0.0) == 0.0
    assert baroc.min_fec_ratio(0.5) == pytest.approx(1.0)
    assert baroc.parity_packet_count(baroc.min_fec_ratio(0.02), 49) == 1
    with pytest.raises(Exception):
        baroc.min_fec_ratio(1.0)


def test_synthetic_traces_are_deterministic():
    a = baroc.gen_synthetic_trace(120, 7)
    b = baroc.gen_synthetic_trace(120, 7)
    assert baroc.network_trace_to_csv(a) == baroc.network_trace_to_csv(b)
    assert len(a) == 120
    assert a.samples[72].is_reallocation  # 72 mod 60 = 12

    video = baroc.gen_synthetic_video(30, 7)
    sec = video.seconds[0]
    assert sec.at_crf(26).psnr_db > sec.at_crf(51).psnr_db


def test_predictors_and_scheduler():
    trace = baroc.gen_synthetic_trace(3000, 11)
    model = baroc.fit_bimodal(trace)
    assert 0.0 < model.p_anomaly_reallocation < 1.0
    predictor = baroc.BimodalPredictor(model)
    steps = predictor.predict(trace.samples[:300], 5)
    assert len(steps) == 5
    assert sum(steps[0].bandwidth.probabilities) == pytest.approx(1.0)

    crf_model = baroc.CrfBitrateModel()
    plan = baroc.solve_horizon(steps, crf_model, 51)
    first = plan.decisions[0]
    assert first.crf in baroc.CRF_LEVELS
    assert 0 <= first.frame_rate <= 60
    assert first.fec_ratio >= 0.0


def test_run_experiment_round_trip():
    net = baroc.gen_synthetic_trace(90, 3)
    video = baroc.gen_synthetic_video(90, 3)
    reports = baroc.run_experiment(net, video, "baroc", seed=3, predictor="oracle")
    assert len(reports) == 90
    again = baroc.run_experiment(net, video, "baroc", seed=3, predictor="oracle")
    assert baroc.second_reports_to_csv(reports) == baroc.second_reports_to_csv(again)
    for r in reports:
        assert r.recovered <= r.lost
        assert r.frames_delivered <= r.frames_offered
        assert 0.0 <= r.recovery_ratio() <= 1.0


def test_trace_csv_round_trip(tmp_path):
    trace = baroc.gen_synthetic_trace(50, 21)
    path = tmp_path / "net.csv"
    baroc.save_network_trace(trace, path)
    loaded = baroc.load_network_trace(path)
    assert baroc.network_trace_to_csv(loaded) == baroc.network_trace_to_csv(trace)

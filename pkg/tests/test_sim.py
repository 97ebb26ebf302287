import csv
import math

import numpy as np
import pytest

from pfloc.filtering import FilterConfig
from pfloc.rfmap import Point2
from pfloc.sim import (
    RadioModel,
    ScenarioConfig,
    corner_center_aps,
    default_scenario,
    generate_synthetic_map,
    load_scenario,
    position_error,
    run_batch,
    run_trial,
    save_scenario,
    simulate_measurement,
    write_results_csv,
)

MODEL = RadioModel(p0=-40.0, path_loss_exponent=2.0)


class TestRadioModel:
    def test_closed_form_path_loss(self):
        # p0=-40, n=2, d=10, d0=1 -> -40 - 20*log10(10) = -60 dBm
        assert MODEL.rss_at(10.0) == pytest.approx(-60.0, abs=1e-12)

    def test_distance_floored_at_d0(self):
        assert MODEL.rss_at(0.0) == MODEL.p0
        assert MODEL.rss_at(0.5) == MODEL.p0

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            RadioModel(p0=-40, path_loss_exponent=2.0, d0=0.0)
        with pytest.raises(ValueError):
            RadioModel(p0=-40, path_loss_exponent=0.0)


class TestGenerateSyntheticMap:
    def test_grid_count_spacing_two(self):
        fmap = generate_synthetic_map(10.0, 10.0, corner_center_aps(10.0, 10.0), 2.0, MODEL)
        assert fmap.n_landmarks == 36
        coords = {(lm.position.x, lm.position.y) for lm in fmap.landmarks}
        assert coords == {(float(x), float(y)) for x in range(0, 11, 2) for y in range(0, 11, 2)}

    def test_landmark_at_ap_gets_p0(self):
        fmap = generate_synthetic_map(10.0, 10.0, [Point2(0.0, 0.0)], 2.0, MODEL)
        assert fmap.landmarks[0].rss[0] == MODEL.p0

    def test_rss_values_match_model(self):
        fmap = generate_synthetic_map(10.0, 10.0, [Point2(0.0, 0.0)], 5.0, MODEL)
        for lm in fmap.landmarks:
            d = math.hypot(lm.position.x, lm.position.y)
            assert lm.rss[0] == pytest.approx(MODEL.rss_at(d), abs=1e-12)

    def test_invalid_spacing(self):
        with pytest.raises(ValueError, match="spacing"):
            generate_synthetic_map(10.0, 10.0, [Point2(0, 0)], 11.0, MODEL)
        with pytest.raises(ValueError, match="spacing"):
            generate_synthetic_map(10.0, 10.0, [Point2(0, 0)], 0.0, MODEL)

    def test_empty_aps(self):
        with pytest.raises(ValueError, match="ap_positions"):
            generate_synthetic_map(10.0, 10.0, [], 1.0, MODEL)


class TestSimulateMeasurement:
    def test_noiseless_deterministic(self):
        aps = corner_center_aps(10.0, 10.0)
        obs = simulate_measurement(MODEL, aps, Point2(2.4, 3.6), 0.0, None)
        expected = [MODEL.rss_at(Point2(2.4, 3.6).distance_to(ap)) for ap in aps]
        np.testing.assert_allclose(obs, expected, atol=1e-12)

    def test_robot_at_ap(self):
        obs = simulate_measurement(MODEL, [Point2(2.0, 2.0)], Point2(2.0, 2.0), 0.0, None)
        assert obs[0] == MODEL.p0

    def test_noisy_mean_converges(self):
        aps = corner_center_aps(10.0, 10.0)
        rng = np.random.default_rng(7)
        clean = simulate_measurement(MODEL, aps, Point2(3.0, 3.0), 0.0, None)
        draws = np.array([
            simulate_measurement(MODEL, aps, Point2(3.0, 3.0), 2.0, rng) for _ in range(10_000)
        ])
        se = 2.0 / math.sqrt(10_000)
        assert np.all(np.abs(draws.mean(axis=0) - clean) < 3 * se)


class TestPositionError:
    @pytest.mark.parametrize(
        "est,expected",
        [
            ((2.110, 3.3734), 0.368),
            ((2.421, 3.5995), 0.0210),
            ((2.726, 0.8694), 2.7499),
        ],
    )
    def test_reference_values(self, est, expected):
        assert position_error(Point2(*est), Point2(2.4, 3.6)) == pytest.approx(expected, abs=0.0005)

    def test_identical_points(self):
        assert position_error(Point2(1.2, 3.4), Point2(1.2, 3.4)) == 0.0


class TestScenarioConfig:
    def test_invalid_iterations(self, stock_scenario):
        with pytest.raises(ValueError, match="iterations"):
            ScenarioConfig(
                fmap=stock_scenario.fmap,
                ap_positions=stock_scenario.ap_positions,
                model=stock_scenario.model,
                robot_position=Point2(2.4, 3.6),
                filter=FilterConfig(n_particles=10),
                iterations=0,
            )

    def test_robot_outside_area(self, stock_scenario):
        with pytest.raises(ValueError, match="outside"):
            ScenarioConfig(
                fmap=stock_scenario.fmap,
                ap_positions=stock_scenario.ap_positions,
                model=stock_scenario.model,
                robot_position=Point2(12.0, 3.6),
                filter=FilterConfig(n_particles=10),
            )


class TestRunTrial:
    def test_single_iteration_runs(self):
        sc = default_scenario(n_particles=100, iterations=1)
        result = run_trial(sc, trial_seed=5)
        assert result.iterations_run == 1
        assert result.error_m >= 0

    def test_equal_seed_identical(self):
        sc = default_scenario(n_particles=100)
        a = run_trial(sc, trial_seed=9)
        b = run_trial(sc, trial_seed=9)
        assert a == b

    def test_error_recomputed_from_estimate(self):
        sc = default_scenario(n_particles=100)
        r = run_trial(sc, trial_seed=3)
        assert r.error_m == position_error(r.estimate, sc.robot_position)

    def test_fixed_observation_mode(self):
        sc = default_scenario(n_particles=100)
        sc.fixed_observation = True
        a = run_trial(sc, trial_seed=2)
        b = run_trial(sc, trial_seed=2)
        assert a == b


class TestRunBatch:
    def test_single_trial_mean(self):
        sc = default_scenario(n_particles=100, trials=1, seed=4)
        summary = run_batch(sc)
        assert len(summary.results) == 1
        assert summary.mean_error_m == summary.results[0].error_m
        assert summary.min_error_m == summary.max_error_m == summary.mean_error_m

    def test_mean_min_max_consistent(self):
        sc = default_scenario(n_particles=100, trials=5, seed=1)
        summary = run_batch(sc)
        errors = [r.error_m for r in summary.results]
        assert summary.mean_error_m == pytest.approx(sum(errors) / len(errors), abs=1e-12)
        assert summary.min_error_m == min(errors)
        assert summary.max_error_m == max(errors)

    def test_seed_isolation_across_batch_sizes(self):
        small = run_batch(default_scenario(n_particles=100, trials=3, seed=7))
        large = run_batch(default_scenario(n_particles=100, trials=6, seed=7))
        for a, b in zip(small.results, large.results):
            assert a == b

    def test_no_failures_on_stock_scenario(self):
        summary = run_batch(default_scenario(n_particles=100, trials=3, seed=0))
        assert summary.failures == []


class TestResultsCsv:
    def test_layout(self, tmp_path):
        sc = default_scenario(n_particles=100, trials=3, seed=2)
        summary = run_batch(sc)
        path = tmp_path / "results.csv"
        write_results_csv(summary, path)
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["trial_index", "est_x_m", "est_y_m", "error_m",
                           "resample_count", "iterations_run"]
        assert len(rows) == 1 + 3 + 3  # header + trials + mean/min/max
        assert [r[0] for r in rows[4:]] == ["mean", "min", "max"]
        assert float(rows[4][3]) == summary.mean_error_m
        for i, r in enumerate(summary.results):
            assert int(rows[1 + i][0]) == r.trial_index
            assert float(rows[1 + i][3]) == r.error_m


class TestScenarioJson:
    def test_round_trip(self, tmp_path):
        sc = default_scenario(n_particles=123, seed=17, iterations=20, trials=4)
        sc.fixed_observation = True
        path = tmp_path / "scenario.json"
        save_scenario(sc, path)
        loaded = load_scenario(path, sc.fmap)
        assert loaded.filter == sc.filter
        assert loaded.model == sc.model
        assert loaded.robot_position == sc.robot_position
        assert loaded.ap_positions == sc.ap_positions
        assert loaded.iterations == sc.iterations
        assert loaded.trials == sc.trials
        assert loaded.observation_noise_sigma == sc.observation_noise_sigma
        assert loaded.fixed_observation == sc.fixed_observation

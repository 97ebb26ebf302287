"""Synthetic scenarios: map generation, measurement simulation, trial batches.

A log-distance path-loss model stands in for a measured fingerprint database.
The stored map holds noiseless ("calibrated") RSS values; observation noise is
added only when simulating a measurement. The stock experiment places a
stationary robot in a 10x10 m area with 5 APs (four corners plus center) and a
1 m landmark grid, and runs repeated independently-seeded filter trials.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import filtering
from .filtering import DegenerateFilterError, FilterConfig, OdometryDelta
from .rfmap import Landmark, Map, Point2

RESULTS_CSV_HEADER = [
    "trial_index",
    "est_x_m",
    "est_y_m",
    "error_m",
    "resample_count",
    "iterations_run",
]


@dataclass(frozen=True)
class RadioModel:
    """Log-distance path loss: rss(d) = p0 - 10*n*log10(max(d, d0)/d0)."""

    p0: float  # dBm at the reference distance
    path_loss_exponent: float
    d0: float = 1.0  # reference distance, m
    shadowing_sigma: float = 0.0  # dBm, used only when simulating observations

    def __post_init__(self):
        if not self.d0 > 0:
            raise ValueError(f"d0 must be > 0, got {self.d0}")
        if not self.path_loss_exponent > 0:
            raise ValueError(f"path_loss_exponent must be > 0, got {self.path_loss_exponent}")
        if self.shadowing_sigma < 0:
            raise ValueError(f"shadowing_sigma must be >= 0, got {self.shadowing_sigma}")

    def rss_at(self, distance: float) -> float:
        """Noiseless RSS in dBm at the given distance (floored at d0)."""
        return self.p0 - 10.0 * self.path_loss_exponent * math.log10(max(distance, self.d0) / self.d0)


def corner_center_aps(area_length: float, area_width: float) -> list[Point2]:
    """The stock 5-AP layout: four area corners plus the center."""
    return [
        Point2(0.0, 0.0),
        Point2(area_length, 0.0),
        Point2(0.0, area_width),
        Point2(area_length, area_width),
        Point2(area_length / 2.0, area_width / 2.0),
    ]


def generate_synthetic_map(
    area_length: float,
    area_width: float,
    ap_positions: list[Point2],
    grid_spacing: float,
    model: RadioModel,
    seed: int = 0,
) -> Map:
    """Build a fingerprint map with landmarks on a regular corner-anchored grid.

    Stored RSS values are the noiseless path-loss predictions; `seed` is
    accepted for interface stability but unused while the calibrated map is
    noise-free.
    """
    if not ap_positions:
        raise ValueError("ap_positions must be nonempty")
    if not (0 < grid_spacing <= min(area_length, area_width)):
        raise ValueError(
            f"grid_spacing must be in (0, {min(area_length, area_width)}], got {grid_spacing}"
        )
    # +1e-9 absorbs float error so an exactly-divisible extent includes the far edge
    nx = int(math.floor(area_length / grid_spacing + 1e-9)) + 1
    ny = int(math.floor(area_width / grid_spacing + 1e-9)) + 1
    landmarks = []
    lm_id = 0
    for iy in range(ny):
        for ix in range(nx):
            pos = Point2(ix * grid_spacing, iy * grid_spacing)
            rss = tuple(model.rss_at(pos.distance_to(ap)) for ap in ap_positions)
            landmarks.append(Landmark(id=lm_id, position=pos, rss=rss))
            lm_id += 1
    ap_ids = tuple(f"ap{j}" for j in range(len(ap_positions)))
    return Map(area_length, area_width, ap_ids, tuple(landmarks))


def simulate_measurement(
    model: RadioModel,
    ap_positions: list[Point2],
    robot: Point2,
    noise_sigma: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """One RSS observation at the robot position: path loss plus Gaussian noise."""
    clean = np.array([model.rss_at(robot.distance_to(ap)) for ap in ap_positions])
    if noise_sigma > 0:
        clean = clean + rng.normal(0.0, noise_sigma, size=clean.shape)
    return clean


def position_error(estimate: Point2, truth: Point2) -> float:
    """Euclidean distance between estimated and true position, meters."""
    return estimate.distance_to(truth)


@dataclass
class ScenarioConfig:
    """Everything needed to run one stationary-robot experiment batch."""

    fmap: Map
    ap_positions: list[Point2]
    model: RadioModel
    robot_position: Point2
    filter: FilterConfig
    iterations: int = 50
    trials: int = 10
    observation_noise_sigma: float = 0.5
    fixed_observation: bool = False  # reuse one sample instead of drawing per step

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.observation_noise_sigma < 0:
            raise ValueError("observation_noise_sigma must be >= 0")
        p = self.robot_position
        if not (0 <= p.x <= self.fmap.area_length and 0 <= p.y <= self.fmap.area_width):
            raise ValueError(
                f"robot position ({p.x}, {p.y}) outside map area "
                f"[0, {self.fmap.area_length}] x [0, {self.fmap.area_width}]"
            )


@dataclass(frozen=True)
class TrialResult:
    trial_index: int
    estimate: Point2
    error_m: float
    iterations_run: int
    resample_count: int


@dataclass
class BatchSummary:
    results: list[TrialResult]
    mean_error_m: float
    min_error_m: float
    max_error_m: float
    failures: list[tuple[int, str]] = field(default_factory=list)


def default_scenario(
    n_particles: int = 300,
    seed: int = 0,
    robot_position: Point2 = Point2(2.4, 3.6),
    trials: int = 10,
    iterations: int = 50,
) -> ScenarioConfig:
    """The stock synthetic scenario: 10x10 m, 5 APs, 1 m grid, sigma 4 dBm,
    jitter 0.05 m, observation noise 0.5 dBm."""
    model = RadioModel(p0=-40.0, path_loss_exponent=2.2)
    aps = corner_center_aps(10.0, 10.0)
    fmap = generate_synthetic_map(10.0, 10.0, aps, grid_spacing=1.0, model=model, seed=seed)
    return ScenarioConfig(
        fmap=fmap,
        ap_positions=aps,
        model=model,
        robot_position=robot_position,
        filter=FilterConfig(n_particles=n_particles, seed=seed),
        iterations=iterations,
        trials=trials,
    )


def run_trial(scenario: ScenarioConfig, trial_seed: int, trial_index: int = 0) -> TrialResult:
    """One independent filter run: init, iterate stationary steps, final estimate.

    All randomness (particle init, jitter, observation noise, resampling)
    comes from one generator seeded with trial_seed, so equal seeds give
    identical results. Filter degeneracy propagates as DegenerateFilterError.
    """
    result, _ = run_trial_with_particles(scenario, trial_seed, trial_index)
    return result


def run_trial_with_particles(
    scenario: ScenarioConfig, trial_seed: int, trial_index: int = 0
) -> tuple[TrialResult, filtering.ParticleSet]:
    """run_trial that also returns the final particle set (for plotting)."""
    # Two independent streams off one seed: the sensor-noise sequence belongs
    # to the simulated world, so it must not shift when filter parameters
    # (particle count etc.) change how much randomness the filter consumes.
    rng = np.random.default_rng([trial_seed, 0])
    world_rng = np.random.default_rng([trial_seed, 1])
    fmap = scenario.fmap
    cfg = scenario.filter
    pset = filtering.init_particles(cfg, fmap.area_length, fmap.area_width, rng)
    odo = OdometryDelta(0.0, 0.0)
    fixed_obs = None
    if scenario.fixed_observation:
        fixed_obs = simulate_measurement(
            scenario.model, scenario.ap_positions, scenario.robot_position,
            scenario.observation_noise_sigma, world_rng,
        )
    estimate = None
    resample_count = 0
    for _ in range(scenario.iterations):
        obs = fixed_obs if fixed_obs is not None else simulate_measurement(
            scenario.model, scenario.ap_positions, scenario.robot_position,
            scenario.observation_noise_sigma, world_rng,
        )
        pset, estimate, resampled = filtering.step(pset, fmap, odo, obs, cfg, rng)
        if resampled:
            resample_count += 1
    result = TrialResult(
        trial_index=trial_index,
        estimate=estimate,
        error_m=position_error(estimate, scenario.robot_position),
        iterations_run=scenario.iterations,
        resample_count=resample_count,
    )
    return result, pset


def run_batch(scenario: ScenarioConfig) -> BatchSummary:
    """Run `trials` independent trials; per-trial seed is scenario seed + index.

    A degenerate trial is recorded as a failure, not retried; summary stats
    cover the successful trials only.
    """
    results: list[TrialResult] = []
    failures: list[tuple[int, str]] = []
    for i in range(scenario.trials):
        try:
            results.append(run_trial(scenario, scenario.filter.seed + i, trial_index=i))
        except DegenerateFilterError as e:
            failures.append((i, str(e)))
    errors = [r.error_m for r in results]
    if errors:
        mean_e, min_e, max_e = float(np.mean(errors)), min(errors), max(errors)
    else:
        mean_e = min_e = max_e = float("nan")
    return BatchSummary(results, mean_e, min_e, max_e, failures)


def write_results_csv(summary: BatchSummary, path) -> None:
    """Per-trial rows plus mean/min/max summary rows, RFC-4180 style."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(RESULTS_CSV_HEADER)
        for r in summary.results:
            writer.writerow([
                r.trial_index,
                repr(r.estimate.x),
                repr(r.estimate.y),
                repr(r.error_m),
                r.resample_count,
                r.iterations_run,
            ])
        for label, value in (
            ("mean", summary.mean_error_m),
            ("min", summary.min_error_m),
            ("max", summary.max_error_m),
        ):
            writer.writerow([label, "", "", repr(value), "", ""])


def save_scenario(scenario: ScenarioConfig, path) -> None:
    """Write a scenario config (minus the map, referenced by inline fields) as JSON."""
    doc = {
        "robot": {"x_m": scenario.robot_position.x, "y_m": scenario.robot_position.y},
        "iterations": scenario.iterations,
        "trials": scenario.trials,
        "observation_noise_sigma_dbm": scenario.observation_noise_sigma,
        "fixed_observation": scenario.fixed_observation,
        "filter": {
            "n_particles": scenario.filter.n_particles,
            "sigma_dbm": scenario.filter.sigma,
            "jitter_m": scenario.filter.jitter,
            "resample_fraction": scenario.filter.resample_fraction,
            "seed": scenario.filter.seed,
        },
        "radio_model": {
            "p0_dbm": scenario.model.p0,
            "path_loss_exponent": scenario.model.path_loss_exponent,
            "d0_m": scenario.model.d0,
            "shadowing_sigma_dbm": scenario.model.shadowing_sigma,
        },
        "ap_positions": [{"x_m": p.x, "y_m": p.y} for p in scenario.ap_positions],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")


def load_scenario(path, fmap: Map) -> ScenarioConfig:
    """Rebuild a ScenarioConfig from JSON; the map is supplied separately."""
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    flt = doc["filter"]
    rm = doc["radio_model"]
    return ScenarioConfig(
        fmap=fmap,
        ap_positions=[Point2(p["x_m"], p["y_m"]) for p in doc["ap_positions"]],
        model=RadioModel(
            p0=rm["p0_dbm"],
            path_loss_exponent=rm["path_loss_exponent"],
            d0=rm["d0_m"],
            shadowing_sigma=rm["shadowing_sigma_dbm"],
        ),
        robot_position=Point2(doc["robot"]["x_m"], doc["robot"]["y_m"]),
        filter=FilterConfig(
            n_particles=flt["n_particles"],
            sigma=flt["sigma_dbm"],
            jitter=flt["jitter_m"],
            resample_fraction=flt["resample_fraction"],
            seed=flt["seed"],
        ),
        iterations=doc["iterations"],
        trials=doc["trials"],
        observation_noise_sigma=doc["observation_noise_sigma_dbm"],
        fixed_observation=doc["fixed_observation"],
    )

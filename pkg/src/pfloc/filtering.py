"""Bootstrap particle filter over a fingerprint radio map.

State is 2D position only. The proposal is the motion/transition prior
(odometry plus uniform jitter), so each importance-weight update reduces to
multiplying by the observation likelihood: a product of independent Gaussian
densities of the per-AP RSS residuals. Resampling is multinomial, triggered
when the effective sample size falls to half the particle count (configurable).

All randomness flows through an explicit numpy Generator (PCG64 when created
via FilterConfig.make_rng), so a fixed seed replays a run bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rfmap import Map, Point2, nearest_landmark_indices

WEIGHT_SUM_TOL = 1e-9


class DegenerateFilterError(RuntimeError):
    """All particle weights underflowed to zero; the filter lost the target.

    Callers decide the recovery policy (reinitialize, widen sigma, abort).
    """


@dataclass(frozen=True)
class OdometryDelta:
    """Robot displacement between filter steps, in meters."""

    dx: float
    dy: float

    def __post_init__(self):
        if not (math.isfinite(self.dx) and math.isfinite(self.dy)):
            raise ValueError(f"odometry delta must be finite, got ({self.dx}, {self.dy})")


@dataclass(frozen=True)
class FilterConfig:
    n_particles: int
    sigma: float = 4.0  # likelihood spread, dBm
    jitter: float = 0.05  # half-width of uniform position noise, m
    resample_fraction: float = 0.5  # resample when ESS <= n_particles * fraction
    seed: int = 0

    def __post_init__(self):
        if self.n_particles < 1:
            raise ValueError(f"n_particles must be >= 1, got {self.n_particles}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if self.jitter < 0:
            raise ValueError(f"jitter must be >= 0, got {self.jitter}")
        if not (0 < self.resample_fraction <= 1):
            raise ValueError(f"resample_fraction must be in (0, 1], got {self.resample_fraction}")

    def make_rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


@dataclass
class ParticleSet:
    """Weighted 2D position hypotheses: positions (N, 2), weights (N,)."""

    positions: np.ndarray
    weights: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.positions.ndim != 2 or self.positions.shape[1] != 2:
            raise ValueError(f"positions must have shape (N, 2), got {self.positions.shape}")
        if self.weights.shape != (self.positions.shape[0],):
            raise ValueError("weights must have shape (N,) matching positions")
        if np.any(self.weights < 0) or not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite and nonnegative")
        if self.normalized and abs(self.weights.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError("normalized flag set but weights do not sum to 1")

    def __len__(self) -> int:
        return self.positions.shape[0]


def init_particles(
    config: FilterConfig,
    area_length: float,
    area_width: float,
    rng: np.random.Generator | None = None,
) -> ParticleSet:
    """Spread N particles i.i.d. uniform over the area, all weights 1/N."""
    if not (area_length > 0 and area_width > 0):
        raise ValueError(f"area dimensions must be positive, got {area_length}x{area_width}")
    if rng is None:
        rng = config.make_rng()
    n = config.n_particles
    positions = rng.random((n, 2)) * [area_length, area_width]
    weights = np.full(n, 1.0 / n)
    return ParticleSet(positions, weights, normalized=True)


def predict(
    pset: ParticleSet,
    odo: OdometryDelta,
    config: FilterConfig,
    rng: np.random.Generator,
) -> ParticleSet:
    """Shift every particle by the odometry delta plus uniform jitter.

    Weights and count are unchanged. Particles are not clamped to the area;
    out-of-bounds particles still get a nearest landmark assigned later.
    """
    n = len(pset)
    noise = rng.uniform(-config.jitter, config.jitter, size=(n, 2)) if config.jitter > 0 else 0.0
    positions = pset.positions + [odo.dx, odo.dy] + noise
    return ParticleSet(positions, pset.weights.copy(), normalized=pset.normalized)


def log_likelihood(observed: np.ndarray, predicted: np.ndarray, sigma: float) -> np.ndarray:
    """Log of the product of per-AP Gaussian densities of the RSS residuals.

    `predicted` may be (K,) or (N, K); the result is scalar or (N,).
    """
    observed = np.asarray(observed, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    k = observed.shape[-1]
    resid2 = np.sum((predicted - observed) ** 2, axis=-1)
    return -0.5 * resid2 / sigma**2 - k * math.log(sigma * math.sqrt(2.0 * math.pi))


def update_weights(
    pset: ParticleSet,
    fmap: Map,
    observed: np.ndarray,
    config: FilterConfig,
) -> ParticleSet:
    """Multiply each weight by the likelihood of the observation at the particle.

    Each particle's predicted RSS is its nearest landmark's vector. Output
    weights are unnormalized.
    """
    observed = np.asarray(observed, dtype=float)
    if observed.shape != (fmap.n_aps,):
        raise ValueError(
            f"observed RSS has shape {observed.shape}, expected ({fmap.n_aps},) for this map"
        )
    idx = nearest_landmark_indices(fmap, pset.positions)
    loglik = log_likelihood(observed, fmap.landmark_rss[idx], config.sigma)
    weights = pset.weights * np.exp(loglik)
    return ParticleSet(pset.positions.copy(), weights, normalized=False)


def normalize_weights(pset: ParticleSet) -> ParticleSet:
    """Scale weights to sum to 1. Raises DegenerateFilterError on zero mass."""
    total = pset.weights.sum()
    if not total > 0:
        raise DegenerateFilterError(
            "all particle weights are zero (likelihood underflow); "
            "reinitialize the filter or widen sigma"
        )
    return ParticleSet(pset.positions.copy(), pset.weights / total, normalized=True)


def effective_sample_size(pset: ParticleSet) -> float:
    """ESS = 1 / sum(w^2) over normalized weights; in [1, N]."""
    if not pset.normalized:
        raise ValueError("effective_sample_size requires a normalized particle set")
    return 1.0 / float(np.sum(pset.weights**2))


def should_resample(pset: ParticleSet, config: FilterConfig) -> bool:
    """True when ESS has dropped to the threshold N * resample_fraction or below."""
    return effective_sample_size(pset) <= config.n_particles * config.resample_fraction


def resample_multinomial(
    pset: ParticleSet,
    config: FilterConfig,
    rng: np.random.Generator,
) -> ParticleSet:
    """Draw N particles i.i.d. from the categorical law of the weights.

    Inverse-CDF selection on N independent uniforms. Every output position is
    one of the input positions; all output weights reset to 1/N.
    """
    if not pset.normalized:
        raise ValueError("resample_multinomial requires a normalized particle set")
    n = len(pset)
    cdf = np.cumsum(pset.weights)
    cdf[-1] = 1.0  # guard against rounding just below 1
    idx = np.searchsorted(cdf, rng.random(n), side="left")
    positions = pset.positions[idx].copy()
    weights = np.full(n, 1.0 / n)
    return ParticleSet(positions, weights, normalized=True)


def estimate_position(pset: ParticleSet) -> Point2:
    """Unweighted arithmetic mean of particle positions.

    Intended for resampled (weight-uniform) sets; for a weight-aware estimate
    use estimate_position_weighted.
    """
    if len(pset) == 0:
        raise ValueError("cannot estimate position of an empty particle set")
    mean = pset.positions.mean(axis=0)
    return Point2(float(mean[0]), float(mean[1]))


def estimate_position_weighted(pset: ParticleSet) -> Point2:
    """Weight-weighted mean of particle positions (comparison estimator)."""
    if len(pset) == 0:
        raise ValueError("cannot estimate position of an empty particle set")
    pset = pset if pset.normalized else normalize_weights(pset)
    mean = pset.weights @ pset.positions
    return Point2(float(mean[0]), float(mean[1]))


def step(
    pset: ParticleSet,
    fmap: Map,
    odo: OdometryDelta,
    observed: np.ndarray,
    config: FilterConfig,
    rng: np.random.Generator,
) -> tuple[ParticleSet, Point2, bool]:
    """One filter iteration: predict, weight, normalize, maybe resample, estimate.

    Returns (new particle set, position estimate, whether resampling ran).
    The input set is never mutated; on likelihood underflow the error
    propagates and the caller's set is intact.
    """
    moved = predict(pset, odo, config, rng)
    weighted = update_weights(moved, fmap, observed, config)
    normalized = normalize_weights(weighted)
    resampled = should_resample(normalized, config)
    if resampled:
        normalized = resample_multinomial(normalized, config, rng)
    return normalized, estimate_position(normalized), resampled

"""Brute-force grid Bayes posterior over the map area.

Discretizes the area into square cells and evaluates, at each cell center, the
same nearest-landmark Gaussian likelihood the particle filter uses. Under a
uniform prior the normalized result is the single-observation position
posterior; it serves as the verification oracle for filter convergence.
Correctness over speed: a plain dense evaluation, no spatial indexing.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .filtering import DegenerateFilterError, log_likelihood
from .rfmap import Map, Point2, nearest_landmark_indices


@dataclass
class GridPosterior:
    """Cell probabilities over the area; probabilities[iy, ix], row-major in y."""

    cell_size: float
    origin: Point2
    probabilities: np.ndarray

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """(xs, ys) center coordinates along each axis."""
        ny, nx = self.probabilities.shape
        xs = self.origin.x + (np.arange(nx) + 0.5) * self.cell_size
        ys = self.origin.y + (np.arange(ny) + 0.5) * self.cell_size
        return xs, ys


def grid_posterior(fmap: Map, observed: np.ndarray, sigma: float, cell_size: float) -> GridPosterior:
    """Posterior over cell centers for one observation, uniform prior.

    Grid dimension is floor(extent / cell_size) per axis; partial edge cells
    are excluded so every cell carries equal prior mass.
    """
    if not (0 < cell_size <= min(fmap.area_length, fmap.area_width)):
        raise ValueError(
            f"cell_size must be in (0, {min(fmap.area_length, fmap.area_width)}], got {cell_size}"
        )
    observed = np.asarray(observed, dtype=float)
    if observed.shape != (fmap.n_aps,):
        raise ValueError(
            f"observed RSS has shape {observed.shape}, expected ({fmap.n_aps},) for this map"
        )
    nx = int(math.floor(fmap.area_length / cell_size + 1e-9))
    ny = int(math.floor(fmap.area_width / cell_size + 1e-9))
    xs = (np.arange(nx) + 0.5) * cell_size
    ys = (np.arange(ny) + 0.5) * cell_size
    gx, gy = np.meshgrid(xs, ys)  # (ny, nx)
    centers = np.column_stack([gx.ravel(), gy.ravel()])
    idx = nearest_landmark_indices(fmap, centers)
    loglik = log_likelihood(observed, fmap.landmark_rss[idx], sigma)
    # normalize in log space so flat-but-tiny likelihoods do not underflow
    shifted = loglik - loglik.max()
    mass = np.exp(shifted)
    total = mass.sum()
    if not (np.isfinite(total) and total > 0):
        raise DegenerateFilterError("grid posterior mass is zero everywhere")
    return GridPosterior(cell_size, Point2(0.0, 0.0), (mass / total).reshape(ny, nx))


def posterior_mean(g: GridPosterior) -> Point2:
    """Probability-weighted mean of cell centers."""
    xs, ys = g.cell_centers()
    px = g.probabilities.sum(axis=0)  # marginal over x
    py = g.probabilities.sum(axis=1)
    return Point2(float(px @ xs), float(py @ ys))


def write_posterior_csv(g: GridPosterior, path) -> None:
    """Dump (cell_x_m, cell_y_m, probability) rows for inspection or plotting."""
    xs, ys = g.cell_centers()
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["cell_x_m", "cell_y_m", "probability"])
        for iy, y in enumerate(ys):
            for ix, x in enumerate(xs):
                writer.writerow([repr(float(x)), repr(float(y)), repr(float(g.probabilities[iy, ix]))])

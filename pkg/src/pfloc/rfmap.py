"""Fingerprint radio map: data model, JSON serialization, nearest-landmark queries.

The map stores per-landmark RSS vectors (dBm) over a fixed, ordered set of
access-point identifiers. A position query is answered with the RSS vector of
the geometrically closest landmark (strict nearest-neighbour assignment, no
interpolation).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial.distance import cdist

RSS_MIN_DBM = -100.0
RSS_MAX_DBM = 0.0


class MapFormatError(ValueError):
    """Raised when a map file or map structure violates the schema."""


@dataclass(frozen=True)
class Point2:
    """A 2D position in meters."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"Point2 coordinates must be finite, got ({self.x}, {self.y})")

    def distance_to(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Landmark:
    """A surveyed position with its calibrated RSS vector (one entry per AP)."""

    id: int
    position: Point2
    rss: tuple[float, ...]


@dataclass
class Map:
    """Fingerprint radio map over a rectangular area.

    Immutable after construction; safe to share read-only across concurrent
    filter instances. Landmark ids are dense 0..L-1 and stored in id order,
    so a landmark's list index equals its id.
    """

    area_length: float
    area_width: float
    ap_ids: tuple[str, ...]
    landmarks: tuple[Landmark, ...]

    def __post_init__(self):
        if not (self.area_length > 0 and self.area_width > 0):
            raise MapFormatError(
                f"area dimensions must be positive, got {self.area_length}x{self.area_width}"
            )
        if len(self.ap_ids) == 0:
            raise MapFormatError("ap_ids must be nonempty")
        if len(self.landmarks) == 0:
            raise MapFormatError("map must contain at least one landmark")
        k = len(self.ap_ids)
        self.landmarks = tuple(sorted(self.landmarks, key=lambda lm: lm.id))
        ids = [lm.id for lm in self.landmarks]
        if ids != list(range(len(self.landmarks))):
            raise MapFormatError(f"landmark ids must be exactly 0..{len(self.landmarks) - 1}, got {ids}")
        for lm in self.landmarks:
            if len(lm.rss) != k:
                raise MapFormatError(
                    f"landmark {lm.id}: RSS vector has length {len(lm.rss)}, expected {k}"
                )
            for j, v in enumerate(lm.rss):
                if not math.isfinite(v) or not (RSS_MIN_DBM <= v <= RSS_MAX_DBM):
                    raise MapFormatError(
                        f"landmark {lm.id}: rss_dbm[{j}] = {v} outside [{RSS_MIN_DBM}, {RSS_MAX_DBM}]"
                    )
            p = lm.position
            if not (0.0 <= p.x <= self.area_length and 0.0 <= p.y <= self.area_width):
                raise MapFormatError(
                    f"landmark {lm.id}: position ({p.x}, {p.y}) outside area "
                    f"[0, {self.area_length}] x [0, {self.area_width}]"
                )

    @property
    def n_aps(self) -> int:
        return len(self.ap_ids)

    @property
    def n_landmarks(self) -> int:
        return len(self.landmarks)

    @cached_property
    def landmark_positions(self) -> np.ndarray:
        """(L, 2) array of landmark coordinates, row index == landmark id."""
        arr = np.array([[lm.position.x, lm.position.y] for lm in self.landmarks])
        arr.setflags(write=False)
        return arr

    @cached_property
    def landmark_rss(self) -> np.ndarray:
        """(L, K) array of landmark RSS vectors, row index == landmark id."""
        arr = np.array([lm.rss for lm in self.landmarks])
        arr.setflags(write=False)
        return arr


def nearest_landmark(fmap: Map, p: Point2) -> int:
    """Id of the landmark closest (Euclidean) to p; ties go to the lowest id.

    A linear scan over all landmarks. L is small in practice and argmin on the
    id-ordered position array gives the lowest-id tie-break for free.
    """
    d2 = np.sum((fmap.landmark_positions - [p.x, p.y]) ** 2, axis=1)
    return int(np.argmin(d2))


def nearest_landmark_indices(fmap: Map, positions: np.ndarray) -> np.ndarray:
    """Vectorized nearest_landmark for an (N, 2) array of query positions."""
    d2 = cdist(positions, fmap.landmark_positions, "sqeuclidean")
    return np.argmin(d2, axis=1)


def predicted_rss(fmap: Map, p: Point2) -> np.ndarray:
    """RSS vector a receiver at p is predicted to observe (closest landmark's)."""
    return fmap.landmark_rss[nearest_landmark(fmap, p)].copy()


def save_map(fmap: Map, path) -> None:
    """Write the map as UTF-8 JSON. Floats keep full round-trip precision."""
    doc = {
        "area": {"length_m": fmap.area_length, "width_m": fmap.area_width},
        "ap_ids": list(fmap.ap_ids),
        "landmarks": [
            {
                "id": lm.id,
                "x_m": lm.position.x,
                "y_m": lm.position.y,
                "rss_dbm": list(lm.rss),
            }
            for lm in fmap.landmarks
        ],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")


def load_map(path) -> Map:
    """Load a JSON map file, validating the schema and all map invariants."""
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise MapFormatError(f"{path}: not valid JSON: {e}") from e
    try:
        area = doc["area"]
        ap_ids = tuple(str(a) for a in doc["ap_ids"])
        landmarks = tuple(
            Landmark(
                id=int(entry["id"]),
                position=Point2(float(entry["x_m"]), float(entry["y_m"])),
                rss=tuple(float(v) for v in entry["rss_dbm"]),
            )
            for entry in doc["landmarks"]
        )
        return Map(
            area_length=float(area["length_m"]),
            area_width=float(area["width_m"]),
            ap_ids=ap_ids,
            landmarks=landmarks,
        )
    except KeyError as e:
        raise MapFormatError(f"{path}: missing required field {e}") from e
    except (TypeError, ValueError) as e:
        if isinstance(e, MapFormatError):
            raise
        raise MapFormatError(f"{path}: malformed value: {e}") from e

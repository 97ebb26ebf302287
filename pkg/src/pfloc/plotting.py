"""Run-report figures: map, particles, truth, and estimates rendered to file.

Figures are byte-stable across invocations: a fixed svg.hashsalt pins the
generated element ids and the creation-date metadata is suppressed, so a
seeded run writes identical SVG bytes every time.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .rfmap import Map, Point2

_HASHSALT = "pfloc"


def save_figure(fig, path) -> None:
    """Save with deterministic output (stable ids, no timestamp metadata)."""
    fmt = str(path).rsplit(".", 1)[-1].lower()
    with plt.rc_context({"svg.hashsalt": _HASHSALT}):
        if fmt == "svg":
            fig.savefig(path, format="svg", metadata={"Date": None})
        else:
            fig.savefig(path)
    plt.close(fig)


def render_run_plot(
    fmap: Map,
    particle_positions: np.ndarray,
    truth: Point2,
    estimates: list[Point2],
    path,
    title: str = "Particle filter localization",
) -> None:
    """Scatter of landmarks (stars), particles (circles), truth (square),
    and per-trial estimates (filled circles), written to `path`."""
    fig, ax = plt.subplots(figsize=(7, 7))
    lm = fmap.landmark_positions
    ax.scatter(lm[:, 0], lm[:, 1], marker="*", s=60, c="black", label="landmarks", zorder=2)
    if len(particle_positions):
        ax.scatter(
            particle_positions[:, 0], particle_positions[:, 1],
            marker="o", s=8, c="tab:blue", alpha=0.5, label="particles", zorder=3,
        )
    if estimates:
        ex = [e.x for e in estimates]
        ey = [e.y for e in estimates]
        ax.scatter(ex, ey, marker="o", s=45, c="tab:green", label="estimates", zorder=5)
    ax.scatter([truth.x], [truth.y], marker="s", s=80, c="tab:red", label="true position", zorder=6)
    margin = 0.05 * max(fmap.area_length, fmap.area_width)
    ax.set_xlim(-margin, fmap.area_length + margin)
    ax.set_ylim(-margin, fmap.area_width + margin)
    ax.set_aspect("equal")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8)
    ax.grid(True, linewidth=0.3, alpha=0.5)
    save_figure(fig, path)

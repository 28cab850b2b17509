"""Pareto-front figures for experiment reports. File output only."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

_MODE_STYLES = (
    {"color": "#1f77b4", "marker": "o"},
    {"color": "#d62728", "marker": "s"},
    {"color": "#2ca02c", "marker": "^"},
    {"color": "#9467bd", "marker": "D"},
)


def render_front_figure(
    fronts: dict[str, np.ndarray],
    title: str,
    path: str | Path,
    objective_names: tuple[str, ...] = ("thermal", "cost"),
) -> None:
    """Scatter the first two objectives of each labeled front to a PNG."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for idx, (label, points) in enumerate(sorted(fronts.items())):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        order = np.argsort(points[:, 0])
        style = _MODE_STYLES[idx % len(_MODE_STYLES)]
        ax.plot(
            points[order, 0],
            points[order, 1],
            linestyle="--",
            linewidth=1.0,
            alpha=0.6,
            color=style["color"],
        )
        ax.scatter(
            points[:, 0],
            points[:, 1],
            s=28,
            label=label,
            color=style["color"],
            marker=style["marker"],
        )
    ax.set_xlabel(f"discounted {objective_names[0]} return")
    ax.set_ylabel(f"discounted {objective_names[1]} return")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)

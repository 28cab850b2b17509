"""Pareto-front quality metrics: hypervolume, expected utility, sparsity.

All metrics treat higher objective values as better. Hypervolume is exact
for 2 to 4 objectives (sweep plus slicing recursion) and falls back to
Monte Carlo above that; a standalone Monte Carlo estimator doubles as an
independent oracle for the exact code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError


def dominates(a, b) -> bool:
    """True when a is at least b everywhere and differs somewhere."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValidationError(f"vector shapes differ: {a.shape} vs {b.shape}")
    return bool(np.all(a >= b) and np.any(a != b))


def _maximal_rows(points: np.ndarray) -> np.ndarray:
    """Boolean mask of the non-dominated, first-occurrence-unique rows."""
    k = points.shape[0]
    keep = np.ones(k, dtype=bool)
    for i in range(k):
        if not keep[i]:
            continue
        for j in range(k):
            if i == j or not keep[j]:
                continue
            if np.all(points[j] >= points[i]) and np.any(points[j] != points[i]):
                keep[i] = False
                break
            if j < i and np.array_equal(points[j], points[i]):
                keep[i] = False
                break
    return keep


@dataclass(frozen=True)
class ParetoFront:
    """Mutually non-dominated return vectors with provenance ids."""

    points: np.ndarray
    policy_ids: tuple = ()

    def __post_init__(self):
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if points.size == 0:
            raise ValidationError("a Pareto front cannot be empty")
        ids = self.policy_ids
        if not ids:
            ids = tuple(range(points.shape[0]))
        if len(ids) != points.shape[0]:
            raise ValidationError(
                f"{len(ids)} policy ids for {points.shape[0]} points"
            )
        if not np.all(_maximal_rows(points)):
            raise ValidationError(
                "points contain duplicates or dominated entries; "
                "build fronts with pareto_filter"
            )
        points.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "policy_ids", tuple(ids))

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def num_objectives(self) -> int:
        return self.points.shape[1]


def pareto_filter(points, policy_ids=None) -> ParetoFront:
    """Keep the maximal elements; exact duplicates collapse to the first."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.size == 0:
        raise ValidationError("cannot filter an empty point set")
    if policy_ids is None:
        policy_ids = tuple(range(points.shape[0]))
    if len(policy_ids) != points.shape[0]:
        raise ValidationError(
            f"{len(policy_ids)} policy ids for {points.shape[0]} points"
        )
    keep = _maximal_rows(points)
    kept_ids = tuple(pid for pid, k in zip(policy_ids, keep) if k)
    return ParetoFront(points=points[keep], policy_ids=kept_ids)


def _check_reference(points: np.ndarray, ref: np.ndarray) -> None:
    bad = np.where(np.any(points < ref, axis=1))[0]
    if bad.size:
        offenders = [points[i].tolist() for i in bad]
        raise ValidationError(
            f"reference point {ref.tolist()} exceeds front points {offenders}"
        )


def _hv_2d(points: np.ndarray, ref: np.ndarray) -> float:
    # sweep right to left; each point adds a strip above the best y so far
    order = np.lexsort((-points[:, 1], -points[:, 0]))
    pts = points[order]
    hv = 0.0
    best_y = ref[1]
    for x, y in pts:
        if y > best_y:
            hv += (x - ref[0]) * (y - best_y)
            best_y = y
    return hv


def _hv_exact(points: np.ndarray, ref: np.ndarray) -> float:
    points = points[_maximal_rows(points)]
    n = points.shape[1]
    if n == 1:
        return float(points[:, 0].max() - ref[0])
    if n == 2:
        return _hv_2d(points, ref)
    # slice along the last objective: each slab's thickness times the
    # hypervolume of the points tall enough to reach it, one dimension down
    order = np.argsort(-points[:, -1])
    pts = points[order]
    levels = pts[:, -1]
    hv = 0.0
    for i in range(pts.shape[0]):
        z_hi = levels[i]
        z_lo = levels[i + 1] if i + 1 < pts.shape[0] else ref[-1]
        if z_hi > z_lo:
            hv += _hv_exact(pts[: i + 1, :-1], ref[:-1]) * (z_hi - z_lo)
    return float(hv)


def hypervolume(front: ParetoFront, ref, mc_samples: int = 200_000,
                mc_seed: int = 0) -> float:
    """Dominated-region volume above `ref`; exact for up to 4 objectives."""
    ref = np.asarray(ref, dtype=float)
    if ref.shape != (front.num_objectives,):
        raise ValidationError(
            f"reference shape {ref.shape} does not match {front.num_objectives} "
            f"objectives"
        )
    _check_reference(front.points, ref)
    if front.num_objectives <= 4:
        return _hv_exact(front.points, ref)
    return hypervolume_monte_carlo(front, ref, n_samples=mc_samples, seed=mc_seed)


def hypervolume_monte_carlo(front: ParetoFront, ref, n_samples: int = 1_000_000,
                            seed: int = 0) -> float:
    """Box-sampling estimate of the same volume; the exact code's oracle."""
    ref = np.asarray(ref, dtype=float)
    _check_reference(front.points, ref)
    upper = front.points.max(axis=0)
    box = np.prod(upper - ref)
    if box == 0.0:
        return 0.0
    rng = np.random.default_rng(seed)
    hits = 0
    remaining = int(n_samples)
    chunk = 100_000
    while remaining > 0:
        m = min(chunk, remaining)
        samples = rng.uniform(ref, upper, size=(m, ref.shape[0]))
        covered = np.zeros(m, dtype=bool)
        for p in front.points:
            # column-wise masks; much faster than a 2-D all() reduction
            mask = samples[:, 0] <= p[0]
            for j in range(1, p.shape[0]):
                mask &= samples[:, j] <= p[j]
            covered |= mask
        hits += int(covered.sum())
        remaining -= m
    return float(box) * hits / n_samples


def expected_utility(front: ParetoFront, n_weights: int = 10_000,
                     seed: int = 0) -> float:
    """Average best scalarized return over preferences on the simplex.

    Two objectives use a deterministic evenly spaced grid; more use seeded
    Dirichlet sampling with `n_weights` draws.
    """
    n = front.num_objectives
    if n == 2:
        k = np.arange(101) / 100.0
        weights = np.column_stack([k, 1.0 - k])
    else:
        rng = np.random.default_rng(seed)
        weights = rng.dirichlet(np.ones(n), size=int(n_weights))
    utilities = weights @ front.points.T
    return float(utilities.max(axis=1).mean())


def sparsity(front: ParetoFront) -> float:
    """Mean squared gap between sorted neighbors, per objective, summed."""
    k = len(front)
    if k < 2:
        return 0.0
    total = 0.0
    for i in range(front.num_objectives):
        column = np.sort(front.points[:, i])
        total += float(np.sum(np.diff(column) ** 2))
    return total / (k - 1)


def frozen_reference(all_returns, margin_frac: float = 0.01) -> np.ndarray:
    """Reference point below every supplied return vector.

    Componentwise minimum pushed down by a relative margin (plus a tiny
    absolute one so zero minima still end up strictly below).
    """
    all_returns = np.atleast_2d(np.asarray(all_returns, dtype=float))
    lows = all_returns.min(axis=0)
    return lows - (margin_frac * np.abs(lows) + 1e-9)


def write_front_csv(front: ParetoFront, path: str | Path) -> None:
    n = front.num_objectives
    header = "policy_id," + ",".join(f"g_{i + 1}" for i in range(n))
    lines = [header]
    for pid, point in zip(front.policy_ids, front.points):
        lines.append(str(pid) + "," + ",".join(repr(float(x)) for x in point))
    Path(path).write_text("\n".join(lines) + "\n")


def read_front_csv(path: str | Path) -> ParetoFront:
    lines = Path(path).read_text().strip().splitlines()
    if len(lines) < 2:
        raise ValidationError(f"front file {path} has no data rows")
    ids = []
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        ids.append(parts[0])
        rows.append([float(x) for x in parts[1:]])
    return ParetoFront(points=np.array(rows), policy_ids=tuple(ids))


def metrics_report(front: ParetoFront, ref, eu_weights: int = 10_000,
                   seed: int = 0) -> dict:
    """All three metrics plus the provenance needed to reproduce them."""
    ref = np.asarray(ref, dtype=float)
    return {
        "hypervolume": hypervolume(front, ref),
        "expected_utility": expected_utility(front, n_weights=eu_weights, seed=seed),
        "sparsity": sparsity(front),
        "reference_point": [float(x) for x in ref],
        "front_size": len(front),
        "eu_weights": int(eu_weights) if front.num_objectives > 2 else 101,
        "seed": int(seed),
    }


def write_metrics_report(report: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report, indent=2) + "\n")

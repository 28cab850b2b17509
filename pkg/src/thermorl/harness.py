"""Experiment driver: train, sweep evaluation contexts, report tables.

An experiment file describes one training setup plus a set of evaluation
contexts. The driver trains `runs` independent seeds, evaluates every
front policy in every context, freezes one shared hypervolume reference
point across everything it measured, and writes:

* report.json / report.txt  -- metric table, mean over runs with std
* fronts/<mode>/<context>/run<k>.csv  -- per-run non-dominated returns
* fronts/<mode>/<context>/merged.csv  -- union of runs, re-filtered
* figures/<context>.png  -- front scatter per context
* front_data.csv  -- long-format rows for external plotting
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .context import (
    AssetLibrary,
    ContextSpec,
    UWallVector,
    default_library,
    dynamics_contexts,
    load_contexts,
    sample_uwall,
)
from .env import BuildingEnv, EnvConfig
from .errors import ConfigurationError, IngestionError, ThermorlError, ValidationError
from .metrics import (
    ParetoFront,
    expected_utility,
    frozen_reference,
    hypervolume,
    pareto_filter,
    sparsity,
    write_front_csv,
)
from .morl import Trainer, TrainerConfig, evaluate_policy
from .plotting import render_front_figure
from .seeding import derive_seed

METRIC_NAMES = ("hypervolume", "expected_utility", "sparsity")


def trainer_config_from_dict(data: dict) -> TrainerConfig:
    """TrainerConfig from parsed JSON, with list-to-tuple coercion."""
    kwargs = dict(data)
    if "preference_grid" in kwargs:
        kwargs["preference_grid"] = tuple(
            tuple(float(w) for w in pref) for pref in kwargs["preference_grid"]
        )
    if "eval_seeds" in kwargs:
        kwargs["eval_seeds"] = tuple(kwargs["eval_seeds"])
    try:
        return TrainerConfig(**kwargs)
    except TypeError as exc:
        raise IngestionError(f"malformed trainer config: {exc}") from exc


def env_config_from_dict(data: dict) -> EnvConfig:
    """EnvConfig from parsed JSON, with list-to-tuple coercion."""
    kwargs = dict(data)
    if "objectives" in kwargs:
        kwargs["objectives"] = tuple(kwargs["objectives"])
    if isinstance(kwargs.get("setpoint_c"), list):
        kwargs["setpoint_c"] = tuple(kwargs["setpoint_c"])
    try:
        return EnvConfig(**kwargs)
    except TypeError as exc:
        raise IngestionError(f"malformed environment config: {exc}") from exc


@dataclass(frozen=True)
class MetricsConfig:
    eu_weights: int = 10_000
    eu_seed: int = 0
    ref_margin_frac: float = 0.01

    def __post_init__(self):
        if self.eu_weights < 1:
            raise ConfigurationError("eu_weights must be >= 1")
        if self.ref_margin_frac < 0:
            raise ConfigurationError("ref_margin_frac must be >= 0")


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    layout_id: str
    mode: str
    train_climate_id: str
    train_uwall_seed: int = 0
    train_uwall: UWallVector | None = None
    eval_climate_ids: tuple[str, ...] = ()
    use_dynamics_contexts: bool = False
    contexts_file: str | None = None
    runs: int = 5
    run_seeds: tuple[int, ...] | None = None
    master_seed: int = 0
    trainer: TrainerConfig = field(default_factory=TrainerConfig)
    env: EnvConfig = field(default_factory=EnvConfig)
    metrics: MetricsConfig = field(default_factory=MetricsConfig)

    def __post_init__(self):
        if self.mode not in ("static", "dynamic"):
            raise ConfigurationError(
                f"mode must be 'static' or 'dynamic', got {self.mode!r}"
            )
        if self.runs < 1:
            raise ConfigurationError("runs must be >= 1")
        if self.run_seeds is not None:
            seeds = tuple(int(s) for s in self.run_seeds)
            if len(seeds) != self.runs:
                raise ConfigurationError(
                    f"{len(seeds)} run_seeds for {self.runs} runs"
                )
            object.__setattr__(self, "run_seeds", seeds)
        object.__setattr__(
            self, "eval_climate_ids", tuple(self.eval_climate_ids)
        )
        if (
            not self.eval_climate_ids
            and not self.use_dynamics_contexts
            and self.contexts_file is None
        ):
            raise ConfigurationError("experiment lists no evaluation contexts")

    @property
    def mode_label(self) -> str:
        return f"{self.mode}-train"

    def seed_for_run(self, run_index: int) -> int:
        if self.run_seeds is not None:
            return self.run_seeds[run_index]
        return derive_seed(self.master_seed, "run", run_index)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        try:
            trainer = trainer_config_from_dict(data.get("trainer", {}))
            env = env_config_from_dict(data.get("env", {}))
            metrics = MetricsConfig(**data.get("metrics", {}))
            train_uwall = None
            if data.get("train_uwall") is not None:
                train_uwall = UWallVector(**data["train_uwall"])
            return cls(
                name=str(data["name"]),
                layout_id=str(data["layout_id"]),
                mode=str(data["mode"]),
                train_climate_id=str(data["train_climate_id"]),
                train_uwall_seed=int(data.get("train_uwall_seed", 0)),
                train_uwall=train_uwall,
                eval_climate_ids=tuple(data.get("eval_climate_ids", ())),
                use_dynamics_contexts=bool(data.get("use_dynamics_contexts", False)),
                contexts_file=data.get("contexts_file"),
                runs=int(data.get("runs", 5)),
                run_seeds=(
                    tuple(data["run_seeds"]) if data.get("run_seeds") else None
                ),
                master_seed=int(data.get("master_seed", 0)),
                trainer=trainer,
                env=env,
                metrics=metrics,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise IngestionError(f"malformed experiment spec: {exc}") from exc

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentSpec":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError:
            raise IngestionError(f"experiment file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise IngestionError(
                f"experiment file {path} is not valid JSON: {exc}"
            ) from exc
        return cls.from_dict(data)


def train_context(spec: ExperimentSpec) -> ContextSpec:
    u_wall = spec.train_uwall
    if u_wall is None:
        u_wall = sample_uwall(spec.train_uwall_seed)
    return ContextSpec(
        u_wall=u_wall,
        climate_id=spec.train_climate_id,
        layout_id=spec.layout_id,
    )


def resolve_eval_contexts(
    spec: ExperimentSpec, library: AssetLibrary | None = None
) -> dict[str, ContextSpec]:
    """Named evaluation contexts from the spec's three possible sources."""
    if library is None:
        library = default_library()
    base_u = train_context(spec).u_wall
    contexts: dict[str, ContextSpec] = {}
    for climate_id in spec.eval_climate_ids:
        library.weather(climate_id)  # fail fast on unknown ids
        contexts[climate_id] = ContextSpec(
            u_wall=base_u, climate_id=climate_id, layout_id=spec.layout_id
        )
    if spec.use_dynamics_contexts:
        contexts.update(
            dynamics_contexts(spec.layout_id, spec.train_climate_id, library)
        )
    if spec.contexts_file is not None:
        contexts.update(load_contexts(spec.contexts_file))
    return contexts


@dataclass
class ReportTable:
    """Metric rows by context columns, one row group per training mode."""

    metrics: tuple[str, ...]
    contexts: tuple[str, ...]
    modes: tuple[str, ...]
    cells: dict[tuple[str, str, str], tuple[float, float]]
    metadata: dict

    def __post_init__(self):
        expected = len(self.modes) * len(self.metrics) * len(self.contexts)
        if len(self.cells) != expected:
            raise ValidationError(
                f"table has {len(self.cells)} cells, expected {expected}"
            )

    def cell(self, mode: str, metric: str, context: str) -> tuple[float, float]:
        return self.cells[(mode, metric, context)]

    def to_dict(self) -> dict:
        return {
            "metrics": list(self.metrics),
            "contexts": list(self.contexts),
            "modes": list(self.modes),
            "cells": {
                f"{mode}|{metric}|{context}": {"mean": mean, "std": std}
                for (mode, metric, context), (mean, std) in sorted(self.cells.items())
            },
            "metadata": self.metadata,
        }

    def to_text(self) -> str:
        label_width = max(
            len(f"{metric} [{mode}]")
            for metric in self.metrics
            for mode in self.modes
        )
        col_width = max(
            max((len(c) for c in self.contexts), default=8),
            21,
        )
        header = " " * label_width + " | " + " | ".join(
            c.rjust(col_width) for c in self.contexts
        )
        rule = "-" * len(header)
        lines = [header, rule]
        for metric in self.metrics:
            for mode in self.modes:
                row_label = f"{metric} [{mode}]".ljust(label_width)
                cells = []
                for context in self.contexts:
                    mean, std = self.cells[(mode, metric, context)]
                    cells.append(f"{mean:.6g} +/- {std:.3g}".rjust(col_width))
                lines.append(row_label + " | " + " | ".join(cells))
        return "\n".join(lines)


def _evaluate_run(
    spec: ExperimentSpec,
    run_seed: int,
    eval_contexts: dict[str, ContextSpec],
    library: AssetLibrary,
) -> dict[str, tuple[np.ndarray, tuple]]:
    """Train once, then return {context: (returns matrix, policy ids)}."""
    trainer = Trainer(
        spec.trainer,
        env_factory=lambda: BuildingEnv(spec.env, library),
        base_context=train_context(spec),
        mode=spec.mode,
        master_seed=run_seed,
    )
    buffer, front = trainer.train()
    front_entries = [buffer.entry(pid) for pid in front.policy_ids]
    env = BuildingEnv(spec.env, library)
    out = {}
    for name, context in eval_contexts.items():
        returns = np.array(
            [
                evaluate_policy(
                    env,
                    entry.policy,
                    [context],
                    spec.trainer.eval_seeds,
                    spec.trainer.eval_episodes,
                )
                for entry in front_entries
            ]
        )
        out[name] = (returns, tuple(e.policy.policy_id for e in front_entries))
    return out


def _collect(
    spec: ExperimentSpec,
    eval_contexts: dict[str, ContextSpec],
    library: AssetLibrary,
    out_dir: Path,
) -> list[dict[str, tuple[np.ndarray, tuple]]]:
    per_run = []
    try:
        for r in range(spec.runs):
            per_run.append(
                _evaluate_run(spec, spec.seed_for_run(r), eval_contexts, library)
            )
    except ThermorlError as exc:
        partial = out_dir / "partial_results.json"
        out_dir.mkdir(parents=True, exist_ok=True)
        partial.write_text(
            json.dumps(
                {
                    "completed_runs": len(per_run),
                    "returns": [
                        {
                            name: [row.tolist() for row in returns]
                            for name, (returns, _) in run.items()
                        }
                        for run in per_run
                    ],
                },
                indent=2,
            )
            + "\n"
        )
        raise ThermorlError(
            f"run {len(per_run)} failed ({exc}); partial results at {partial}"
        ) from exc
    return per_run


def _metric_values(
    front: ParetoFront, ref: np.ndarray, metrics_config: MetricsConfig
) -> dict[str, float]:
    return {
        "hypervolume": hypervolume(front, ref),
        "expected_utility": expected_utility(
            front, n_weights=metrics_config.eu_weights, seed=metrics_config.eu_seed
        ),
        "sparsity": sparsity(front),
    }


def _assemble(
    specs: list[ExperimentSpec],
    collected: list[list[dict[str, tuple[np.ndarray, tuple]]]],
    eval_contexts: dict[str, ContextSpec],
    out_dir: Path,
) -> ReportTable:
    """Shared-reference metric table plus front CSVs and figures."""
    all_returns = [
        returns
        for runs in collected
        for run in runs
        for returns, _ in run.values()
    ]
    ref = frozen_reference(np.vstack(all_returns),
                           margin_frac=specs[0].metrics.ref_margin_frac)

    context_names = tuple(eval_contexts)
    cells = {}
    merged_fronts: dict[tuple[str, str], ParetoFront] = {}
    for spec, runs in zip(specs, collected):
        for name in context_names:
            values = {metric: [] for metric in METRIC_NAMES}
            union_points = []
            union_ids = []
            for r, run in enumerate(runs):
                returns, ids = run[name]
                front = pareto_filter(returns, policy_ids=ids)
                front_dir = out_dir / "fronts" / spec.mode_label / name
                front_dir.mkdir(parents=True, exist_ok=True)
                write_front_csv(front, front_dir / f"run{r}.csv")
                for metric, value in _metric_values(
                    front, ref, spec.metrics
                ).items():
                    values[metric].append(value)
                union_points.extend(returns)
                union_ids.extend(f"r{r}:p{pid}" for pid in ids)
            merged = pareto_filter(np.array(union_points), policy_ids=union_ids)
            merged_fronts[(spec.mode_label, name)] = merged
            write_front_csv(
                merged, out_dir / "fronts" / spec.mode_label / name / "merged.csv"
            )
            for metric in METRIC_NAMES:
                arr = np.array(values[metric])
                cells[(spec.mode_label, metric, name)] = (
                    float(arr.mean()),
                    float(arr.std()),
                )

    objective_names = specs[0].env.objectives
    for name in context_names:
        render_front_figure(
            {
                mode: merged_fronts[(mode, name)].points
                for mode in (s.mode_label for s in specs)
            },
            title=f"Pareto fronts: {name}",
            path=out_dir / "figures" / f"{name}.png",
            objective_names=objective_names,
        )

    table = ReportTable(
        metrics=METRIC_NAMES,
        contexts=context_names,
        modes=tuple(s.mode_label for s in specs),
        cells=cells,
        metadata={
            "reference_point": [float(x) for x in ref],
            "runs": specs[0].runs,
            "master_seeds": [s.master_seed for s in specs],
            "run_seeds": {
                s.mode_label: [s.seed_for_run(r) for r in range(s.runs)]
                for s in specs
            },
            "eu_weights": specs[0].metrics.eu_weights,
            "eu_seed": specs[0].metrics.eu_seed,
            "scale_factors": {metric: 1.0 for metric in METRIC_NAMES},
            "objectives": list(objective_names),
        },
    )
    _write_reports(table, merged_fronts, objective_names, out_dir)
    return table


def _write_reports(
    table: ReportTable,
    merged_fronts: dict[tuple[str, str], ParetoFront],
    objective_names: tuple[str, ...],
    out_dir: Path,
) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(
        json.dumps(table.to_dict(), indent=2, sort_keys=True) + "\n"
    )
    (out_dir / "report.txt").write_text(table.to_text() + "\n")
    export_front_plot_data(
        merged_fronts, out_dir / "front_data.csv", objective_names
    )


def run_experiment(
    spec: ExperimentSpec,
    out_dir: str | Path,
    library: AssetLibrary | None = None,
) -> ReportTable:
    if library is None:
        library = default_library()
    out_dir = Path(out_dir)
    eval_contexts = resolve_eval_contexts(spec, library)
    collected = [_collect(spec, eval_contexts, library, out_dir)]
    return _assemble([spec], collected, eval_contexts, out_dir)


def compare_modes(
    spec_static: ExperimentSpec,
    spec_dynamic: ExperimentSpec,
    out_dir: str | Path,
    library: AssetLibrary | None = None,
) -> ReportTable:
    """Joint table for two training modes over one shared context set."""
    if library is None:
        library = default_library()
    out_dir = Path(out_dir)
    contexts_a = resolve_eval_contexts(spec_static, library)
    contexts_b = resolve_eval_contexts(spec_dynamic, library)
    if tuple(contexts_a) != tuple(contexts_b):
        raise ValidationError(
            f"evaluation contexts differ: {tuple(contexts_a)} vs {tuple(contexts_b)}"
        )
    specs = [spec_static, spec_dynamic]
    collected = [
        _collect(spec, contexts_a, library, out_dir) for spec in specs
    ]
    return _assemble(specs, collected, contexts_a, out_dir)


def export_front_plot_data(
    fronts: dict[tuple[str, str], ParetoFront],
    path: str | Path,
    objective_names: tuple[str, ...] = ("thermal", "cost"),
) -> None:
    """Long-format CSV: one row per front point, labeled by mode and context."""
    header = "mode,context,policy_id," + ",".join(
        f"g_{name}" for name in objective_names
    )
    lines = [header]
    for (mode, context), front in sorted(fronts.items()):
        for pid, point in zip(front.policy_ids, front.points):
            values = ",".join(repr(float(x)) for x in point)
            lines.append(f"{mode},{context},{pid},{values}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def read_front_plot_data(path: str | Path) -> list[dict]:
    """Parse the long-format CSV back into one dict per row."""
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        row: dict = dict(zip(header[:3], parts[:3]))
        for key, value in zip(header[3:], parts[3:]):
            row[key] = float(value)
        rows.append(row)
    return rows

"""Command-line interface.

Subcommands:

* ``assets validate``      -- check shipped layouts and climates
* ``train``                -- train one policy buffer, save a checkpoint
* ``evaluate``             -- score a checkpoint's front across contexts
* ``experiment run``       -- full experiment from a spec file
* ``experiment compare``   -- static vs dynamic training, one joint table
* ``export front-data``    -- long-format CSV from an experiment directory

Failures print a one-line JSON error record to stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .context import ContextSpec, load_contexts, sample_uwall, validate_assets
from .env import BuildingEnv
from .errors import IngestionError, ThermorlError
from .harness import (
    ExperimentSpec,
    compare_modes,
    env_config_from_dict,
    export_front_plot_data,
    run_experiment,
    trainer_config_from_dict,
)
from .metrics import (
    frozen_reference,
    metrics_report,
    pareto_filter,
    read_front_csv,
    write_front_csv,
    write_metrics_report,
)
from .morl import Trainer, evaluate_policy, load_checkpoint, save_checkpoint
from .plotting import render_front_figure


def _load_json(path: str | None, what: str) -> dict:
    if path is None:
        return {}
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise IngestionError(f"{what} file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise IngestionError(f"{what} file {path} is not valid JSON: {exc}") from exc


def cmd_assets_validate(args) -> int:
    for line in validate_assets(substep_s=args.substep):
        print(line)
    print("all assets valid")
    return 0


def cmd_train(args) -> int:
    trainer_config = trainer_config_from_dict(
        _load_json(args.trainer_config, "trainer config")
    )
    env_config = env_config_from_dict(_load_json(args.env_config, "env config"))
    base = ContextSpec(
        u_wall=sample_uwall(args.uwall_seed),
        climate_id=args.climate,
        layout_id=args.layout,
    )
    trainer = Trainer(
        trainer_config,
        env_factory=lambda: BuildingEnv(env_config),
        base_context=base,
        mode=args.mode,
        master_seed=args.seed,
    )
    buffer, front = trainer.train()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_checkpoint(buffer, out_dir / "checkpoint.json")
    write_front_csv(front, out_dir / "front.csv")
    print(f"trained {len(buffer)} policies; front size {len(front)}")
    print(f"checkpoint: {out_dir / 'checkpoint.json'}")
    print(f"front: {out_dir / 'front.csv'}")
    return 0


def cmd_evaluate(args) -> int:
    buffer = load_checkpoint(args.checkpoint)
    contexts = load_contexts(args.contexts)
    env_config = env_config_from_dict(_load_json(args.env_config, "env config"))
    env = BuildingEnv(env_config)
    front = buffer.front()
    entries = [buffer.entry(pid) for pid in front.policy_ids]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    per_context = {}
    for name, context in contexts.items():
        returns = np.array(
            [
                evaluate_policy(
                    env, e.policy, [context], buffer.eval_seeds,
                    buffer.eval_episodes,
                )
                for e in entries
            ]
        )
        per_context[name] = (returns, tuple(e.policy.policy_id for e in entries))
    ref = frozen_reference(
        np.vstack([returns for returns, _ in per_context.values()])
    )
    report = {"reference_point": [float(x) for x in ref], "contexts": {}}
    for name, (returns, ids) in per_context.items():
        context_front = pareto_filter(returns, policy_ids=ids)
        write_front_csv(context_front, out_dir / f"{name}.csv")
        render_front_figure(
            {name: context_front.points},
            title=f"Pareto front: {name}",
            path=out_dir / f"{name}.png",
            objective_names=env_config.objectives,
        )
        report["contexts"][name] = metrics_report(context_front, ref)
        print(f"{name}: front size {len(context_front)}")
    write_metrics_report(report, out_dir / "metrics.json")
    print(f"metrics: {out_dir / 'metrics.json'}")
    return 0


def cmd_experiment_run(args) -> int:
    spec = ExperimentSpec.from_file(args.spec)
    if args.seed is not None:
        spec = dataclasses.replace(spec, master_seed=args.seed)
    table = run_experiment(spec, args.out_dir)
    print(table.to_text())
    print(f"report: {Path(args.out_dir) / 'report.json'}")
    return 0


def cmd_experiment_compare(args) -> int:
    spec_static = ExperimentSpec.from_file(args.spec_static)
    spec_dynamic = ExperimentSpec.from_file(args.spec_dynamic)
    table = compare_modes(spec_static, spec_dynamic, args.out_dir)
    print(table.to_text())
    print(f"report: {Path(args.out_dir) / 'report.json'}")
    return 0


def cmd_export_front_data(args) -> int:
    experiment_dir = Path(args.experiment_dir)
    fronts_dir = experiment_dir / "fronts"
    if not fronts_dir.is_dir():
        raise IngestionError(f"no fronts directory under {experiment_dir}")
    objective_names = ("thermal", "cost")
    report_path = experiment_dir / "report.json"
    if report_path.is_file():
        metadata = json.loads(report_path.read_text()).get("metadata", {})
        if metadata.get("objectives"):
            objective_names = tuple(metadata["objectives"])
    fronts = {}
    for merged in sorted(fronts_dir.glob("*/*/merged.csv")):
        mode = merged.parent.parent.name
        context = merged.parent.name
        fronts[(mode, context)] = read_front_csv(merged)
    if not fronts:
        raise IngestionError(f"no merged front files under {fronts_dir}")
    export_front_plot_data(fronts, args.out, objective_names)
    print(f"front data: {args.out} ({sum(len(f) for f in fronts.values())} rows)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermorl",
        description="Multi-objective building heating control benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_assets = sub.add_parser("assets", help="asset management")
    assets_sub = p_assets.add_subparsers(dest="assets_command", required=True)
    p_validate = assets_sub.add_parser(
        "validate", help="validate shipped layouts and climates"
    )
    p_validate.add_argument(
        "--substep", type=float, default=300.0,
        help="simulation substep the stability check must clear (s)",
    )
    p_validate.set_defaults(func=cmd_assets_validate)

    p_train = sub.add_parser("train", help="train a policy buffer")
    p_train.add_argument("--layout", default="toy2")
    p_train.add_argument("--climate", default="Warm_Marine")
    p_train.add_argument("--mode", choices=("static", "dynamic"), default="static")
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--uwall-seed", type=int, default=0,
                         help="seed for the training context's U-factors")
    p_train.add_argument("--trainer-config", help="JSON file of trainer settings")
    p_train.add_argument("--env-config", help="JSON file of environment settings")
    p_train.add_argument("--out-dir", required=True)
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("evaluate", help="evaluate a checkpoint")
    p_eval.add_argument("--checkpoint", required=True)
    p_eval.add_argument("--contexts", required=True,
                        help="JSON file naming evaluation contexts")
    p_eval.add_argument("--env-config", help="JSON file of environment settings")
    p_eval.add_argument("--out-dir", required=True)
    p_eval.set_defaults(func=cmd_evaluate)

    p_exp = sub.add_parser("experiment", help="experiment pipelines")
    exp_sub = p_exp.add_subparsers(dest="experiment_command", required=True)
    p_run = exp_sub.add_parser("run", help="run one experiment spec")
    p_run.add_argument("spec", help="experiment spec JSON file")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the spec's master seed")
    p_run.add_argument("--out-dir", required=True)
    p_run.set_defaults(func=cmd_experiment_run)
    p_cmp = exp_sub.add_parser("compare", help="compare training modes")
    p_cmp.add_argument("spec_static", help="static-mode experiment spec")
    p_cmp.add_argument("spec_dynamic", help="dynamic-mode experiment spec")
    p_cmp.add_argument("--out-dir", required=True)
    p_cmp.set_defaults(func=cmd_experiment_compare)

    p_export = sub.add_parser("export", help="export derived data")
    export_sub = p_export.add_subparsers(dest="export_command", required=True)
    p_front = export_sub.add_parser(
        "front-data", help="long-format front CSV from an experiment directory"
    )
    p_front.add_argument("--experiment-dir", required=True)
    p_front.add_argument("--out", required=True)
    p_front.set_defaults(func=cmd_export_front_data)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ThermorlError as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

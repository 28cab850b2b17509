import json

import numpy as np
import pytest

from thermorl import (
    ConfigurationError,
    ExperimentSpec,
    IngestionError,
    MetricsConfig,
    ParetoFront,
    ReportTable,
    UWallVector,
    ValidationError,
    compare_modes,
    export_front_plot_data,
    resolve_eval_contexts,
    run_experiment,
    sample_uwall,
    save_contexts,
)
from thermorl.harness import (
    METRIC_NAMES,
    env_config_from_dict,
    read_front_plot_data,
    trainer_config_from_dict,
    train_context,
)

TINY_TRAINER = {
    "population": 4,
    "iterations": 2,
    "preference_grid": [[1.0, 0.0], [0.0, 1.0]],
    "n_extension_rounds": 0,
    "n_eval_contexts": 2,
}


def tiny_spec(**overrides):
    data = {
        "name": "tiny",
        "layout_id": "toy2",
        "mode": "static",
        "train_climate_id": "Warm_Marine",
        "train_uwall_seed": 7,
        "eval_climate_ids": ["Warm_Marine"],
        "runs": 2,
        "master_seed": 0,
        "trainer": dict(TINY_TRAINER),
    }
    data.update(overrides)
    return ExperimentSpec.from_dict(data)


class TestConfigParsing:
    def test_trainer_grid_coercion(self):
        config = trainer_config_from_dict(
            {"preference_grid": [[1.0, 0.0], [0.0, 1.0]], "eval_seeds": [3, 4]}
        )
        assert config.preference_grid == ((1.0, 0.0), (0.0, 1.0))
        assert config.eval_seeds == (3, 4)

    def test_trainer_unknown_key(self):
        with pytest.raises(IngestionError, match="trainer"):
            trainer_config_from_dict({"swarm_size": 10})

    def test_env_coercion(self):
        config = env_config_from_dict(
            {"objectives": ["thermal", "cost", "ramp"], "setpoint_c": [21.0, 23.0]}
        )
        assert config.objectives == ("thermal", "cost", "ramp")
        assert config.setpoint_c == (21.0, 23.0)

    def test_env_unknown_key(self):
        with pytest.raises(IngestionError, match="environment"):
            env_config_from_dict({"weather_id": "x"})

    def test_metrics_validation(self):
        with pytest.raises(ConfigurationError):
            MetricsConfig(eu_weights=0)


class TestExperimentSpec:
    def test_round_trip_through_file(self, tmp_path):
        spec = tiny_spec()
        path = tmp_path / "exp.json"
        path.write_text(json.dumps({
            "name": "tiny",
            "layout_id": "toy2",
            "mode": "static",
            "train_climate_id": "Warm_Marine",
            "train_uwall_seed": 7,
            "eval_climate_ids": ["Warm_Marine"],
            "runs": 2,
            "master_seed": 0,
            "trainer": dict(TINY_TRAINER),
        }))
        assert ExperimentSpec.from_file(path) == spec

    def test_missing_required_field(self):
        with pytest.raises(IngestionError, match="malformed"):
            ExperimentSpec.from_dict({"name": "x"})

    def test_bad_mode(self):
        with pytest.raises(ConfigurationError, match="mode"):
            tiny_spec(mode="adaptive")

    def test_no_eval_source_rejected(self):
        with pytest.raises(ConfigurationError, match="evaluation contexts"):
            tiny_spec(eval_climate_ids=[])

    def test_run_seed_count_checked(self):
        with pytest.raises(ConfigurationError, match="run_seeds"):
            tiny_spec(run_seeds=[1, 2, 3])

    def test_explicit_run_seeds_used(self):
        spec = tiny_spec(run_seeds=[11, 13])
        assert spec.seed_for_run(0) == 11
        assert spec.seed_for_run(1) == 13

    def test_derived_run_seeds_deterministic(self):
        spec = tiny_spec()
        assert spec.seed_for_run(0) == tiny_spec().seed_for_run(0)
        assert spec.seed_for_run(0) != spec.seed_for_run(1)

    def test_mode_label(self):
        assert tiny_spec().mode_label == "static-train"
        assert tiny_spec(mode="dynamic").mode_label == "dynamic-train"

    def test_explicit_train_uwall_wins(self):
        u = UWallVector.nominal()
        spec = tiny_spec(train_uwall=u.to_dict())
        assert train_context(spec).u_wall == u

    def test_train_uwall_seed_default(self):
        spec = tiny_spec()
        assert train_context(spec).u_wall == sample_uwall(7)


class TestResolveEvalContexts:
    def test_climate_sweep_keeps_train_walls(self, library):
        spec = tiny_spec(eval_climate_ids=["Warm_Marine", "Hot_Humid"])
        contexts = resolve_eval_contexts(spec, library)
        assert tuple(contexts) == ("Warm_Marine", "Hot_Humid")
        walls = {c.u_wall for c in contexts.values()}
        assert walls == {sample_uwall(7)}

    def test_unknown_climate_fails_fast(self, library):
        spec = tiny_spec(eval_climate_ids=["Atlantis"])
        with pytest.raises(IngestionError, match="unknown climate"):
            resolve_eval_contexts(spec, library)

    def test_dynamics_contexts_included(self, library):
        spec = tiny_spec(eval_climate_ids=[], use_dynamics_contexts=True)
        contexts = resolve_eval_contexts(spec, library)
        assert sorted(contexts) == [f"Dynamics_{i}" for i in range(1, 6)]

    def test_contexts_file_merged(self, library, tmp_path):
        from thermorl import ContextSpec
        path = tmp_path / "extra.json"
        save_contexts(
            {"Custom": ContextSpec(sample_uwall(55), "Warm_Dry", "toy2")}, path
        )
        spec = tiny_spec(contexts_file=str(path))
        contexts = resolve_eval_contexts(spec, library)
        assert "Custom" in contexts
        assert contexts["Custom"].climate_id == "Warm_Dry"


class TestReportTable:
    def make_table(self):
        cells = {}
        for mode in ("static-train",):
            for metric in ("hypervolume", "sparsity"):
                for context in ("A", "B"):
                    cells[(mode, metric, context)] = (1.5, 0.1)
        return ReportTable(
            metrics=("hypervolume", "sparsity"),
            contexts=("A", "B"),
            modes=("static-train",),
            cells=cells,
            metadata={"runs": 2},
        )

    def test_cell_lookup(self):
        table = self.make_table()
        assert table.cell("static-train", "sparsity", "B") == (1.5, 0.1)

    def test_missing_cells_rejected(self):
        with pytest.raises(ValidationError, match="cells"):
            ReportTable(
                metrics=("hypervolume",),
                contexts=("A", "B"),
                modes=("static-train",),
                cells={("static-train", "hypervolume", "A"): (1.0, 0.0)},
                metadata={},
            )

    def test_text_contains_mean_and_std(self):
        text = self.make_table().to_text()
        assert "1.5 +/- 0.1" in text
        assert "hypervolume [static-train]" in text

    def test_dict_form_is_json_ready(self):
        payload = json.dumps(self.make_table().to_dict())
        assert "static-train|hypervolume|A" in payload


@pytest.fixture(scope="module")
def result(tmp_path_factory):
    out_dir = tmp_path_factory.mktemp("exp")
    spec = ExperimentSpec.from_dict({
        "name": "tiny",
        "layout_id": "toy2",
        "mode": "static",
        "train_climate_id": "Warm_Marine",
        "train_uwall_seed": 7,
        "eval_climate_ids": ["Warm_Marine", "Warm_Dry"],
        "runs": 2,
        "master_seed": 0,
        "trainer": dict(TINY_TRAINER),
    })
    table = run_experiment(spec, out_dir)
    return spec, out_dir, table


class TestRunExperiment:
    def test_table_shape(self, result):
        _, _, table = result
        assert table.metrics == METRIC_NAMES
        assert table.contexts == ("Warm_Marine", "Warm_Dry")
        assert table.modes == ("static-train",)
        assert len(table.cells) == 6

    def test_output_files(self, result):
        _, out_dir, _ = result
        assert (out_dir / "report.json").exists()
        assert (out_dir / "report.txt").exists()
        assert (out_dir / "front_data.csv").exists()
        for context in ("Warm_Marine", "Warm_Dry"):
            base = out_dir / "fronts" / "static-train" / context
            assert (base / "run0.csv").exists()
            assert (base / "run1.csv").exists()
            assert (base / "merged.csv").exists()
            assert (out_dir / "figures" / f"{context}.png").exists()

    def test_report_json_matches_table(self, result):
        _, out_dir, table = result
        data = json.loads((out_dir / "report.json").read_text())
        key = "static-train|hypervolume|Warm_Marine"
        mean, std = table.cell("static-train", "hypervolume", "Warm_Marine")
        assert data["cells"][key]["mean"] == mean
        assert data["cells"][key]["std"] == std
        assert data["metadata"]["runs"] == 2

    def test_hypervolume_positive(self, result):
        _, _, table = result
        for context in table.contexts:
            mean, std = table.cell("static-train", "hypervolume", context)
            assert mean > 0.0
            assert std >= 0.0

    def test_merged_ids_name_run_and_policy(self, result):
        _, out_dir, _ = result
        merged = (out_dir / "fronts" / "static-train" / "Warm_Marine"
                  / "merged.csv").read_text().splitlines()
        ids = [line.split(",")[0] for line in merged[1:]]
        assert all(":" in pid and pid.startswith("r") for pid in ids)

    def test_repeat_run_bitwise_identical(self, result, tmp_path):
        spec, out_dir, table = result
        again = run_experiment(spec, tmp_path / "again")
        assert again.cells == table.cells
        a = (out_dir / "front_data.csv").read_text()
        b = (tmp_path / "again" / "front_data.csv").read_text()
        assert a == b

    def test_identical_run_seeds_give_zero_std(self, tmp_path):
        spec = tiny_spec(runs=2, run_seeds=[5, 5])
        table = run_experiment(spec, tmp_path / "dup")
        for metric in METRIC_NAMES:
            mean, std = table.cell("static-train", metric, "Warm_Marine")
            assert std == 0.0


class TestCompareModes:
    def test_two_mode_table(self, tmp_path):
        static = tiny_spec()
        dynamic = tiny_spec(mode="dynamic")
        table = compare_modes(static, dynamic, tmp_path / "cmp")
        assert table.modes == ("static-train", "dynamic-train")
        assert len(table.cells) == 6
        assert (tmp_path / "cmp" / "fronts" / "dynamic-train"
                / "Warm_Marine" / "merged.csv").exists()

    def test_context_mismatch_rejected(self, tmp_path):
        static = tiny_spec()
        dynamic = tiny_spec(mode="dynamic", eval_climate_ids=["Warm_Dry"])
        with pytest.raises(ValidationError, match="contexts differ"):
            compare_modes(static, dynamic, tmp_path / "cmp")


class TestFrontPlotData:
    def test_round_trip(self, tmp_path):
        fronts = {
            ("static-train", "A"): ParetoFront(
                points=[[2.0, 1.0], [1.0, 2.0]], policy_ids=("r0:p1", "r1:p0")
            ),
            ("dynamic-train", "A"): ParetoFront(points=[[3.0, 0.5]]),
        }
        path = tmp_path / "front_data.csv"
        export_front_plot_data(fronts, path, objective_names=("thermal", "cost"))
        rows = read_front_plot_data(path)
        assert len(rows) == 3
        assert rows[0]["mode"] == "dynamic-train"
        static_rows = [r for r in rows if r["mode"] == "static-train"]
        assert {r["policy_id"] for r in static_rows} == {"r0:p1", "r1:p0"}
        assert static_rows[0]["g_thermal"] == 2.0
        assert static_rows[0]["g_cost"] == 1.0

    def test_header_uses_objective_names(self, tmp_path):
        fronts = {("m", "c"): ParetoFront(points=[[1.0, 2.0, 3.0]])}
        path = tmp_path / "fd.csv"
        export_front_plot_data(fronts, path,
                               objective_names=("thermal", "cost", "ramp"))
        header = path.read_text().splitlines()[0]
        assert header == "mode,context,policy_id,g_thermal,g_cost,g_ramp"

"""Multi-objective building heating control benchmark.

A light RC-network building simulator wrapped in a vector-reward control
environment, plus a multi-policy trainer and an experiment harness that
reports hypervolume, expected utility, and sparsity across hidden-context
sweeps.
"""

from .context import (
    AIR_DENSITY_KG_M3,
    AIR_HEAT_CAPACITY_J_KGC,
    CLIMATE_IDS,
    DEFAULT_MASS_PER_AREA,
    U_BOUNDS,
    U_COMPONENTS,
    AssetLibrary,
    ContextSpec,
    UWallVector,
    build_model,
    context_from_dict,
    context_sampler,
    default_library,
    dynamics_contexts,
    load_contexts,
    load_weather,
    sample_uwall,
    save_contexts,
    validate_assets,
)
from .env import (
    OBJECTIVES,
    BuildingEnv,
    EnvConfig,
    Observation,
    episode_return,
    observation_dim,
    reward_cost,
    reward_ramp,
    reward_thermal,
    scalarize,
    validate_preference,
    write_trajectory_csv,
)
from .errors import (
    ConfigurationError,
    IngestionError,
    LifecycleError,
    StabilityError,
    ThermorlError,
    ValidationError,
)
from .harness import (
    ExperimentSpec,
    MetricsConfig,
    ReportTable,
    compare_modes,
    env_config_from_dict,
    export_front_plot_data,
    resolve_eval_contexts,
    run_experiment,
    trainer_config_from_dict,
)
from .layouts import (
    ADJACENCY_ELEMENTS,
    Adjacency,
    BuildingLayout,
    ZoneSpec,
    layout_from_dict,
    load_layout,
    save_layout,
)
from .metrics import (
    ParetoFront,
    dominates,
    expected_utility,
    frozen_reference,
    hypervolume,
    hypervolume_monte_carlo,
    metrics_report,
    pareto_filter,
    read_front_csv,
    sparsity,
    write_front_csv,
)
from .morl import (
    ObsNormalizer,
    Policy,
    PolicyBuffer,
    Trainer,
    TrainerConfig,
    constrained_objective,
    evaluate_policy,
    fit_normalizer,
    load_checkpoint,
    rollout,
    save_checkpoint,
    select_policies,
    train,
)
from .thermal import (
    NO_PATH,
    BuildingModel,
    HeatInputs,
    derivative,
    max_stable_dt,
    step,
)
from .weather import WEATHER_COLUMNS, WeatherProfile, load_weather_csv, write_weather_csv

__version__ = "0.1.0"

__all__ = [
    "ADJACENCY_ELEMENTS",
    "AIR_DENSITY_KG_M3",
    "AIR_HEAT_CAPACITY_J_KGC",
    "AssetLibrary",
    "Adjacency",
    "BuildingEnv",
    "BuildingLayout",
    "BuildingModel",
    "CLIMATE_IDS",
    "ConfigurationError",
    "ContextSpec",
    "DEFAULT_MASS_PER_AREA",
    "EnvConfig",
    "ExperimentSpec",
    "HeatInputs",
    "IngestionError",
    "LifecycleError",
    "MetricsConfig",
    "NO_PATH",
    "OBJECTIVES",
    "Observation",
    "ObsNormalizer",
    "ParetoFront",
    "Policy",
    "PolicyBuffer",
    "ReportTable",
    "StabilityError",
    "ThermorlError",
    "Trainer",
    "TrainerConfig",
    "UWallVector",
    "U_BOUNDS",
    "U_COMPONENTS",
    "ValidationError",
    "WEATHER_COLUMNS",
    "WeatherProfile",
    "ZoneSpec",
    "build_model",
    "compare_modes",
    "constrained_objective",
    "context_from_dict",
    "context_sampler",
    "default_library",
    "derivative",
    "dominates",
    "dynamics_contexts",
    "env_config_from_dict",
    "episode_return",
    "evaluate_policy",
    "expected_utility",
    "export_front_plot_data",
    "fit_normalizer",
    "frozen_reference",
    "hypervolume",
    "hypervolume_monte_carlo",
    "layout_from_dict",
    "load_checkpoint",
    "load_contexts",
    "load_layout",
    "load_weather",
    "load_weather_csv",
    "max_stable_dt",
    "metrics_report",
    "observation_dim",
    "pareto_filter",
    "read_front_csv",
    "resolve_eval_contexts",
    "reward_cost",
    "reward_ramp",
    "reward_thermal",
    "rollout",
    "run_experiment",
    "sample_uwall",
    "save_checkpoint",
    "save_contexts",
    "save_layout",
    "scalarize",
    "select_policies",
    "sparsity",
    "step",
    "train",
    "trainer_config_from_dict",
    "validate_assets",
    "validate_preference",
    "write_front_csv",
    "write_trajectory_csv",
    "write_weather_csv",
]

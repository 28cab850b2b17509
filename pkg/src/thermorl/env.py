"""Multi-zone heating control environment with vector rewards.

An episode walks a building model through `horizon` control steps. Each
step applies one normalized heat command per zone, integrates the thermal
network over the control interval, advances the exogenous climate series,
and scores the outcome on several objectives at once.

The hidden context (U-factors) shapes the dynamics but never appears in
the observation.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .context import (
    DEFAULT_MASS_PER_AREA,
    AssetLibrary,
    ContextSpec,
    build_model,
    default_library,
)
from .errors import ConfigurationError, LifecycleError, ValidationError
from .thermal import HeatInputs, max_stable_dt, step as thermal_step

OBJECTIVES = ("thermal", "cost", "ramp")


@dataclass(frozen=True)
class Observation:
    """Everything the controller sees. Contains no context field."""

    zone_temps: np.ndarray
    occupant_heat_w: np.ndarray
    solar_heat_w: np.ndarray
    ground_temp_c: float
    outdoor_temp_c: float
    price_per_kwh: float
    setpoints_c: np.ndarray
    time_index: float

    def vector(self) -> np.ndarray:
        """Flat layout: 3 per-zone blocks, 3 scalars, setpoints, time."""
        return np.concatenate(
            [
                self.zone_temps,
                self.occupant_heat_w,
                self.solar_heat_w,
                [self.ground_temp_c, self.outdoor_temp_c, self.price_per_kwh],
                self.setpoints_c,
                [self.time_index],
            ]
        )

    @staticmethod
    def field_names(num_zones: int) -> tuple[str, ...]:
        names = []
        names += [f"zone_temp_c_{i}" for i in range(num_zones)]
        names += [f"occupant_heat_w_{i}" for i in range(num_zones)]
        names += [f"solar_heat_w_{i}" for i in range(num_zones)]
        names += ["ground_temp_c", "outdoor_temp_c", "price_per_kwh"]
        names += [f"setpoint_c_{i}" for i in range(num_zones)]
        names += ["time_index"]
        return tuple(names)


def observation_dim(num_zones: int) -> int:
    return 4 * num_zones + 4


@dataclass(frozen=True)
class EnvConfig:
    horizon: int = 24
    control_interval_s: float = 3600.0
    substep_s: float = 300.0
    setpoint_c: float | tuple[float, ...] = 22.0
    gamma: float = 0.99
    objectives: tuple[str, ...] = ("thermal", "cost")
    price_factor: float = 0.05
    start_hour: int = 0
    init_temp_halfwidth_c: float = 2.0
    occupant_gain_wm2: float = 10.0
    solar_gain_factor: float = 0.6
    mass_per_area: float = DEFAULT_MASS_PER_AREA

    def __post_init__(self):
        if self.horizon < 1:
            raise ConfigurationError("horizon must be >= 1")
        if self.control_interval_s <= 0 or self.substep_s <= 0:
            raise ConfigurationError("control interval and substep must be > 0")
        n_sub = round(self.control_interval_s / self.substep_s)
        if n_sub < 1 or abs(n_sub * self.substep_s - self.control_interval_s) > 1e-9:
            raise ConfigurationError(
                f"substep {self.substep_s} s must divide the control interval "
                f"{self.control_interval_s} s evenly"
            )
        if not (0.0 < self.gamma <= 1.0):
            raise ConfigurationError("gamma must lie in (0, 1]")
        if not self.objectives:
            raise ConfigurationError("at least one objective is required")
        unknown = [o for o in self.objectives if o not in OBJECTIVES]
        if unknown:
            raise ConfigurationError(
                f"unknown objectives {unknown}; choose from {OBJECTIVES}"
            )
        if len(set(self.objectives)) != len(self.objectives):
            raise ConfigurationError("objectives must be unique")
        if self.price_factor < 0:
            raise ConfigurationError("price_factor must be >= 0")
        if self.init_temp_halfwidth_c < 0:
            raise ConfigurationError("init_temp_halfwidth_c must be >= 0")
        if self.start_hour < 0:
            raise ConfigurationError("start_hour must be >= 0")
        object.__setattr__(self, "objectives", tuple(self.objectives))
        if not isinstance(self.setpoint_c, (int, float)):
            object.__setattr__(
                self, "setpoint_c", tuple(float(s) for s in self.setpoint_c)
            )

    @property
    def substeps_per_control(self) -> int:
        return round(self.control_interval_s / self.substep_s)

    @property
    def num_objectives(self) -> int:
        return len(self.objectives)

    def setpoints(self, num_zones: int) -> np.ndarray:
        if isinstance(self.setpoint_c, (int, float)):
            return np.full(num_zones, float(self.setpoint_c))
        if len(self.setpoint_c) != num_zones:
            raise ConfigurationError(
                f"{len(self.setpoint_c)} setpoints for {num_zones} zones"
            )
        return np.asarray(self.setpoint_c, dtype=float)


def reward_thermal(temps, setpoints) -> float:
    """Comfort: full marks minus 0.05 per degree-zone of setpoint error."""
    temps = np.asarray(temps, dtype=float)
    setpoints = np.asarray(setpoints, dtype=float)
    if temps.shape != setpoints.shape:
        raise ValidationError("temps and setpoints must have equal length")
    m = temps.shape[0]
    return float(m - 0.05 * np.abs(temps - setpoints).sum())


def reward_cost(powers_kw, price_per_kwh: float, price_factor: float = 0.05) -> float:
    """Energy cost: full marks minus scaled spend at the current price."""
    powers_kw = np.asarray(powers_kw, dtype=float)
    if price_per_kwh < 0:
        raise ValidationError("price must be >= 0")
    m = powers_kw.shape[0]
    return float(m - price_factor * price_per_kwh * np.abs(powers_kw).sum())


def reward_ramp(powers_now_kw, powers_prev_kw) -> float:
    """Ramping: full marks minus the jump in total absolute power draw."""
    now = np.asarray(powers_now_kw, dtype=float)
    prev = np.asarray(powers_prev_kw, dtype=float)
    m = now.shape[0]
    return float(m - abs(np.abs(now).sum() - np.abs(prev).sum()))


def validate_preference(preference) -> np.ndarray:
    preference = np.asarray(preference, dtype=float)
    if preference.ndim != 1:
        raise ValidationError("preference must be a 1-D vector")
    if np.any(preference < 0) or abs(preference.sum() - 1.0) > 1e-9:
        raise ValidationError(
            f"preference {preference.tolist()} is not on the probability simplex"
        )
    return preference


def scalarize(preference, rewards) -> float:
    preference = validate_preference(preference)
    rewards = np.asarray(rewards, dtype=float)
    if preference.shape != rewards.shape:
        raise ValidationError("preference and reward lengths differ")
    return float(preference @ rewards)


def episode_return(rewards, gamma: float) -> np.ndarray:
    """Discounted per-objective sum over a (T, n) reward sequence."""
    rewards = np.atleast_2d(np.asarray(rewards, dtype=float))
    discounts = gamma ** np.arange(rewards.shape[0])
    return discounts @ rewards


class BuildingEnv:
    """Stateful episode runner. One instance, one episode at a time."""

    def __init__(self, config: EnvConfig | None = None,
                 library: AssetLibrary | None = None):
        self.config = config if config is not None else EnvConfig()
        self.library = library if library is not None else default_library()
        self._model = None
        self._profile = None
        self._temps = None
        self._setpoints = None
        self._floor_areas = None
        self._window_areas = None
        self._step_count = 0
        self._prev_powers_kw = None
        self._done = True

    @property
    def num_zones(self) -> int:
        if self._model is None:
            raise LifecycleError("reset the environment before querying zones")
        return self._model.num_zones

    @property
    def obs_dim(self) -> int:
        return observation_dim(self.num_zones)

    @property
    def num_objectives(self) -> int:
        return self.config.num_objectives

    def _hour_at(self, step_index: int) -> int:
        elapsed_s = step_index * self.config.control_interval_s
        return self.config.start_hour + int(elapsed_s // 3600)

    def _exogenous(self, step_index: int) -> dict[str, float]:
        return self._profile.at(self._hour_at(step_index))

    def _gains(self, climate: dict[str, float]) -> tuple[np.ndarray, np.ndarray]:
        occupant = (
            climate["occupancy_frac"]
            * self.config.occupant_gain_wm2
            * self._floor_areas
        )
        solar = (
            climate["solar_wm2"] * self.config.solar_gain_factor * self._window_areas
        )
        return occupant, solar

    def _observe(self) -> Observation:
        climate = self._exogenous(self._step_count)
        occupant, solar = self._gains(climate)
        return Observation(
            zone_temps=self._temps.copy(),
            occupant_heat_w=occupant,
            solar_heat_w=solar,
            ground_temp_c=climate["ground_temp_c"],
            outdoor_temp_c=climate["outdoor_temp_c"],
            price_per_kwh=climate["price_per_kwh"],
            setpoints_c=self._setpoints.copy(),
            time_index=float(self._hour_at(self._step_count)),
        )

    def reset(self, context: ContextSpec, rng_seed: int) -> Observation:
        layout = self.library.layout(context.layout_id)
        self._profile = self.library.weather(context.climate_id)
        episode_s = self.config.horizon * self.config.control_interval_s
        available_s = self._profile.num_hours * 3600.0
        if episode_s > available_s:
            raise ConfigurationError(
                f"episode needs {episode_s:.0f} s of weather but "
                f"'{context.climate_id}' provides {available_s:.0f} s"
            )
        self._model = build_model(
            layout, context.u_wall, mass_per_area=self.config.mass_per_area
        )
        if max_stable_dt(self._model) <= self.config.substep_s:
            raise ConfigurationError(
                f"substep {self.config.substep_s} s violates the stability "
                f"bound {max_stable_dt(self._model):.1f} s for this context"
            )
        self._setpoints = self.config.setpoints(self._model.num_zones)
        self._floor_areas = np.array([z.floor_area_m2 for z in layout.zones])
        self._window_areas = np.array([z.window_area_m2 for z in layout.zones])
        rng = np.random.default_rng(int(rng_seed))
        hw = self.config.init_temp_halfwidth_c
        self._temps = self._setpoints + rng.uniform(
            -hw, hw, size=self._model.num_zones
        )
        self._step_count = 0
        self._prev_powers_kw = np.zeros(self._model.num_zones)
        self._done = False
        return self._observe()

    def step(self, action) -> tuple[Observation, np.ndarray, bool]:
        if self._model is None:
            raise LifecycleError("step called before reset")
        if self._done:
            raise LifecycleError("episode is finished; reset before stepping")
        action = np.asarray(action, dtype=float)
        if action.shape != (self._model.num_zones,):
            raise ValidationError(
                f"action shape {action.shape}, expected ({self._model.num_zones},)"
            )
        if not np.all(np.isfinite(action)):
            raise ValidationError("action must be finite")
        action = np.clip(action, -1.0, 1.0)
        powers_w = action * self._model.max_power

        climate = self._exogenous(self._step_count)
        occupant, solar = self._gains(climate)
        inputs = HeatInputs(
            controlled=powers_w,
            occupant=occupant,
            solar=solar,
            outdoor_temp=climate["outdoor_temp_c"],
            ground_temp=climate["ground_temp_c"],
        )
        temps = self._temps
        for _ in range(self.config.substeps_per_control):
            temps = thermal_step(self._model, temps, inputs, self.config.substep_s)
        self._temps = temps
        self._step_count += 1

        powers_kw = powers_w / 1000.0
        values = {
            "thermal": reward_thermal(self._temps, self._setpoints),
            "cost": reward_cost(
                powers_kw, climate["price_per_kwh"], self.config.price_factor
            ),
            "ramp": reward_ramp(powers_kw, self._prev_powers_kw),
        }
        reward = np.array([values[o] for o in self.config.objectives])
        self._prev_powers_kw = powers_kw
        self._done = self._step_count >= self.config.horizon
        return self._observe(), reward, self._done


def write_trajectory_csv(
    path: str | Path,
    times: np.ndarray,
    temps: np.ndarray,
    actions: np.ndarray,
    rewards: np.ndarray,
) -> None:
    """Episode log: one row per control step, exact float round-trip."""
    times = np.asarray(times, dtype=float)
    temps = np.atleast_2d(np.asarray(temps, dtype=float))
    actions = np.atleast_2d(np.asarray(actions, dtype=float))
    rewards = np.atleast_2d(np.asarray(rewards, dtype=float))
    header = (
        ["time_index"]
        + [f"zone_temp_c_{i}" for i in range(temps.shape[1])]
        + [f"action_{i}" for i in range(actions.shape[1])]
        + [f"reward_{i}" for i in range(rewards.shape[1])]
    )
    lines = [",".join(header)]
    for t in range(temps.shape[0]):
        row = [repr(float(times[t]))]
        row += [repr(float(x)) for x in temps[t]]
        row += [repr(float(x)) for x in actions[t]]
        row += [repr(float(x)) for x in rewards[t]]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")

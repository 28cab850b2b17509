"""Lumped resistance-capacitance thermal network for an M-zone building.

Each zone is one capacitance node; walls are resistances. Zone temperature
follows a linear first-order balance

    C_i * dT_i/dt = sum_j (T_j - T_i)/R_ij            inter-zone conduction
                  + (T_out - T_i)/R_out_i             exterior envelope, if any
                  + (T_ground - T_i)/R_ground_i       ground slab, if any
                  + Q_hvac_i + Q_occupant_i + Q_solar_i

Units: temperature degC, power W, capacitance J/degC, resistance degC/W,
time s. A resistance entry of ``+inf`` means "no heat path" (conductance 0);
the matrix diagonal is always ``inf``.

Integration is forward Euler with zero-order-hold inputs, guarded by the
diagonal stability bound `max_stable_dt` (the explicit scheme keeps every
update a convex combination of node and boundary temperatures as long as
dt stays at or below the bound).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, StabilityError

NO_PATH = np.inf


def _vector(values, length: int, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (length,):
        raise ConfigurationError(
            f"{name} must be a length-{length} vector, got shape {arr.shape}"
        )
    return arr


@dataclass(frozen=True)
class BuildingModel:
    """Thermal parameters of one building instance.

    resistance is the symmetric inter-zone matrix (degC/W, ``inf`` where
    zones share no wall); outdoor_resistance / ground_resistance couple
    zones to the boundary temperatures (``inf`` where absent). max_power
    is the per-zone HVAC power bound in W used to scale normalized actions.
    """

    capacitance: np.ndarray
    resistance: np.ndarray
    outdoor_resistance: np.ndarray
    ground_resistance: np.ndarray | None = None
    max_power: np.ndarray | None = None
    zone_names: tuple[str, ...] = ()

    # derived, filled in __post_init__
    _k_zone: np.ndarray = field(init=False, repr=False, compare=False)
    _k_out: np.ndarray = field(init=False, repr=False, compare=False)
    _k_ground: np.ndarray = field(init=False, repr=False, compare=False)
    _k_zone_rows: np.ndarray = field(init=False, repr=False, compare=False)
    _k_total: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        cap = np.asarray(self.capacitance, dtype=float)
        m = cap.shape[0] if cap.ndim == 1 else 0
        if m < 1:
            raise ConfigurationError("capacitance must be a non-empty 1-d vector")
        res = np.asarray(self.resistance, dtype=float)
        if res.shape != (m, m):
            raise ConfigurationError(
                f"resistance must be {m}x{m} to match capacitance, got {res.shape}"
            )
        out = _vector(self.outdoor_resistance, m, "outdoor_resistance")
        ground = (
            np.full(m, NO_PATH)
            if self.ground_resistance is None
            else _vector(self.ground_resistance, m, "ground_resistance")
        )
        power = (
            np.full(m, NO_PATH)
            if self.max_power is None
            else _vector(self.max_power, m, "max_power")
        )
        names = tuple(self.zone_names) or tuple(f"zone{i}" for i in range(m))
        if len(names) != m:
            raise ConfigurationError("zone_names length does not match capacitance")

        res = res.copy()
        np.fill_diagonal(res, NO_PATH)
        self._validate(cap, res, out, ground, power, names, m)

        for arr in (cap, res, out, ground, power):
            arr.setflags(write=False)
        object.__setattr__(self, "capacitance", cap)
        object.__setattr__(self, "resistance", res)
        object.__setattr__(self, "outdoor_resistance", out)
        object.__setattr__(self, "ground_resistance", ground)
        object.__setattr__(self, "max_power", power)
        object.__setattr__(self, "zone_names", names)

        k_zone = np.where(np.isinf(res), 0.0, 1.0 / res)
        k_out = np.where(np.isinf(out), 0.0, 1.0 / out)
        k_ground = np.where(np.isinf(ground), 0.0, 1.0 / ground)
        k_zone_rows = k_zone.sum(axis=1)
        k_total = k_zone_rows + k_out + k_ground
        for arr in (k_zone, k_out, k_ground, k_zone_rows, k_total):
            arr.setflags(write=False)
        object.__setattr__(self, "_k_zone", k_zone)
        object.__setattr__(self, "_k_out", k_out)
        object.__setattr__(self, "_k_ground", k_ground)
        object.__setattr__(self, "_k_zone_rows", k_zone_rows)
        object.__setattr__(self, "_k_total", k_total)

    @staticmethod
    def _validate(cap, res, out, ground, power, names, m):
        if not np.all(np.isfinite(cap)) or np.any(cap <= 0):
            raise ConfigurationError("all capacitances must be finite and > 0")
        present = ~np.isinf(res)
        if np.any(np.isnan(res)) or np.any(res[present] <= 0):
            raise ConfigurationError("present resistances must be > 0")
        if not np.array_equal(present, present.T) or not np.allclose(
            res[present], res.T[present], rtol=0, atol=0
        ):
            raise ConfigurationError("resistance matrix must be symmetric")
        for vec, label in ((out, "outdoor_resistance"), (ground, "ground_resistance")):
            mask = ~np.isinf(vec)
            if np.any(np.isnan(vec)) or np.any(vec[mask] <= 0):
                raise ConfigurationError(f"present {label} entries must be > 0")
        if np.any(np.isnan(power)) or np.any(power[~np.isinf(power)] < 0):
            raise ConfigurationError("max_power entries must be >= 0")

        # Every zone must reach every other zone through internal walls or the
        # shared outdoor node; a single-zone model additionally needs the
        # outdoor link (nothing else can anchor it).
        if m == 1:
            if np.isinf(out[0]):
                raise ConfigurationError(
                    "single-zone model requires an outdoor link"
                )
            return
        adjacency = present.copy()
        has_out = ~np.isinf(out)
        reached = np.zeros(m, dtype=bool)
        stack = [0]
        reached[0] = True
        while stack:
            i = stack.pop()
            neighbors = np.flatnonzero(adjacency[i])
            if has_out[i]:
                neighbors = np.union1d(neighbors, np.flatnonzero(has_out))
            for j in neighbors:
                if not reached[j]:
                    reached[j] = True
                    stack.append(int(j))
        if not reached.all():
            missing = [names[i] for i in np.flatnonzero(~reached)]
            raise ConfigurationError(
                f"zones {missing} are disconnected from the rest of the network"
            )

    @property
    def num_zones(self) -> int:
        return self.capacitance.shape[0]


@dataclass(frozen=True)
class HeatInputs:
    """Boundary conditions and heat injections held constant over one step.

    controlled is the signed HVAC power per zone (W, heating positive);
    occupant and solar are non-negative gains per zone (W).
    """

    controlled: np.ndarray
    occupant: np.ndarray
    solar: np.ndarray
    outdoor_temp: float
    ground_temp: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "controlled", np.asarray(self.controlled, dtype=float))
        object.__setattr__(self, "occupant", np.asarray(self.occupant, dtype=float))
        object.__setattr__(self, "solar", np.asarray(self.solar, dtype=float))


def _check_step_args(model: BuildingModel, temps: np.ndarray, inputs: HeatInputs) -> np.ndarray:
    temps = np.asarray(temps, dtype=float)
    m = model.num_zones
    if temps.shape != (m,):
        raise ConfigurationError(
            f"temperature state must have shape ({m},), got {temps.shape}"
        )
    for arr, label in (
        (inputs.controlled, "controlled"),
        (inputs.occupant, "occupant"),
        (inputs.solar, "solar"),
    ):
        if arr.shape != (m,):
            raise ConfigurationError(
                f"heat input '{label}' must have shape ({m},), got {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ConfigurationError(f"heat input '{label}' contains non-finite values")
    if not np.all(np.isfinite(temps)):
        raise ConfigurationError("temperature state contains non-finite values")
    if not np.isfinite(inputs.outdoor_temp) or not np.isfinite(inputs.ground_temp):
        raise ConfigurationError("boundary temperatures must be finite")
    return temps


def derivative(model: BuildingModel, temps: np.ndarray, inputs: HeatInputs) -> np.ndarray:
    """Instantaneous dT/dt (degC/s) for every zone."""
    temps = _check_step_args(model, temps, inputs)
    flow = model._k_zone @ temps - temps * model._k_zone_rows
    flow += model._k_out * (inputs.outdoor_temp - temps)
    flow += model._k_ground * (inputs.ground_temp - temps)
    flow += inputs.controlled + inputs.occupant + inputs.solar
    return flow / model.capacitance


def _stability_bounds(model: BuildingModel) -> np.ndarray:
    k = model._k_total
    return np.where(k > 0, model.capacitance / np.where(k > 0, k, 1.0), np.inf)


def max_stable_dt(model: BuildingModel) -> float:
    """Largest forward-Euler step (s) keeping every zone update a convex mix.

    Equals min_i C_i / (total conductance of zone i). Zones with no links at
    all impose no bound.
    """
    return float(_stability_bounds(model).min())


def step(
    model: BuildingModel, temps: np.ndarray, inputs: HeatInputs, dt: float
) -> np.ndarray:
    """One forward-Euler update over dt seconds with inputs held constant."""
    if not dt > 0:
        raise ConfigurationError(f"dt must be > 0, got {dt}")
    bounds = _stability_bounds(model)
    worst = int(np.argmin(bounds))
    if dt > bounds[worst]:
        raise StabilityError(
            f"dt={dt} s exceeds the explicit-Euler stability bound "
            f"{bounds[worst]:.6g} s set by zone '{model.zone_names[worst]}'",
            zone=model.zone_names[worst],
            max_dt_s=float(bounds[worst]),
        )
    temps = np.asarray(temps, dtype=float)
    return temps + dt * derivative(model, temps, inputs)

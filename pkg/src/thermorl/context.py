"""Hidden-context construction: U-factor sampling and model assembly.

A context couples a building layout with a concrete thermal parameterization
(the seven envelope U-factors) and a climate profile. Agents never observe
the U-factors; they only feel their effect through the dynamics.

U-factor is thermal transmittance in W/(m^2*degC): heat flow per unit area
per degree of temperature difference. Higher U means worse insulation.
"""

from __future__ import annotations

import dataclasses
import json
from collections.abc import Iterator
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, IngestionError, ValidationError
from .layouts import BuildingLayout, load_layout
from .seeding import derive_rng
from .thermal import NO_PATH, BuildingModel, max_stable_dt
from .weather import WeatherProfile, load_weather_csv

# envelope component order; fixed, used for vector round-trips
U_COMPONENTS = (
    "intwall",
    "floor",
    "outwall",
    "roof",
    "ceiling",
    "groundfloor",
    "window",
)

# admissible U-factor ranges, W/(m^2*degC)
U_BOUNDS = {
    "intwall": (0.774, 6.299),
    "floor": (0.386, 3.145),
    "outwall": (0.269, 2.191),
    "roof": (0.160, 1.304),
    "ceiling": (0.386, 3.145),
    "groundfloor": (0.386, 3.145),
    "window": (1.950, 3.622),
}

CLIMATE_IDS = (
    "Warm_Marine",
    "Mixed_Marine",
    "Cool_Marine",
    "Warm_Humid",
    "Warm_Dry",
    "Hot_Humid",
)

# air properties for zone capacitance
AIR_HEAT_CAPACITY_J_KGC = 1005.0
AIR_DENSITY_KG_M3 = 1.2
# lumped envelope/furnishing mass per unit of adjacent surface, J/(m^2*degC)
DEFAULT_MASS_PER_AREA = 10_000.0


@dataclass(frozen=True)
class UWallVector:
    """Seven envelope U-factors, each confined to its admissible range."""

    intwall: float
    floor: float
    outwall: float
    roof: float
    ceiling: float
    groundfloor: float
    window: float

    def __post_init__(self):
        for name in U_COMPONENTS:
            value = float(getattr(self, name))
            object.__setattr__(self, name, value)
            lo, hi = U_BOUNDS[name]
            if not (lo <= value <= hi):
                raise ValidationError(
                    f"U-factor '{name}' = {value} outside [{lo}, {hi}]"
                )

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in U_COMPONENTS], dtype=float)

    @classmethod
    def from_array(cls, values) -> "UWallVector":
        values = np.asarray(values, dtype=float)
        if values.shape != (len(U_COMPONENTS),):
            raise ValidationError(
                f"expected {len(U_COMPONENTS)} U-factors, got shape {values.shape}"
            )
        return cls(**dict(zip(U_COMPONENTS, values)))

    @classmethod
    def nominal(cls) -> "UWallVector":
        """Midpoint of every admissible range."""
        return cls(**{k: (lo + hi) / 2.0 for k, (lo, hi) in U_BOUNDS.items()})

    @classmethod
    def lower(cls) -> "UWallVector":
        return cls(**{k: lo for k, (lo, _) in U_BOUNDS.items()})

    @classmethod
    def upper(cls) -> "UWallVector":
        return cls(**{k: hi for k, (_, hi) in U_BOUNDS.items()})

    def to_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in U_COMPONENTS}


def sample_uwall(rng_seed: int | np.random.Generator) -> UWallVector:
    """Draw each U-factor independently, uniformly within its range."""
    if isinstance(rng_seed, np.random.Generator):
        rng = rng_seed
    else:
        rng = np.random.default_rng(int(rng_seed))
    values = {}
    for name in U_COMPONENTS:
        lo, hi = U_BOUNDS[name]
        values[name] = float(rng.uniform(lo, hi))
    return UWallVector(**values)


@dataclass(frozen=True)
class ContextSpec:
    """One hidden context: thermal parameters plus exogenous conditions."""

    u_wall: UWallVector
    climate_id: str
    layout_id: str

    def to_dict(self) -> dict:
        return {
            "u_wall": self.u_wall.to_dict(),
            "climate_id": self.climate_id,
            "layout_id": self.layout_id,
        }


def context_from_dict(data: dict) -> ContextSpec:
    try:
        u_wall = UWallVector(**{k: float(data["u_wall"][k]) for k in U_COMPONENTS})
        return ContextSpec(
            u_wall=u_wall,
            climate_id=str(data["climate_id"]),
            layout_id=str(data["layout_id"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise IngestionError(f"malformed context spec: {exc}") from exc


def load_contexts(path: str | Path) -> dict[str, ContextSpec]:
    """Read a JSON file mapping context names to context specs."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise IngestionError(f"context file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise IngestionError(f"context file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise IngestionError(f"context file {path} must hold a name->spec mapping")
    return {str(name): context_from_dict(spec) for name, spec in data.items()}


def save_contexts(contexts: dict[str, ContextSpec], path: str | Path) -> None:
    payload = {name: spec.to_dict() for name, spec in contexts.items()}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def build_model(
    layout: BuildingLayout,
    u: UWallVector,
    mass_per_area: float = DEFAULT_MASS_PER_AREA,
) -> BuildingModel:
    """Convert a layout plus U-factors into an RC network.

    Every surface of area A with transmittance U contributes conductance
    U*A (resistance 1/(U*A)). Parallel paths to the outdoor node (opaque
    wall, windows, roof) add conductances; the inter-story slab is the
    series combination of its floor and ceiling faces.
    """
    if mass_per_area < 0:
        raise ConfigurationError("mass_per_area must be >= 0")
    m = layout.num_zones
    resistance = np.full((m, m), NO_PATH)
    adjacent_area = np.zeros(m)

    for adj in layout.adjacencies:
        i = layout.zone_index(adj.zone_a)
        j = layout.zone_index(adj.zone_b)
        if adj.element == "intwall":
            r = 1.0 / (u.intwall * adj.area_m2)
        else:  # slab: floor face and ceiling face in series
            r = 1.0 / (u.floor * adj.area_m2) + 1.0 / (u.ceiling * adj.area_m2)
        resistance[i, j] = r
        resistance[j, i] = r
        adjacent_area[i] += adj.area_m2
        adjacent_area[j] += adj.area_m2

    outdoor_resistance = np.full(m, NO_PATH)
    ground_resistance = np.full(m, NO_PATH)
    capacitance = np.zeros(m)
    max_power = np.zeros(m)

    for i, zone in enumerate(layout.zones):
        k_out = (
            u.outwall * zone.exterior_wall_area_m2
            + u.window * zone.window_area_m2
            + u.roof * zone.roof_area_m2
        )
        if k_out > 0:
            outdoor_resistance[i] = 1.0 / k_out
        k_ground = u.groundfloor * zone.ground_floor_area_m2
        if k_ground > 0:
            ground_resistance[i] = 1.0 / k_ground
        envelope = (
            zone.exterior_wall_area_m2
            + zone.window_area_m2
            + zone.roof_area_m2
            + zone.ground_floor_area_m2
            + adjacent_area[i]
        )
        volume = zone.floor_area_m2 * zone.height_m
        capacitance[i] = (
            AIR_HEAT_CAPACITY_J_KGC * AIR_DENSITY_KG_M3 * volume
            + mass_per_area * envelope
        )
        max_power[i] = zone.max_power_w

    return BuildingModel(
        capacitance=capacitance,
        resistance=resistance,
        outdoor_resistance=outdoor_resistance,
        ground_resistance=ground_resistance,
        max_power=max_power,
        zone_names=tuple(z.name for z in layout.zones),
    )


class AssetLibrary:
    """Named layouts and climate profiles, loaded lazily and cached."""

    def __init__(self, root: str | Path | None = None):
        self._layout_paths: dict[str, Path] = {}
        self._weather_paths: dict[str, Path] = {}
        self._layouts: dict[str, BuildingLayout] = {}
        self._weather: dict[str, WeatherProfile] = {}
        if root is not None:
            root = Path(root)
            for p in sorted((root / "layouts").glob("*.json")):
                self._layout_paths[p.stem] = p
            for p in sorted((root / "weather").glob("*.csv")):
                self._weather_paths[p.stem] = p

    def register_layout(self, layout: BuildingLayout) -> None:
        self._layouts[layout.name] = layout

    def register_weather(self, profile: WeatherProfile) -> None:
        self._weather[profile.name] = profile

    @property
    def layout_ids(self) -> tuple[str, ...]:
        return tuple(sorted(set(self._layouts) | set(self._layout_paths)))

    @property
    def climate_ids(self) -> tuple[str, ...]:
        return tuple(sorted(set(self._weather) | set(self._weather_paths)))

    def layout(self, layout_id: str) -> BuildingLayout:
        if layout_id not in self._layouts:
            if layout_id not in self._layout_paths:
                raise IngestionError(
                    f"unknown layout '{layout_id}'; available: {list(self.layout_ids)}"
                )
            self._layouts[layout_id] = load_layout(self._layout_paths[layout_id])
        return self._layouts[layout_id]

    def weather(self, climate_id: str) -> WeatherProfile:
        if climate_id not in self._weather:
            if climate_id not in self._weather_paths:
                raise IngestionError(
                    f"unknown climate '{climate_id}'; "
                    f"available: {list(self.climate_ids)}"
                )
            self._weather[climate_id] = load_weather_csv(
                self._weather_paths[climate_id], name=climate_id
            )
        return self._weather[climate_id]


_default_library: AssetLibrary | None = None


def default_library() -> AssetLibrary:
    """Library over the assets shipped with the package (cached)."""
    global _default_library
    if _default_library is None:
        _default_library = AssetLibrary(Path(__file__).parent / "assets")
    return _default_library


def load_weather(climate_id: str) -> WeatherProfile:
    return default_library().weather(climate_id)


def dynamics_contexts(
    layout_id: str,
    climate_id: str,
    library: AssetLibrary | None = None,
) -> dict[str, ContextSpec]:
    """The shipped named evaluation contexts (fixed U-factor draws)."""
    if library is None:
        library = default_library()
    seeds_path = Path(__file__).parent / "assets" / "contexts" / "dynamics_seeds.json"
    seeds = json.loads(seeds_path.read_text())
    return {
        name: ContextSpec(
            u_wall=sample_uwall(int(seed)),
            climate_id=climate_id,
            layout_id=layout_id,
        )
        for name, seed in seeds.items()
    }


def context_sampler(
    mode: str,
    base: ContextSpec,
    rng_seed: int | np.random.Generator,
    climates: tuple[str, ...] | None = None,
) -> Iterator[ContextSpec]:
    """Infinite stream of per-episode contexts.

    static: the base context forever. dynamic: fresh U-factors each draw,
    climate fixed at the base unless a climate list is supplied.
    """
    if mode not in ("static", "dynamic"):
        raise ValidationError(f"mode must be 'static' or 'dynamic', got {mode!r}")
    if mode == "static":
        while True:
            yield base
    if isinstance(rng_seed, np.random.Generator):
        rng = rng_seed
    else:
        rng = np.random.default_rng(int(rng_seed))
    while True:
        u = sample_uwall(rng)
        climate = base.climate_id
        if climates:
            climate = str(climates[int(rng.integers(len(climates)))])
        yield dataclasses.replace(base, u_wall=u, climate_id=climate)


def validate_assets(
    library: AssetLibrary | None = None,
    substep_s: float = 300.0,
) -> list[str]:
    """Check every shipped asset; returns one report line per asset.

    Stability is checked at the all-upper-bound U vector, which maximizes
    every conductance and therefore minimizes the stable-step bound over
    the whole admissible U range.
    """
    if library is None:
        library = default_library()
    lines = []
    worst_u = UWallVector.upper()
    for layout_id in library.layout_ids:
        layout = library.layout(layout_id)
        model = build_model(layout, worst_u)
        bound = max_stable_dt(model)
        if bound <= substep_s:
            raise ValidationError(
                f"layout '{layout_id}': worst-case stable step {bound:.1f} s "
                f"does not exceed the simulation substep {substep_s} s"
            )
        lines.append(
            f"layout '{layout_id}': {layout.num_zones} zones, "
            f"worst-case stable step {bound:.1f} s > substep {substep_s:.0f} s"
        )
    for climate_id in library.climate_ids:
        profile = library.weather(climate_id)
        lines.append(f"climate '{climate_id}': {profile.num_hours} hours, valid")
    return lines

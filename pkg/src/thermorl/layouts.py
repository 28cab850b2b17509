"""Building layout descriptions: geometry and connectivity, no thermal values.

A layout file is JSON with this schema (all areas m^2, heights m, power W)::

    {
      "name": "toy2",
      "zones": [
        {"name": "lower",
         "floor_area_m2": 20.0,         # conditioned floor area (volume = area * height)
         "height_m": 2.5,
         "exterior_wall_area_m2": 30.0, # opaque exterior wall only, windows excluded
         "window_area_m2": 6.0,
         "roof_area_m2": 0.0,           # roof exposed to outdoors, 0 if none
         "ground_floor_area_m2": 20.0,  # slab on ground, 0 if none
         "max_power_w": 5000.0},
        ...
      ],
      "adjacencies": [
        {"zones": ["lower", "upper"], "area_m2": 20.0, "element": "slab"}
      ]
    }

Adjacency ``element`` kinds:

* ``"intwall"`` -- vertical partition between zones on the same story.
* ``"slab"``    -- horizontal floor/ceiling assembly between stacked zones.

Resistances and capacitances are NOT stored here; they are derived from a
U-factor vector by `thermorl.context.build_model`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigurationError, IngestionError

ADJACENCY_ELEMENTS = ("intwall", "slab")


@dataclass(frozen=True)
class ZoneSpec:
    name: str
    floor_area_m2: float
    height_m: float
    exterior_wall_area_m2: float = 0.0
    window_area_m2: float = 0.0
    roof_area_m2: float = 0.0
    ground_floor_area_m2: float = 0.0
    max_power_w: float = 5000.0


@dataclass(frozen=True)
class Adjacency:
    zone_a: str
    zone_b: str
    area_m2: float
    element: str = "intwall"


@dataclass(frozen=True)
class BuildingLayout:
    name: str
    zones: tuple[ZoneSpec, ...]
    adjacencies: tuple[Adjacency, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "zones", tuple(self.zones))
        object.__setattr__(self, "adjacencies", tuple(self.adjacencies))
        self.validate()

    def validate(self) -> None:
        if not self.zones:
            raise ConfigurationError(f"layout '{self.name}' has no zones")
        names = [z.name for z in self.zones]
        if len(set(names)) != len(names):
            raise ConfigurationError(f"layout '{self.name}' has duplicate zone names")
        for z in self.zones:
            if z.floor_area_m2 <= 0 or z.height_m <= 0:
                raise ConfigurationError(
                    f"zone '{z.name}': floor area and height must be > 0"
                )
            for label, area in (
                ("exterior_wall_area_m2", z.exterior_wall_area_m2),
                ("window_area_m2", z.window_area_m2),
                ("roof_area_m2", z.roof_area_m2),
                ("ground_floor_area_m2", z.ground_floor_area_m2),
            ):
                if area < 0:
                    raise ConfigurationError(f"zone '{z.name}': {label} must be >= 0")
            if z.max_power_w < 0:
                raise ConfigurationError(f"zone '{z.name}': max_power_w must be >= 0")
        known = set(names)
        seen_pairs = set()
        for adj in self.adjacencies:
            if adj.zone_a not in known or adj.zone_b not in known:
                raise ConfigurationError(
                    f"adjacency ({adj.zone_a}, {adj.zone_b}) references unknown zone"
                )
            if adj.zone_a == adj.zone_b:
                raise ConfigurationError(f"zone '{adj.zone_a}' cannot adjoin itself")
            pair = frozenset((adj.zone_a, adj.zone_b))
            if pair in seen_pairs:
                raise ConfigurationError(
                    f"duplicate adjacency ({adj.zone_a}, {adj.zone_b})"
                )
            seen_pairs.add(pair)
            if adj.area_m2 <= 0:
                raise ConfigurationError(
                    f"adjacency ({adj.zone_a}, {adj.zone_b}) declared with zero or "
                    f"negative shared area"
                )
            if adj.element not in ADJACENCY_ELEMENTS:
                raise ConfigurationError(
                    f"adjacency element '{adj.element}' not one of {ADJACENCY_ELEMENTS}"
                )

    @property
    def num_zones(self) -> int:
        return len(self.zones)

    def zone_index(self, name: str) -> int:
        for i, z in enumerate(self.zones):
            if z.name == name:
                return i
        raise ConfigurationError(f"unknown zone '{name}' in layout '{self.name}'")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "zones": [
                {
                    "name": z.name,
                    "floor_area_m2": z.floor_area_m2,
                    "height_m": z.height_m,
                    "exterior_wall_area_m2": z.exterior_wall_area_m2,
                    "window_area_m2": z.window_area_m2,
                    "roof_area_m2": z.roof_area_m2,
                    "ground_floor_area_m2": z.ground_floor_area_m2,
                    "max_power_w": z.max_power_w,
                }
                for z in self.zones
            ],
            "adjacencies": [
                {
                    "zones": [a.zone_a, a.zone_b],
                    "area_m2": a.area_m2,
                    "element": a.element,
                }
                for a in self.adjacencies
            ],
        }


def layout_from_dict(data: dict) -> BuildingLayout:
    try:
        zones = tuple(
            ZoneSpec(
                name=str(z["name"]),
                floor_area_m2=float(z["floor_area_m2"]),
                height_m=float(z["height_m"]),
                exterior_wall_area_m2=float(z.get("exterior_wall_area_m2", 0.0)),
                window_area_m2=float(z.get("window_area_m2", 0.0)),
                roof_area_m2=float(z.get("roof_area_m2", 0.0)),
                ground_floor_area_m2=float(z.get("ground_floor_area_m2", 0.0)),
                max_power_w=float(z.get("max_power_w", 5000.0)),
            )
            for z in data["zones"]
        )
        adjacencies = tuple(
            Adjacency(
                zone_a=str(a["zones"][0]),
                zone_b=str(a["zones"][1]),
                area_m2=float(a["area_m2"]),
                element=str(a.get("element", "intwall")),
            )
            for a in data.get("adjacencies", [])
        )
        name = str(data.get("name", "unnamed"))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise IngestionError(f"malformed layout data: {exc}") from exc
    return BuildingLayout(name=name, zones=zones, adjacencies=adjacencies)


def load_layout(path: str | Path) -> BuildingLayout:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise IngestionError(f"layout file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise IngestionError(f"layout file {path} is not valid JSON: {exc}") from exc
    return layout_from_dict(data)


def save_layout(layout: BuildingLayout, path: str | Path) -> None:
    Path(path).write_text(json.dumps(layout.to_dict(), indent=2) + "\n")

"""Hourly climate profiles: temperatures, solar irradiance, occupancy, price.

A profile is a plain CSV with a fixed header::

    hour,outdoor_temp_c,ground_temp_c,solar_wm2,occupancy_frac,price_per_kwh

One row per hour. Profiles may cover any whole number of hours; a full year
is 8760 rows. Lookups wrap modulo the profile length, so a short profile can
drive arbitrarily long episodes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import IngestionError, ValidationError

WEATHER_COLUMNS = (
    "hour",
    "outdoor_temp_c",
    "ground_temp_c",
    "solar_wm2",
    "occupancy_frac",
    "price_per_kwh",
)


@dataclass(frozen=True)
class WeatherProfile:
    """Immutable hourly climate series addressed by wrapping hour index."""

    name: str
    outdoor_temp_c: np.ndarray
    ground_temp_c: np.ndarray
    solar_wm2: np.ndarray
    occupancy_frac: np.ndarray
    price_per_kwh: np.ndarray
    # populated in __post_init__
    num_hours: int = field(init=False)

    def __post_init__(self):
        arrays = {}
        for attr in WEATHER_COLUMNS[1:]:
            arr = np.asarray(getattr(self, attr), dtype=float)
            if arr.ndim != 1:
                raise ValidationError(f"{attr} must be a 1-D series")
            arrays[attr] = arr
        lengths = {a.shape[0] for a in arrays.values()}
        if len(lengths) != 1:
            raise ValidationError(
                f"profile '{self.name}': series lengths differ: "
                + ", ".join(f"{k}={v.shape[0]}" for k, v in arrays.items())
            )
        n = lengths.pop()
        if n == 0:
            raise ValidationError(f"profile '{self.name}' is empty")
        for attr, arr in arrays.items():
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"profile '{self.name}': {attr} has non-finite values")
        if np.any(arrays["solar_wm2"] < 0):
            raise ValidationError(f"profile '{self.name}': solar_wm2 must be >= 0")
        if np.any(arrays["price_per_kwh"] < 0):
            raise ValidationError(f"profile '{self.name}': price_per_kwh must be >= 0")
        occ = arrays["occupancy_frac"]
        if np.any(occ < 0) or np.any(occ > 1):
            raise ValidationError(
                f"profile '{self.name}': occupancy_frac must lie in [0, 1]"
            )
        for attr, arr in arrays.items():
            arr.setflags(write=False)
            object.__setattr__(self, attr, arr)
        object.__setattr__(self, "num_hours", n)

    @property
    def timestep_s(self) -> float:
        # the CSV format is hourly by definition
        return 3600.0

    def at(self, hour: int) -> dict[str, float]:
        """Climate snapshot for an absolute hour index (wraps around)."""
        i = int(hour) % self.num_hours
        return {
            "outdoor_temp_c": float(self.outdoor_temp_c[i]),
            "ground_temp_c": float(self.ground_temp_c[i]),
            "solar_wm2": float(self.solar_wm2[i]),
            "occupancy_frac": float(self.occupancy_frac[i]),
            "price_per_kwh": float(self.price_per_kwh[i]),
        }


def load_weather_csv(path: str | Path, name: str | None = None) -> WeatherProfile:
    path = Path(path)
    if name is None:
        name = path.stem
    try:
        handle = path.open(newline="")
    except FileNotFoundError:
        raise IngestionError(f"weather file not found: {path}") from None
    columns: dict[str, list[float]] = {c: [] for c in WEATHER_COLUMNS[1:]}
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"weather file {path} is empty") from None
        if tuple(h.strip() for h in header) != WEATHER_COLUMNS:
            raise IngestionError(
                f"weather file {path} has header {header!r}, "
                f"expected {list(WEATHER_COLUMNS)}"
            )
        for row_num, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(WEATHER_COLUMNS):
                raise IngestionError(
                    f"{path}:{row_num}: expected {len(WEATHER_COLUMNS)} fields, "
                    f"got {len(row)}"
                )
            for col, text in zip(WEATHER_COLUMNS[1:], row[1:]):
                try:
                    columns[col].append(float(text))
                except ValueError:
                    raise IngestionError(
                        f"{path}:{row_num}: field '{col}' is not a number: {text!r}"
                    ) from None
    try:
        return WeatherProfile(name=name, **columns)
    except ValidationError as exc:
        raise IngestionError(f"weather file {path}: {exc}") from exc


def write_weather_csv(profile: WeatherProfile, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(WEATHER_COLUMNS)
        for i in range(profile.num_hours):
            writer.writerow(
                [
                    i,
                    repr(float(profile.outdoor_temp_c[i])),
                    repr(float(profile.ground_temp_c[i])),
                    repr(float(profile.solar_wm2[i])),
                    repr(float(profile.occupancy_frac[i])),
                    repr(float(profile.price_per_kwh[i])),
                ]
            )

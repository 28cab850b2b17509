"""Regenerate the synthetic climate CSVs shipped under thermorl/assets.

Each profile is one synthetic year (8760 hours) built from seasonal and
diurnal harmonics plus seeded noise, rounded to 3 decimals so the CSVs
round-trip exactly. Deterministic: rerunning reproduces identical files.

Usage: python tools/make_weather_assets.py
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from thermorl.weather import WeatherProfile, write_weather_csv  # noqa: E402

HOURS = 8760

# name -> (seed, mean temp, annual amp, diurnal amp, solar peak W/m2,
#          ground mean, ground amp, cloud floor)
CLIMATES = {
    "Warm_Marine": (11, 14.0, 6.0, 4.0, 550.0, 13.0, 4.0, 0.55),
    "Mixed_Marine": (12, 11.0, 8.0, 5.0, 500.0, 11.0, 5.0, 0.50),
    "Cool_Marine": (13, 8.0, 9.0, 5.0, 450.0, 9.0, 5.5, 0.45),
    "Warm_Humid": (14, 19.0, 7.0, 5.0, 600.0, 18.0, 4.5, 0.50),
    "Warm_Dry": (15, 17.0, 10.0, 9.0, 700.0, 16.0, 6.0, 0.80),
    "Hot_Humid": (16, 24.0, 5.0, 5.0, 650.0, 23.0, 3.0, 0.50),
}


def _ar1_noise(rng: np.random.Generator, n: int, rho: float, sigma: float) -> np.ndarray:
    eps = rng.normal(0.0, sigma, size=n)
    out = np.empty(n)
    out[0] = eps[0]
    for t in range(1, n):
        out[t] = rho * out[t - 1] + eps[t]
    return out


def build_profile(name: str) -> WeatherProfile:
    seed, mean_t, annual, diurnal, solar_peak, g_mean, g_amp, cloud_floor = CLIMATES[
        name
    ]
    rng = np.random.default_rng(seed)
    hours = np.arange(HOURS)
    day = hours / 24.0
    hour_of_day = hours % 24

    season = -np.cos(2.0 * np.pi * (day - 15.0) / 365.0)
    daily = -np.cos(2.0 * np.pi * (hour_of_day - 15.0) / 24.0)
    outdoor = (
        mean_t
        + annual * season
        + diurnal * 0.5 * daily
        + _ar1_noise(rng, HOURS, 0.95, 0.30)
    )

    ground = g_mean + g_amp * -np.cos(2.0 * np.pi * (day - 45.0) / 365.0)

    sun_up = np.maximum(0.0, np.sin(np.pi * (hour_of_day - 6.0) / 12.0))
    season_solar = 0.75 + 0.25 * season
    cloud_by_day = rng.uniform(cloud_floor, 1.0, size=HOURS // 24 + 1)
    cloud = cloud_by_day[(hours // 24)]
    solar = solar_peak * sun_up * season_solar * cloud

    weekday = (hours // 24) % 7 < 5
    occ = np.full(HOURS, 0.05)
    work = (hour_of_day >= 8) & (hour_of_day < 18)
    evening = (hour_of_day >= 18) & (hour_of_day < 22)
    occ[weekday & work] = 0.9
    occ[weekday & evening] = 0.3
    occ[~weekday & work] = 0.2
    occ = np.clip(occ + rng.uniform(-0.03, 0.03, size=HOURS), 0.0, 1.0)

    price = np.full(HOURS, 0.12)
    shoulder = ((hour_of_day >= 7) & (hour_of_day < 17)) | (
        (hour_of_day >= 20) & (hour_of_day < 22)
    )
    peak = (hour_of_day >= 17) & (hour_of_day < 20)
    price[shoulder] = 0.20
    price[weekday & peak] = 0.35
    price = price * (1.0 + 0.1 * season)

    return WeatherProfile(
        name=name,
        outdoor_temp_c=np.round(outdoor, 3),
        ground_temp_c=np.round(ground, 3),
        solar_wm2=np.round(solar, 3),
        occupancy_frac=np.round(occ, 3),
        price_per_kwh=np.round(price, 3),
    )


def main() -> int:
    out_dir = Path(__file__).resolve().parents[1] / "src/thermorl/assets/weather"
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in CLIMATES:
        profile = build_profile(name)
        path = out_dir / f"{name}.csv"
        write_weather_csv(profile, path)
        print(f"wrote {path} ({profile.num_hours} hours)")
    return 0


if __name__ == "__main__":
    sys.exit(main())

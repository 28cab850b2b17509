import numpy as np
import pytest

import thermorl as trl

_acceptance_results = []


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(name): named end-to-end acceptance criterion"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        name = marker.args[0] if marker.args else item.name
        _acceptance_results.append((name, report.passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, passed in _acceptance_results:
        terminalreporter.write_line(
            f"[ACCEPTANCE] {name}: {'PASS' if passed else 'FAIL'}"
        )


@pytest.fixture(scope="session")
def library():
    return trl.default_library()


@pytest.fixture(scope="session")
def base_context():
    return trl.ContextSpec(
        u_wall=trl.sample_uwall(7), climate_id="Warm_Marine", layout_id="toy2"
    )


@pytest.fixture()
def flat_library():
    """Library with a constant-weather profile pinned at the setpoint."""
    lib = trl.AssetLibrary(None)
    hours = 48
    lib.register_weather(
        trl.WeatherProfile(
            name="Flat_22",
            outdoor_temp_c=np.full(hours, 22.0),
            ground_temp_c=np.full(hours, 22.0),
            solar_wm2=np.zeros(hours),
            occupancy_frac=np.zeros(hours),
            price_per_kwh=np.full(hours, 0.2),
        )
    )
    lib.register_layout(trl.default_library().layout("toy2"))
    return lib


@pytest.fixture()
def flat_context():
    return trl.ContextSpec(
        u_wall=trl.UWallVector.nominal(), climate_id="Flat_22", layout_id="toy2"
    )

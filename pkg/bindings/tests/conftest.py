import json

import pytest

from thermorl import UWallVector

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
def asset_files(tmp_path_factory):
    """One env-config file (100-step horizon) and one context file."""
    root = tmp_path_factory.mktemp("bindings_assets")
    config_path = root / "env_config.json"
    config_path.write_text(json.dumps({"horizon": 100}))
    context_path = root / "context.json"
    context_path.write_text(json.dumps({
        "u_wall": UWallVector.nominal().to_dict(),
        "climate_id": "Warm_Marine",
        "layout_id": "toy2",
    }))
    return config_path, context_path

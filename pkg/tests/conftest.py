from pathlib import Path

import pytest

from unitary_borcherds.pipeline import Instance, JobConfig, bundled_config_paths

CONFIGS = {p.stem: p for p in bundled_config_paths()}


@pytest.fixture(scope="session")
def instances():
    """The bundled corpus, computed once per test session."""
    return {name: Instance(JobConfig.load(path)) for name, path in CONFIGS.items()}


@pytest.fixture(scope="session")
def d3n3(instances):
    return instances["d3_n3"]


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, when the acceptance suite ran."""
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for key in sorted(lines):
            terminalreporter.write_line(lines[key])

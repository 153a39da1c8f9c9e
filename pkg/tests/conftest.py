import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rischannel.scenario import FreqGrid, uniform_scenario  # noqa: E402


def random_scenario(seed, n_tx=2, n_rx=2, n_ris=6, n_env=40, n_dynamic=0, f=2.45):
    """Seeded scenario with a box that keeps dipole density roughly constant."""
    n = n_tx + n_rx + n_ris + n_env
    side = max(1.0, 0.22 * np.sqrt(n))
    return uniform_scenario(
        n_tx, n_rx, n_ris, n_env,
        n_dynamic=n_dynamic,
        seed=seed,
        box=((0.0, side), (0.0, side)),
        min_sep=0.03,
        freq_grid=FreqGrid(f, f, 1),
    )


@pytest.fixture
def small_scenario():
    return random_scenario(11, n_tx=2, n_rx=2, n_ris=6, n_env=30, n_dynamic=2)


class AcceptanceRecorder:
    def __init__(self, sink):
        self.sink = sink

    def check(self, name, passed, detail=""):
        self.sink.append((name, bool(passed), detail))
        assert passed, f"{name}: {detail}"


def pytest_configure(config):
    config._acceptance_results = []


@pytest.fixture
def acceptance(request):
    return AcceptanceRecorder(request.config._acceptance_results)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_acceptance_results", [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in results:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")

import numpy as np
import pytest

from lvattn.dynamics import State, SystemParams, simulate
from lvattn.observation import add_noise, make_windows


@pytest.fixture(scope="session")
def params():
    return SystemParams()


@pytest.fixture(scope="session")
def default_traj(params):
    return simulate(params, State(40.0, 9.0), 0.01, 5000)


@pytest.fixture(scope="session")
def default_noisy(default_traj):
    return add_noise(default_traj, 2.0, 42)


@pytest.fixture(scope="session")
def default_dataset(default_noisy):
    return make_windows(default_noisy, 17, 1)


@pytest.fixture(scope="session")
def small_dataset(default_traj):
    """A few hundred short windows, cheap enough for finite-difference checks."""
    noisy = add_noise(default_traj, 2.0, 3)
    ds = make_windows(noisy, 9, 13)
    return ds


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line; call ``record(ok, detail)`` before asserting."""
    name = request.node.name

    def record(ok: bool, detail: str) -> None:
        _CRITERIA[name] = (bool(ok), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        ok, detail = _CRITERIA[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")

from pathlib import Path

import numpy as np
import pytest

import traitspace

DESK = Path(traitspace.__file__).parent / "fixtures" / "desk"


@pytest.fixture(scope="session")
def desk_dir() -> Path:
    return DESK


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(12345))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Surface the per-criterion verdicts collected by the acceptance suite."""
    import helpers

    if helpers.ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in helpers.ACCEPTANCE_VERDICTS:
            terminalreporter.line(line)

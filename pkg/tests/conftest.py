import pytest

from photonic_rc.config import ExperimentConfig
from photonic_rc.encoder import EncoderGeometry
from photonic_rc.harness import build_computer


@pytest.fixture(scope="session")
def geometry():
    return EncoderGeometry()


@pytest.fixture(scope="session")
def default_config():
    return ExperimentConfig()


@pytest.fixture(scope="session")
def computer(default_config):
    """Default 131-node realization, steady states cached across tests."""
    return build_computer(default_config)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import pytest

from keygest.config import PipelineConfig
from keygest.synthetic import generate_synthetic


@pytest.fixture(scope="session")
def small_dataset():
    return generate_synthetic(classes=3, per_class=8, frames=16, size=48, seed=3)


@pytest.fixture(scope="session")
def small_config():
    return PipelineConfig(dictionary_size=8, splits=3, svm_epochs=60)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

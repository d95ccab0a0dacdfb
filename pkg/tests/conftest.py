import numpy as np
import pytest

from app.service import harness_service


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(autouse=True)
def default_thresholds():
    harness_service.configure()
    yield
    harness_service.configure()

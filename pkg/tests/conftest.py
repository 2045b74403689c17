import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dickeprep.circuit import CircuitParams
from dickeprep.spin import CssAngles

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")


def random_params(rng: np.random.Generator, p_layers: int) -> CircuitParams:
    x = rng.uniform(0.0, 2 * np.pi, 3 * p_layers + 2)
    return CircuitParams.from_vector(x)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

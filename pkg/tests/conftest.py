import math

import numpy as np
import pytest
from pytest import Parser

from nuqs.oscillation.functional import Baseline, OscParams


def pytest_addoption(parser: Parser):
    """A hook to add custom command line options to pytest

    Args:
        parser (:class:`pytest.Parser`):
    """
    parser.addoption(
        "--draws",
        action="store",
        default="1000",
        help="number of random draws used by the property suites",
    )


@pytest.fixture
def draws(request) -> int:
    return int(request.config.getoption("--draws"))


@pytest.fixture
def params() -> OscParams:
    return OscParams.defaults()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240517)


@pytest.fixture
def random_params():
    """Factory of random mixing parameters and baselines, both mass orderings"""

    def _draw(rng: np.random.Generator):
        params = OscParams(
            theta12=rng.uniform(0.0, math.pi / 2),
            theta13=rng.uniform(0.0, math.pi / 2),
            theta23=rng.uniform(0.0, math.pi / 2),
            delta=rng.uniform(-math.pi, math.pi),
            dm2_21=rng.uniform(1e-5, 1e-4),
            dm2_31=rng.uniform(1e-3, 3e-3) * rng.choice([-1.0, 1.0]),
        )
        baseline = Baseline(L=rng.uniform(0.0, 3000.0), E=rng.uniform(0.1, 10.0))
        return params, baseline

    return _draw

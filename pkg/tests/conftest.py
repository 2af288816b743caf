import numpy as np
import pytest

from afmi import ModelParams

BASE = dict(alpha=0.1, beta=0.319, delta=0.3, eps=0.322, k=15.0)
ALT = dict(alpha=0.32, beta=0.6, delta=0.45, eps=0.15, k=15.0)


@pytest.fixture
def p22() -> ModelParams:
    return ModelParams(xi=2.2, **BASE)


@pytest.fixture
def base():
    return BASE


@pytest.fixture
def alt():
    return ALT


def params(xi: float, overrides=None) -> ModelParams:
    values = dict(BASE)
    if overrides:
        values.update(overrides)
    return ModelParams(xi=xi, **values)


def rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)

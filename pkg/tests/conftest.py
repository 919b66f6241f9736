import pytest

from bufferhawkes import ModelParams


@pytest.fixture(scope="session")
def desk() -> ModelParams:
    """Desk-scale parameter set: nu = 1/4, q- = 1, q+ = 3, sigma^2 = 64/27."""
    return ModelParams(lambda0=2.0, a=1.0, b=2.0, c=1.0, d=1.0)


@pytest.fixture(scope="session")
def no_feedback() -> ModelParams:
    """a = 0: the book is a plain M/M/infinity queue, many closed forms simplify."""
    return ModelParams(lambda0=2.0, a=0.0, b=2.0, c=1.0, d=1.0)

import pytest

from halfeig.shooting import warmup


@pytest.fixture(scope="session", autouse=True)
def jit_warm():
    # compile (or load from disk cache) the integrator kernels once, so
    # individual tests time only the numerics
    warmup()

import pytest

from oqwalk import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile the jit kernels up front so timed tests measure math, not numba
    _kernels.warmup()

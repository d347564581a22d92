import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def space2():
    from hardymod import Space
    return Space(n=2, d=1, N=4)


@pytest.fixture
def space1():
    from hardymod import Space
    return Space(n=1, d=1, N=8)

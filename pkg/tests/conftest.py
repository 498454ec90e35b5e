import pytest
from hypothesis import HealthCheck, settings

from tubeweave.demo import demo_layout, run_demo

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def layout():
    return demo_layout()


@pytest.fixture(scope="session")
def demo_run(layout):
    return run_demo(layout)

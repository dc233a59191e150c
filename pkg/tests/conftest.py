import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE = []


def record(name: str, ok: bool, detail: str = ""):
    """Store one acceptance line; printed in the terminal summary."""
    ACCEPTANCE.append((name, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def surface():
    from lorentz_geom.schottky import pants
    return pants((2.0, 3.0, 2.5))


@pytest.fixture(scope="session")
def atlas(surface):
    from lorentz_geom.strips import StripAtlas, SurfaceModel
    return StripAtlas(SurfaceModel(surface))


@pytest.fixture(scope="session")
def instance():
    from lorentz_geom.contraction.instance import build_strip_instance
    return build_strip_instance()

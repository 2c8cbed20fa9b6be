import math

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from tenstab import GeometricModel, MechanismGeometry, TiltConfig

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


angles = st.floats(-math.pi, math.pi, allow_nan=False)
tilts = st.builds(TiltConfig, angles, angles)


@st.composite
def geometries(draw, symmetric=False, zero_free_length=False):
    """Random valid geometries; ``symmetric`` gives equally spaced, aligned placements."""
    if symmetric:
        phase = draw(st.floats(0, 2 * math.pi))
        base = plat = tuple(phase + i * 2 * math.pi / 3 for i in range(3))
    else:
        b0, p0 = draw(st.floats(0, 2 * math.pi)), draw(st.floats(0, 2 * math.pi))
        gap_b, gap_p = draw(st.floats(0.3, 2.5)), draw(st.floats(0.3, 2.5))
        base = tuple(b0 + i * gap_b for i in range(3))
        plat = tuple(p0 + i * gap_p for i in range(3))
    return MechanismGeometry(
        r_f=draw(st.floats(2, 25)),
        base_angles=base,
        platform_angles=plat,
        platform_offset=draw(st.floats(0.5, 30)),
        base_offset=draw(st.floats(0.5, 30)),
        h=draw(st.floats(0, 1.5)),
        cg_lever=draw(st.floats(0, 10)),
        w=draw(st.floats(0, 10)),
        l_o=0.0 if zero_free_length else draw(st.floats(0, 5)),
    )


def random_geometric_model(rng: np.random.Generator) -> GeometricModel:
    geom = MechanismGeometry(
        r_f=rng.uniform(2, 25),
        base_angles=rng.uniform(0, 2 * math.pi) + np.arange(3) * rng.uniform(1.5, 2.5),
        platform_angles=rng.uniform(0, 2 * math.pi) + np.arange(3) * rng.uniform(1.5, 2.5),
        platform_offset=rng.uniform(0.5, 30),
        base_offset=rng.uniform(0.5, 30),
        h=rng.uniform(0, 1.5),
        cg_lever=rng.uniform(0, 10),
        w=rng.uniform(0, 10),
        l_o=rng.choice([0.0, rng.uniform(0, 5)]),
    )
    return GeometricModel(geom, rng.uniform(0.1, 100))


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)

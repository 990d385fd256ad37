import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from dstori.moebius import MoebiusMap, ProjectivePoint

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

THETAS = (0.25, 0.5, 1.0, 2.0)


@st.composite
def points(draw, lo=-50.0, hi=50.0):
    """Finite points and, now and then, infinity."""
    if draw(st.integers(0, 15)) == 0:
        return ProjectivePoint(1.0, 0.0)
    return ProjectivePoint.from_real(draw(st.floats(lo, hi, allow_nan=False)))


@st.composite
def angles(draw):
    """Points drawn uniformly in angle, so none of them is special."""
    u = draw(st.floats(0.0, math.pi, exclude_max=True))
    return ProjectivePoint(math.cos(u), math.sin(u))


@st.composite
def moebius_maps(draw, scale=3.0):
    """Well-conditioned elements of PSL(2, R)."""
    a, b, c = (draw(st.floats(-scale, scale)) for _ in range(3))
    d = draw(st.floats(-scale, scale))
    det = a * d - b * c
    if abs(det) < 0.1:
        a, d = a + 1.0 + abs(det), d + 1.0 + abs(det)
        det = a * d - b * c
        if abs(det) < 0.1:
            a, b, c, d = 1.0, draw(st.floats(-scale, scale)), 0.0, 1.0
            det = 1.0
    if det < 0:
        b, d = -b, -d
        det = -det
    r = math.sqrt(det)
    return MoebiusMap(a / r, b / r, c / r, d / r)


def well_separated(pts, tol=1e-3):
    """Pairwise angular separation on RP^1."""
    from dstori.moebius import angle_coordinate

    u = sorted(angle_coordinate(p) for p in pts)
    gaps = np.diff(u + [u[0] + 1.0])
    return bool(np.all(gaps > tol))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hatsiegel.group import compose_sl2_pair, random_sl2_pair
from hatsiegel.halfspace import HatPoint

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def hat_points(draw, max_im=4.0, max_re=3.0, margin=0.05):
    y = draw(st.floats(0.2, max_im))
    v = draw(st.floats(-(1 - margin), 1 - margin)) * y
    x = draw(st.floats(-max_re, max_re))
    u = draw(st.floats(-max_re, max_re))
    return HatPoint.from_real(x, y, u, v)


@st.composite
def g_hat_plus(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    return compose_sl2_pair(random_sl2_pair(np.random.default_rng(seed)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

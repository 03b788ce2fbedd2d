import hypothesis
import numpy as np
import pytest

from mhd1d.core import SimState

hypothesis.settings.register_profile(
    "suite", deadline=None, max_examples=50, derandomize=True
)
hypothesis.settings.load_profile("suite")


def build_state(n, v=None, theta=None, u=None, w=None, b=None, t=0.0):
    """State with equilibrium defaults; node fields get pinned endpoints."""
    state = SimState(
        t=t,
        v=np.ones(n) if v is None else np.asarray(v, dtype=float),
        theta=np.ones(n) if theta is None else np.asarray(theta, dtype=float),
        u=np.zeros(n + 1) if u is None else np.asarray(u, dtype=float),
        w=np.zeros((n + 1, 2)) if w is None else np.asarray(w, dtype=float),
        b=np.zeros((n + 1, 2)) if b is None else np.asarray(b, dtype=float),
    )
    for arr in (state.u, state.w, state.b):
        arr[0] = 0.0
        arr[-1] = 0.0
    return state


def random_state(rng, n=32, amp=0.3):
    """Random valid state: positive cell fields, zero node boundaries."""
    xn = np.linspace(0.0, 1.0, n + 1)
    shape = np.sin(np.pi * xn)
    return build_state(
        n,
        v=1.0 + amp * rng.uniform(-1.0, 1.0, n),
        theta=1.0 + amp * rng.uniform(-1.0, 1.0, n),
        u=rng.uniform(-amp, amp) * shape,
        w=np.stack([rng.uniform(-amp, amp) * shape, rng.uniform(-amp, amp) * shape], axis=1),
        b=np.stack([rng.uniform(-amp, amp) * shape, rng.uniform(-amp, amp) * shape], axis=1),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240814)

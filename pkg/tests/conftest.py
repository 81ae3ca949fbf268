import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20050101)


def random_single_mode_cov(rng, max_r=1.5, max_tau=5.0):
    """Random physical single-mode covariance: rotated squeezed thermal."""
    r = rng.uniform(-max_r, max_r)
    tau = rng.uniform(1.0, max_tau)
    th = rng.uniform(0, np.pi)
    c, s = np.cos(th), np.sin(th)
    R = np.array([[c, -s], [s, c]])
    return R @ np.diag([np.exp(-2 * r) * tau / 4, np.exp(2 * r) * tau / 4]) @ R.T


def random_physical_cov(rng, n_modes):
    """Random mixed n-mode covariance: thermal diagonal pushed through a random symplectic."""
    from cvtele.gaussian import make_symplectic

    cov = np.diag(np.repeat(rng.uniform(1.0, 3.0, n_modes), 2)) / 4
    S = np.eye(2 * n_modes)
    for _ in range(3 * n_modes):
        kind = rng.choice(["beamsplitter", "rotation", "squeezer"])
        if kind == "beamsplitter" and n_modes >= 2:
            a, b = rng.choice(n_modes, 2, replace=False)
            M = make_symplectic("beamsplitter", (a, b), n_modes, transmittance=rng.uniform()).matrix
        elif kind == "squeezer":
            M = make_symplectic("squeezer", (rng.integers(n_modes),), n_modes, r=rng.uniform(-1, 1)).matrix
        else:
            M = make_symplectic("rotation", (rng.integers(n_modes),), n_modes, theta=rng.uniform(0, 6.3)).matrix
        S = M @ S
    return S @ cov @ S.T

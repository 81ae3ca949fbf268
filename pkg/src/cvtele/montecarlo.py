"""Shot-level phase-space simulation of the teleportation protocol.

Every state in the protocol is Gaussian and every measurement is homodyne,
so the Wigner function is a genuine probability density and its marginals
are the homodyne statistics. Drawing phase-space points and pushing them
through the linear optics therefore samples the true joint distribution of
Alice's outcomes and Bob's output quadratures.

Random streams: shots are grouped in fixed blocks of :data:`BLOCK_SIZE`.
Block ``k`` draws from ``PCG64(SeedSequence(seed, spawn_key=(k,)))``, so shot
``i`` is a pure function of ``(seed, i)`` and results do not depend on the
number of worker threads or on execution order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import InvalidArgument
from .gaussian import GaussianState, QuadPair, make_symplectic, product_state, loss_channel
from .teleport import SQRT2, TeleportConfig, epr_resource

BLOCK_SIZE = 8192


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _sqrt_cov(cov: np.ndarray) -> np.ndarray:
    # eigh tolerates the near-singular covariances of strongly squeezed states
    w, u = np.linalg.eigh(cov)
    return u * np.sqrt(np.clip(w, 0.0, None))


def _draw(mean: np.ndarray, root: np.ndarray, n: int, seed: int, workers: int | None) -> np.ndarray:
    dim = mean.shape[0]
    n_blocks = -(-n // BLOCK_SIZE)

    def block(k: int) -> np.ndarray:
        m = min(BLOCK_SIZE, n - k * BLOCK_SIZE)
        z = _block_rng(seed, k).standard_normal((m, dim))
        return z @ root.T + mean

    if workers and workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(block, range(n_blocks)))
    else:
        parts = [block(k) for k in range(n_blocks)]
    return np.concatenate(parts, axis=0)


def sample_state(
    state: GaussianState, n: int, seed: int, *, workers: int | None = None
) -> np.ndarray:
    """Draw ``n`` phase-space points from the Wigner function of ``state``.

    Returns an ``(n, 2 * n_modes)`` array in interleaved quadrature order.
    """
    if n < 1:
        raise InvalidArgument(f"shot count must be positive, got {n}")
    state.require_physical()
    return _draw(state.mean, _sqrt_cov(state.cov), n, seed, workers)


@dataclass(frozen=True)
class ShotRecord:
    alice_x: float
    alice_p: float
    bob_x: float
    bob_p: float


@dataclass(frozen=True, eq=False)
class ShotRecords(Sequence[ShotRecord]):
    """Column storage for many shots; indexing yields :class:`ShotRecord`."""

    alice_x: np.ndarray
    alice_p: np.ndarray
    bob_x: np.ndarray
    bob_p: np.ndarray

    def __post_init__(self):
        for name in ("alice_x", "alice_p", "bob_x", "bob_p"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_records(cls, records: Sequence[ShotRecord]) -> "ShotRecords":
        if isinstance(records, ShotRecords):
            return records
        cols = np.array([(r.alice_x, r.alice_p, r.bob_x, r.bob_p) for r in records], dtype=float)
        cols = cols.reshape(-1, 4)
        return cls(cols[:, 0], cols[:, 1], cols[:, 2], cols[:, 3])

    def __len__(self) -> int:
        return self.bob_x.shape[0]

    def __getitem__(self, i):
        if isinstance(i, slice):
            return ShotRecords(self.alice_x[i], self.alice_p[i], self.bob_x[i], self.bob_p[i])
        return ShotRecord(
            float(self.alice_x[i]), float(self.alice_p[i]), float(self.bob_x[i]), float(self.bob_p[i])
        )

    def __iter__(self) -> Iterator[ShotRecord]:
        for i in range(len(self)):
            yield self[i]

    def select(self, mask: np.ndarray) -> "ShotRecords":
        return ShotRecords(self.alice_x[mask], self.alice_p[mask], self.bob_x[mask], self.bob_p[mask])

    def as_array(self) -> np.ndarray:
        return np.column_stack([self.alice_x, self.alice_p, self.bob_x, self.bob_p])


def run_shots(
    input_state: GaussianState,
    config: TeleportConfig,
    n: int,
    seed: int,
    *,
    workers: int | None = None,
) -> ShotRecords:
    """Simulate ``n`` teleportation shots with explicit feedforward.

    Per shot: sample input and resource jointly, mix the input with Alice's
    EPR half on a 50/50 beamsplitter, read Ax (x of the difference port) and
    Ap (p of the sum port), and displace Bob's half by
    ``(g_x sqrt2 Ax, g_p sqrt2 Ap)``.
    """
    if input_state.n_modes != 1:
        raise InvalidArgument(f"input must be a single mode, got {input_state.n_modes}")
    if config.input_efficiency < 1.0:
        input_state = loss_channel(input_state, 0, config.input_efficiency)
    joint = product_state(input_state, epr_resource(config))
    pts = sample_state(joint, n, seed, workers=workers)
    bs = make_symplectic("beamsplitter", (0, 1), n_modes=3, transmittance=0.5).matrix
    pts = pts @ bs.T
    alice_p = pts[:, 1]  # sum port
    alice_x = pts[:, 2]  # difference port
    bob_x = pts[:, 4] + config.g_x * SQRT2 * alice_x
    bob_p = pts[:, 5] + config.g_p * SQRT2 * alice_p
    return ShotRecords(alice_x, alice_p, bob_x, bob_p)


def estimate_variances(records: Sequence[ShotRecord]) -> tuple[QuadPair, tuple[float, float]]:
    """Unbiased variances of Bob's quadratures and their standard errors.

    The standard error of a Gaussian sample variance is ``s^2 sqrt(2/(n-1))``.
    """
    recs = ShotRecords.from_records(records)
    n = len(recs)
    if n < 2:
        raise InvalidArgument(f"need at least two records, got {n}")
    vx = float(np.var(recs.bob_x, ddof=1))
    vp = float(np.var(recs.bob_p, ddof=1))
    k = math.sqrt(2.0 / (n - 1))
    return QuadPair(vx, vp), (vx * k, vp * k)


def estimate_gain(records: Sequence[ShotRecord], alpha0: complex) -> tuple[float, float]:
    """Gains ``<x_out>/<x_in>`` and ``<p_out>/<p_in>`` from a displaced-input run.

    Meaningful when ``|alpha0|`` is large compared with the output noise
    (the strong-field calibration regime). Both quadratures of ``alpha0``
    must be non-zero.
    """
    alpha0 = complex(alpha0)
    if alpha0.real == 0 or alpha0.imag == 0:
        raise InvalidArgument(f"both quadratures of alpha0 must be non-zero, got {alpha0}")
    recs = ShotRecords.from_records(records)
    if len(recs) == 0:
        raise InvalidArgument("no records")
    return float(np.mean(recs.bob_x) / alpha0.real), float(np.mean(recs.bob_p) / alpha0.imag)

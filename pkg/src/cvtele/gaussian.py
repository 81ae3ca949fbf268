"""Gaussian states of optical modes and the operations acting on them.

Conventions used throughout the package:

* ``hbar = 1/2``: ``[x, p] = i/2`` and the vacuum quadrature variance is 1/4.
* Quadratures are interleaved, ``(x_1, p_1, ..., x_n, p_n)``.
* Decibels are always relative to the vacuum variance,
  ``dB = 10 log10(sigma / 0.25)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import (
    InconsistentMeasurement,
    InvalidArgument,
    UnphysicalState,
    UnphysicalParameter,
    UnsupportedOperation,
)

VACUUM_VARIANCE = 0.25
PHYSICAL_TOL = 1e-9
SYMMETRY_RTOL = 1e-12

Quadrature = Literal["x", "p"]


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


def omega(n_modes: int) -> np.ndarray:
    """Symplectic form for interleaved ordering: one ``[[0, 1], [-1, 0]]`` block per mode."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Return the symplectic spectrum of ``cov`` in ascending order (one value per mode)."""
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    ev = np.abs(np.linalg.eigvals(1j * omega(n) @ cov))
    # eigenvalues come in +/- pairs
    return np.sort(ev)[::2]


@dataclass(frozen=True)
class QuadPair:
    """Variances of the x and p quadratures of a single mode."""

    sigma_x: float
    sigma_p: float

    def __post_init__(self):
        for name in ("sigma_x", "sigma_p"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise InvalidArgument(f"{name} must be a finite non-negative variance, got {value}")
            object.__setattr__(self, name, float(value))

    @classmethod
    def from_db(cls, x_db: float, p_db: float) -> "QuadPair":
        return cls(from_db(x_db), from_db(p_db))

    @property
    def x_db(self) -> float:
        return to_db(self.sigma_x)

    @property
    def p_db(self) -> float:
        return to_db(self.sigma_p)

    @property
    def product(self) -> float:
        return self.sigma_x * self.sigma_p

    def is_physical(self, tol: float = PHYSICAL_TOL) -> bool:
        return self.product >= VACUUM_VARIANCE**2 - tol

    def to_state(self) -> "GaussianState":
        """Zero-mean single-mode state with this diagonal covariance."""
        return GaussianState(np.zeros(2), np.diag([self.sigma_x, self.sigma_p]))


@dataclass(frozen=True, eq=False)
class GaussianState:
    """First and second moments of an ``n``-mode Gaussian state.

    Arrays are copied on construction and made read-only, so a state can be
    shared freely between threads.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = _frozen(self.mean).reshape(-1)
        cov = _frozen(self.cov)
        dim = mean.shape[0]
        if dim == 0 or dim % 2:
            raise InvalidArgument(f"mean must have even positive length, got {dim}")
        if cov.shape != (dim, dim):
            raise InvalidArgument(f"cov must be {dim}x{dim}, got {cov.shape}")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise InvalidArgument("moments must be finite")
        scale = max(np.max(np.abs(cov)), 1.0)
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_RTOL * scale:
            raise InvalidArgument("cov is not symmetric")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.mean.shape[0] // 2

    def symplectic_eigenvalues(self) -> np.ndarray:
        return symplectic_eigenvalues(self.cov)

    def is_physical(self, tol: float = PHYSICAL_TOL) -> bool:
        return bool(self.symplectic_eigenvalues().min() >= VACUUM_VARIANCE - tol)

    def require_physical(self) -> "GaussianState":
        nu = self.symplectic_eigenvalues().min()
        if nu < VACUUM_VARIANCE - PHYSICAL_TOL:
            raise UnphysicalState(
                f"smallest symplectic eigenvalue {nu:.6g} is below the vacuum level 1/4"
            )
        return self

    def mode_cov(self, mode: int) -> np.ndarray:
        _check_mode(self, mode)
        return self.cov[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2]

    def reduced(self, modes: Sequence[int]) -> "GaussianState":
        """Marginal state of the listed modes, in the given order."""
        for m in modes:
            _check_mode(self, m)
        idx = np.array([[2 * m, 2 * m + 1] for m in modes]).reshape(-1)
        return GaussianState(self.mean[idx], self.cov[np.ix_(idx, idx)])

    def quad_pair(self, mode: int = 0) -> QuadPair:
        c = self.mode_cov(mode)
        return QuadPair(c[0, 0], c[1, 1])

    def allclose(self, other: "GaussianState", atol: float = 1e-12) -> bool:
        return (
            self.n_modes == other.n_modes
            and np.allclose(self.mean, other.mean, rtol=0, atol=atol)
            and np.allclose(self.cov, other.cov, rtol=0, atol=atol)
        )


def _check_mode(state: GaussianState, mode: int) -> None:
    if not (0 <= mode < state.n_modes):
        raise InvalidArgument(f"mode {mode} out of range for {state.n_modes}-mode state")


def product_state(*states: GaussianState) -> GaussianState:
    """Tensor product of independent states, modes concatenated in order."""
    mean = np.concatenate([s.mean for s in states])
    dim = mean.shape[0]
    cov = np.zeros((dim, dim))
    i = 0
    for s in states:
        d = s.mean.shape[0]
        cov[i : i + d, i : i + d] = s.cov
        i += d
    return GaussianState(mean, cov)


def vacuum_state(n: int = 1) -> GaussianState:
    if n < 1:
        raise InvalidArgument(f"number of modes must be positive, got {n}")
    return GaussianState(np.zeros(2 * n), VACUUM_VARIANCE * np.eye(2 * n))


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def squeezed_thermal_state(
    r: float, tau: float = 1.0, theta: float = 0.0, alpha0: complex = 0j
) -> GaussianState:
    """Displaced, rotated squeezed thermal state.

    Along its principal axes the state has variances ``exp(-2r) tau / 4`` and
    ``exp(+2r) tau / 4``, where ``tau = coth(beta/2) >= 1`` is the thermal
    excess (``tau = 1`` is pure). The axes are rotated by ``theta`` and the
    mean is ``(Re alpha0, Im alpha0)``.
    """
    if not tau >= 1.0:
        raise UnphysicalParameter(f"tau = coth(beta/2) must be >= 1, got {tau}")
    d = np.diag([math.exp(-2 * r) * tau, math.exp(2 * r) * tau]) * VACUUM_VARIANCE
    rot = rotation_matrix(theta)
    cov = rot.T @ d @ rot
    cov = 0.5 * (cov + cov.T)
    alpha0 = complex(alpha0)
    return GaussianState(np.array([alpha0.real, alpha0.imag]), cov)


def tau_from_beta(beta: float) -> float:
    """``coth(beta/2)``; ``beta = inf`` maps to the pure boundary 1."""
    if beta <= 0:
        raise InvalidArgument(f"beta must be positive, got {beta}")
    if math.isinf(beta):
        return 1.0
    return 1.0 / math.tanh(beta / 2)


def beta_from_tau(tau: float) -> float:
    if tau < 1:
        raise UnphysicalParameter(f"tau must be >= 1, got {tau}")
    if tau == 1:
        return math.inf
    return math.log((tau + 1) / (tau - 1))


# --- symplectic transforms ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class SymplecticTransform:
    """A real ``2n x 2n`` matrix ``S`` with ``S Omega S^T = Omega``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise InvalidArgument(f"symplectic matrix must be 2n x 2n, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def symplectic_error(self) -> float:
        om = omega(self.n_modes)
        return float(np.max(np.abs(self.matrix @ om @ self.matrix.T - om)))

    def is_symplectic(self, tol: float = 1e-12) -> bool:
        return self.symplectic_error() <= tol

    def __matmul__(self, other: "SymplecticTransform") -> "SymplecticTransform":
        return SymplecticTransform(self.matrix @ other.matrix)


def _single_mode_block(kind: str, params: dict) -> np.ndarray:
    if kind == "rotation":
        return rotation_matrix(params.get("theta", 0.0))
    if kind == "squeezer":
        r = params.get("r", 0.0)
        return np.diag([math.exp(-r), math.exp(r)])
    raise InvalidArgument(f"unknown single-mode transform {kind!r}")


def make_symplectic(
    kind: Literal["beamsplitter", "rotation", "squeezer"],
    modes: Sequence[int],
    n_modes: int | None = None,
    **params: float,
) -> SymplecticTransform:
    """Build a beamsplitter, phase rotation or single-mode squeezer.

    Args:
        kind: ``"beamsplitter"`` (param ``transmittance``, default 0.5),
            ``"rotation"`` (param ``theta``) or ``"squeezer"`` (param ``r``,
            squeezing x by ``exp(-r)``).
        modes: the two modes mixed by a beamsplitter, or the modes a
            single-mode transform is applied to.
        n_modes: total number of modes; defaults to ``max(modes) + 1``.

    The beamsplitter sends ``(a, b)`` to ``(sqrt(T) a + sqrt(1-T) b,
    sqrt(1-T) a - sqrt(T) b)`` in both quadratures, so at ``T = 1/2`` the
    outputs are ``(a + b)/sqrt(2)`` and ``(a - b)/sqrt(2)``.
    """
    modes = [int(m) for m in modes]
    if not modes:
        raise InvalidArgument("at least one mode is required")
    if n_modes is None:
        n_modes = max(modes) + 1
    if len(set(modes)) != len(modes):
        raise InvalidArgument(f"mode indices must be distinct, got {modes}")
    if any(m < 0 or m >= n_modes for m in modes):
        raise InvalidArgument(f"mode indices {modes} out of range for {n_modes} modes")

    S = np.eye(2 * n_modes)
    if kind == "beamsplitter":
        if len(modes) != 2:
            raise InvalidArgument("a beamsplitter acts on exactly two modes")
        T = params.get("transmittance", 0.5)
        if not 0.0 <= T <= 1.0:
            raise InvalidArgument(f"transmittance must lie in [0, 1], got {T}")
        t, s = math.sqrt(T), math.sqrt(1.0 - T)
        a, b = modes
        for q in (0, 1):
            ia, ib = 2 * a + q, 2 * b + q
            S[ia, ia], S[ia, ib] = t, s
            S[ib, ia], S[ib, ib] = s, -t
    else:
        block = _single_mode_block(kind, params)
        for m in modes:
            S[2 * m : 2 * m + 2, 2 * m : 2 * m + 2] = block
    return SymplecticTransform(S)


def apply_symplectic(state: GaussianState, S: SymplecticTransform) -> GaussianState:
    if S.n_modes != state.n_modes:
        raise InvalidArgument(
            f"transform acts on {S.n_modes} modes but the state has {state.n_modes}"
        )
    M = S.matrix
    cov = M @ state.cov @ M.T
    return GaussianState(M @ state.mean, 0.5 * (cov + cov.T))


def displace(state: GaussianState, mode: int, alpha: complex) -> GaussianState:
    _check_mode(state, mode)
    alpha = complex(alpha)
    mean = state.mean.copy()
    mean[2 * mode] += alpha.real
    mean[2 * mode + 1] += alpha.imag
    return GaussianState(mean, state.cov)


def loss_channel(state: GaussianState, mode: int, eta: float) -> GaussianState:
    """Mix ``mode`` with vacuum on a beamsplitter of transmittance ``eta``."""
    _check_mode(state, mode)
    if not 0.0 <= eta <= 1.0:
        raise InvalidArgument(f"eta must lie in [0, 1], got {eta}")
    k = np.ones(state.mean.shape[0])
    k[2 * mode : 2 * mode + 2] = math.sqrt(eta)
    cov = state.cov * np.outer(k, k)
    cov[2 * mode, 2 * mode] += (1 - eta) * VACUUM_VARIANCE
    cov[2 * mode + 1, 2 * mode + 1] += (1 - eta) * VACUUM_VARIANCE
    return GaussianState(state.mean * k, cov)


def attenuate(sigma: float, eta: float) -> float:
    """Variance after a loss of transmittance ``eta`` (scalar form of :func:`loss_channel`)."""
    return eta * sigma + (1 - eta) * VACUUM_VARIANCE


def visibility_correct(sigma_obs: float, visibility: float) -> float:
    """Undo homodyne mode-mismatch loss, taking the efficiency as ``visibility**2``."""
    if not 0.0 < visibility <= 1.0:
        raise InvalidArgument(f"visibility must lie in (0, 1], got {visibility}")
    eta = visibility**2
    sigma = (sigma_obs - (1 - eta) * VACUUM_VARIANCE) / eta
    if sigma <= 0:
        raise InconsistentMeasurement(
            f"observed variance {sigma_obs:.6g} is too small for visibility {visibility}"
        )
    return sigma


def to_db(sigma: float) -> float:
    if not sigma > 0:
        raise InvalidArgument(f"variance must be positive to express in dB, got {sigma}")
    return 10.0 * math.log10(sigma / VACUUM_VARIANCE)


def from_db(db: float) -> float:
    return VACUUM_VARIANCE * 10.0 ** (db / 10.0)


def wigner_value(state: GaussianState, point) -> float | np.ndarray:
    """Wigner function of a single-mode Gaussian state.

    ``point`` is ``(x, p)`` or an array of shape ``(..., 2)``; array input gives
    an array of densities.
    """
    if state.n_modes != 1:
        raise UnsupportedOperation("Wigner evaluation is implemented for single-mode states only")
    d = np.asarray(point, dtype=float) - state.mean
    inv = np.linalg.inv(state.cov)
    quad = np.einsum("...i,ij,...j->...", d, inv, d)
    w = np.exp(-0.5 * quad) / (2 * math.pi * math.sqrt(np.linalg.det(state.cov)))
    return float(w) if w.ndim == 0 else w


def homodyne_condition(
    state: GaussianState, mode: int, quadrature: Quadrature, outcome: float
) -> tuple[GaussianState, float]:
    """Condition on an ideal homodyne measurement of one quadrature.

    Returns the state of the remaining modes (original order) and the
    marginal variance of the measured quadrature. The covariance update uses
    the pseudo-inverse of the measured variance, so a measurement with zero
    variance leaves the other modes untouched.
    """
    if state.n_modes < 2:
        raise InvalidArgument("homodyne conditioning needs at least two modes")
    _check_mode(state, mode)
    if quadrature not in ("x", "p"):
        raise InvalidArgument(f"quadrature must be 'x' or 'p', got {quadrature!r}")
    k = 2 * mode + (0 if quadrature == "x" else 1)
    rest = [i for i in range(state.mean.shape[0]) if i // 2 != mode]
    A = state.cov[np.ix_(rest, rest)]
    B = state.cov[rest, k]
    var = float(state.cov[k, k])
    inv = np.linalg.pinv(np.array([[var]]))[0, 0]
    cov = A - inv * np.outer(B, B)
    mean = state.mean[rest] + inv * B * (outcome - state.mean[k])
    return GaussianState(mean, 0.5 * (cov + cov.T)), var

"""Continuous-variable teleportation of a single mode.

Two independent routes to the output state are provided:

* :func:`teleport_variances_analytic`, the closed-form variance map for
  unity-normalised gains ``g_x``, ``g_p``;
* :func:`teleport_network`, which builds the three-mode state (input plus
  EPR pair), mixes input and Alice's half on a 50/50 beamsplitter and applies
  Bob's feedforward as an affine map on the quadratures.

Beamsplitter convention: ports ``(a, b)`` go to ``((a+b)/sqrt2, (a-b)/sqrt2)``.
The EPR pair is made from a p-squeezed mode (first port) and an x-squeezed
mode (second port), so ``x1 - x2`` and ``p1 + p2`` are the squeezed
combinations. Alice measures x on the difference port and p on the sum port.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .gaussian import (
    VACUUM_VARIANCE,
    GaussianState,
    QuadPair,
    apply_symplectic,
    attenuate,
    loss_channel,
    make_symplectic,
    product_state,
    vacuum_state,
)

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class TeleportConfig:
    """Resource, gains and input loss for one teleportation run.

    ``squeeze_x`` and ``squeeze_p`` optionally override ``exp(-2 r_minus)``
    separately for the x and p legs of the resource, which lets a run mirror
    an asymmetric experimental EPR source. ``epr_enabled=False`` replaces the
    resource by two vacua (classical teleportation).
    """

    r_minus: float = 0.0
    r_plus: float = 0.0
    g_x: float = 1.0
    g_p: float = 1.0
    epr_enabled: bool = True
    input_visibility: float = 1.0
    squeeze_x: float | None = None
    squeeze_p: float | None = None

    def __post_init__(self):
        if self.r_minus < 0 or self.r_plus < 0:
            raise InvalidArgument("r_minus and r_plus must be non-negative")
        if not (math.isfinite(self.g_x) and math.isfinite(self.g_p)):
            raise InvalidArgument("gains must be finite")
        if not 0.0 < self.input_visibility <= 1.0:
            raise InvalidArgument(
                f"input_visibility must lie in (0, 1], got {self.input_visibility}"
            )
        for name in ("squeeze_x", "squeeze_p"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise InvalidArgument(f"{name} must be positive, got {v}")

    @classmethod
    def classical(cls, g_x: float = 1.0, g_p: float = 1.0) -> "TeleportConfig":
        return cls(g_x=g_x, g_p=g_p, epr_enabled=False)

    def resource_factors(self) -> tuple[float, float, float]:
        """``(exp(-2r_-) on x leg, exp(-2r_-) on p leg, exp(+2r_+))`` actually used."""
        if not self.epr_enabled:
            return 1.0, 1.0, 1.0
        base = math.exp(-2 * self.r_minus)
        sx = base if self.squeeze_x is None else self.squeeze_x
        sp = base if self.squeeze_p is None else self.squeeze_p
        return sx, sp, math.exp(2 * self.r_plus)

    @property
    def input_efficiency(self) -> float:
        return self.input_visibility**2


def _squeezer_pair(sq_x: float, sq_p: float, anti: float) -> GaussianState:
    # first port squeezed in p (sets p1 + p2), second port squeezed in x (sets x1 - x2)
    a = np.diag([anti, sq_p]) * VACUUM_VARIANCE
    b = np.diag([sq_x, anti]) * VACUUM_VARIANCE
    return product_state(GaussianState(np.zeros(2), a), GaussianState(np.zeros(2), b))


def _epr_from_factors(sq_x: float, sq_p: float, anti: float) -> GaussianState:
    pair = _squeezer_pair(sq_x, sq_p, anti)
    return apply_symplectic(pair, make_symplectic("beamsplitter", (0, 1), transmittance=0.5))


def make_epr(r_minus: float, r_plus: float) -> GaussianState:
    """Two orthogonally squeezed vacua combined on a 50/50 beamsplitter.

    Each squeezer has variances ``exp(-2 r_minus)/4`` and ``exp(+2 r_plus)/4``;
    ``r_plus > r_minus`` describes an impure squeezer.
    """
    if r_minus < 0 or r_plus < 0:
        raise InvalidArgument("squeezing parameters must be non-negative")
    return _epr_from_factors(math.exp(-2 * r_minus), math.exp(-2 * r_minus), math.exp(2 * r_plus))


def epr_resource(config: TeleportConfig) -> GaussianState:
    """The two-mode resource described by ``config`` (two vacua when EPR is off)."""
    if not config.epr_enabled:
        # two vacua are invariant under the beamsplitter; skip it to stay exact
        return vacuum_state(2)
    return _epr_from_factors(*config.resource_factors())


def duan_sum(state: GaussianState) -> float:
    """``Var(x1 - x2) + Var(p1 + p2)``, normalised so that two vacua give 1."""
    if state.n_modes != 2:
        raise InvalidArgument(f"duan_sum needs a two-mode state, got {state.n_modes}")
    u = np.array([1.0, 0.0, -1.0, 0.0])
    v = np.array([0.0, 1.0, 0.0, 1.0])
    total = u @ state.cov @ u + v @ state.cov @ v
    return float(total / (2 * VACUUM_VARIANCE * 2))


def teleport_variances_analytic(sigma_in: QuadPair, config: TeleportConfig) -> QuadPair:
    """Closed-form output variances.

    ``sigma_out = g^2 sigma_in + exp(-2r_-)(1+g)^2/8 + exp(2r_+)(1-g)^2/8``
    for each quadrature, after any input loss.
    """
    sq_x, sq_p, anti = config.resource_factors()
    eta = config.input_efficiency
    sx = attenuate(sigma_in.sigma_x, eta)
    sp = attenuate(sigma_in.sigma_p, eta)

    def leg(g: float, s: float, sq: float) -> float:
        return g * g * s + sq * (1 + g) ** 2 / 8 + anti * (1 - g) ** 2 / 8

    return QuadPair(leg(config.g_x, sx, sq_x), leg(config.g_p, sp, sq_p))


def alice_bob_state(input_state: GaussianState, config: TeleportConfig) -> GaussianState:
    """Three-mode state after Alice's beamsplitter.

    Mode 0 is the sum port ``(in + 1)/sqrt2`` (p is measured there), mode 1 the
    difference port ``(in - 1)/sqrt2`` (x is measured there), mode 2 is Bob's
    EPR half before feedforward.
    """
    if input_state.n_modes != 1:
        raise InvalidArgument(f"input must be a single mode, got {input_state.n_modes}")
    if config.input_efficiency < 1.0:
        input_state = loss_channel(input_state, 0, config.input_efficiency)
    joint = product_state(input_state, epr_resource(config))
    bs = make_symplectic("beamsplitter", (0, 1), n_modes=3, transmittance=0.5)
    return apply_symplectic(joint, bs)


def feedforward_matrix(config: TeleportConfig) -> np.ndarray:
    """Linear map from the post-beamsplitter quadratures to Bob's output mode.

    ``x_out = x2 + g_x sqrt2 x_diff`` and ``p_out = p2 + g_p sqrt2 p_sum``.
    """
    M = np.zeros((2, 6))
    M[0, 4] = 1.0
    M[0, 2] = config.g_x * SQRT2
    M[1, 5] = 1.0
    M[1, 1] = config.g_p * SQRT2
    return M


def teleport_network(input_state: GaussianState, config: TeleportConfig) -> GaussianState:
    """Unconditional output state of the full teleportation network.

    The optics (EPR beamsplitter, Alice's beamsplitter) and the feedforward
    are composed into one linear map before it is applied to the product of
    the input and the two squeezed sources, so huge antisqueezed variances
    never have to cancel numerically.
    """
    if input_state.n_modes != 1:
        raise InvalidArgument(f"input must be a single mode, got {input_state.n_modes}")
    if config.input_efficiency < 1.0:
        input_state = loss_channel(input_state, 0, config.input_efficiency)
    source = product_state(input_state, _squeezer_pair(*config.resource_factors()))
    optics = make_symplectic("beamsplitter", (0, 1), n_modes=3, transmittance=0.5) @ make_symplectic(
        "beamsplitter", (1, 2), n_modes=3, transmittance=0.5
    )
    L = feedforward_matrix(config) @ optics.matrix
    cov = L @ source.cov @ L.T
    return GaussianState(L @ source.mean, 0.5 * (cov + cov.T))


def check_variance_ordering(vac_out: QuadPair, sq_out: QuadPair) -> tuple[bool, bool]:
    """``(sq x below vacuum x, sq p above vacuum p)`` for outputs at unity gain."""
    return sq_out.sigma_x < vac_out.sigma_x, sq_out.sigma_p > vac_out.sigma_p

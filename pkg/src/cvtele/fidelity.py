"""Fidelities between single-mode Gaussian states and classical-limit sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import InvalidArgument, UnphysicalState, UnsupportedOperation
from .gaussian import (
    PHYSICAL_TOL,
    VACUUM_VARIANCE,
    GaussianState,
    QuadPair,
    beta_from_tau,
)

Method = Literal["vacuum_eq7", "squeezed_thermal_eq8", "general_oracle"]


@dataclass(frozen=True)
class SqueezedThermalParams:
    """Squeezing ``r`` and thermal excess ``tau = coth(beta/2)`` of a squeezed thermal state."""

    r: float
    tau: float

    def __post_init__(self):
        if not self.tau >= 1.0 - PHYSICAL_TOL:
            raise UnphysicalState(f"tau must be >= 1, got {self.tau}")
        # absorb rounding just below the pure boundary
        object.__setattr__(self, "tau", max(float(self.tau), 1.0))
        object.__setattr__(self, "r", float(self.r))

    @classmethod
    def from_db(cls, tau_db: float, antisqueeze_db: float) -> "SqueezedThermalParams":
        """From ``coth(beta/2)`` and ``exp(+2r)`` expressed in dB."""
        return cls(r=0.5 * math.log(10 ** (antisqueeze_db / 10)), tau=10 ** (tau_db / 10))

    @property
    def beta(self) -> float:
        return beta_from_tau(self.tau)

    @property
    def tau_db(self) -> float:
        return 10 * math.log10(self.tau)

    @property
    def antisqueeze_db(self) -> float:
        return 10 * math.log10(math.exp(2 * self.r))

    def variances(self) -> QuadPair:
        return QuadPair(
            math.exp(-2 * self.r) * self.tau * VACUUM_VARIANCE,
            math.exp(2 * self.r) * self.tau * VACUUM_VARIANCE,
        )


@dataclass(frozen=True)
class FidelityReport:
    value: float
    method: Method
    input_params: SqueezedThermalParams | None = field(default=None)
    output_params: SqueezedThermalParams | None = field(default=None)


def extract_params(sigma: QuadPair) -> SqueezedThermalParams:
    """Invert ``sigma_x = e^{-2r} tau/4``, ``sigma_p = e^{2r} tau/4``."""
    if not sigma.is_physical() or sigma.sigma_x <= 0:
        raise UnphysicalState(
            f"variance product {sigma.product:.6g} is below the minimum 1/16"
        )
    r = 0.25 * math.log(sigma.sigma_p / sigma.sigma_x)
    tau = math.sqrt(sigma.sigma_x * sigma.sigma_p) / VACUUM_VARIANCE
    return SqueezedThermalParams(r=r, tau=tau)


def fidelity_vacuum(out: QuadPair) -> FidelityReport:
    """Fidelity of a zero-mean output with the vacuum input."""
    params = extract_params(out)
    value = 2.0 / math.sqrt((1 + 4 * out.sigma_x) * (1 + 4 * out.sigma_p))
    return FidelityReport(value, "vacuum_eq7", SqueezedThermalParams(0.0, 1.0), params)


def _fidelity_tau_form(ra: float, ta: float, rb: float, tb: float) -> float:
    # F = 2 / (sqrt(Y) - sqrt(M)) with
    #   Y = cosh^2(dr)(ta tb + 1)^2 - sinh^2(dr)(ta tb - 1)^2 = (ta tb)^2 + 1 + 2 ta tb cosh(2 dr)
    #   M = (ta^2 - 1)(tb^2 - 1)
    # rationalised as 2 (sqrt(Y) + sqrt(M)) / (Y - M) to avoid cancellation at large tau.
    c2 = math.cosh(2 * (ra - rb))
    y = (ta * tb) ** 2 + 1 + 2 * ta * tb * c2
    m = (ta * ta - 1) * (tb * tb - 1)
    y_minus_m = ta * ta + tb * tb + 2 * ta * tb * c2
    return 2.0 * (math.sqrt(y) + math.sqrt(m)) / y_minus_m


def fidelity_squeezed_thermal(
    a: SqueezedThermalParams | QuadPair, b: SqueezedThermalParams | QuadPair
) -> FidelityReport:
    """Fidelity of two co-aligned, zero-mean squeezed thermal states.

    Evaluated in terms of ``tau = coth(beta/2)`` so the pure boundary ``tau = 1``
    is finite; equivalent to the ``sinh(beta/2)`` form wherever that is defined.
    Either argument may be given as a variance pair.
    """
    if isinstance(a, QuadPair):
        a = extract_params(a)
    if isinstance(b, QuadPair):
        b = extract_params(b)
    value = _fidelity_tau_form(a.r, a.tau, b.r, b.tau)
    return FidelityReport(value, "squeezed_thermal_eq8", a, b)


def fidelity_squeezed_thermal_beta(a: SqueezedThermalParams, b: SqueezedThermalParams) -> float:
    """The same fidelity written with inverse temperatures; requires ``tau > 1`` for both."""
    ba, bb = a.beta, b.beta
    if math.isinf(ba) or math.isinf(bb):
        raise InvalidArgument("the beta form is singular for pure states; use the tau form")
    dr = a.r - b.r
    y = (
        math.cosh(dr) ** 2 * math.cosh((ba + bb) / 2) ** 2
        - math.sinh(dr) ** 2 * math.cosh((ba - bb) / 2) ** 2
    )
    return 2 * math.sinh(ba / 2) * math.sinh(bb / 2) / (math.sqrt(y) - 1)


def _single_mode_params(state: GaussianState) -> SqueezedThermalParams:
    lo, hi = np.linalg.eigvalsh(state.cov)
    return SqueezedThermalParams(
        r=0.25 * math.log(hi / lo), tau=math.sqrt(lo * hi) / VACUUM_VARIANCE
    )


def fidelity_gaussian(a: GaussianState, b: GaussianState) -> FidelityReport:
    """Uhlmann fidelity of two arbitrary single-mode Gaussian states.

    Uses the determinant form: with covariances rescaled so the vacuum is the
    identity, ``F = 2 / (sqrt(D + d) - sqrt(d)) * exp(-dm^T (C_a + C_b)^{-1} dm / 2)``
    where ``D = det(V_a + V_b)`` and ``d = (det V_a - 1)(det V_b - 1)``.
    """
    if a.n_modes != 1 or b.n_modes != 1:
        raise UnsupportedOperation("the Gaussian fidelity is implemented for single modes only")
    for s in (a, b):
        s.require_physical()
    va = a.cov / VACUUM_VARIANCE
    vb = b.cov / VACUUM_VARIANCE
    big = np.linalg.det(va + vb)
    mixed = max(np.linalg.det(va) - 1.0, 0.0) * max(np.linalg.det(vb) - 1.0, 0.0)
    dm = a.mean - b.mean
    expo = 0.5 * dm @ np.linalg.solve(a.cov + b.cov, dm)
    value = 2.0 / (math.sqrt(big + mixed) - math.sqrt(mixed)) * math.exp(-expo)
    return FidelityReport(
        float(value), "general_oracle", _single_mode_params(a), _single_mode_params(b)
    )


# --- classical-limit sweeps ---------------------------------------------------

SweepAxis = Literal["tau_db", "antisqueeze_db"]
_AXIS_ALIASES = {"tau": "tau_db", "tau_db": "tau_db", "antisqueeze": "antisqueeze_db",
                 "antisqueeze_db": "antisqueeze_db"}

SWEEP_MAX_DB = 60.0


def perfect_classical_output(sigma_in: QuadPair) -> QuadPair:
    """Unity-gain teleportation without entanglement adds two vacuum units per quadrature."""
    return QuadPair(sigma_in.sigma_x + 2 * VACUUM_VARIANCE, sigma_in.sigma_p + 2 * VACUUM_VARIANCE)


def classical_fidelity(params: SqueezedThermalParams) -> float:
    """Fidelity between an input and its perfect classical teleportation."""
    sigma_in = params.variances()
    return fidelity_squeezed_thermal(params, perfect_classical_output(sigma_in)).value


def classical_fidelity_sweep(
    axis: SweepAxis | str,
    fixed_value_db: float,
    range_db: tuple[float, float],
    steps: int,
) -> list[tuple[float, float]]:
    """Classical-teleportation fidelity along one axis of the input-state plane.

    ``axis="tau_db"`` varies ``coth(beta/2)`` with ``exp(+2r)`` fixed at
    ``fixed_value_db``; ``axis="antisqueeze_db"`` does the opposite. Returns
    ``(abscissa_db, fidelity)`` in increasing abscissa order.
    """
    try:
        axis = _AXIS_ALIASES[axis]
    except KeyError:
        raise InvalidArgument(f"unknown sweep axis {axis!r}") from None
    lo, hi = range_db
    if steps < 2:
        raise InvalidArgument(f"steps must be >= 2, got {steps}")
    if not (0.0 <= lo < hi <= SWEEP_MAX_DB):
        raise InvalidArgument(f"range must satisfy 0 <= lo < hi <= {SWEEP_MAX_DB} dB, got {range_db}")
    if not 0.0 <= fixed_value_db <= SWEEP_MAX_DB:
        raise InvalidArgument(f"fixed value must lie in [0, {SWEEP_MAX_DB}] dB")
    out = []
    for x in np.linspace(lo, hi, steps):
        if axis == "tau_db":
            p = SqueezedThermalParams.from_db(tau_db=x, antisqueeze_db=fixed_value_db)
        else:
            p = SqueezedThermalParams.from_db(tau_db=fixed_value_db, antisqueeze_db=x)
        out.append((float(x), classical_fidelity(p)))
    return out

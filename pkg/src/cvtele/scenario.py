"""Scenario files: line-oriented ``section.key = value`` descriptions of a run.

Example::

    # squeezed input through an asymmetric EPR resource
    input.kind = squeezed_thermal
    input.sigma_x_db = -2.92
    input.sigma_p_db = 7.68
    resource.squeeze_x = 0.4749
    resource.squeeze_p = 0.5000
    resource.r_plus = 0.6
    gains.g_x = 1
    gains.g_p = 1
    run.mode = analytic

Blank lines and ``#`` comments are ignored. Unknown keys, duplicate keys and
malformed values raise :class:`ScenarioError` with a line and column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Literal

from .errors import CVTeleError, InvalidArgument, UnphysicalParameter
from .gaussian import (
    GaussianState,
    QuadPair,
    from_db,
    squeezed_thermal_state,
    visibility_correct,
)
from .teleport import TeleportConfig, epr_resource

RunMode = Literal["analytic", "network", "montecarlo"]


class ScenarioError(CVTeleError):
    def __init__(self, message: str, line: int = 0, column: int = 0, source: str = "<scenario>"):
        self.line, self.column, self.source = line, column, source
        where = f"{source}:{line}:{column}" if line else source
        super().__init__(f"{where}: {message}")


def _parse_bool(text: str) -> bool:
    t = text.lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_float(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(f"expected a finite number, got {text!r}")
    return v


def _parse_int(text: str) -> int:
    return int(text)


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return text

    return parse


SCHEMA: dict[str, Callable[[str], object]] = {
    "name": str,
    "input.kind": _choice("vacuum", "squeezed_thermal"),
    "input.sigma_x_db": _parse_float,
    "input.sigma_p_db": _parse_float,
    "input.r": _parse_float,
    "input.tau_db": _parse_float,
    "input.visibility": _parse_float,
    "resource.epr_enabled": _parse_bool,
    "resource.r_minus": _parse_float,
    "resource.r_plus": _parse_float,
    "resource.squeeze_x": _parse_float,
    "resource.squeeze_p": _parse_float,
    "gains.g_x": _parse_float,
    "gains.g_p": _parse_float,
    "run.mode": _choice("analytic", "network", "montecarlo"),
    "run.shots": _parse_int,
    "run.seed": _parse_int,
    "measured.sigma_x_db": _parse_float,
    "measured.sigma_p_db": _parse_float,
}


@dataclass(frozen=True)
class Scenario:
    name: str
    input_kind: Literal["vacuum", "squeezed_thermal"]
    input_sigma: QuadPair
    config: TeleportConfig
    mode: RunMode = "analytic"
    shots: int = 100_000
    seed: int = 0
    measured_output: QuadPair | None = None
    raw: dict = field(default_factory=dict, repr=False, compare=False)

    def input_state(self) -> GaussianState:
        return self.input_sigma.to_state()


def parse_text(text: str, source: str = "<scenario>") -> dict[str, object]:
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        if "=" not in body:
            col = len(body) - len(body.lstrip()) + 1
            raise ScenarioError("expected 'key = value'", lineno, col, source)
        key_part, value_part = body.split("=", 1)
        key = key_part.strip()
        key_col = len(key_part) - len(key_part.lstrip()) + 1
        value = value_part.strip()
        value_col = len(key_part) + 1 + (len(value_part) - len(value_part.lstrip())) + 1
        if key not in SCHEMA:
            raise ScenarioError(f"unknown key {key!r}", lineno, key_col, source)
        if key in values:
            raise ScenarioError(f"duplicate key {key!r}", lineno, key_col, source)
        if not value:
            raise ScenarioError(f"missing value for {key!r}", lineno, value_col, source)
        try:
            values[key] = SCHEMA[key](value)
        except ValueError as exc:
            raise ScenarioError(f"bad value for {key!r}: {exc}", lineno, value_col, source) from None
    return values


def _input_sigma(v: dict, source: str) -> QuadPair:
    kind = v.get("input.kind", "vacuum")
    db_keys = {"input.sigma_x_db", "input.sigma_p_db"}
    param_keys = {"input.r", "input.tau_db"}
    given = set(v) & (db_keys | param_keys)
    if kind == "vacuum":
        if given:
            raise ScenarioError(f"vacuum input takes no parameters, got {sorted(given)}", source=source)
        return QuadPair(0.25, 0.25)
    if given == db_keys:
        sx, sp = from_db(v["input.sigma_x_db"]), from_db(v["input.sigma_p_db"])
        vis = v.get("input.visibility", 1.0)
        if vis != 1.0:
            sx, sp = visibility_correct(sx, vis), visibility_correct(sp, vis)
        sigma = QuadPair(sx, sp)
        if not sigma.is_physical():
            raise UnphysicalParameter(
                "input variances violate sigma_x * sigma_p >= 1/16 "
                f"(product {sigma.product:.6g})"
            )
        return sigma
    if given == param_keys:
        if "input.visibility" in v:
            raise ScenarioError("input.visibility applies only to measured dB variances", source=source)
        state = squeezed_thermal_state(v["input.r"], 10 ** (v["input.tau_db"] / 10))
        return state.quad_pair()
    raise ScenarioError(
        "squeezed_thermal input needs either sigma_x_db and sigma_p_db or r and tau_db",
        source=source,
    )


def build_scenario(values: dict, source: str = "<scenario>") -> Scenario:
    sigma = _input_sigma(values, source)
    try:
        config = TeleportConfig(
            r_minus=values.get("resource.r_minus", 0.0),
            r_plus=values.get("resource.r_plus", values.get("resource.r_minus", 0.0)),
            g_x=values.get("gains.g_x", 1.0),
            g_p=values.get("gains.g_p", 1.0),
            epr_enabled=values.get("resource.epr_enabled", True),
            squeeze_x=values.get("resource.squeeze_x"),
            squeeze_p=values.get("resource.squeeze_p"),
        )
    except InvalidArgument as exc:
        raise UnphysicalParameter(f"resource: {exc}") from None
    if config.epr_enabled:
        resource = epr_resource(config)
        if not resource.is_physical():
            raise UnphysicalParameter(
                "EPR resource violates the uncertainty principle "
                "(squeezing exceeds antisqueezing; raise resource.r_plus)"
            )
    measured = None
    mkeys = {"measured.sigma_x_db", "measured.sigma_p_db"}
    present = mkeys & set(values)
    if present and present != mkeys:
        raise ScenarioError("measured output needs both sigma_x_db and sigma_p_db", source=source)
    if present:
        measured = QuadPair.from_db(values["measured.sigma_x_db"], values["measured.sigma_p_db"])
        if not measured.is_physical():
            raise UnphysicalParameter("measured output violates sigma_x * sigma_p >= 1/16")
    shots = values.get("run.shots", 100_000)
    if shots < 2:
        raise ScenarioError(f"run.shots must be at least 2, got {shots}", source=source)
    return Scenario(
        name=values.get("name", Path(source).stem),
        input_kind=values.get("input.kind", "vacuum"),
        input_sigma=sigma,
        config=config,
        mode=values.get("run.mode", "analytic"),
        shots=shots,
        seed=values.get("run.seed", 0),
        measured_output=measured,
        raw=dict(values),
    )


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    text = path.read_text()
    return build_scenario(parse_text(text, str(path)), str(path))


def bundled_scenarios() -> dict[str, Path]:
    root = Path(__file__).parent / "scenarios"
    return {p.stem: p for p in sorted(root.glob("*.scn"))}

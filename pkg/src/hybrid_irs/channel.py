"""Scenario configuration and deterministic line-of-sight channels.

The base station (BS) sits at the origin with its uniform linear array along
the x-axis. The IRS and the user (Bob) are placed in the same plane from the
BS departure angles and link distances; when the IRS-to-Bob angle or distance
is not given explicitly it is derived from that geometry. The IRS is modelled
as a ULA parallel to the BS array, with the same element spacing.
"""
from __future__ import annotations

import ast
import dataclasses
import hashlib
import math
import operator
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, InvalidArgumentError
from .units import dbm_to_watts


@dataclass(frozen=True)
class ScenarioConfig:
    """Physical constants of one simulation scenario.

    Powers are in dBm, distances in meters, angles in radians. ``theta_rb``
    and ``d_rb`` may be left as ``None``, in which case they are computed from
    the planar geometry (see :meth:`irs_to_bob`). ``M``, ``M_a`` and
    ``beta_max`` are the default IRS layout for the scenario; experiment
    sweeps override ``M`` and ``M_a``.
    """

    N: int = 8
    d_over_lambda: float = 0.5
    theta_sr: float = math.pi / 4
    theta_sb: float = math.pi / 3
    theta_rb: Optional[float] = None
    d_sr: float = 200.0
    d_sb: float = 220.0
    d_rb: Optional[float] = None
    gamma: float = 2.0
    PL0_dB: float = -30.0
    d0: float = 1.0
    P_dBm: float = 25.0
    Pr_max_dBm: float = 30.0
    sigma_b2_dBm: float = -70.0
    sigma_r2_dBm: float = -70.0 + 10.0 * math.log10(2.0)
    M: int = 128
    M_a: int = 32
    beta_max: float = 100.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise InvalidArgumentError(f"N must be an integer >= 1, got {self.N!r}")
        if int(self.M) != self.M or self.M < 1:
            raise InvalidArgumentError(f"M must be an integer >= 1, got {self.M!r}")
        if int(self.M_a) != self.M_a or not 0 <= self.M_a <= self.M:
            raise InvalidArgumentError(f"M_a must be an integer in [0, M], got {self.M_a!r}")
        for name in ("d_sr", "d_sb", "d0"):
            if not getattr(self, name) > 0:
                raise InvalidArgumentError(f"{name} must be > 0, got {getattr(self, name)!r}")
        if self.d_rb is not None and not self.d_rb > 0:
            raise InvalidArgumentError(f"d_rb must be > 0, got {self.d_rb!r}")
        for name in ("theta_sr", "theta_sb", "theta_rb"):
            theta = getattr(self, name)
            if theta is not None and not 0.0 <= theta <= math.pi:
                raise InvalidArgumentError(f"{name} must lie in [0, pi], got {theta!r}")
        if not self.d_over_lambda > 0:
            raise InvalidArgumentError("d_over_lambda must be > 0")
        if not self.beta_max > 0:
            raise InvalidArgumentError("beta_max must be > 0")

    # linear-unit views
    @property
    def P(self) -> float:
        return dbm_to_watts(self.P_dBm)

    @property
    def Pr_max(self) -> float:
        return dbm_to_watts(self.Pr_max_dBm)

    @property
    def sigma_b2(self) -> float:
        return dbm_to_watts(self.sigma_b2_dBm)

    @property
    def sigma_r2(self) -> float:
        return dbm_to_watts(self.sigma_r2_dBm)

    def irs_to_bob(self) -> tuple[float, float]:
        """Return ``(theta_rb, d_rb)``, deriving missing values from geometry."""
        irs = self.d_sr * np.array([math.cos(self.theta_sr), math.sin(self.theta_sr)])
        bob = self.d_sb * np.array([math.cos(self.theta_sb), math.sin(self.theta_sb)])
        delta = bob - irs
        dist = float(np.hypot(delta[0], delta[1]))
        d_rb = self.d_rb if self.d_rb is not None else dist
        if self.theta_rb is not None:
            theta_rb = self.theta_rb
        elif dist == 0.0:
            raise InvalidArgumentError("IRS and Bob coincide; give theta_rb and d_rb explicitly")
        else:
            # a ULA only sees cos(theta), so fold into [0, pi]
            theta_rb = math.acos(max(-1.0, min(1.0, delta[0] / dist)))
        if not d_rb > 0:
            raise InvalidArgumentError("derived d_rb is zero; give d_rb explicitly")
        return theta_rb, d_rb

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def canonical_text(self) -> str:
        """Scenario-file rendering with fixed key order and round-trip floats."""
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            lines.append(f"{f.name} = {value!r}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ChannelSet:
    """Line-of-sight channels and their linear path-loss coefficients."""

    h_sb: np.ndarray
    h_rb: np.ndarray
    h_sr: np.ndarray
    h_sr_bs: np.ndarray
    H_sr: np.ndarray
    rho_sb: float
    rho_rb: float
    rho_sr: float
    rho_srb: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "rho_srb", self.rho_sr * self.rho_rb)

    @property
    def N(self) -> int:
        return self.h_sb.shape[0]

    @property
    def M(self) -> int:
        return self.h_rb.shape[0]


def steering_vector(n_elems: int, d_over_lambda: float, theta: float) -> np.ndarray:
    """Normalized ULA response, element k: exp(j2π·Φ(k))/√n, Φ(k) = -(k-(n+1)/2)·(d/λ)·cos θ."""
    if int(n_elems) != n_elems or n_elems < 1:
        raise InvalidArgumentError(f"n_elems must be a positive integer, got {n_elems!r}")
    if not 0.0 <= theta <= math.pi:
        raise InvalidArgumentError(f"theta must lie in [0, pi], got {theta!r}")
    n = int(n_elems)
    k = np.arange(1, n + 1, dtype=float)
    phase = -(k - (n + 1) / 2.0) * d_over_lambda * math.cos(theta)
    return np.exp(2j * np.pi * phase) / math.sqrt(n)


def path_loss_linear(d: float, gamma: float, PL0_dB: float, d0: float) -> float:
    """Log-distance path loss as a linear power coefficient."""
    if not d > 0:
        raise InvalidArgumentError(f"distance must be > 0, got {d!r}")
    if not d0 > 0:
        raise InvalidArgumentError(f"reference distance must be > 0, got {d0!r}")
    return 10.0 ** ((PL0_dB - 10.0 * gamma * math.log10(d / d0)) / 10.0)


def build_channels(cfg: ScenarioConfig, layout=None) -> ChannelSet:
    """Synthesize the three LoS channels for ``cfg``.

    ``layout`` may be an ``IrsLayout``, an integer element count, or ``None``
    (use ``cfg.M``).
    """
    if layout is None:
        M = cfg.M
    elif isinstance(layout, (int, np.integer)):
        M = int(layout)
    else:
        M = layout.M
    if M < 1:
        raise InvalidArgumentError(f"IRS must have at least one element, got M={M}")
    theta_rb, d_rb = cfg.irs_to_bob()
    h_sb = steering_vector(cfg.N, cfg.d_over_lambda, cfg.theta_sb)
    h_sr = steering_vector(M, cfg.d_over_lambda, cfg.theta_sr)
    h_sr_bs = steering_vector(cfg.N, cfg.d_over_lambda, cfg.theta_sr)
    h_rb = steering_vector(M, cfg.d_over_lambda, theta_rb)
    H_sr = np.outer(h_sr, h_sr_bs.conj())
    return ChannelSet(
        h_sb=h_sb,
        h_rb=h_rb,
        h_sr=h_sr,
        h_sr_bs=h_sr_bs,
        H_sr=H_sr,
        rho_sb=path_loss_linear(cfg.d_sb, cfg.gamma, cfg.PL0_dB, cfg.d0),
        rho_rb=path_loss_linear(d_rb, cfg.gamma, cfg.PL0_dB, cfg.d0),
        rho_sr=path_loss_linear(cfg.d_sr, cfg.gamma, cfg.PL0_dB, cfg.d0),
    )


# --- scenario files -------------------------------------------------------

_INT_KEYS = {"N", "M", "M_a"}
_BIN_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def _eval_number(text: str) -> float:
    """Evaluate a numeric literal or a small arithmetic expression using ``pi``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BIN_OPS:
            return _BIN_OPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(f"unsupported expression {text!r}")

    return ev(ast.parse(text.strip(), mode="eval"))


def parse_scenario(text: str, source: str = "<string>") -> ScenarioConfig:
    known = {f.name for f in fields(ScenarioConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            number = _eval_number(value)
        except (ValueError, SyntaxError, ZeroDivisionError) as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {exc}") from None
        if key in _INT_KEYS:
            if float(number) != int(number):
                raise ConfigError(f"{source}:{lineno}: {key} must be an integer")
            number = int(number)
        else:
            number = float(number)
        values[key] = number
    try:
        return ScenarioConfig(**values)
    except InvalidArgumentError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from None
    return parse_scenario(text, source=str(path))


def dump_scenario(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(cfg.canonical_text())

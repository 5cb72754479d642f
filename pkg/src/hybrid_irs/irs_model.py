"""Hybrid-IRS reflection algebra: masks, SNR, achievable rate, active power.

Reflection coefficients are stored as the diagonal of the phase shift
matrix Θ, i.e. ``theta[m]`` multiplies the signal incident on element m.
The optimization vectors used by the solvers (ψ, φ) are the conjugates of
the masked diagonals, so that e.g. h_rb^H Φ H_sr v = φ^H s with
s = diag{h_rb^H} H_sr v.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .channel import ChannelSet, ScenarioConfig
from .errors import InvalidArgumentError

Beamformer = np.ndarray


@dataclass(frozen=True)
class IrsLayout:
    """Element count, active index set (1-based) and amplitude budget."""

    M: int
    omega: tuple
    beta_max: float = 100.0

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise InvalidArgumentError(f"M must be a positive integer, got {self.M!r}")
        omega = tuple(sorted(int(i) for i in self.omega))
        if len(set(omega)) != len(omega):
            raise InvalidArgumentError("active index set contains duplicates")
        if omega and (omega[0] < 1 or omega[-1] > self.M):
            raise InvalidArgumentError(f"active indices must lie in 1..{self.M}")
        if not self.beta_max > 0:
            raise InvalidArgumentError("beta_max must be > 0")
        object.__setattr__(self, "omega", omega)

    @classmethod
    def hybrid(cls, M: int, M_a: int, beta_max: float = 100.0, strict: bool = True) -> "IrsLayout":
        """Active elements at positions 1..M_a.

        With ``strict`` the hybrid condition 1 <= M_a <= M - M_a is enforced.
        """
        if strict and not 1 <= M_a <= M - M_a:
            raise InvalidArgumentError(f"hybrid layout needs 1 <= M_a <= M - M_a, got M={M}, M_a={M_a}")
        if not 0 <= M_a <= M:
            raise InvalidArgumentError(f"M_a must lie in [0, M], got {M_a}")
        return cls(M, tuple(range(1, M_a + 1)), beta_max)

    @classmethod
    def passive(cls, M: int, beta_max: float = 100.0) -> "IrsLayout":
        return cls(M, (), beta_max)

    @classmethod
    def fully_active(cls, M: int, beta_max: float = 100.0) -> "IrsLayout":
        return cls(M, tuple(range(1, M + 1)), beta_max)

    @property
    def M_a(self) -> int:
        return len(self.omega)

    @property
    def M_p(self) -> int:
        return self.M - self.M_a

    @property
    def active(self) -> np.ndarray:
        mask = np.zeros(self.M, dtype=bool)
        if self.omega:
            mask[np.asarray(self.omega) - 1] = True
        return mask

    @property
    def passive_mask(self) -> np.ndarray:
        return ~self.active


@dataclass(frozen=True)
class MaskPair:
    E_Ma: np.ndarray
    E_Mp: np.ndarray


def masks(layout: IrsLayout) -> MaskPair:
    a = layout.active.astype(float)
    return MaskPair(E_Ma=np.diag(a), E_Mp=np.diag(1.0 - a))


@dataclass(frozen=True)
class ReflectionState:
    """Diagonal of Θ plus the layout that splits it into Ψ and Φ."""

    theta: np.ndarray
    layout: IrsLayout

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=complex)
        if theta.shape != (self.layout.M,):
            raise InvalidArgumentError(f"theta must have shape ({self.layout.M},), got {theta.shape}")
        object.__setattr__(self, "theta", theta)

    @property
    def psi_diag(self) -> np.ndarray:
        return np.where(self.layout.active, self.theta, 0.0)

    @property
    def phi_diag(self) -> np.ndarray:
        return np.where(self.layout.active, 0.0, self.theta)

    @property
    def Psi(self) -> np.ndarray:
        return np.diag(self.psi_diag)

    @property
    def Phi(self) -> np.ndarray:
        return np.diag(self.phi_diag)

    def violations(self, tol: float = 1e-9) -> list[str]:
        """Human-readable list of broken modulus constraints (empty if feasible)."""
        mag = np.abs(self.theta)
        out = []
        passive = self.layout.passive_mask
        if passive.any():
            worst = np.max(np.abs(mag[passive] - 1.0))
            if worst > tol:
                out.append(f"passive modulus off by {worst:.3e}")
        if self.layout.M_a:
            over = np.max(mag[self.layout.active]) - self.layout.beta_max
            if over > tol:
                out.append(f"active amplitude exceeds beta_max by {over:.3e}")
        return out

    @classmethod
    def from_parts(cls, layout: IrsLayout, passive: Optional[np.ndarray] = None,
                   active: Optional[np.ndarray] = None) -> "ReflectionState":
        theta = np.zeros(layout.M, dtype=complex)
        if passive is not None:
            theta[layout.passive_mask] = np.asarray(passive)[layout.passive_mask]
        if active is not None:
            theta[layout.active] = np.asarray(active)[layout.active]
        return cls(theta, layout)


def _check_dims(ch: ChannelSet, v: np.ndarray, s: ReflectionState) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.shape != (ch.N,):
        raise InvalidArgumentError(f"beamformer must have shape ({ch.N},), got {v.shape}")
    if s.layout.M != ch.M:
        raise InvalidArgumentError(f"state has M={s.layout.M} but channels have M={ch.M}")
    return v


def cascade_vector(ch: ChannelSet, v: np.ndarray) -> np.ndarray:
    """s = diag{h_rb^H} H_sr v, the per-element cascaded channel seen through v."""
    return ch.h_rb.conj() * (ch.H_sr @ v)


def snr_parts(ch: ChannelSet, cfg: ScenarioConfig, v, s: ReflectionState) -> tuple[float, float]:
    """Return (signal power, noise power) at Bob, both in watts."""
    v = _check_dims(ch, v, s)
    g = cascade_vector(ch, v)
    amp = (math.sqrt(ch.rho_srb) * np.dot(s.theta, g)
           + math.sqrt(ch.rho_sb) * np.vdot(ch.h_sb, v))
    signal = float(cfg.P * abs(amp) ** 2)
    noise = (cfg.sigma_r2 * ch.rho_rb * float(np.sum(np.abs(ch.h_rb * s.psi_diag) ** 2))
             + cfg.sigma_b2)
    return signal, noise


def snr(ch: ChannelSet, cfg: ScenarioConfig, v, s: ReflectionState) -> float:
    signal, noise = snr_parts(ch, cfg, v, s)
    return signal / noise


def achievable_rate(snr_value: float) -> float:
    if snr_value < 0:
        raise InvalidArgumentError(f"SNR must be non-negative, got {snr_value!r}")
    return math.log2(1.0 + snr_value)


def rate(ch: ChannelSet, cfg: ScenarioConfig, v, s: ReflectionState) -> float:
    return achievable_rate(snr(ch, cfg, v, s))


def active_power_weights(ch: ChannelSet, cfg: ScenarioConfig, v) -> np.ndarray:
    """Diagonal of ρ_sr·P·diag{v^H H_sr^H}diag{H_sr v} + σ_r²·I (watts per unit |ψ_m|²)."""
    return ch.rho_sr * cfg.P * np.abs(ch.H_sr @ v) ** 2 + cfg.sigma_r2


def irs_transmit_power(ch: ChannelSet, cfg: ScenarioConfig, v, s: ReflectionState) -> float:
    """Trace form Tr(Ψ(ρ_sr P H_sr v v^H H_sr^H + σ_r² I)Ψ^H)."""
    v = _check_dims(ch, v, s)
    Psi = s.Psi
    Hv = ch.H_sr @ v
    inner = ch.rho_sr * cfg.P * np.outer(Hv, Hv.conj()) + cfg.sigma_r2 * np.eye(ch.M)
    return float(np.real(np.trace(Psi @ inner @ Psi.conj().T)))


def irs_transmit_power_vector(ch: ChannelSet, cfg: ScenarioConfig, v, s: ReflectionState) -> float:
    """Quadratic form ψ^T G ψ* with G = ρ_sr P diag{v^H H^H}diag{H v} + σ_r² I."""
    v = _check_dims(ch, v, s)
    psi = s.psi_diag.conj()
    G = active_power_weights(ch, cfg, v)
    return float(np.real(psi @ (G * psi.conj())))


def feasibility_report(ch: ChannelSet, cfg: ScenarioConfig, v, s: ReflectionState,
                       tol: float = 1e-9) -> list[str]:
    """All constraint violations of the joint problem at (v, s)."""
    v = _check_dims(ch, v, s)
    out = list(s.violations(tol))
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > tol:
        out.append(f"beamformer norm {norm!r} != 1")
    if s.layout.M_a:
        p = irs_transmit_power_vector(ch, cfg, v, s)
        if p > cfg.Pr_max * (1.0 + tol):
            out.append(f"active power {p:.6e} W exceeds budget {cfg.Pr_max:.6e} W")
    return out


def unit_phases(x: Iterable[complex]) -> np.ndarray:
    """e^{j arg x} elementwise with arg(0) = 0."""
    x = np.asarray(x, dtype=complex)
    mag = np.abs(x)
    out = np.ones_like(x)
    nz = mag > 0
    out[nz] = x[nz] / mag[nz]
    return out

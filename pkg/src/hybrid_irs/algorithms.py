"""Alternating-optimization designs for the hybrid-IRS link, baselines, and FLOP models.

Both proposed designs alternate between the BS beamformer ``v`` and the IRS
reflection coefficients:

* :func:`max_snr_fp`: linearized (SCA) beamformer step, closed-form phase
  step for the passive elements, and a Dinkelbach fractional-programming
  step for the active elements;
* :func:`max_snr_ear`: leakage-style beamformer step, phase alignment for
  every element and one common amplitude for the active elements that
  exhausts the active power budget.

All inner problems use the solvers in :mod:`hybrid_irs.convex_kernel`.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import ChannelSet, ScenarioConfig
from .convex_kernel import (
    DinkelbachState,
    dinkelbach_drive,
    solve_linear_ball_ellipsoid,
    solve_psi_inner,
    solve_separable_phase,
)
from .errors import InvalidArgumentError, NonConvergenceError
from .irs_model import (
    IrsLayout,
    ReflectionState,
    active_power_weights,
    cascade_vector,
    rate,
    unit_phases,
)

BASELINES = ("no_irs", "random_phase", "passive_irs", "active_irs")


@dataclass
class AlgOptions:
    epsilon: float = 1e-4
    max_outer: int = 100
    seed: int = 0
    dinkelbach_tol: float = 1e-6
    dinkelbach_max_iter: int = 100
    backend: Optional[str] = None
    # when a list is given, one row per inner solve is appended:
    # (outer_iteration, step, solver_iterations, objective, kkt_residual)
    trace: Optional[list] = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidArgumentError("epsilon must be > 0")
        if self.max_outer < 1:
            raise InvalidArgumentError("max_outer must be >= 1")


@dataclass
class AlgorithmResult:
    algorithm: str
    rate_trajectory: list
    final_v: np.ndarray
    final_state: ReflectionState
    outer_iterations: int
    flops_estimate: float
    wall_time: float
    converged: bool
    dinkelbach: list = field(default_factory=list)

    @property
    def rate(self) -> float:
        return self.rate_trajectory[-1]


# --- FLOP models ------------------------------------------------------------

def _check_positive(**kwargs):
    for name, value in kwargs.items():
        if not value > 0:
            raise InvalidArgumentError(f"{name} must be positive, got {value!r}")


def flops_fp(L, M, N, epsilon) -> float:
    """FLOP count of the FP design after L alternating iterations."""
    _check_positive(L=L, M=M, N=N)
    if not 0 < epsilon < 1:
        raise InvalidArgumentError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    per_iter = (M + 1) ** 3 + 2 * M * N ** 2 + 2 * M ** 2
    return float(L * per_iter * math.log(1.0 / epsilon)
                 + M ** 3 + N ** 3 + 5 * M ** 2 + 2 * M * N + 2 * M + 2 * M * N ** 2)


def flops_ear(K, M, N) -> float:
    """FLOP count of the EAR design after K alternating iterations."""
    _check_positive(K=K, M=M, N=N)
    return float(K * (4 * M ** 2 + N ** 3 + 8 * N ** 2 * M + 2 * M * N))


# --- shared steps -------------------------------------------------------------

class _Problem:
    """Scenario constants bundled for the alternating loops."""

    def __init__(self, cfg: ScenarioConfig, ch: ChannelSet, layout: IrsLayout, opts: AlgOptions):
        if layout.M != ch.M:
            raise InvalidArgumentError(f"layout has M={layout.M} but channels have M={ch.M}")
        self.cfg, self.ch, self.layout, self.opts = cfg, ch, layout, opts
        self.active = layout.active
        self.passive = layout.passive_mask
        self.P = cfg.P
        self.Pr_max = cfg.Pr_max
        self.sigma_b2 = cfg.sigma_b2
        self.sigma_r2 = cfg.sigma_r2
        self.sq_srb = math.sqrt(ch.rho_srb)
        self.sq_sb = math.sqrt(ch.rho_sb)
        self.trajectory: list = []
        self.k = 0

    def rate(self, v, theta) -> float:
        return rate(self.ch, self.cfg, v, ReflectionState(theta, self.layout))

    def trace(self, step, rows):
        if self.opts.trace is not None:
            for it, obj, kkt in rows:
                self.opts.trace.append((self.k, step, it, obj, kkt))

    def _fail(self, what, report):
        raise NonConvergenceError(
            f"{what} did not converge at outer iteration {self.k} "
            f"(kkt residual {report.kkt_residual:.3e}, status {report.status})",
            partial=list(self.trajectory),
        )

    def power_terms(self, theta):
        """Beamformer-domain power constraint v^H Q v + c <= Pr_max for fixed Ψ."""
        psi_d = np.where(self.active, theta, 0.0)
        row = psi_d[:, None] * self.ch.H_sr  # Ψ H_sr
        Q = self.ch.rho_sr * self.P * (row.conj().T @ row)
        c = self.sigma_r2 * float(np.sum(np.abs(psi_d) ** 2))
        return 0.5 * (Q + Q.conj().T), c

    def active_power(self, v, theta) -> float:
        G = active_power_weights(self.ch, self.cfg, v)
        return float(np.sum(G[self.active] * np.abs(theta[self.active]) ** 2))

    def beam_step(self, b, v_bar, theta, step):
        """Solve the linearized beamformer problem and restore ||v|| = 1."""
        Q, c = self.power_terms(theta)
        rows = []
        v, report = solve_linear_ball_ellipsoid(b, Q, c, self.Pr_max, backend=self.opts.backend, trace=rows)
        self.trace(step, rows)
        if not report.converged:
            self._fail(f"{step} solve", report)
        nrm = float(np.linalg.norm(v))
        if nrm == 0.0:
            return v_bar, theta
        if nrm < 1.0:
            # scale up until the ball or the power budget binds
            qv = float(np.real(np.vdot(v, Q @ v)))
            t = 1.0 / nrm
            if qv > 0:
                t = min(t, math.sqrt(max(self.Pr_max - c, 0.0) / qv))
            v = v * max(t, 1.0)
            nrm = float(np.linalg.norm(v))
        if abs(nrm - 1.0) > 1e-12:
            # the budget binds strictly inside the ball: keep unit norm and
            # shrink the active amplitudes back onto the budget
            v = v / nrm
            p = self.active_power(v, theta)
            if p > self.Pr_max:
                theta = theta.copy()
                theta[self.active] *= math.sqrt(self.Pr_max / p)
        else:
            v = v / nrm
        return v, theta

    def phase_aligned(self, v):
        return unit_phases(cascade_vector(self.ch, v).conj())

    def equal_amplitude(self, v) -> float:
        if not self.active.any():
            return self.layout.beta_max
        Q = float(np.sum(active_power_weights(self.ch, self.cfg, v)[self.active]))
        if Q <= 0.0:
            return self.layout.beta_max
        return min(self.layout.beta_max, math.sqrt(self.Pr_max / Q))

    def initial_point(self):
        v = self.ch.h_sb.copy()
        theta = self.phase_aligned(v)
        theta[self.active] *= 0.5 * self.equal_amplitude(v)
        return v, theta


def _flops(name, k, layout, ch, opts):
    M, N = layout.M, ch.N
    if name == "ear":
        return flops_ear(max(k, 1), M, N)
    if 0 < opts.epsilon < 1:
        return flops_fp(max(k, 1), M, N, opts.epsilon)
    return math.nan


def _run(name, prob: _Problem, v, theta, step_fn):
    opts = prob.opts
    start = time.perf_counter()
    prob.trajectory = [prob.rate(v, theta)]
    converged = False
    dink = []
    for k in range(1, opts.max_outer + 1):
        prob.k = k
        v, theta, info = step_fn(v, theta)
        if info is not None:
            dink.append(info)
        prob.trajectory.append(prob.rate(v, theta))
        if abs(prob.trajectory[-1] - prob.trajectory[-2]) <= opts.epsilon:
            converged = True
            break
    iters = len(prob.trajectory) - 1
    return AlgorithmResult(
        algorithm=name,
        rate_trajectory=prob.trajectory,
        final_v=v,
        final_state=ReflectionState(theta, prob.layout),
        outer_iterations=iters,
        flops_estimate=_flops("ear" if name == "max_snr_ear" else "fp", iters, prob.layout, prob.ch, opts),
        wall_time=time.perf_counter() - start,
        converged=converged,
        dinkelbach=dink,
    )


# --- Max-SNR-FP -------------------------------------------------------------

def _fp_beam(prob: _Problem, v_bar, theta):
    ch = prob.ch
    # a: effective MISO channel row, amplitude at Bob = a @ v
    a = prob.sq_srb * ((ch.h_rb.conj() * theta) @ ch.H_sr) + prob.sq_sb * ch.h_sb.conj()
    b = a.conj() * (a @ v_bar)  # A v̄ with A = a^H a
    return prob.beam_step(b * (prob.P / prob.sigma_b2), v_bar, theta, "v")


def _fp_phi(prob: _Problem, v, theta):
    if not prob.passive.any():
        return theta
    s = cascade_vector(prob.ch, v)
    B = prob.sq_srb * np.sum(theta[prob.active] * s[prob.active]) + prob.sq_sb * np.vdot(prob.ch.h_sb, v)
    phi_bar = np.where(prob.passive, theta.conj(), 0.0)
    # C φ̄ + √ρ_srb s B*, C = ρ_srb s s^H
    coef = prob.ch.rho_srb * s * np.vdot(s, phi_bar) + prob.sq_srb * s * np.conj(B)
    phi = solve_separable_phase(coef, prob.passive)
    out = theta.copy()
    out[prob.passive] = phi[prob.passive].conj()
    return out


def _fp_psi(prob: _Problem, v, theta):
    if not prob.active.any():
        return theta, None
    ch, opts = prob.ch, prob.opts
    act = prob.active
    s = cascade_vector(ch, v)
    D = prob.sq_srb * np.sum(theta[prob.passive] * s[prob.passive]) + prob.sq_sb * np.vdot(ch.h_sb, v)
    # work in SNR units: numerator scaled by P/σ_b², denominator by 1/σ_b²
    gain = prob.P / prob.sigma_b2
    s_a = np.where(act, s, 0.0)
    C = gain * ch.rho_srb * np.outer(s_a, s_a.conj())
    d = gain * prob.sq_srb * s_a * np.conj(D)
    w = (prob.sigma_r2 * ch.rho_rb / prob.sigma_b2) * np.abs(ch.h_rb) ** 2
    G = active_power_weights(ch, prob.cfg, v)
    psi_bar = np.where(act, theta.conj(), 0.0)
    Cpb = C @ psi_bar
    const = gain * abs(D) ** 2 - float(np.real(np.vdot(psi_bar, Cpb)))

    def num(psi):  # linearized numerator at ψ̄
        return const + 2.0 * float(np.real(np.vdot(Cpb, psi))) + 2.0 * float(np.real(np.vdot(psi, d)))

    def den(psi):
        return 1.0 + float(np.sum(w * np.abs(psi) ** 2))

    def inner(tau):
        rows = []
        psi, report = solve_psi_inner(C, d, tau, G, prob.Pr_max, act, prob.layout.beta_max,
                                      psi_bar, w, backend=opts.backend, trace=rows)
        prob.trace("psi", rows)
        if not report.converged:
            prob._fail("psi solve", report)
        return psi

    state, psi = dinkelbach_drive(num, den, inner, psi_bar,
                                  tol=opts.dinkelbach_tol, max_iter=opts.dinkelbach_max_iter)
    if not state.converged:
        raise NonConvergenceError(
            f"Dinkelbach iteration did not converge at outer iteration {prob.k}",
            partial=list(prob.trajectory))
    out = theta.copy()
    out[act] = psi[act].conj()
    return out, state


def _fp_loop(name, cfg, ch, layout, opts, v0=None, theta0=None):
    prob = _Problem(cfg, ch, layout, opts)
    v, theta = prob.initial_point()
    if v0 is not None:
        v = np.asarray(v0, dtype=complex)
    if theta0 is not None:
        theta = np.asarray(theta0, dtype=complex)

    def step(v, theta):
        v, theta = _fp_beam(prob, v, theta)
        theta = _fp_phi(prob, v, theta)
        theta, info = _fp_psi(prob, v, theta)
        return v, theta, info

    return _run(name, prob, v, theta, step)


def max_snr_fp(cfg: ScenarioConfig, ch: ChannelSet, layout: IrsLayout,
               opts: Optional[AlgOptions] = None) -> AlgorithmResult:
    """Max-SNR-FP: SCA beamformer, SCA passive phases, Dinkelbach active coefficients."""
    return _fp_loop("max_snr_fp", cfg, ch, layout, opts or AlgOptions())


# --- Max-SNR-EAR ------------------------------------------------------------

def _ear_beam(prob: _Problem, v_bar, theta):
    ch = prob.ch
    phi_d = np.where(prob.passive, theta, 0.0)
    psi_d = np.where(prob.active, theta, 0.0)
    r_phi = (ch.h_rb.conj() * phi_d) @ ch.H_sr
    r_psi = (ch.h_rb.conj() * psi_d) @ ch.H_sr
    # E v̄ without forming E
    b = (ch.rho_srb * (r_phi.conj() * (r_phi @ v_bar) + r_psi.conj() * (r_psi @ v_bar))
         + ch.rho_sb * ch.h_sb * np.vdot(ch.h_sb, v_bar))
    return prob.beam_step(b * (prob.P / prob.sigma_b2), v_bar, theta, "v")


def max_snr_ear(cfg: ScenarioConfig, ch: ChannelSet, layout: IrsLayout,
                opts: Optional[AlgOptions] = None) -> AlgorithmResult:
    """Max-SNR-EAR: leakage-criterion beamformer, phase alignment, equal active amplitude."""
    opts = opts or AlgOptions()
    prob = _Problem(cfg, ch, layout, opts)
    v, theta = prob.initial_point()

    def step(v, theta):
        v, theta = _ear_beam(prob, v, theta)
        theta = prob.phase_aligned(v)
        theta[prob.active] *= prob.equal_amplitude(v)
        return v, theta, None

    return _run("max_snr_ear", prob, v, theta, step)


# --- baselines ----------------------------------------------------------------

def _no_irs(cfg, ch, layout, opts):
    start = time.perf_counter()
    v = ch.h_sb.copy()
    off = IrsLayout.fully_active(layout.M, layout.beta_max)
    state = ReflectionState(np.zeros(layout.M, dtype=complex), off)
    r = math.log2(1.0 + cfg.P * ch.rho_sb / cfg.sigma_b2)
    return AlgorithmResult("no_irs", [r], v, state, 0, 0.0, time.perf_counter() - start, True)


def _random_phase(cfg, ch, layout, opts):
    rng = np.random.default_rng(opts.seed)
    theta = np.exp(2j * np.pi * rng.random(layout.M))
    prob = _Problem(cfg, ch, layout, opts)
    v = ch.h_sb.copy()

    def step(v, theta):
        v, theta = _fp_beam(prob, v, theta)
        return v, theta, None

    return _run("random_phase", prob, v, theta, step)


def baseline(kind: str, cfg: ScenarioConfig, ch: ChannelSet, layout: IrsLayout,
             opts: Optional[AlgOptions] = None) -> AlgorithmResult:
    """Reference designs: no IRS, random-phase IRS, fully passive IRS, fully active IRS.

    ``random_phase`` and ``passive_irs`` need a layout without active
    elements, ``active_irs`` one where every element is active.
    """
    opts = opts or AlgOptions()
    if kind not in BASELINES:
        raise InvalidArgumentError(f"unknown baseline {kind!r}; expected one of {BASELINES}")
    if layout.M != ch.M:
        raise InvalidArgumentError(f"layout has M={layout.M} but channels have M={ch.M}")
    if kind == "no_irs":
        return _no_irs(cfg, ch, layout, opts)
    if kind in ("random_phase", "passive_irs") and layout.M_a != 0:
        raise InvalidArgumentError(f"{kind} needs a fully passive layout, got M_a={layout.M_a}")
    if kind == "active_irs" and layout.M_a != layout.M:
        raise InvalidArgumentError(f"active_irs needs every element active, got M_a={layout.M_a}")
    if kind == "random_phase":
        return _random_phase(cfg, ch, layout, opts)
    return _fp_loop(kind, cfg, ch, layout, opts)

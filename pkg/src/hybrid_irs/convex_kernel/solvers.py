"""Small convex solvers for the linearized subproblems and the Dinkelbach driver."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..errors import InfeasibleError, InvalidArgumentError, NumericalError
from ._backend import get_backend
from ._kernels_py import psi_radii

KKT_TOL = 1e-8


@dataclass
class SolveReport:
    objective: float
    kkt_residual: float
    iterations: int
    converged: bool
    status: str = "ok"


@dataclass
class DinkelbachState:
    tau: float
    F_value: float
    iterations: int
    converged: bool = True
    monotone: bool = True
    taus: list = field(default_factory=list)


def _require_hermitian(C, name="matrix", tol=1e-10):
    C = np.asarray(C, dtype=complex)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise InvalidArgumentError(f"{name} must be square, got shape {C.shape}")
    scale = max(1.0, float(np.max(np.abs(C)))) if C.size else 1.0
    if C.size and float(np.max(np.abs(C - C.conj().T))) > tol * scale:
        raise InvalidArgumentError(f"{name} is not Hermitian")
    return C


def sca_lower_bound(C, x, x_bar) -> float:
    """First-order minorant 2Re{x̄^H C x} - x̄^H C x̄ of the convex quadratic x^H C x."""
    C = _require_hermitian(C, "C")
    x = np.asarray(x, dtype=complex)
    x_bar = np.asarray(x_bar, dtype=complex)
    if x.shape != (C.shape[0],) or x_bar.shape != x.shape:
        raise InvalidArgumentError("vector dimensions do not match C")
    Cxb = C @ x_bar
    return float(2.0 * np.real(np.vdot(Cxb, x)) - np.real(np.vdot(x_bar, Cxb)))


def solve_linear_ball_ellipsoid(b, Q, c: float, p_max: float, *, tol: float = KKT_TOL,
                                backend=None, trace: Optional[list] = None):
    """Maximize 2Re{b^H v} s.t. ||v||^2 <= 1 and v^H Q v + c <= p_max.

    Stationarity gives v = (λI + μQ)^{-1} b; the multipliers are found in the
    eigenbasis of Q by the kernel backend. Returns ``(v, SolveReport)``.
    """
    b = np.asarray(b, dtype=complex)
    Q = _require_hermitian(Q, "Q")
    if b.shape != (Q.shape[0],):
        raise InvalidArgumentError(f"b has shape {b.shape}, Q has shape {Q.shape}")
    if c > p_max:
        raise InfeasibleError(f"offset {c!r} already exceeds budget {p_max!r}")
    kern = get_backend(backend)
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        report = SolveReport(0.0, 0.0, 0, True)
        if trace is not None:
            trace.append((0, 0.0, 0.0))
        return np.zeros_like(b), report

    p = p_max - c
    w, U = np.linalg.eigh(Q)
    w = np.clip(w, 0.0, None)
    if p > 0:
        qs, ps = w / p, 1.0
    else:
        qs, ps = w, 0.0
    bt = U.conj().T @ (b / bnorm)
    b2 = np.abs(bt) ** 2
    lam, mu, iters, status = kern.ball_ellipsoid_multipliers(b2, qs, ps)

    if status == 2:
        # empty power budget: best direction inside null(Q)
        null = w <= 1e-12 * max(float(np.max(w)), 1e-300)
        vt = np.where(null, bt, 0.0)
        nrm = float(np.linalg.norm(vt))
        vt = vt / nrm if nrm > 0 else vt
        lam, mu = nrm, 0.0
    else:
        den = lam + mu * qs
        with np.errstate(divide="ignore", invalid="ignore"):
            vt = np.where(b2 > 0.0, bt / np.where(den > 0, den, 1.0), 0.0)
    if not np.all(np.isfinite(vt)):
        raise NumericalError("multiplier system produced non-finite beamformer",
                             SolveReport(math.nan, math.inf, iters, False, "numerical"))
    v = U @ vt
    nrm = float(np.linalg.norm(v))
    if nrm > 1.0:
        v = v / nrm
    qv = float(np.real(np.vdot(v, Q @ v)))
    if qv > p and qv > 0:
        v = v * math.sqrt(max(p, 0.0) / qv)
        qv = float(np.real(np.vdot(v, Q @ v)))

    # residuals of the scaled problem: b/|b|, Q/p, budget 1
    Qs = Q / p if p > 0 else Q
    nv2 = float(np.real(np.vdot(v, v)))
    pv = float(np.real(np.vdot(v, Qs @ v)))
    stat = float(np.linalg.norm(b / bnorm - lam * v - mu * (Qs @ v)))
    if status == 2:
        stat = float(np.linalg.norm(U @ np.where(w <= 1e-12 * max(float(np.max(w)), 1e-300),
                                                   bt - lam * vt, 0.0)))
    resid = max(stat, max(0.0, nv2 - 1.0), max(0.0, pv - ps),
                lam * abs(nv2 - 1.0), mu * abs(pv - ps))
    objective = float(2.0 * np.real(np.vdot(b, v)))
    converged = status in (0, 2) and resid <= tol
    report = SolveReport(objective, resid, int(iters), converged,
                         {0: "ok", 1: "iteration-cap", 2: "null-space"}[status])
    if trace is not None:
        trace.append((report.iterations, objective, resid))
    return v, report


def _as_mask(index_set, size):
    mask = np.zeros(size, dtype=bool)
    if index_set is None:
        return mask
    arr = np.asarray(index_set)
    if arr.dtype == bool:
        if arr.shape != (size,):
            raise InvalidArgumentError("boolean index mask has wrong length")
        return arr.copy()
    if arr.size:
        mask[arr.astype(int)] = True
    return mask


def solve_separable_phase(c, passive_set) -> np.ndarray:
    """Maximize Re{c^H φ} s.t. |φ_m| <= 1 on ``passive_set``, φ_m = 0 elsewhere.

    ``passive_set`` is a boolean mask or an iterable of 0-based indices. The
    optimum is unit modulus on the passive set, with arg(0) taken as 0.
    """
    c = np.asarray(c, dtype=complex)
    mask = _as_mask(passive_set, c.shape[0])
    mag = np.abs(c)
    phase = np.ones_like(c)
    nz = mag > 0
    phase[nz] = c[nz] / mag[nz]
    return np.where(mask, phase, 0.0)


def solve_psi_inner(C, d, tau: float, G, p_max: float, active_set, beta_max: float,
                    psi_bar, noise_weights, *, tol: float = KKT_TOL, backend=None,
                    trace: Optional[list] = None):
    """Concave Ψ-surrogate for fixed Dinkelbach parameter ``tau``.

    Maximizes 2Re{ψ̄^H C ψ} + 2Re{ψ^H d} - τ·Σ_m w_m |ψ_m|² subject to
    |ψ_m| <= beta_max on the active set, ψ_m = 0 elsewhere, and
    Σ_m G_m |ψ_m|² <= p_max, where w are ``noise_weights`` (σ_r²ρ_rb|h_rb,m|²
    in the IRS problem) and G is the diagonal power matrix.

    Every term except the power budget is separable. Given the power
    multiplier μ each element sits at ψ_m = r_m·e^{j arg g_m} with
    g = Cψ̄ + d and r_m = min(β, |g_m| / (τ w_m + μ G_m)); μ is bisected.
    """
    C = _require_hermitian(C, "C")
    d = np.asarray(d, dtype=complex)
    psi_bar = np.asarray(psi_bar, dtype=complex)
    M = d.shape[0]
    if C.shape != (M, M) or psi_bar.shape != (M,):
        raise InvalidArgumentError("dimension mismatch in Ψ subproblem")
    G = np.asarray(G)
    if G.ndim == 2:
        if np.max(np.abs(G - np.diag(np.diag(G)))) > 1e-12 * max(1.0, float(np.max(np.abs(G)))):
            raise InvalidArgumentError("power matrix must be diagonal")
        G = np.real(np.diag(G))
    G = np.asarray(G, dtype=float)
    w = np.broadcast_to(np.asarray(noise_weights, dtype=float), (M,))
    if tau < 0:
        raise InvalidArgumentError("tau must be non-negative")
    if p_max < 0:
        raise InfeasibleError("negative power budget")
    active = _as_mask(active_set, M)
    kern = get_backend(backend)

    g = np.where(active, C @ psi_bar + d, 0.0)
    gabs = np.abs(g)
    scale = float(np.max(gabs)) if M else 0.0
    psi = np.zeros(M, dtype=complex)
    if scale == 0.0 or not active.any():
        report = SolveReport(0.0, 0.0, 0, True)
        if trace is not None:
            trace.append((0, 0.0, 0.0))
        return psi, report

    ga = gabs[active] / scale
    curv = tau * w[active] / scale
    Ga = G[active] / p_max if p_max > 0 else G[active]
    pa = 1.0 if p_max > 0 else 0.0
    mu, iters, status = kern.psi_multiplier(ga, curv, Ga, float(beta_max), pa)
    if status == 2:
        r = np.zeros_like(ga)
    else:
        r = psi_radii(ga, curv, Ga, float(beta_max), mu)
    u = g[active] / np.where(gabs[active] > 0, gabs[active], 1.0)
    psi[active] = r * u

    # residuals of the scaled problem
    pw = float(np.sum(Ga * r * r))
    grad = ga - (curv + mu * Ga) * r
    at_box = r >= float(beta_max) * (1.0 - 1e-13)
    # on the box the radial gradient may be positive; anything else is a violation
    stat = np.where(at_box, np.minimum(grad, 0.0), grad)
    stat = np.where(ga > 0, stat, 0.0)
    resid = max(float(np.max(np.abs(stat))),
                max(0.0, pw - pa), mu * abs(pw - pa))
    objective = float(2.0 * np.real(np.vdot(g, psi)) - tau * np.sum(w * np.abs(psi) ** 2))
    converged = status in (0, 2) and resid <= tol
    report = SolveReport(objective, resid, int(iters), converged,
                         {0: "ok", 1: "iteration-cap", 2: "null-space"}[status])
    if trace is not None:
        trace.append((report.iterations, objective, resid))
    return psi, report


def dinkelbach_drive(num: Callable, den: Callable, inner: Callable, x0, *,
                     tol: float = 1e-6, max_iter: int = 100):
    """Maximize num(x)/den(x) by Dinkelbach's parametric method.

    ``inner(tau)`` must return a maximizer of num(x) - tau·den(x) over the
    feasible set, and ``x0`` must be feasible. Iterates τ ← num(x)/den(x)
    until F(τ) = num(x) - τ·den(x) <= tol. Returns ``(DinkelbachState, x)``.
    """
    x = x0
    tau = num(x) / den(x)
    taus = [tau]
    monotone = True
    for it in range(1, max_iter + 1):
        x_new = inner(tau)
        F = num(x_new) - tau * den(x_new)
        if F <= tol:
            if F < 0.0:
                # inexact inner step; the previous point is the root
                F = num(x) - tau * den(x)
            else:
                x = x_new
            return DinkelbachState(tau, F, it, True, monotone, taus), x
        new_tau = num(x_new) / den(x_new)
        if new_tau < tau - 1e-9 * max(1.0, abs(tau)):
            monotone = False
        x, tau = x_new, new_tau
        taus.append(tau)
    F = num(x) - tau * den(x)
    return DinkelbachState(tau, F, max_iter, False, monotone, taus), x

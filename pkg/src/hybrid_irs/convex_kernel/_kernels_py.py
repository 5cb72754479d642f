"""Pure-Python multiplier searches (fallback for the compiled ``_kernels``).

Ball/ellipsoid problem, in the eigenbasis of Q with b2 = |b̃|², q = eig(Q):

    v_i = b̃_i / (lam + mu q_i)
    |v|²    = sum b2 / (lam + mu q)²       (decreasing in lam and mu)
    v^H Q v = sum q b2 / (lam + mu q)²

For fixed mu, lam(mu) is 0 if the unit ball is slack, otherwise the root of
|v|² = 1, found by Newton from the left (the function is convex and
decreasing, so the iterates stay on the feasible side of the root). The
power v^H Q v along lam(mu) is non-increasing in mu, so mu is bracketed by
doubling and then bisected; the returned mu is always on the feasible side.

Ψ amplitude problem: element m takes radius min(beta, g_m / (curv_m + mu G_m))
and mu is bisected the same way on sum G r² <= p.

Status codes: 0 converged, 1 iteration cap hit, 2 empty budget.
"""
import math

import numpy as np

NEWTON_CAP = 200
DOUBLING_CAP = 2100
REL_WIDTH = 1e-15


def _lam_of_mu(b2, q, mu, counter):
    live = b2 > 0.0
    b2 = b2[live]
    q = q[live]
    shift = mu * q
    if np.all(shift > 0.0) and np.sum(b2 / shift ** 2) <= 1.0:
        return 0.0
    lam = max(0.0, float(np.max(np.sqrt(b2) - shift)))
    for _ in range(NEWTON_CAP):
        counter[0] += 1
        den = lam + shift
        f = float(np.sum(b2 / den ** 2)) - 1.0
        if f <= 0.0:
            break
        fp = -2.0 * float(np.sum(b2 / den ** 3))
        nxt = lam - f / fp
        if nxt <= lam:
            break
        lam = nxt
    return lam


def _pow(b2, q, lam, mu):
    live = (b2 > 0.0) & (q > 0.0)
    den = lam + mu * q[live]
    return float(np.sum(q[live] * b2[live] / den ** 2))


def ball_ellipsoid_multipliers(b2, q, p):
    b2 = np.asarray(b2, dtype=float)
    q = np.asarray(q, dtype=float)
    counter = [0]
    bnorm = math.sqrt(float(np.sum(b2)))
    if bnorm == 0.0:
        return 0.0, 0.0, 0, 0
    lam = _lam_of_mu(b2, q, 0.0, counter)
    if _pow(b2, q, lam, 0.0) <= p:
        return lam, 0.0, counter[0], 0
    if p <= 0.0:
        return 0.0, 0.0, counter[0], 2
    status = 0
    lo, hi = 0.0, bnorm / float(np.max(q))
    for _ in range(DOUBLING_CAP):
        counter[0] += 1
        lam = _lam_of_mu(b2, q, hi, counter)
        if _pow(b2, q, lam, hi) <= p:
            break
        lo, hi = hi, 2.0 * hi
    else:
        status = 1
    for _ in range(DOUBLING_CAP):
        if hi - lo <= REL_WIDTH * hi:
            break
        counter[0] += 1
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        lam = _lam_of_mu(b2, q, mid, counter)
        if _pow(b2, q, lam, mid) <= p:
            hi = mid
        else:
            lo = mid
    lam = _lam_of_mu(b2, q, hi, counter)
    return lam, hi, counter[0], status


def psi_radii(g, curv, G, beta, mu):
    g = np.asarray(g, dtype=float)
    den = np.asarray(curv, dtype=float) + mu * np.asarray(G, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(den > 0.0, g / np.where(den > 0.0, den, 1.0), beta)
    r = np.minimum(r, beta)
    return np.where(g > 0.0, r, 0.0)


def _psi_pow(g, curv, G, beta, mu):
    r = psi_radii(g, curv, G, beta, mu)
    return float(np.sum(np.asarray(G) * r * r))


def psi_multiplier(g, curv, G, beta, p):
    g = np.asarray(g, dtype=float)
    curv = np.asarray(curv, dtype=float)
    G = np.asarray(G, dtype=float)
    if _psi_pow(g, curv, G, beta, 0.0) <= p:
        return 0.0, 0, 0
    if p <= 0.0:
        return 0.0, 0, 2
    iters = 0
    status = 0
    lo, hi = 0.0, 1.0
    for _ in range(DOUBLING_CAP):
        iters += 1
        if _psi_pow(g, curv, G, beta, hi) <= p:
            break
        lo, hi = hi, 2.0 * hi
    else:
        status = 1
    for _ in range(DOUBLING_CAP):
        if hi - lo <= REL_WIDTH * hi:
            break
        iters += 1
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _psi_pow(g, curv, G, beta, mid) <= p:
            hi = mid
        else:
            lo = mid
    return hi, iters, status

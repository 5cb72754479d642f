# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled multiplier searches for the two constrained subproblems.

Mirrors ``_kernels_py`` operation for operation; see that module for the
math. Status codes: 0 converged, 1 iteration cap hit, 2 empty budget.
"""
from libc.math cimport sqrt, fabs

import numpy as np
cimport numpy as cnp

cnp.import_array()

DEF NEWTON_CAP = 200
DEF DOUBLING_CAP = 2100
DEF REL_WIDTH = 1e-15


cdef double _norm2(const double[:] b2, const double[:] q, double lam, double mu) nogil:
    cdef Py_ssize_t i
    cdef double s = 0.0, den
    for i in range(b2.shape[0]):
        if b2[i] > 0.0:
            den = lam + mu * q[i]
            s += b2[i] / (den * den)
    return s


cdef double _dnorm2(const double[:] b2, const double[:] q, double lam, double mu) nogil:
    cdef Py_ssize_t i
    cdef double s = 0.0, den
    for i in range(b2.shape[0]):
        if b2[i] > 0.0:
            den = lam + mu * q[i]
            s -= 2.0 * b2[i] / (den * den * den)
    return s


cdef double _pow(const double[:] b2, const double[:] q, double lam, double mu) nogil:
    cdef Py_ssize_t i
    cdef double s = 0.0, den
    for i in range(b2.shape[0]):
        if b2[i] > 0.0 and q[i] > 0.0:
            den = lam + mu * q[i]
            s += q[i] * b2[i] / (den * den)
    return s


cdef double _lam_of_mu(const double[:] b2, const double[:] q, double mu, int* iters) nogil:
    cdef Py_ssize_t i
    cdef bint free_dir = False
    cdef double lam = 0.0, t, f, fp, nxt
    cdef int it
    for i in range(b2.shape[0]):
        if b2[i] > 0.0 and mu * q[i] <= 0.0:
            free_dir = True
    if not free_dir and _norm2(b2, q, 0.0, mu) <= 1.0:
        return 0.0
    for i in range(b2.shape[0]):
        if b2[i] > 0.0:
            t = sqrt(b2[i]) - mu * q[i]
            if t > lam:
                lam = t
    for it in range(NEWTON_CAP):
        iters[0] += 1
        f = _norm2(b2, q, lam, mu) - 1.0
        if f <= 0.0:
            break
        fp = _dnorm2(b2, q, lam, mu)
        nxt = lam - f / fp
        if nxt <= lam:
            break
        lam = nxt
    return lam


def ball_ellipsoid_multipliers(const double[:] b2, const double[:] q, double p):
    """Multipliers (lam, mu) for max Re<b, v> s.t. |v|^2 <= 1, v^H Q v <= p.

    ``b2`` are the squared magnitudes of b in the eigenbasis of Q and ``q``
    the (non-negative) eigenvalues. Returns (lam, mu, iterations, status).
    """
    cdef int iters = 0
    cdef int status = 0
    cdef Py_ssize_t i
    cdef double bnorm = 0.0, qmax = 0.0, lam, lo, hi, mid
    cdef int k
    with nogil:
        for i in range(b2.shape[0]):
            bnorm += b2[i]
            if q[i] > qmax:
                qmax = q[i]
        bnorm = sqrt(bnorm)
    if bnorm == 0.0:
        return 0.0, 0.0, 0, 0
    with nogil:
        lam = _lam_of_mu(b2, q, 0.0, &iters)
    if _pow(b2, q, lam, 0.0) <= p:
        return lam, 0.0, iters, 0
    if p <= 0.0:
        return 0.0, 0.0, iters, 2
    with nogil:
        lo = 0.0
        hi = bnorm / qmax
        for k in range(DOUBLING_CAP):
            iters += 1
            lam = _lam_of_mu(b2, q, hi, &iters)
            if _pow(b2, q, lam, hi) <= p:
                break
            lo = hi
            hi *= 2.0
        else:
            status = 1
        for k in range(DOUBLING_CAP):
            if hi - lo <= REL_WIDTH * hi:
                break
            iters += 1
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            lam = _lam_of_mu(b2, q, mid, &iters)
            if _pow(b2, q, lam, mid) <= p:
                hi = mid
            else:
                lo = mid
        lam = _lam_of_mu(b2, q, hi, &iters)
    return lam, hi, iters, status


cdef double _psi_pow(const double[:] g, const double[:] curv, const double[:] G,
                     double beta, double mu) nogil:
    cdef Py_ssize_t m
    cdef double s = 0.0, den, r
    for m in range(g.shape[0]):
        if g[m] <= 0.0:
            continue
        den = curv[m] + mu * G[m]
        if den <= 0.0:
            r = beta
        else:
            r = g[m] / den
            if r > beta:
                r = beta
        s += G[m] * r * r
    return s


def psi_multiplier(const double[:] g, const double[:] curv, const double[:] G,
                   double beta, double p):
    """Power multiplier mu for the separable amplitude problem.

    Element m takes radius min(beta, g_m / (curv_m + mu G_m)); mu >= 0 is the
    smallest value with sum G_m r_m^2 <= p. Returns (mu, iterations, status).
    """
    cdef int iters = 0
    cdef int status = 0
    cdef int k
    cdef double lo, hi, mid
    if _psi_pow(g, curv, G, beta, 0.0) <= p:
        return 0.0, 0, 0
    if p <= 0.0:
        return 0.0, 0, 2
    with nogil:
        lo = 0.0
        hi = 1.0
        for k in range(DOUBLING_CAP):
            iters += 1
            if _psi_pow(g, curv, G, beta, hi) <= p:
                break
            lo = hi
            hi *= 2.0
        else:
            status = 1
        for k in range(DOUBLING_CAP):
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

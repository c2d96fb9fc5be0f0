"""Literal nested-loop transcriptions used as independent oracles.

Nothing here imports the package's assembly or simulation code; every sum
is written exactly as its display reads, index by index.
"""
from __future__ import annotations

import numpy as np


# -- partial-sum aggregates -----------------------------------------------------

def v_aggregates(u):
    """v1 = sum_k u_k, v2 = sum_k sum_{s<=k} u_s, v3 = sum_k sum_{s<=k} sum_{r<=s} u_r."""
    u = np.asarray(u, dtype=float)
    ell, n = u.shape
    v1, v2, v3 = np.zeros(n), np.zeros(n), np.zeros(n)
    for k in range(ell):
        v1 += u[k]
        for s in range(k + 1):
            v2 += u[s]
            for r in range(s + 1):
                v3 += u[r]
    return v1, v2, v3


def single_sum(u, R):
    return sum(float(x @ R @ x) for x in np.asarray(u, dtype=float))


def double_sum(u, R):
    u = np.asarray(u, dtype=float)
    total = 0.0
    for k in range(len(u)):
        for s in range(k + 1):
            total += float(u[s] @ R @ u[s])
    return total


# -- Pi(h) --------------------------------------------------------------------------

def _T(h):
    return h + 1


def _gamma(h):
    return _T(h) * _T(h + 1) / 2


def _e(i, n):
    E = np.zeros((n, 10 * n))
    E[:, (i - 1) * n:i * n] = np.eye(n)
    return E


def _col(*blocks):
    return np.vstack(blocks)


def _diag(*blocks):
    m = sum(b.shape[0] for b in blocks)
    out = np.zeros((m, m))
    r = 0
    for b in blocks:
        out[r:r + b.shape[0], r:r + b.shape[0]] = b
        r += b.shape[0]
    return out


def pi_matrix(A, Ad, h1, h2, h, P, Q1, Q2, R1, R2, S1, S2, X):
    n = A.shape[0]
    I = np.eye(n)
    e = {i: _e(i, n) for i in range(1, 11)}
    h12 = h2 - h1
    cA = (A - I) @ e[1] + Ad @ e[3]
    Om = _col(e[1], _T(h1) * e[5], _T(h - h1) * e[6] + _T(h2 - h) * e[7], _gamma(h1) * e[8])
    Om1 = _col(-cA, e[2], e[3] + e[4], _T(h1) * e[5])
    Om2 = _col(0 * e[1], e[1], e[2] + e[3], _T(h1) * e[1])
    G1 = _col(e[1] - e[2], e[1] + e[2] - 2 * e[5], e[1] - e[2] + 6 * e[5] - 6 * e[8])
    G2 = _col(e[2] - e[3], e[2] + e[3] - 2 * e[6], e[2] - e[3] + 6 * e[6] - 6 * e[9])
    G3 = _col(e[3] - e[4], e[3] + e[4] - 2 * e[7], e[3] - e[4] + 6 * e[7] - 6 * e[10])
    G4 = _col(e[2] - e[5], e[2] - 4 * e[5] + 3 * e[8])
    G5 = _col(e[3] - e[6], e[4] - e[7])
    G6 = _col(e[3] - 4 * e[6] + 3 * e[9], e[4] - 4 * e[7] + 3 * e[10])
    if h1 == 1:
        c1 = c2 = c3 = 1.0
    else:
        c1 = (h1 + 1) / (h1 - 1)
        c2 = (h1 + 1) * (h1 + 2) ** 2 / ((h1 - 1) * (h1 ** 2 + 11))
        c3 = (h1 + 2) / (h1 - 1)
    Rt1 = _diag(R1, 3 * c1 * R1, 5 * c2 * R1)
    Rt2 = _diag(R2, 3 * R2, 5 * R2)
    Sh1 = _diag(S1, 2 * c3 * S1)
    Sh2 = _diag(S2, S2)
    He = lambda M: M + M.T  # noqa: E731
    Pi0 = He(Om.T @ P @ (Om2 - Om1)) + Om1.T @ P @ Om1 - Om2.T @ P @ Om2
    Pi1 = e[1].T @ Q1 @ e[1] - e[2].T @ Q1 @ e[2] + e[2].T @ Q2 @ e[2] - e[4].T @ Q2 @ e[4]
    Pi2 = cA.T @ (h1 ** 2 * R1 + h12 ** 2 * R2 + _gamma(h1 - 1) * S1 + _gamma(h12 - 1) * S2) @ cA
    Pi3 = G1.T @ Rt1 @ G1
    G23 = _col(G2, G3)
    Pi4 = G23.T @ np.block([[Rt2, X], [X.T, Rt2]]) @ G23
    Pi5 = 2 * (h1 + 1) / h1 * G4.T @ Sh1 @ G4
    Pi6 = 2 * G5.T @ Sh2 @ G5 + 4 * G6.T @ Sh2 @ G6
    return Pi0 + Pi1 + Pi2 - Pi3 - Pi4 - Pi5 - Pi6


# -- trajectory quantities ----------------------------------------------------------
# ``x`` is a callable k -> state, ``h`` the delay at step k.

def zeta0(x, k, h, h1, h2):
    n = len(x(k))

    def s1(a, b):
        acc = np.zeros(n)
        for s in range(a, b + 1):
            acc += x(s)
        return acc

    nu1 = s1(k - h1, k) / _T(h1)
    nu2 = s1(k - h, k - h1) / _T(h - h1)
    nu3 = s1(k - h2, k - h) / _T(h2 - h)
    nu4 = np.zeros(n)
    for s in range(-h1, 1):
        for i in range(k + s, k + 1):
            nu4 += x(i)
    nu4 /= _gamma(h1)
    nu5 = np.zeros(n)
    for s in range(-h, -h1 + 1):
        for i in range(k + s, k - h1 + 1):
            nu5 += x(i)
    nu5 /= _gamma(h - h1)
    nu6 = np.zeros(n)
    for s in range(-h2, -h + 1):
        for i in range(k + s, k - h + 1):
            nu6 += x(i)
    nu6 /= _gamma(h2 - h)
    return np.concatenate([x(k), x(k - h1), x(k - h), x(k - h2), nu1, nu2, nu3, nu4, nu5, nu6])


def lkf(x, k, h1, h2, P, Q1, Q2, R1, R2, S1, S2):
    n = len(x(k))
    h12 = h2 - h1
    dx = lambda i: x(i + 1) - x(i)  # noqa: E731
    q = lambda v, M: float(v @ M @ v)  # noqa: E731
    xt2, xt3, xt4 = np.zeros(n), np.zeros(n), np.zeros(n)
    for s in range(k - h1, k):
        xt2 += x(s)
    for s in range(k - h2, k - h1):
        xt3 += x(s)
    for s in range(-h1, 0):
        for i in range(k + s, k):
            xt4 += x(i)
    xt = np.concatenate([x(k), xt2, xt3, xt4])
    V = q(xt, P)
    for s in range(k - h1, k):
        V += q(x(s), Q1)
    for s in range(k - h2, k - h1):
        V += q(x(s), Q2)
    for s in range(-h1, 0):
        for i in range(k + s, k):
            V += h1 * q(dx(i), R1)
    for s in range(-h2, -h1):
        for i in range(k + s, k):
            V += h12 * q(dx(i), R2)
    for s in range(-h1, 0):
        for i in range(-h1, s + 1):
            for j in range(k + i, k):
                V += q(dx(j), S1)
    for s in range(-h2, -h1):
        for i in range(-h2, s + 1):
            for j in range(k + i, k):
                V += q(dx(j), S2)
    return V

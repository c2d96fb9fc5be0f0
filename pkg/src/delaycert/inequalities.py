"""Discrete Jensen inequalities and their refinements.

For a sequence u_a, ..., u_b in R^n (length l = b - a + 1) and R > 0:

* single sum:  sum_k u_k' R u_k  >=  (1/l) v1' R v1 + (refinement)
* double sum:  sum_k sum_{s<=k} u_s' R u_s  >=  2/(l(l+1)) v2' R v2 + (refinement)

where v1, v2, v3 are the first, second and third order partial-sum
aggregates of u.  The functions below return the Jensen gaps and the
refined lower bounds on those gaps so that each inequality can be checked
numerically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SYM_ATOL = 1e-12
PD_ATOL = 1e-10
_FSUM_THRESHOLD = 64


@dataclass(frozen=True)
class FiniteSequence:
    """Vectors u_a, ..., u_b stored row-wise in ``values`` (shape l x n)."""

    values: np.ndarray
    start: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError(f"need a nonempty l x n array of vectors; got shape {np.shape(self.values)}")
        object.__setattr__(self, "values", v)

    @property
    def end(self) -> int:
        return self.start + len(self) - 1

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class AggregateVectors:
    v1: np.ndarray
    v2: np.ndarray
    v3: np.ndarray
    zeta1: np.ndarray
    zeta2: np.ndarray
    zeta4: np.ndarray


def as_sequence(u) -> FiniteSequence:
    return u if isinstance(u, FiniteSequence) else FiniteSequence(u)


def as_spd(R, n: int | None = None) -> np.ndarray:
    """Validate a symmetric positive definite weight and return it as an array."""
    R = np.atleast_2d(np.asarray(R, dtype=float))
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ValueError(f"R must be square; got shape {R.shape}")
    if n is not None and R.shape[0] != n:
        raise ValueError(f"R is {R.shape[0]}x{R.shape[0]} but the sequence has dimension {n}")
    if np.max(np.abs(R - R.T)) > SYM_ATOL:
        raise ValueError("R is not symmetric")
    if np.linalg.eigvalsh(R)[0] <= PD_ATOL:
        raise ValueError("R is not positive definite")
    return R


def _colsum(u: np.ndarray) -> np.ndarray:
    if u.shape[0] > _FSUM_THRESHOLD:
        return np.array([math.fsum(col) for col in u.T])
    return u.sum(axis=0)


def _scalar_sum(q: np.ndarray) -> float:
    return math.fsum(q) if q.shape[0] > _FSUM_THRESHOLD else float(q.sum())


def _quad(x: np.ndarray, R: np.ndarray) -> float:
    return float(x @ R @ x)


def aggregate(u) -> AggregateVectors:
    u = as_sequence(u)
    vals = u.values
    ell = len(u)
    partial = np.cumsum(vals, axis=0)          # sum_{s=a}^{k} u_s
    v1 = partial[-1].copy() if ell <= _FSUM_THRESHOLD else _colsum(vals)
    v2 = _colsum(partial)
    v3 = _colsum(np.cumsum(partial, axis=0))
    zeta1 = v1 - 2.0 / (ell + 1) * v2
    zeta2 = v1 - 6.0 / (ell + 1) * v2 + 12.0 / ((ell + 1) * (ell + 2)) * v3
    zeta4 = v2 - 3.0 / (ell + 2) * v3
    if ell == 1:
        zeta1 = zeta2 = zeta4 = np.zeros_like(v1)
    return AggregateVectors(v1, v2, v3, zeta1, zeta2, zeta4)


def _quads(u: FiniteSequence, R: np.ndarray) -> np.ndarray:
    return np.einsum("ki,ij,kj->k", u.values, R, u.values)


def single_sum(u, R) -> float:
    """sum_k u_k' R u_k."""
    u = as_sequence(u)
    return _scalar_sum(_quads(u, as_spd(R, u.dim)))


def double_sum(u, R) -> float:
    """sum_{k=a}^{b} sum_{s=a}^{k} u_s' R u_s; term s appears b - s + 1 times."""
    u = as_sequence(u)
    q = _quads(u, as_spd(R, u.dim))
    weights = np.arange(len(u), 0, -1, dtype=float)
    return _scalar_sum(weights * q)


def jensen_single_rhs(u, R) -> float:
    u = as_sequence(u)
    R = as_spd(R, u.dim)
    return _quad(aggregate(u).v1, R) / len(u)


def jensen_double_rhs(u, R) -> float:
    u = as_sequence(u)
    R = as_spd(R, u.dim)
    ell = len(u)
    return 2.0 / (ell * (ell + 1)) * _quad(aggregate(u).v2, R)


def jensen_single_gap(u, R) -> float:
    return single_sum(u, R) - jensen_single_rhs(u, R)


def jensen_double_gap(u, R) -> float:
    return double_sum(u, R) - jensen_double_rhs(u, R)


def single_coeffs(ell: int) -> tuple[float, float]:
    """Weights on zeta1' R zeta1 and zeta2' R zeta2 in the refined single-sum bound."""
    if ell < 2:
        return 0.0, 0.0
    c1 = 3.0 * (ell + 1) / (ell * (ell - 1))
    c2 = 5.0 * (ell + 1) * (ell + 2) ** 2 / (ell * (ell - 1) * (ell ** 2 + 11))
    return c1, c2


def double_coeff(ell: int) -> float:
    """Weight on zeta4' R zeta4 in the refined double-sum bound."""
    if ell < 2:
        return 0.0
    return 16.0 * (ell + 2) / (ell * (ell ** 2 - 1))


def refined_single_bound(u, R) -> float:
    """Lower bound on the single-sum Jensen gap; exactly 0 for l = 1."""
    u = as_sequence(u)
    R = as_spd(R, u.dim)
    c1, c2 = single_coeffs(len(u))
    if c1 == 0.0:
        return 0.0
    agg = aggregate(u)
    return c1 * _quad(agg.zeta1, R) + c2 * _quad(agg.zeta2, R)


def refined_double_bound(u, R) -> float:
    """Lower bound on the double-sum Jensen gap; exactly 0 for l = 1."""
    u = as_sequence(u)
    R = as_spd(R, u.dim)
    c = double_coeff(len(u))
    if c == 0.0:
        return 0.0
    return c * _quad(aggregate(u).zeta4, R)


def corollary_single_bound(u, R) -> float:
    """(1/l)(v1'Rv1 + 3 zeta1'Rzeta1 + 5 zeta2'Rzeta2), a lower bound on sum u'Ru."""
    u = as_sequence(u)
    R = as_spd(R, u.dim)
    agg = aggregate(u)
    return (_quad(agg.v1, R) + 3 * _quad(agg.zeta1, R) + 5 * _quad(agg.zeta2, R)) / len(u)


def corollary_double_bound(u, R) -> float:
    """2/(l(l+1)) (v2'Rv2 + 8 zeta4'Rzeta4), a lower bound on the double sum."""
    u = as_sequence(u)
    R = as_spd(R, u.dim)
    ell = len(u)
    agg = aggregate(u)
    return 2.0 / (ell * (ell + 1)) * (_quad(agg.v2, R) + 8 * _quad(agg.zeta4, R))


def reorder_identity_check(v) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of sum_s sum_{i<=s} v_i = (l+1) sum_s v_s - sum_s sum_{i>=s} v_i."""
    v = as_sequence(v)
    vals = v.values
    ell = len(v)
    lhs = _colsum(np.cumsum(vals, axis=0))
    tails = np.cumsum(vals[::-1], axis=0)      # sum_{i=s}^{b} v_i, reversed order
    rhs = (ell + 1) * _colsum(vals) - _colsum(tails)
    return lhs, rhs

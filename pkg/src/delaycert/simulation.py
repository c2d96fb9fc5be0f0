"""Trajectories of the delayed recurrence, the augmented vector and the functional V.

States are stored in one array with an offset, so ``x(k)`` for
k = -h2 .. K is ``traj.states[k + h2]``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .assembly import DelaySystem, LKFVariables, T, assemble_pi, gamma

CONSTANT = "constant"
UNIFORM = "uniform-random"
SINUSOIDAL = "sinusoidal-pattern"
EXPLICIT = "explicit-list"
DELAY_KINDS = (CONSTANT, UNIFORM, SINUSOIDAL, EXPLICIT)


class HistoryError(ValueError):
    """The requested step lacks the history window it needs."""


@dataclass(frozen=True)
class DelaySequence:
    kind: str
    h1: int
    h2: int
    value: int | None = None          # constant
    seed: int | None = None           # uniform-random
    values: tuple[int, ...] = ()      # explicit-list

    def __post_init__(self):
        if self.kind not in DELAY_KINDS:
            raise ValueError(f"delay kind must be one of {DELAY_KINDS}; got {self.kind!r}")
        if not 1 <= self.h1 <= self.h2:
            raise ValueError(f"need 1 <= h1 <= h2; got h1={self.h1}, h2={self.h2}")
        if self.kind == CONSTANT and self.value is not None and not self.h1 <= self.value <= self.h2:
            raise ValueError(f"constant delay {self.value} outside [{self.h1}, {self.h2}]")
        bad = [v for v in self.values if not self.h1 <= v <= self.h2]
        if bad:
            raise ValueError(f"explicit delays {bad[:5]} outside [{self.h1}, {self.h2}]")

    def generate(self, steps: int) -> np.ndarray:
        k = np.arange(steps)
        if self.kind == CONSTANT:
            out = np.full(steps, self.h1 if self.value is None else self.value)
        elif self.kind == UNIFORM:
            out = np.random.default_rng(self.seed).integers(self.h1, self.h2 + 1, size=steps)
        elif self.kind == SINUSOIDAL:
            # |sin(k pi/2)| is 0 or 1 at integers; rounding only removes float residue
            out = self.h1 + np.rint((self.h2 - self.h1) * np.abs(np.sin(k * np.pi / 2))).astype(int)
        else:
            if len(self.values) < steps:
                raise ValueError(f"explicit list has {len(self.values)} delays; {steps} steps requested")
            out = np.array(self.values[:steps])
        return out.astype(int)


@dataclass
class Trajectory:
    system: DelaySystem
    states: np.ndarray        # (h2 + 1 + K, n)
    delays: np.ndarray        # (K,)

    @property
    def steps(self) -> int:
        return len(self.delays)

    @property
    def offset(self) -> int:
        return self.system.h2

    def x(self, k: int) -> np.ndarray:
        if not -self.offset <= k <= self.steps:
            raise HistoryError(f"x({k}) is outside the simulated range [-{self.offset}, {self.steps}]")
        return self.states[k + self.offset]

    def window(self, a: int, b: int) -> np.ndarray:
        """Rows x(a), ..., x(b)."""
        if a < -self.offset or b > self.steps:
            raise HistoryError(f"window [{a}, {b}] needs states outside [-{self.offset}, {self.steps}]")
        return self.states[a + self.offset:b + self.offset + 1]

    def to_csv(self, values: np.ndarray | None = None) -> str:
        """Rows k = 0..K with columns k, h_k, x_1..x_n and optionally V."""
        n = self.system.n
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "h_k"] + [f"x_{i + 1}" for i in range(n)] + (["V"] if values is not None else []))
        for k in range(self.steps + 1):
            row = [k, self.delays[k] if k < self.steps else ""]
            row += ["%.17g" % x for x in self.x(k)]
            if values is not None:
                row.append("%.17g" % values[k])
            w.writerow(row)
        return buf.getvalue()


def constant_history(x0, h2: int) -> np.ndarray:
    """phi(k) = x0 for k = -h2..0."""
    x0 = np.asarray(x0, dtype=float).ravel()
    return np.tile(x0, (h2 + 1, 1))


def simulate(system: DelaySystem, delays: DelaySequence | np.ndarray, phi, steps: int) -> Trajectory:
    """Roll out x(k+1) = A x(k) + Ad x(k - h(k)) for k = 0..steps-1.

    ``phi`` holds x(-h2), ..., x(0) row-wise.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    n, h1, h2 = system.n, system.h1, system.h2
    phi = np.atleast_2d(np.asarray(phi, dtype=float))
    if phi.shape != (h2 + 1, n):
        raise ValueError(f"initial segment must have h2+1 = {h2 + 1} rows of length {n}; got shape {phi.shape}")
    hs = delays.generate(steps) if isinstance(delays, DelaySequence) else np.asarray(delays, dtype=int)
    if hs.shape != (steps,):
        raise ValueError(f"need {steps} delays; got {hs.shape}")
    if hs.min() < h1 or hs.max() > h2:
        raise ValueError(f"delays must lie in [{h1}, {h2}]")
    X = np.empty((h2 + 1 + steps, n))
    X[:h2 + 1] = phi
    A, Ad = system.A, system.Ad
    for k in range(steps):
        i = k + h2
        X[i + 1] = A @ X[i] + Ad @ X[i - hs[k]]
    return Trajectory(system, X, hs)


def converged_at(traj: Trajectory, tol: float = 1e-3, window: int = 100) -> int | None:
    """First k such that ||x(j)||_inf < tol for j = k .. k+window-1, else None."""
    norms = np.max(np.abs(traj.window(0, traj.steps)), axis=1)
    run = 0
    for k, small in enumerate(norms < tol):
        run = run + 1 if small else 0
        if run == window:
            return k - window + 1
    return None


# -- augmented vector ------------------------------------------------------------

def _linear_sum(traj: Trajectory, a: int, b: int) -> np.ndarray:
    """sum_{i=a}^{b} (i - a + 1) x(i)."""
    w = np.arange(1, b - a + 2, dtype=float)
    return w @ traj.window(a, b)


def augmented_state(traj: Trajectory, k: int) -> np.ndarray:
    """zeta0(k) using the delay h(k) actually applied at step k."""
    if not 0 <= k < traj.steps:
        raise HistoryError(f"zeta0({k}) needs h({k}); delays exist for k in [0, {traj.steps - 1}]")
    s = traj.system
    h1, h2, h = s.h1, s.h2, int(traj.delays[k])
    nu1 = traj.window(k - h1, k).sum(axis=0) / T(h1)
    nu2 = traj.window(k - h, k - h1).sum(axis=0) / T(h - h1)
    nu3 = traj.window(k - h2, k - h).sum(axis=0) / T(h2 - h)
    nu4 = _linear_sum(traj, k - h1, k) / gamma(h1)
    nu5 = _linear_sum(traj, k - h, k - h1) / gamma(h - h1)
    nu6 = _linear_sum(traj, k - h2, k - h) / gamma(h2 - h)
    return np.concatenate([traj.x(k), traj.x(k - h1), traj.x(k - h), traj.x(k - h2),
                           nu1, nu2, nu3, nu4, nu5, nu6])


# -- functional ---------------------------------------------------------------------

@lru_cache(maxsize=64)
def _lkf_weights(h1: int, h2: int):
    """Multiplicities of the terms at offset j = i - k (j = -h2..-1) in V.

    Returned arrays are indexed by j + h2.
    """
    js = np.arange(-h2, 0)
    r1 = np.where(js >= -h1, js + h1 + 1, 0)
    r2 = np.minimum(js, -h1 - 1) + h2 + 1
    s1 = np.array([sum(-i for i in range(-h1, j + 1)) if j >= -h1 else 0 for j in js])
    s2 = np.array([sum(-h1 - i for i in range(-h2, min(j, -h1 - 1) + 1)) for j in js])
    return r1.astype(float), r2.astype(float), s1.astype(float), s2.astype(float)


def _forms(M: np.ndarray, rows: np.ndarray) -> np.ndarray:
    return np.einsum("ki,ij,kj->k", rows, M, rows)


def lkf_value(traj: Trajectory, v: LKFVariables, k: int) -> float:
    """V evaluated on the segment x(k-h2), ..., x(k)."""
    s = traj.system
    h1, h2, h12 = s.h1, s.h2, s.h12
    if not 0 <= k <= traj.steps:
        raise HistoryError(f"V({k}) needs x(k-h2..k); available k are 0..{traj.steps}")
    seg = traj.window(k - h2, k)               # rows j = -h2..0
    past = seg[:-1]                             # j = -h2..-1
    dx = np.diff(seg, axis=0)                   # dx(k+j) for j = -h2..-1
    r1, r2, s1, s2 = _lkf_weights(h1, h2)
    xt = np.concatenate([seg[-1], past[h2 - h1:].sum(axis=0), past[:h2 - h1].sum(axis=0),
                         r1 @ past])
    val = xt @ v.P @ xt
    val += _forms(v.Q1, past[h2 - h1:]).sum() + _forms(v.Q2, past[:h2 - h1]).sum()
    val += h1 * r1 @ _forms(v.R1, dx) + h12 * r2 @ _forms(v.R2, dx)
    val += s1 @ _forms(v.S1, dx) + s2 @ _forms(v.S2, dx)
    return float(val)


def lkf_values(traj: Trajectory, v: LKFVariables) -> np.ndarray:
    return np.array([lkf_value(traj, v, k) for k in range(traj.steps + 1)])


@dataclass(frozen=True)
class ChainCheck:
    dv_exact: float
    quad_bound: float

    def holds(self, rtol: float = 1e-8) -> bool:
        return self.dv_exact <= self.quad_bound + rtol * max(1.0, abs(self.dv_exact))


def delta_v_chain_check(traj: Trajectory, v: LKFVariables, k: int) -> ChainCheck:
    """V(k+1) - V(k) next to zeta0(k)' Pi(h(k)) zeta0(k)."""
    dv = lkf_value(traj, v, k + 1) - lkf_value(traj, v, k)
    z = augmented_state(traj, k)
    Pi = assemble_pi(traj.system, v, int(traj.delays[k]))
    return ChainCheck(dv, float(z @ Pi @ z))


def relative_residual(traj: Trajectory) -> float:
    """max_k |x(k+1) - A x(k) - Ad x(k-h(k))| / max(1, |x(k+1)|)."""
    s = traj.system
    worst = 0.0
    for k in range(traj.steps):
        pred = s.A @ traj.x(k) + s.Ad @ traj.x(k - int(traj.delays[k]))
        nxt = traj.x(k + 1)
        worst = max(worst, float(np.max(np.abs(nxt - pred))) / max(1.0, float(np.max(np.abs(nxt)))))
    return worst if math.isfinite(worst) else float("inf")

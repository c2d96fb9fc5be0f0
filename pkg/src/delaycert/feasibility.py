"""Posing, solving and independently verifying the stability LMIs.

The conditions are homogeneous in the decision matrices, so they are solved
as a margin maximisation: find the largest t such that every positivity
block is >= t*I and Pi(h1), Pi(h2) <= -t*I, under a trace normalisation.
A point is accepted by the solver when t >= eps.

Two changes of coordinates keep the conic solver well conditioned; both
are congruences, so they never change the feasibility answer:

* a state similarity z = T x that balances A + Ad (from its discrete
  Lyapunov solution), and
* optionally, a rescaling around a reference certificate, which turns the
  reference into the identity in every block.  The frontier search feeds the
  last verified certificate forward this way.

Whatever the solver returns is mapped back to the original coordinates and
checked from scratch by :func:`verify_certificate`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import sdp
from .assembly import (BLOCKDIAG, FULL, X_STRUCTURES, DelaySystem, LKFVariables,
                       assemble_pi, assemble_rcc)

log = logging.getLogger(__name__)

EPS = 1e-6
# a computed eigenvalue is exact for a perturbation of norm ~ m*u*|M|; demand
# the margin clear that bound by three orders, measured against |trace M|
SAFETY = 1e3
RCC_TOL = 1e-8

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
NUMERICAL_FAILURE = "numerical-failure"

_POS_NAMES = ("P", "Q1", "Q2", "R1", "R2", "S1", "S2")


@dataclass(frozen=True)
class FeasibilityProblem:
    system: DelaySystem
    x_structure: str = FULL
    eps: float = EPS
    normalize: bool = True

    def __post_init__(self):
        if self.x_structure not in X_STRUCTURES:
            raise ValueError(f"x_structure must be one of {X_STRUCTURES}")
        if not self.eps > 0:
            raise ValueError("eps must be positive")

    @property
    def n_vars(self) -> int:
        return LKFVariables.count(self.system.n, self.x_structure)

    @property
    def delay_points(self) -> tuple[int, ...]:
        """Delays at which Pi(h) is imposed; a single point when h1 == h2."""
        s = self.system
        return (s.h1,) if s.h1 == s.h2 else (s.h1, s.h2)


def pose(system: DelaySystem, x_structure: str = FULL, eps: float = EPS) -> FeasibilityProblem:
    return FeasibilityProblem(system, x_structure, eps)


# -- verification --------------------------------------------------------------

def _equilibrated_extreme(M: np.ndarray, lowest: bool) -> float:
    """Extreme eigenvalue of D M D with D = diag(|M_ii|)^(-1/2).

    The congruence preserves inertia (Sylvester), so the sign answers the same
    definiteness question as M itself while staying meaningful for graded
    matrices.  Returns a value <= 0 (lowest) or >= 0 (highest) when some
    diagonal entry already rules definiteness out.
    """
    d = np.diag(M).copy()
    if lowest and np.min(d) <= 0:
        return float(np.min(d) / max(np.max(np.abs(d)), 1e-300))
    if not lowest and np.max(d) >= 0:
        return float(np.max(d) / max(np.max(np.abs(d)), 1e-300))
    s = 1.0 / np.sqrt(np.abs(d))
    w = np.linalg.eigvalsh(s[:, None] * M * s[None, :])
    return float(w[0] if lowest else w[-1])


@dataclass(frozen=True)
class Margins:
    """Raw extreme eigenvalues plus their equilibrated counterparts."""

    pos: dict[str, float]
    rcc_min: float
    pi_h1_max: float
    pi_h2_max: float
    scaled: dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {f"min_eig_{k}": v for k, v in self.pos.items()}
        out["min_eig_rcc"] = self.rcc_min
        out["max_eig_pi_h1"] = self.pi_h1_max
        out["max_eig_pi_h2"] = self.pi_h2_max
        out["scaled"] = dict(self.scaled)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "Margins":
        pos = {k[len("min_eig_"):]: float(v) for k, v in d.items()
               if k.startswith("min_eig_") and k != "min_eig_rcc"}
        return cls(pos, float(d["min_eig_rcc"]), float(d["max_eig_pi_h1"]),
                   float(d["max_eig_pi_h2"]), {k: float(v) for k, v in d.get("scaled", {}).items()})


def threshold(M: np.ndarray) -> float:
    """Smallest eigenvalue magnitude whose sign is trusted for M."""
    m = M.shape[0]
    return SAFETY * (m + 1) * np.finfo(float).eps * abs(np.trace(M))


def verify_certificate(system: DelaySystem, v: LKFVariables) -> tuple[Margins, bool]:
    """Recompute every LMI from the decision matrices and check its sign."""
    if v.n != system.n:
        raise ValueError(f"certificate has n={v.n}, system has n={system.n}")
    pos, scaled = {}, {}
    for name in _POS_NAMES:
        M = getattr(v, name)
        pos[name] = float(np.linalg.eigvalsh(M)[0])
        scaled[name] = _equilibrated_extreme(M, lowest=True)
    rcc = assemble_rcc(v)
    pi1 = assemble_pi(system, v, system.h1)
    pi2 = assemble_pi(system, v, system.h2)
    scaled["rcc"] = _equilibrated_extreme(rcc, lowest=True) if np.any(np.diag(rcc) > 0) else 0.0
    scaled["pi_h1"] = _equilibrated_extreme(pi1, lowest=False)
    scaled["pi_h2"] = _equilibrated_extreme(pi2, lowest=False)
    margins = Margins(pos, float(np.linalg.eigvalsh(rcc)[0]), float(np.linalg.eigvalsh(pi1)[-1]),
                      float(np.linalg.eigvalsh(pi2)[-1]), scaled)

    ok = all(pos[k] > threshold(getattr(v, k)) for k in _POS_NAMES)
    ok = ok and scaled["rcc"] >= -RCC_TOL
    ok = ok and margins.pi_h1_max < -threshold(pi1) and margins.pi_h2_max < -threshold(pi2)
    return margins, bool(ok)


# -- conditioning frames -------------------------------------------------------

def _sym_sqrt(M: np.ndarray, rel_floor: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """|M|^(1/2) and |M|^(-1/2) with eigenvalue magnitudes floored."""
    w, V = np.linalg.eigh(0.5 * (M + M.T))
    a = np.abs(w)
    a = np.maximum(a, rel_floor * max(a.max(), 1e-300))
    return (V * np.sqrt(a)) @ V.T, (V / np.sqrt(a)) @ V.T


def balancing_transform(system: DelaySystem) -> np.ndarray:
    """T with z = T x, from the Lyapunov solution of A + Ad; identity if not Schur."""
    F = system.A + system.Ad
    n = system.n
    if np.max(np.abs(np.linalg.eigvals(F))) >= 1.0:
        return np.eye(n)
    try:
        P0 = sla.solve_discrete_lyapunov(F.T, np.eye(n))
    except (np.linalg.LinAlgError, ValueError):
        return np.eye(n)
    if not np.all(np.isfinite(P0)) or np.linalg.eigvalsh(0.5 * (P0 + P0.T))[0] <= 0:
        return np.eye(n)
    T, _ = _sym_sqrt(P0)
    return T / np.max(np.linalg.eigvalsh(T))


def congruence(v: LKFVariables, G: np.ndarray | dict, GP: np.ndarray | None = None,
               GX: np.ndarray | None = None) -> LKFVariables:
    """Apply M -> G M G' blockwise.  ``G`` may be one n x n matrix or a dict per name."""
    n = v.n
    per = G if isinstance(G, dict) else {name: G for name in _POS_NAMES[1:]}
    if GP is None:
        GP = np.kron(np.eye(4), G) if not isinstance(G, dict) else G["P"]
    if GX is None:
        g = G if not isinstance(G, dict) else G["R2"]
        GX = np.kron(np.eye(3), g)
    mats = {name: per[name] @ getattr(v, name) @ per[name].T for name in _POS_NAMES[1:]}
    mats = {k: 0.5 * (m + m.T) for k, m in mats.items()}
    P = GP @ v.P @ GP.T
    X = GX @ v.X @ GX.T
    if v.x_structure == BLOCKDIAG:
        mask = np.kron(np.eye(3), np.ones((n, n)))
        X = X * mask
    return LKFVariables(0.5 * (P + P.T), X=X, x_structure=v.x_structure, **mats)


def to_state_frame(v: LKFVariables, T: np.ndarray) -> LKFVariables:
    """Variables for z = T x coordinates (inverse of :func:`from_state_frame`)."""
    return congruence(v, np.linalg.inv(T).T)


def from_state_frame(v: LKFVariables, T: np.ndarray) -> LKFVariables:
    return congruence(v, T.T)


@dataclass
class _Frame:
    system: DelaySystem                 # in z-coordinates
    T: np.ndarray
    factors: dict | None = None         # per-block square roots of the reference
    weights: tuple = ()                 # congruences applied to Pi(h) blocks

    def to_z(self, scaled: LKFVariables) -> LKFVariables:
        if self.factors is None:
            return scaled
        return congruence(scaled, self.factors)

    def to_x(self, scaled: LKFVariables) -> LKFVariables:
        return from_state_frame(self.to_z(scaled), self.T)


def _make_frame(problem: FeasibilityProblem, reference: LKFVariables | None) -> _Frame:
    s = problem.system
    T = balancing_transform(s)
    Ti = np.linalg.inv(T)
    zsys = DelaySystem(T @ s.A @ Ti, T @ s.Ad @ Ti, s.h1, s.h2)
    if reference is None:
        return _Frame(zsys, T, None, tuple(np.eye(10 * s.n) for _ in problem.delay_points))
    ref = to_state_frame(reference, T)
    factors = {name: _sym_sqrt(getattr(ref, name))[0] for name in _POS_NAMES}
    weights = tuple(_sym_sqrt(assemble_pi(zsys, ref, h))[1] for h in problem.delay_points)
    return _Frame(zsys, T, factors, weights)


def _build_lmi(problem: FeasibilityProblem, frame: _Frame) -> sdp.LMIProblem:
    n, xs = problem.system.n, problem.x_structure
    p = problem.n_vars
    unit = [LKFVariables.from_vector(np.eye(p)[j], n, xs) for j in range(p)]
    zvars = [frame.to_z(u) for u in unit]
    blocks = [sdp.LMIBlock(name, np.stack([getattr(u, name) for u in unit])) for name in _POS_NAMES]
    blocks.append(sdp.LMIBlock("rcc", np.stack([assemble_rcc(u) for u in unit]), margin=False))
    for h, W in zip(problem.delay_points, frame.weights):
        blocks.append(sdp.LMIBlock(f"pi_{h}", np.stack([W @ assemble_pi(frame.system, z, h) @ W.T
                                                        for z in zvars]), sense="neg"))
    trace = np.array([sum(np.trace(getattr(u, name)) for name in _POS_NAMES) for u in unit])
    total_dim = 10 * n
    return sdp.LMIProblem(p, blocks, trace, float(total_dim))


# -- certificates --------------------------------------------------------------

@dataclass(frozen=True)
class StabilityCertificate:
    system: DelaySystem
    vars: LKFVariables | None
    margins: Margins | None
    verified: bool
    solver_status: str
    solver_margin: float = float("nan")
    name: str = ""

    @property
    def x_structure(self) -> str:
        return self.vars.x_structure if self.vars is not None else ""


def _attempt(problem: FeasibilityProblem, reference, solver):
    frame = _make_frame(problem, reference)
    res = sdp.solve_lmi(_build_lmi(problem, frame), solver)
    if res.status != sdp.SOLVED:
        return res, None
    scaled = LKFVariables.from_vector(res.theta, problem.system.n, problem.x_structure)
    return res, frame.to_x(scaled)


def solve(problem: FeasibilityProblem, reference: LKFVariables | None = None,
          solver: str | None = None, polish: bool = True, name: str = "") -> StabilityCertificate:
    """Search for decision matrices satisfying the LMIs and verify them.

    ``reference`` is an earlier certificate (any delay bounds, same n and
    X structure) used to rescale the problem; without it only the state
    balancing is applied.
    """
    system = problem.system
    if reference is not None and (reference.n != system.n or reference.x_structure != problem.x_structure):
        reference = None
    refs = [reference, None] if reference is not None else [None]
    best = None
    for ref in refs:
        res, cand = _attempt(problem, ref, solver)
        if cand is None:
            best = best or (res, None)
            continue
        margins, ok = verify_certificate(system, cand)
        if not ok and polish and res.margin >= problem.eps:
            res2, cand2 = _attempt(problem, cand, solver)
            if cand2 is not None:
                m2, ok2 = verify_certificate(system, cand2)
                if ok2 or res2.margin > res.margin:
                    res, cand, margins, ok = res2, cand2, m2, ok2
        if best is None or best[1] is None or ok or res.margin > best[0].margin:
            best = (res, cand, margins, ok)
        if ok:
            break
    res, cand = best[0], best[1]
    if cand is None:
        status = INFEASIBLE if res.status == sdp.INFEASIBLE else NUMERICAL_FAILURE
        return StabilityCertificate(system, None, None, False, status, name=name)
    margins, ok = best[2], best[3]
    status = FEASIBLE if res.margin >= problem.eps else INFEASIBLE
    if status == FEASIBLE and not ok:
        log.warning("solver margin %.3g but verification failed at h=(%d,%d)", res.margin, system.h1, system.h2)
    return StabilityCertificate(system, cand, margins, ok, status, res.margin, name)


def check(system: DelaySystem, x_structure: str = FULL, reference=None, **kw) -> StabilityCertificate:
    return solve(pose(system, x_structure), reference=reference, **kw)


def reverify(cert: StabilityCertificate) -> StabilityCertificate:
    if cert.vars is None:
        return cert
    margins, ok = verify_certificate(cert.system, cert.vars)
    return StabilityCertificate(cert.system, cert.vars, margins, ok, cert.solver_status,
                                cert.solver_margin, cert.name)

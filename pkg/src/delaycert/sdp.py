"""Narrow adapter between standard-form LMI data and a conic solver.

A problem is a list of matrix blocks that are linear in a decision vector
``theta``::

    sum_j theta_j * F[j]   >= t*I   (sense "pos", margin=True)
    sum_j theta_j * F[j]   <= -t*I  (sense "neg", margin=True)
    sum_j theta_j * F[j]   >= 0     (margin=False)

plus one normalisation ``c @ theta == d``.  The solver maximises the common
margin t (optionally capped at ``t_max``).  Only numbers cross this boundary, so the
backend can be swapped without touching the assembly code.
"""
from __future__ import annotations

import logging
import os
import warnings
from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np

log = logging.getLogger(__name__)

DEFAULT_SOLVER = os.environ.get("DELAYCERT_SOLVER", "CLARABEL")
VERBOSE = os.environ.get("DELAYCERT_SOLVER_VERBOSE", "") not in ("", "0")

SOLVED = "solved"
INFEASIBLE = "infeasible"
FAILED = "numerical-failure"


@dataclass
class LMIBlock:
    name: str
    basis: np.ndarray          # shape (p, m, m), each slice symmetric
    sense: str = "pos"         # "pos" or "neg"
    margin: bool = True

    @property
    def size(self) -> int:
        return self.basis.shape[1]


@dataclass
class LMIProblem:
    n_vars: int
    blocks: list[LMIBlock]
    norm_coeffs: np.ndarray
    norm_value: float
    t_max: float | None = None


@dataclass
class LMIResult:
    status: str
    theta: np.ndarray | None = None
    margin: float = float("nan")
    raw_status: str = ""
    info: dict = field(default_factory=dict)


def _affine(theta, basis: np.ndarray):
    p, m, _ = basis.shape
    F = basis.reshape(p, m * m).T
    M = cp.reshape(F @ theta, (m, m), order="C")
    return 0.5 * (M + M.T)


def solve_lmi(problem: LMIProblem, solver: str | None = None) -> LMIResult:
    solver = solver or DEFAULT_SOLVER
    theta = cp.Variable(problem.n_vars)
    t = cp.Variable()
    cons = [problem.norm_coeffs @ theta == problem.norm_value]
    if problem.t_max is not None:
        cons.append(t <= problem.t_max)
    for blk in problem.blocks:
        M = _affine(theta, blk.basis)
        I = np.eye(blk.size)
        if blk.sense == "pos":
            cons.append(M >> (t * I if blk.margin else 0 * I))
        else:
            cons.append(M << (-t * I if blk.margin else 0 * I))
    prob = cp.Problem(cp.Maximize(t), cons)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            prob.solve(solver=solver, verbose=VERBOSE)
    except cp.error.SolverError as exc:
        log.debug("solver %s failed: %s", solver, exc)
        return LMIResult(FAILED, raw_status=str(exc))
    status = prob.status
    if status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE, cp.UNBOUNDED, cp.UNBOUNDED_INACCURATE):
        return LMIResult(INFEASIBLE, raw_status=status)
    if theta.value is None or t.value is None:
        return LMIResult(FAILED, raw_status=status)
    return LMIResult(SOLVED, np.asarray(theta.value, dtype=float), float(t.value), raw_status=status,
                     info={"solve_time": prob.solver_stats.solve_time if prob.solver_stats else None})

"""Block-matrix assembly of the delay-dependent stability LMIs.

Everything here acts on the 10n-dimensional augmented vector

    zeta0(k) = col{x(k), x(k-h1), x(k-h), x(k-h2), nu1, ..., nu6}

through the block row selectors ``e_i = e_i* (x) I_n``.  All matrices are
dense numpy arrays; n is small in this problem class.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

N_BLOCKS = 10
SYM_TOL = 1e-10


def _as_square(M, n: int, name: str) -> np.ndarray:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape != (n, n):
        raise ValueError(f"{name} must be {n}x{n}; got {M.shape[0]}x{M.shape[1]}")
    return M


@dataclass(frozen=True)
class DelaySystem:
    """x(k+1) = A x(k) + Ad x(k - h(k)) with integer delay h(k) in [h1, h2]."""

    A: np.ndarray
    Ad: np.ndarray
    h1: int
    h2: int

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square; got shape {A.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "Ad", _as_square(self.Ad, A.shape[0], "Ad"))
        h1, h2 = int(self.h1), int(self.h2)
        if h1 != self.h1 or h2 != self.h2:
            raise ValueError("delay bounds must be integers")
        if h1 < 1:
            raise ValueError(f"h1 must be >= 1; got {h1}")
        if h2 < h1:
            raise ValueError(f"h2 must be >= h1; got h1={h1}, h2={h2}")
        object.__setattr__(self, "h1", h1)
        object.__setattr__(self, "h2", h2)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def h12(self) -> int:
        return self.h2 - self.h1

    def with_delays(self, h1: int | None = None, h2: int | None = None) -> "DelaySystem":
        return replace(self, h1=self.h1 if h1 is None else h1,
                       h2=self.h2 if h2 is None else h2)


FULL = "full"
BLOCKDIAG = "blockdiag"
X_STRUCTURES = (FULL, BLOCKDIAG)

_SYM_NAMES = ("Q1", "Q2", "R1", "R2", "S1", "S2")


@dataclass
class LKFVariables:
    """Decision matrices of the functional: P (4n), Q1..S2 (n) and X (3n).

    With ``x_structure="blockdiag"`` X is restricted to diag{X1, X2, X3}.
    """

    P: np.ndarray
    Q1: np.ndarray
    Q2: np.ndarray
    R1: np.ndarray
    R2: np.ndarray
    S1: np.ndarray
    S2: np.ndarray
    X: np.ndarray
    x_structure: str = FULL

    def __post_init__(self):
        if self.x_structure not in X_STRUCTURES:
            raise ValueError(f"x_structure must be one of {X_STRUCTURES}; got {self.x_structure!r}")
        Q1 = np.atleast_2d(np.asarray(self.Q1, dtype=float))
        n = Q1.shape[0]
        self.P = _as_square(self.P, 4 * n, "P")
        for name in _SYM_NAMES:
            setattr(self, name, _as_square(getattr(self, name), n, name))
        self.X = _as_square(self.X, 3 * n, "X")
        for name in ("P",) + _SYM_NAMES:
            M = getattr(self, name)
            if np.max(np.abs(M - M.T), initial=0.0) > SYM_TOL * max(1.0, np.max(np.abs(M), initial=0.0)):
                raise ValueError(f"{name} is not symmetric")
        if self.x_structure == BLOCKDIAG:
            off = self.X.copy()
            for i in range(3):
                off[i * n:(i + 1) * n, i * n:(i + 1) * n] = 0.0
            if np.any(off != 0.0):
                raise ValueError("block-diagonal X has nonzero off-diagonal blocks")

    @property
    def n(self) -> int:
        return self.Q1.shape[0]

    def matrices(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in ("P",) + _SYM_NAMES + ("X",)}

    def scaled(self, t: float) -> "LKFVariables":
        return LKFVariables(**{k: t * v for k, v in self.matrices().items()},
                           x_structure=self.x_structure)

    @classmethod
    def zeros(cls, n: int, x_structure: str = FULL) -> "LKFVariables":
        z = np.zeros((n, n))
        return cls(np.zeros((4 * n, 4 * n)), z, z, z, z, z, z, np.zeros((3 * n, 3 * n)), x_structure)

    @classmethod
    def identity(cls, n: int, x_structure: str = FULL) -> "LKFVariables":
        eye = np.eye(n)
        return cls(np.eye(4 * n), eye, eye, eye, eye, eye, eye, np.zeros((3 * n, 3 * n)), x_structure)

    # -- flat parametrisation by distinct entries ---------------------------

    @staticmethod
    def count(n: int, x_structure: str = FULL) -> int:
        """Number of scalar decision variables."""
        sym = lambda m: m * (m + 1) // 2  # noqa: E731
        nx = (3 * n) ** 2 if x_structure == FULL else 3 * n * n
        return sym(4 * n) + 6 * sym(n) + nx

    def to_vector(self) -> np.ndarray:
        parts = [self.P[np.triu_indices(4 * self.n)]]
        parts += [getattr(self, name)[np.triu_indices(self.n)] for name in _SYM_NAMES]
        parts.append(_x_entries(self.X, self.n, self.x_structure))
        return np.concatenate(parts)

    @classmethod
    def from_vector(cls, theta, n: int, x_structure: str = FULL) -> "LKFVariables":
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (cls.count(n, x_structure),):
            raise ValueError(f"expected {cls.count(n, x_structure)} entries; got {theta.shape}")
        pos = 0

        def take_sym(m):
            nonlocal pos
            k = m * (m + 1) // 2
            M = np.zeros((m, m))
            M[np.triu_indices(m)] = theta[pos:pos + k]
            pos += k
            return M + np.triu(M, 1).T

        P = take_sym(4 * n)
        sym = [take_sym(n) for _ in _SYM_NAMES]
        X = np.zeros((3 * n, 3 * n))
        if x_structure == FULL:
            X[:] = theta[pos:].reshape(3 * n, 3 * n)
        else:
            for i, blk in enumerate(theta[pos:].reshape(3, n, n)):
                X[i * n:(i + 1) * n, i * n:(i + 1) * n] = blk
        return cls(P, *sym, X, x_structure)


def _x_entries(X: np.ndarray, n: int, x_structure: str) -> np.ndarray:
    if x_structure == FULL:
        return X.ravel()
    return np.concatenate([X[i * n:(i + 1) * n, i * n:(i + 1) * n].ravel() for i in range(3)])


# -- scalar coefficients ----------------------------------------------------

def scalar_coeffs(h1: int) -> tuple[float, float, float]:
    """Coefficients c1, c2, c3 weighting the refined terms on the [k-h1, k-1] window."""
    if h1 < 1:
        raise ValueError(f"h1 must be >= 1; got {h1}")
    if h1 == 1:
        return 1.0, 1.0, 1.0
    c1 = (h1 + 1) / (h1 - 1)
    c2 = (h1 + 1) * (h1 + 2) ** 2 / ((h1 - 1) * (h1 ** 2 + 11))
    c3 = (h1 + 2) / (h1 - 1)
    return c1, c2, c3


def T(h: int) -> int:
    """Number of samples in a closed window of width h."""
    if h < -1:
        raise ValueError(f"T(h) needs h >= -1; got {h}")
    return h + 1


def gamma(h: int) -> int:
    """Number of terms of the double sum over a window of width h; gamma(-1) = 0."""
    if h < -1:
        raise ValueError(f"gamma(h) needs h >= -1; got {h}")
    return T(h) * T(h + 1) // 2


def interval_coeffs(h: int) -> tuple[int, int]:
    if h < 0:
        raise ValueError(f"h must be >= 0; got {h}")
    return T(h), gamma(h)


# -- selectors and constant blocks ------------------------------------------

def selectors(n: int) -> list[np.ndarray]:
    """Block selectors e_1..e_10 (0-based list), each n x 10n."""
    I = np.eye(N_BLOCKS * n)
    return [I[i * n:(i + 1) * n] for i in range(N_BLOCKS)]


def build_gammas(n: int) -> tuple[np.ndarray, ...]:
    e1, e2, e3, e4, e5, e6, e7, e8, e9, e10 = selectors(n)
    G1 = np.vstack([e1 - e2, e1 + e2 - 2 * e5, e1 - e2 + 6 * e5 - 6 * e8])
    G2 = np.vstack([e2 - e3, e2 + e3 - 2 * e6, e2 - e3 + 6 * e6 - 6 * e9])
    G3 = np.vstack([e3 - e4, e3 + e4 - 2 * e7, e3 - e4 + 6 * e7 - 6 * e10])
    G4 = np.vstack([e2 - e5, e2 - 4 * e5 + 3 * e8])
    G5 = np.vstack([e3 - e6, e4 - e7])
    G6 = np.vstack([e3 - 4 * e6 + 3 * e9, e4 - 4 * e7 + 3 * e10])
    return G1, G2, G3, G4, G5, G6


def script_a(sys: DelaySystem) -> np.ndarray:
    """(A - I) e1 + Ad e3, i.e. the forward difference x(k+1) - x(k) as a map of zeta0."""
    e = selectors(sys.n)
    return (sys.A - np.eye(sys.n)) @ e[0] + sys.Ad @ e[2]


def build_omegas(sys: DelaySystem, h: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (Omega(h), Omega1, Omega2), each 4n x 10n."""
    h1, h2 = sys.h1, sys.h2
    if not h1 <= h <= h2:
        raise ValueError(f"h={h} outside [{h1}, {h2}]")
    e1, e2, e3, e4, e5, e6, e7, e8, _, _ = selectors(sys.n)
    Om = np.vstack([e1, T(h1) * e5, T(h - h1) * e6 + T(h2 - h) * e7, gamma(h1) * e8])
    Om1 = np.vstack([-script_a(sys), e2, e3 + e4, T(h1) * e5])
    Om2 = np.vstack([np.zeros_like(e1), e1, e2 + e3, T(h1) * e1])
    return Om, Om1, Om2


def _blkdiag(*blocks) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    out = np.zeros((rows, rows))
    i = 0
    for b in blocks:
        m = b.shape[0]
        out[i:i + m, i:i + m] = b
        i += m
    return out


def weighted_blocks(v: LKFVariables, h1: int):
    """R~1(h1), R~2, S^1(h1), S^2."""
    c1, c2, c3 = scalar_coeffs(h1)
    Rt1 = _blkdiag(v.R1, 3 * c1 * v.R1, 5 * c2 * v.R1)
    Rt2 = _blkdiag(v.R2, 3 * v.R2, 5 * v.R2)
    Sh1 = _blkdiag(v.S1, 2 * c3 * v.S1)
    Sh2 = _blkdiag(v.S2, v.S2)
    return Rt1, Rt2, Sh1, Sh2


def _check_dims(sys: DelaySystem, v: LKFVariables):
    if v.n != sys.n:
        raise ValueError(f"variables have n={v.n} but system has n={sys.n}")


def assemble_rcc(v: LKFVariables) -> np.ndarray:
    """[R~2 X; X^T R~2], required to be positive semidefinite."""
    _, Rt2, _, _ = weighted_blocks(v, 1)
    M = np.block([[Rt2, v.X], [v.X.T, Rt2]])
    return 0.5 * (M + M.T)


def pi_terms(sys: DelaySystem, v: LKFVariables, h: int) -> dict[str, np.ndarray]:
    """The seven terms Pi0(h), Pi1, ..., Pi6 (before signs are applied)."""
    _check_dims(sys, v)
    n, h1, h12 = sys.n, sys.h1, sys.h12
    e = selectors(n)
    Om, Om1, Om2 = build_omegas(sys, h)
    G1, G2, G3, G4, G5, G6 = build_gammas(n)
    Rt1, Rt2, Sh1, Sh2 = weighted_blocks(v, h1)
    Ac = script_a(sys)
    P = v.P

    cross = Om.T @ P @ (Om2 - Om1)
    pi0 = cross + cross.T + Om1.T @ P @ Om1 - Om2.T @ P @ Om2
    pi1 = e[0].T @ v.Q1 @ e[0] - e[1].T @ v.Q1 @ e[1] + e[1].T @ v.Q2 @ e[1] - e[3].T @ v.Q2 @ e[3]
    W = h1 ** 2 * v.R1 + h12 ** 2 * v.R2 + gamma(h1 - 1) * v.S1 + gamma(h12 - 1) * v.S2
    pi2 = Ac.T @ W @ Ac
    pi3 = G1.T @ Rt1 @ G1
    G23 = np.vstack([G2, G3])
    pi4 = G23.T @ assemble_rcc(v) @ G23
    pi5 = (2 * (h1 + 1) / h1) * G4.T @ Sh1 @ G4
    pi6 = 2 * G5.T @ Sh2 @ G5 + 4 * G6.T @ Sh2 @ G6
    return {"Pi0": pi0, "Pi1": pi1, "Pi2": pi2, "Pi3": pi3, "Pi4": pi4, "Pi5": pi5, "Pi6": pi6}


def assemble_pi(sys: DelaySystem, v: LKFVariables, h: int) -> np.ndarray:
    """Pi(h) = Pi0(h) + Pi1 + Pi2 - Pi3 - Pi4 - Pi5 - Pi6, symmetrised."""
    t = pi_terms(sys, v, h)
    M = t["Pi0"] + t["Pi1"] + t["Pi2"] - t["Pi3"] - t["Pi4"] - t["Pi5"] - t["Pi6"]
    return 0.5 * (M + M.T)


@dataclass
class AssembledLMI:
    pi_h1: np.ndarray
    pi_h2: np.ndarray
    rcc_block: np.ndarray = field(repr=False)


def assemble(sys: DelaySystem, v: LKFVariables) -> AssembledLMI:
    return AssembledLMI(assemble_pi(sys, v, sys.h1), assemble_pi(sys, v, sys.h2), assemble_rcc(v))

"""Recurrence relations, delay embeddings, linear reduction, and fitting.

The reduction of a linear system (A, b) to a depth-d linear recurrence goes
through the observation matrix with rows b, bA, ..., bA^{d-1}: when that
matrix is invertible, the next output is a fixed linear function of the last
d outputs.  Floats need an explicit singularity policy; we reject when the
smallest singular value is below 1e-10 times the largest.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dynamics import CartesianDynamicalSystem, trajectory
from .errors import DimensionError, SequenceTooShortError
from .vocab import Carrier, FLOAT, FnExpr, Value, affine, apply_expr

SV_RATIO = 1e-10


@dataclass(frozen=True)
class RecurrenceRelation:
    """``s_n = step(s_{n-1}, ..., s_{n-d})`` with initial values ``s_0..s_{d-1}``."""

    depth: int
    step: FnExpr
    inits: tuple[Value, ...]
    carrier: Carrier = FLOAT

    def __post_init__(self):
        if self.depth < 1:
            raise DimensionError("recurrence depth must be at least 1")
        if len(self.inits) != self.depth:
            raise DimensionError(
                f"{len(self.inits)} initial values for depth {self.depth}"
            )


def unroll(rr: RecurrenceRelation, n: int) -> list[Value]:
    """The sequence ``s_0..s_n``, applying the step from index ``depth`` on."""
    s = list(rr.inits[: n + 1])
    while len(s) < n + 1:
        window = tuple(s[-i] for i in range(1, rr.depth + 1))
        s.append(apply_expr(rr.step, window, rr.carrier))
    return s


@dataclass(frozen=True)
class LinearRecurrence:
    """``s_k = c_1 s_{k-1} + ... + c_d s_{k-d} (+ constant)``."""

    coefficients: tuple[float, ...]
    constant: Optional[float] = None

    @property
    def depth(self) -> int:
        return len(self.coefficients)

    def step_expr(self) -> FnExpr:
        return affine([self.coefficients], [self.constant or 0.0])

    def to_relation(self, inits: Sequence[Value], carrier: Carrier = FLOAT) -> RecurrenceRelation:
        return RecurrenceRelation(self.depth, self.step_expr(), tuple(inits), carrier)

    def extend(self, history: Sequence[float], n: int) -> list[float]:
        """Predict ``n`` values following ``history`` (needs ``depth`` samples)."""
        if len(history) < self.depth:
            raise SequenceTooShortError("history shorter than the recurrence depth")
        window = list(history[-self.depth:])
        out = []
        for _ in range(n):
            nxt = float(self.constant or 0.0) + sum(
                c * window[-i] for i, c in enumerate(self.coefficients, start=1)
            )
            out.append(nxt)
            window.append(nxt)
        return out


DelayEmbedding = list[tuple]


def delay_embedding(seq: Sequence, d: int) -> DelayEmbedding:
    """Sliding windows ``(s_n, s_{n-1}, ..., s_{n-d})`` for ``n = d..len-1``."""
    if len(seq) <= d:
        raise SequenceTooShortError(f"need more than {d} samples, got {len(seq)}")
    return [tuple(seq[n - i] for i in range(d + 1)) for n in range(d, len(seq))]


def phi_matrix(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Observation matrix with rows ``b A^k`` for ``k = 0..d-1``."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    d = A.shape[0]
    if A.shape != (d, d) or b.shape != (d,):
        raise DimensionError("square matrix and matching row functional required")
    rows = []
    row = b
    for _ in range(d):
        rows.append(row)
        row = row @ A
    return np.array(rows)


@dataclass(frozen=True)
class PhiMap:
    """The observation map of a system, with its matrix when the system is linear."""

    fn: "object"
    matrix: Optional[np.ndarray] = None

    def __call__(self, x):
        return self.fn(x)


def phi_map(sys: CartesianDynamicalSystem) -> PhiMap:
    """x -> (f(x), f(Gx), ..., f(G^{d-1}x)); matrix attached for affine systems."""
    from .dynamics import system_matrices

    def fn(x):
        return tuple(trajectory(sys, tuple(x), sys.dim - 1).outputs)

    mats = system_matrices(sys)
    if mats is None:
        return PhiMap(fn)
    A, b = mats
    return PhiMap(fn, phi_matrix(np.array(A, dtype=float), np.array(b, dtype=float)))


def phi_condition(A: np.ndarray, b: np.ndarray) -> float:
    """Ratio of largest to smallest singular value of the observation matrix."""
    svals = np.linalg.svd(phi_matrix(A, b), compute_uv=False)
    if svals[-1] == 0.0:
        return float("inf")
    return float(svals[0] / svals[-1])


def reduce_linear(
    A: np.ndarray, b: np.ndarray, sv_ratio: float = SV_RATIO
) -> Optional[LinearRecurrence]:
    """Depth-d linear recurrence of the system (A, b), or None when not reducible.

    Reducibility requires the observation matrix to be numerically invertible.
    The coefficient row solves ``w . phi = b A^d`` and is reversed into the
    most-recent-first order.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    phi = phi_matrix(A, b)
    svals = np.linalg.svd(phi, compute_uv=False)
    if svals[-1] < sv_ratio * svals[0]:
        return None
    target = b @ np.linalg.matrix_power(A, A.shape[0])
    w = np.linalg.solve(phi.T, target)
    return LinearRecurrence(tuple(float(c) for c in w[::-1]))


def vandermonde_check(b_eigen: Sequence, eigenvalues: Sequence) -> Value:
    """Product formula for the observation determinant in an eigenbasis.

    ``(prod b_j) * (prod_{i<j} (lam_j - lam_i))``; agrees with the direct
    determinant of the matrix with rows ``(b_j lam_j^k)``.  Exact on exact
    inputs.
    """
    if len(b_eigen) != len(eigenvalues):
        raise DimensionError("need one weight per eigenvalue")
    det = b_eigen[0] if b_eigen else 1
    for bj in b_eigen[1:]:
        det = det * bj
    lam = list(eigenvalues)
    for j in range(len(lam)):
        for i in range(j):
            det = det * (lam[j] - lam[i])
    return det


@dataclass(frozen=True)
class RecurrenceFit:
    """Least-squares fit of a linear recurrence over a delay embedding."""

    recurrence: LinearRecurrence
    residual: float
    rank: int
    rank_deficient: bool


def fit_linear_recurrence(
    seq: Sequence[float], d: int, constant: bool = False
) -> RecurrenceFit:
    """Fit ``s_n ~ c_1 s_{n-1} + ... + c_d s_{n-d} (+ c_0)`` by least squares.

    Needs at least ``2d + 1`` samples.  The residual is the maximum absolute
    error over the fitting windows; a rank-deficient design matrix is
    reported, not fatal.
    """
    if d < 1:
        raise DimensionError("fit depth must be at least 1")
    if len(seq) < 2 * d + 1:
        raise SequenceTooShortError(
            f"need at least {2 * d + 1} samples for depth {d}, got {len(seq)}"
        )
    windows = delay_embedding(seq, d)
    y = np.array([w[0] for w in windows], dtype=float)
    X = np.array([w[1:] for w in windows], dtype=float)
    if constant:
        X = np.hstack([X, np.ones((X.shape[0], 1))])
    coeffs, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    residual = float(np.max(np.abs(X @ coeffs - y))) if len(y) else 0.0
    c0 = float(coeffs[-1]) if constant else None
    cs = tuple(float(c) for c in (coeffs[:-1] if constant else coeffs))
    return RecurrenceFit(
        LinearRecurrence(cs, c0),
        residual,
        int(rank),
        bool(rank < X.shape[1]),
    )

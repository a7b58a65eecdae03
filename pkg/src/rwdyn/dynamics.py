"""Cartesian dynamical systems and constructions of the standard examples.

A system holds a hidden state of ``dim`` carrier scalars, one transition
expression per coordinate, and a scalar output expression.  Keeping the maps
inside the closed vocabulary makes every system serializable and lets the
same system run exactly over rationals or in doubles over floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .errors import DimensionError
from .vocab import (
    ADD,
    Affine,
    Carrier,
    Compose,
    FLOAT,
    FnExpr,
    Lit,
    Proj,
    Value,
    affine,
    apply_expr,
    as_fraction,
    lit,
)

StateVector = tuple[Value, ...]


@dataclass(frozen=True)
class CartesianDynamicalSystem:
    dim: int
    transition: tuple[FnExpr, ...]
    output: FnExpr
    carrier: Carrier = FLOAT

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError("system dimension must be at least 1")
        if len(self.transition) != self.dim:
            raise DimensionError(
                f"{len(self.transition)} transition coordinates for dimension {self.dim}"
            )

    def step(self, state: StateVector) -> StateVector:
        if len(state) != self.dim:
            raise DimensionError(f"state length {len(state)} != dimension {self.dim}")
        return tuple(apply_expr(e, state, self.carrier) for e in self.transition)

    def observe(self, state: StateVector) -> Value:
        if len(state) != self.dim:
            raise DimensionError(f"state length {len(state)} != dimension {self.dim}")
        return apply_expr(self.output, state, self.carrier)


@dataclass(frozen=True)
class Trajectory:
    """Outputs indexed by step; hidden states retained on request."""

    outputs: tuple[Value, ...]
    states: Optional[tuple[StateVector, ...]] = None

    def __len__(self) -> int:
        return len(self.outputs)


def trajectory(
    sys: CartesianDynamicalSystem,
    y0: StateVector,
    n: int,
    keep_states: bool = False,
) -> Trajectory:
    """Outputs of ``n + 1`` steps: observe, step, observe, ..."""
    state = tuple(y0)
    outputs = [sys.observe(state)]
    states = [state]
    for _ in range(n):
        state = sys.step(state)
        outputs.append(sys.observe(state))
        if keep_states:
            states.append(state)
    return Trajectory(tuple(outputs), tuple(states) if keep_states else None)


def from_recurrence(
    step: FnExpr, inits: Sequence[Value], carrier: Carrier = FLOAT
) -> tuple[CartesianDynamicalSystem, StateVector]:
    """Lift ``s_n = step(s_{n-1}, ..., s_{n-d})`` to a shift system.

    The state is most-recent-first, the output is the first coordinate, and
    the initial state is the reversed inits, so the emitted sequence starts
    at the newest initial value.
    """
    d = len(inits)
    if d < 1:
        raise DimensionError("a recurrence needs at least one initial value")
    transition = (step,) + tuple(Proj(i) for i in range(1, d))
    sys = CartesianDynamicalSystem(d, transition, Proj(1), carrier)
    return sys, tuple(reversed(tuple(inits)))


def linear_system(
    A: Sequence[Sequence], b: Sequence, carrier: Carrier = FLOAT
) -> CartesianDynamicalSystem:
    """Transition x -> Ax with output x -> b . x; entries stored exactly."""
    d = len(A)
    if any(len(row) != d for row in A):
        raise DimensionError("transition matrix must be square")
    if len(b) != d:
        raise DimensionError("output functional length must match the matrix")
    transition = tuple(affine([row], [0]) for row in A)
    return CartesianDynamicalSystem(d, transition, affine([b], [0]), carrier)


def system_matrices(
    sys: CartesianDynamicalSystem,
) -> Optional[tuple[list[list[Fraction]], list[Fraction]]]:
    """Recover (A, b) when every map is a plain homogeneous affine row."""

    def row_of(e: FnExpr) -> Optional[list[Fraction]]:
        match e:
            case Affine(matrix, offset) if len(matrix) == 1 and offset[0] == 0:
                if len(matrix[0]) != sys.dim:
                    return None
                return list(matrix[0])
            case Proj(i) if i <= sys.dim:
                row = [Fraction(0)] * sys.dim
                row[i - 1] = Fraction(1)
                return row
        return None

    rows = [row_of(e) for e in sys.transition]
    out = row_of(sys.output)
    if out is None or any(r is None for r in rows):
        return None
    return [r for r in rows if r is not None], out


def _block(v: int, k: int, dim: int) -> FnExpr:
    """Selector for vertex ``v``'s hidden block inside the flat state."""
    if k == 1:
        return Proj(v + 1)
    rows = []
    for j in range(k):
        row = [Fraction(0)] * dim
        row[v * k + j] = Fraction(1)
        rows.append(row)
    return Affine(tuple(tuple(r) for r in rows), tuple([Fraction(0)] * k))


def _component(j: int, k: int, inner: FnExpr) -> FnExpr:
    if k == 1:
        return inner
    row = [Fraction(0)] * k
    row[j] = Fraction(1)
    return Compose(Affine((tuple(row),), (Fraction(0),)), (inner,))


def mpnn_system(
    n_vertices: int,
    edges: Iterable[tuple[int, int]],
    message: FnExpr,
    update: FnExpr,
    readout: FnExpr,
    hidden_dim: int,
    edge_labels: Optional[Mapping[tuple[int, int], Value]] = None,
) -> CartesianDynamicalSystem:
    """Message-passing network as a flat system of dimension ``n * hidden_dim``.

    Each step sums ``message(h_v, h_w, e_vw)`` over the neighbors ``w`` of
    ``v`` (the empty sum is zero) and sets the new block of ``v`` to
    ``update(h_v, m_v)``; the output applies ``readout`` to all blocks.
    Vertices are 0-based and edges are undirected.
    """
    if n_vertices < 1 or hidden_dim < 1:
        raise DimensionError("need at least one vertex and a positive hidden size")
    neighbors: list[set[int]] = [set() for _ in range(n_vertices)]
    for u, v in edges:
        if not (0 <= u < n_vertices and 0 <= v < n_vertices):
            raise DimensionError(f"edge ({u}, {v}) outside vertex range")
        if u != v:
            neighbors[u].add(v)
            neighbors[v].add(u)
    labels = dict(edge_labels or {})

    def label(u: int, v: int) -> Value:
        raw = labels.get((u, v), labels.get((v, u), Fraction(0)))
        if isinstance(raw, (tuple, list)):
            return tuple(as_fraction(x) for x in raw)
        return as_fraction(raw)

    k = hidden_dim
    dim = n_vertices * k
    zero: Value = Fraction(0) if k == 1 else tuple([Fraction(0)] * k)

    transition: list[FnExpr] = []
    for v in range(n_vertices):
        incoming = tuple(
            Compose(message, (_block(v, k, dim), _block(w, k, dim), Lit(label(v, w))))
            for w in sorted(neighbors[v])
        )
        msg: FnExpr = Compose(ADD, incoming) if incoming else Lit(zero)
        updated = Compose(update, (_block(v, k, dim), msg))
        for j in range(k):
            transition.append(_component(j, k, updated))
    output = Compose(readout, tuple(_block(v, k, dim) for v in range(n_vertices)))
    return CartesianDynamicalSystem(dim, tuple(transition), output, FLOAT)

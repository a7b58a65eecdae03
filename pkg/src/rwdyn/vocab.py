"""The closed interpretation vocabulary for carrier functions.

An expression denotes a total function of an argument tuple.  Values are
scalars (exact rationals or floats, depending on the carrier), fixed-length
vectors of scalars, or ground terms when the carrier is the term algebra
itself.  Numeric data inside expressions is stored exactly as rationals and
coerced per carrier at application time, so the same expression evaluates
exactly over rationals and in doubles over floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TypeAlias, Union

from .errors import ArityError, CarrierError, DimensionError
from .terms import Node, Symbol, Term


@dataclass(frozen=True)
class Carrier:
    """Which value set an algebra computes in."""

    kind: str  # "rational" | "float" | "vector" | "term"
    length: int | None = None

    def __post_init__(self):
        if self.kind not in ("rational", "float", "vector", "term"):
            raise CarrierError(f"unknown carrier kind {self.kind!r}")
        if self.kind == "vector" and (self.length is None or self.length < 1):
            raise CarrierError("vector carrier needs a positive length")

    def __str__(self) -> str:
        return self.kind if self.length is None else f"{self.kind}({self.length})"


RATIONAL = Carrier("rational")
FLOAT = Carrier("float")
TERM = Carrier("term")


def vector_carrier(length: int) -> Carrier:
    return Carrier("vector", length)


Scalar: TypeAlias = Union[Fraction, float]
Value: TypeAlias = Union[Fraction, float, "tuple[Scalar, ...]", Term]


@dataclass(frozen=True)
class Lit:
    """Constant function; the payload may be a scalar, a vector, or a term."""

    value: Value


@dataclass(frozen=True)
class Proj:
    """Selects the i-th argument (1-based)."""

    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ArityError("projection indices are 1-based")


@dataclass(frozen=True)
class Prim:
    """A componentwise primitive: add, sub, mul, neg, tanh."""

    name: str

    def __post_init__(self):
        if self.name not in ("add", "sub", "mul", "neg", "tanh"):
            raise CarrierError(f"unknown primitive {self.name!r}")


@dataclass(frozen=True)
class Affine:
    """Arguments concatenated into one vector x, then matrix @ x + offset.

    Returns a scalar when the matrix has a single row, else a vector.
    """

    matrix: tuple[tuple[Fraction, ...], ...]
    offset: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.matrix or len(self.matrix) != len(self.offset):
            raise DimensionError("affine matrix rows must match offset length")
        width = len(self.matrix[0])
        if any(len(row) != width for row in self.matrix):
            raise DimensionError("affine matrix rows have unequal lengths")


@dataclass(frozen=True)
class Compose:
    """fn applied to the values of inner expressions on the shared arguments."""

    fn: "FnExpr"
    args: "tuple[FnExpr, ...]"


@dataclass(frozen=True)
class TupleOf:
    """Concatenates part values (scalars and vectors) into one vector."""

    parts: "tuple[FnExpr, ...]"


@dataclass(frozen=True)
class Construct:
    """Node constructor over the term carrier.  Not part of the textual DSL."""

    head: Symbol


FnExpr: TypeAlias = Union[Lit, Proj, Prim, Affine, Compose, TupleOf, Construct]

ADD = Prim("add")
SUB = Prim("sub")
MUL = Prim("mul")
NEG = Prim("neg")
TANH = Prim("tanh")
IDENTITY = Proj(1)


def affine(matrix, offset) -> Affine:
    """Build an Affine from nested number sequences, storing entries exactly."""
    return Affine(
        tuple(tuple(as_fraction(x) for x in row) for row in matrix),
        tuple(as_fraction(x) for x in offset),
    )


def lit(value) -> Lit:
    if isinstance(value, (tuple, list)):
        return Lit(tuple(as_fraction(v) for v in value))
    if isinstance(value, (Node,)):
        return Lit(value)
    return Lit(as_fraction(value))


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)  # exact binary expansion
    raise CarrierError(f"cannot store {type(x).__name__} exactly")


def _scalar(carrier: Carrier, x) -> Scalar:
    if carrier.kind == "rational":
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        raise CarrierError(f"rational carrier got {type(x).__name__}")
    return float(x)


def coerce_value(carrier: Carrier, v: Value) -> Value:
    """Coerce a stored exact value into the carrier's scalar type."""
    if isinstance(v, tuple):
        return tuple(_scalar(carrier, x) for x in v)
    if isinstance(v, Node):
        return v
    return _scalar(carrier, v)


def _flatten_args(args) -> list:
    flat = []
    for a in args:
        if isinstance(a, tuple):
            flat.extend(a)
        else:
            flat.append(a)
    return flat


def _componentwise(name: str, args: list[Value]) -> Value:
    shapes = {len(a) if isinstance(a, tuple) else None for a in args}
    if len(shapes) != 1:
        raise CarrierError(f"{name} over mixed shapes {shapes}")
    if shapes == {None}:
        return _scalar_prim(name, args)
    width = shapes.pop()
    return tuple(
        _scalar_prim(name, [a[i] for a in args]) for i in range(width)  # type: ignore[index]
    )


def _scalar_prim(name: str, xs: list) -> Scalar:
    if name == "add":
        total = xs[0]
        for x in xs[1:]:
            total = total + x
        return total
    if name == "mul":
        total = xs[0]
        for x in xs[1:]:
            total = total * x
        return total
    if name == "sub":
        return xs[0] - xs[1]
    if name == "neg":
        return -xs[0]
    if name == "tanh":
        return math.tanh(xs[0])
    raise CarrierError(f"unknown primitive {name!r}")


def apply_expr(expr: FnExpr, args: tuple[Value, ...], carrier: Carrier) -> Value:
    """Evaluate ``expr`` as a function of ``args`` over the given carrier."""
    match expr:
        case Lit(value):
            return coerce_value(carrier, value)
        case Proj(index):
            if index > len(args):
                raise ArityError(f"proj({index}) applied to {len(args)} arguments")
            return args[index - 1]
        case Prim(name):
            if not args:
                raise ArityError(f"{name} needs at least one argument")
            if name in ("sub",) and len(args) != 2:
                raise ArityError("sub takes exactly two arguments")
            if name in ("neg", "tanh") and len(args) != 1:
                raise ArityError(f"{name} takes exactly one argument")
            if name == "tanh" and carrier.kind == "rational":
                raise CarrierError("tanh is not exact; use a float carrier")
            return _componentwise(name, list(args))
        case Affine(matrix, offset):
            x = _flatten_args(args)
            if len(x) != len(matrix[0]):
                raise DimensionError(
                    f"affine of width {len(matrix[0])} applied to {len(x)} components"
                )
            rows = [
                _scalar(
                    carrier,
                    sum(
                        (_scalar(carrier, m) * xi for m, xi in zip(row, x)),
                        _scalar(carrier, c),
                    ),
                )
                for row, c in zip(matrix, offset)
            ]
            return rows[0] if len(rows) == 1 else tuple(rows)
        case Compose(fn, inner):
            vals = tuple(apply_expr(e, args, carrier) for e in inner)
            return apply_expr(fn, vals, carrier)
        case TupleOf(parts):
            flat = _flatten_args([apply_expr(e, args, carrier) for e in parts])
            return tuple(flat)
        case Construct(head):
            if carrier.kind != "term":
                raise CarrierError("term construction outside the term carrier")
            return Node(head, tuple(args))  # type: ignore[arg-type]
    raise CarrierError(f"unknown expression {expr!r}")


def check_carrier_value(carrier: Carrier, v: Value) -> Value:
    """Validate that ``v`` inhabits the carrier; returns ``v``."""
    if carrier.kind == "rational" and isinstance(v, Fraction):
        return v
    if carrier.kind == "float" and isinstance(v, float):
        return v
    if (
        carrier.kind == "vector"
        and isinstance(v, tuple)
        and len(v) == carrier.length
    ):
        return v
    if carrier.kind == "term" and isinstance(v, Node):
        return v
    raise CarrierError(f"value {v!r} does not inhabit carrier {carrier}")

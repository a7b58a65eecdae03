"""Algebras over pluggable carriers and catamorphic evaluation of terms.

An algebra pairs a signature with one interpretation per symbol, drawn from
the closed vocabulary in :mod:`rwdyn.vocab`.  The catamorphism is the unique
bottom-up evaluation of a ground term it induces.  Evaluation runs on an
explicit stack, so term depth is bounded by memory only.

The reserved unary operator ``iota`` is always interpreted as the identity
function on the carrier.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import CarrierError, UnboundVariableError, UnknownSymbolError
from .terms import IOTA, Node, Signature, Symbol, Term, Variable
from .vocab import (
    Carrier,
    Construct,
    FnExpr,
    IDENTITY,
    TERM,
    Value,
    apply_expr,
    check_carrier_value,
)

#: A variable-to-value map used to evaluate non-ground terms.
Assignment = Mapping[Variable, Value]


@dataclass(frozen=True)
class SigmaAlgebra:
    """A carrier plus one interpretation function per signature symbol.

    Over the term carrier, symbols without an explicit interpretation are
    node constructors, which makes the ground terms themselves the carrier.
    """

    signature: Signature
    carrier: Carrier
    interp: Mapping[Symbol, FnExpr] = field(default_factory=dict)

    def __post_init__(self):
        interp = dict(self.interp)
        for sym in self.signature:
            if sym == IOTA:
                interp[sym] = IDENTITY
            elif sym not in interp:
                if self.carrier.kind == "term":
                    interp[sym] = Construct(sym)
                else:
                    raise UnknownSymbolError(f"no interpretation for {sym!r}")
        for sym in interp:
            if self.signature.lookup(sym.name) != sym:
                raise UnknownSymbolError(f"interpretation for undeclared {sym!r}")
        object.__setattr__(self, "interp", interp)

    def interpretation(self, sym: Symbol) -> FnExpr:
        expr = self.interp.get(sym)
        if expr is None:
            raise UnknownSymbolError(f"no interpretation for {sym!r}")
        return expr


def term_algebra(signature: Signature) -> SigmaAlgebra:
    """The initial algebra: every symbol is its own constructor."""
    return SigmaAlgebra(signature, TERM, {})


def extend_with_identity(alg: SigmaAlgebra) -> SigmaAlgebra:
    """Add the reserved identity operator to the algebra; idempotent."""
    if IOTA in alg.signature:
        return alg
    interp = {s: e for s, e in alg.interp.items() if not isinstance(e, Construct)}
    interp[IOTA] = IDENTITY
    return SigmaAlgebra(alg.signature.extended(), alg.carrier, interp)


def _evaluate(alg: SigmaAlgebra, t: Term, assignment: Assignment | None) -> Value:
    # Memoize by object identity: iterated rewriting shares subterms heavily,
    # so the stored structure is a DAG far smaller than the unfolded tree.
    # Keying the memo on the node itself pins it, keeping ids unique.
    memo: dict[int, Value] = {}
    pinned: dict[int, Term] = {}
    results: list[Value] = []
    stack: list[tuple[Term, bool]] = [(t, False)]
    while stack:
        node, expanded = stack.pop()
        key = id(node)
        if not expanded:
            if key in memo:
                results.append(memo[key])
                continue
            if isinstance(node, Node) and node.children:
                stack.append((node, True))
                for c in reversed(node.children):
                    stack.append((c, False))
                continue
        if isinstance(node, Variable):
            if assignment is None or node not in assignment:
                raise UnboundVariableError(f"variable {node.name!r} has no value")
            value = assignment[node]
        else:
            n = len(node.children)
            args: tuple[Value, ...] = ()
            if n:
                args = tuple(results[-n:])
                del results[-n:]
            expr = alg.interpretation(node.head)
            value = check_carrier_value(alg.carrier, apply_expr(expr, args, alg.carrier))
        memo[key] = value
        pinned[key] = node
        results.append(value)
    return results[0]


def catamorphism(alg: SigmaAlgebra, t: Term) -> Value:
    """The unique structural evaluation of a ground term into the carrier."""
    return _evaluate(alg, t, None)


def eval_with_assignment(alg: SigmaAlgebra, t: Term, assignment: Assignment) -> Value:
    """Structural evaluation with variables looked up in ``assignment``."""
    return _evaluate(alg, t, assignment)

"""Converting between rewriting models and cartesian dynamical systems.

A rewriting model iterates one rule at one position from a ground start term
and reads each iterate through an algebra.  It projects onto a cartesian
system whose state holds one carrier value per leaf slot of the rule's
left-hand side; conversely every cartesian system embeds as such a model.
The two directions compose to the identity on system trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .algebras import SigmaAlgebra, catamorphism
from .dynamics import CartesianDynamicalSystem, StateVector, trajectory
from .errors import DimensionError, InvalidPositionError, NoMatchError, NotIterableRuleError
from .rewriting import (
    Identity,
    RewriteRule,
    instance_at,
    iterability_witness,
    iterate_stream,
    rewrite_at,
)
from .terms import (
    IOTA,
    Node,
    Position,
    ROOT,
    Signature,
    Symbol,
    Term,
    Variable,
    apply_substitution,
    is_ground,
    leaf_as_term,
    leaf_entries,
    match,
    positions,
    replace_at,
    subterm_at,
)
from .vocab import Compose, FnExpr, IDENTITY, Proj, Value, apply_expr, lit


@dataclass(frozen=True)
class RewritingModel:
    """One iterable rule, an algebra, and a ground start term matching at the rule position."""

    rule: RewriteRule
    algebra: SigmaAlgebra
    initial: Term
    witness: Mapping[Variable, Term] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        tau = iterability_witness(self.rule.identity)
        if tau is None:
            raise NotIterableRuleError(
                "right-hand side is not a substitution instance of the left-hand side"
            )
        object.__setattr__(self, "witness", tau)
        if not is_ground(self.initial):
            raise NotIterableRuleError("initial term must be ground")
        if not instance_at(self.initial, self.rule.lhs, self.rule.position):
            raise NoMatchError(self.rule.position, "initial term does not match the rule")


def model_trace(m: RewritingModel, n: int) -> list[Value]:
    """Values ``cata(R^k(t0))`` for ``k = 0..n``; the reference semantics."""
    out = []
    stream = iterate_stream(m.rule, m.initial)
    for _ in range(n + 1):
        out.append(catamorphism(m.algebra, next(stream)))
    return out


def model_output(m: RewritingModel, n: int) -> Value:
    """The value of the n-th iterate."""
    t = m.initial
    for _ in range(n):
        t = rewrite_at(m.rule, t)
    return catamorphism(m.algebra, t)


def hidden_dimension(m: RewritingModel) -> int:
    return len(leaf_entries(m.rule.lhs))


def _first_slots(l: Term) -> dict[Variable, int]:
    """1-based first leaf occurrence of each variable of ``l``."""
    slots: dict[Variable, int] = {}
    for i, entry in enumerate(leaf_entries(l), start=1):
        if isinstance(entry, Variable) and entry not in slots:
            slots[entry] = i
    return slots


def _term_expr(alg: SigmaAlgebra, t: Term, slots: Mapping[Variable, int]) -> FnExpr:
    """Compile a rule-side term to a state function: leaves become projections."""
    if isinstance(t, Variable):
        return Proj(slots[t])
    if is_ground(t):
        return lit(catamorphism(alg, t))
    return Compose(
        alg.interpretation(t.head),
        tuple(_term_expr(alg, c, slots) for c in t.children),
    )


def _skeleton_expr(alg: SigmaAlgebra, l: Term) -> FnExpr:
    """Compile ``l`` to a function of its leaf row: leaf slot i becomes proj(i)."""
    counter = [0]

    def go(t: Term) -> FnExpr:
        if isinstance(t, Variable) or not t.children:
            counter[0] += 1
            return Proj(counter[0])
        return Compose(alg.interpretation(t.head), tuple(go(c) for c in t.children))

    return go(l)


def transition_exprs(m: RewritingModel) -> tuple[FnExpr, ...]:
    """Per-slot state update: evaluate the witness image of each leaf of ``lhs``.

    Variables read the state entry at their first leaf occurrence; constant
    slots carry their own interpretation forward unchanged.
    """
    l = m.rule.lhs
    slots = _first_slots(l)
    tau = m.witness
    exprs = []
    for entry in leaf_entries(l):
        image = apply_substitution(tau, leaf_as_term(entry))
        exprs.append(_term_expr(m.algebra, image, slots))
    return tuple(exprs)


def hidden_step(m: RewritingModel, state: StateVector) -> StateVector:
    """One step of the hidden dynamics on the leaf-slot state."""
    d = hidden_dimension(m)
    if len(state) != d:
        raise DimensionError(f"state length {len(state)} != hidden dimension {d}")
    return tuple(apply_expr(e, tuple(state), m.algebra.carrier) for e in transition_exprs(m))


def initial_state(m: RewritingModel) -> StateVector:
    """Leafwise evaluation of the matched instance below the rule position."""
    sigma = match(m.rule.lhs, subterm_at(m.initial, m.rule.position))
    assert sigma is not None
    return tuple(
        catamorphism(m.algebra, apply_substitution(sigma, leaf_as_term(entry)))
        for entry in leaf_entries(m.rule.lhs)
    )


def substitute_into_context(s: Term, t: Term, p: Position) -> Term:
    """``s[t]_p`` when ``p`` is a position of ``s``, else ``t`` unchanged."""
    if p in positions(s):
        return replace_at(s, t, p)
    return t


def context_function(alg: SigmaAlgebra, t: Term, p: Position) -> FnExpr:
    """The unary carrier map conjugate to substituting back into ``t`` at ``p``.

    Applying it to ``cata(s)`` gives ``cata(t[s]_p)`` for every ground ``s``;
    at the root it is the identity.
    """
    subterm_at(t, p)  # raises InvalidPositionError when p is not in t
    if not p:
        return IDENTITY

    def go(node: Term, rest: Position) -> FnExpr:
        if not rest:
            return IDENTITY
        k = rest[0]
        assert isinstance(node, Node)
        inner = go(node.children[k - 1], rest[1:])
        args = tuple(
            inner if i == k else lit(catamorphism(alg, child))
            for i, child in enumerate(node.children, start=1)
        )
        return Compose(alg.interpretation(node.head), args)

    return go(t, p)


@dataclass(frozen=True)
class ProjectedSystem:
    """A cartesian system plus the context map compensating for a non-root position."""

    system: CartesianDynamicalSystem
    x0: StateVector
    context: FnExpr

    def outputs(self, n: int) -> list[Value]:
        """Context applied to the system outputs for steps ``0..n``."""
        traj = trajectory(self.system, self.x0, n)
        carrier = self.system.carrier
        return [apply_expr(self.context, (v,), carrier) for v in traj.outputs]


def project(m: RewritingModel) -> ProjectedSystem:
    """The cartesian system whose trajectory reproduces the model's values.

    The state has one entry per leaf slot of the left-hand side, the
    transition evaluates the witness images, the output evaluates the
    left-hand side's operator skeleton over the state, and the context
    re-inserts the value into the start term around the rewrite position.
    """
    sys = CartesianDynamicalSystem(
        dim=hidden_dimension(m),
        transition=transition_exprs(m),
        output=_skeleton_expr(m.algebra, m.rule.lhs),
        carrier=m.algebra.carrier,
    )
    ctx = context_function(m.algebra, m.initial, m.rule.position)
    return ProjectedSystem(sys, initial_state(m), ctx)


def embed(sys: CartesianDynamicalSystem, x0: StateVector) -> RewritingModel:
    """Present a cartesian system as a rewriting model at the root position.

    The signature has one constant per state coordinate, the identity
    operator, and ``d + 1`` operators of arity ``d``: one interpreted as the
    output map and one per transition coordinate.  The rule unfolds the state
    operators one level per step.
    """
    d = sys.dim
    if len(x0) != d:
        raise DimensionError(f"initial state length {len(x0)} != dimension {d}")
    consts = tuple(Symbol(f"a{i}", 0) for i in range(1, d + 1))
    states = tuple(Symbol(f"s{i}", d) for i in range(0, d + 1))
    sig = Signature(consts + (IOTA,) + states)
    vs = tuple(Variable(f"v{i}") for i in range(1, d + 1))
    lhs = Node(states[0], vs)
    rhs = Node(states[0], tuple(Node(states[i], vs) for i in range(1, d + 1)))
    t0 = Node(states[0], tuple(Node(c) for c in consts))
    interp: dict[Symbol, FnExpr] = {states[0]: sys.output}
    for i in range(1, d + 1):
        interp[states[i]] = sys.transition[i - 1]
    for c, v in zip(consts, x0):
        interp[c] = lit(v)
    algebra = SigmaAlgebra(sig, sys.carrier, interp)
    return RewritingModel(RewriteRule(Identity(lhs, rhs), ROOT), algebra, t0)

"""Positional rewriting: identities, instance tests, iteration, flattening, leaf lifting.

A rule ``(l, r)`` applied at a fixed position ``p`` induces a function on the
set of terms whose subterm at ``p`` matches ``l``: the matched instance is
replaced by the correspondingly instantiated ``r``.  The rule can be iterated
from a single start term exactly when ``r`` is itself a substitution instance
of ``l``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import (
    ArityError,
    NoMatchError,
    NonUniformDepthError,
    NotIterableRuleError,
    SignatureError,
    UnmappableLeafError,
)
from .terms import (
    IOTA,
    Node,
    Position,
    ROOT,
    Substitution,
    Symbol,
    Term,
    Variable,
    apply_substitution,
    depth,
    is_leaf,
    leaf_as_term,
    leaf_depths,
    leaf_entries,
    leaf_number,
    leaf_positions,
    match,
    replace_at,
    subterm_at,
    variables,
)


@dataclass(frozen=True)
class Identity:
    """An oriented pair of terms with ``variables(rhs) <= variables(lhs)``.

    A bare-variable left-hand side is rejected: it matches everything and
    degenerates position bookkeeping.
    """

    lhs: Term
    rhs: Term

    def __post_init__(self):
        if isinstance(self.lhs, Variable):
            raise SignatureError("rule left-hand side must not be a bare variable")
        extra = variables(self.rhs) - variables(self.lhs)
        if extra:
            names = ", ".join(sorted(v.name for v in extra))
            raise SignatureError(f"right-hand side has unbound variables: {names}")


@dataclass(frozen=True)
class RewriteRule:
    identity: Identity
    position: Position = ROOT

    @property
    def lhs(self) -> Term:
        return self.identity.lhs

    @property
    def rhs(self) -> Term:
        return self.identity.rhs


def instance_at(t: Term, s: Term, p: Position) -> bool:
    """True iff ``p`` is a position of ``t`` and ``t|_p`` is an instance of ``s``."""
    try:
        sub = subterm_at(t, p)
    except Exception:
        return False
    return match(s, sub) is not None


def rewrite_at(rule: RewriteRule, t: Term) -> Term:
    """One application of ``rule`` at its position; raises ``NoMatchError`` otherwise."""
    p = rule.position
    try:
        sub = subterm_at(t, p)
    except Exception:
        raise NoMatchError(p, f"position {'.'.join(map(str, p)) or 'e'} not in subject") from None
    sigma = match(rule.lhs, sub)
    if sigma is None:
        raise NoMatchError(p)
    return replace_at(t, apply_substitution(sigma, rule.rhs), p)


def iterability_witness(identity: Identity) -> Optional[dict[Variable, Term]]:
    """The substitution tau with ``tau(lhs) == rhs``, if one exists.

    Its presence is exactly the condition under which the rule can be applied
    indefinitely at a fixed position.
    """
    return match(identity.lhs, identity.rhs)


def iterate(rule: RewriteRule, t0: Term, n: int) -> list[Term]:
    """The trajectory ``[t0, R(t0), ..., R^n(t0)]`` of length ``n + 1``."""
    out = [t0]
    cur = t0
    for _ in range(n):
        cur = rewrite_at(rule, cur)
        out.append(cur)
    return out


def iterate_stream(rule: RewriteRule, t0: Term) -> Iterator[Term]:
    """Unbounded iteration, yielding ``t0`` first.  State is a single term."""
    cur = t0
    while True:
        yield cur
        cur = rewrite_at(rule, cur)


def is_flat(t: Term) -> bool:
    """True iff every variable occurs at depth exactly ``depth(t)``.

    Constants are unconstrained here; ``flatten`` additionally pads them.
    """
    d = depth(t)
    stack: list[tuple[int, Term]] = [(0, t)]
    while stack:
        k, node = stack.pop()
        if isinstance(node, Variable):
            if k != d:
                return False
        else:
            stack.extend((k + 1, c) for c in node.children)
    return True


def iota_tower(t: Term, n: int) -> Term:
    for _ in range(n):
        t = Node(IOTA, (t,))
    return t


def flatten(t: Term) -> Term:
    """Pad with the identity operator so every leaf sits at depth ``depth(t)``.

    Inductively, a node keeps its head and each child is flattened and then
    wrapped in enough identity applications to make up the depth difference.
    Evaluation under any algebra that reads the identity operator as the
    identity function is unchanged.
    """
    results: list[tuple[Term, int]] = []
    stack: list[tuple[Term, bool]] = [(t, False)]
    while stack:
        node, expanded = stack.pop()
        if is_leaf(node):
            results.append((node, 0))
        elif expanded:
            assert isinstance(node, Node)
            n = len(node.children)
            flat_kids = results[-n:]
            del results[-n:]
            d = 1 + max(dk for _, dk in flat_kids)
            kids = tuple(iota_tower(sub, d - dk - 1) for sub, dk in flat_kids)
            results.append((Node(node.head, kids), d))
        else:
            stack.append((node, True))
            for c in reversed(node.children):  # type: ignore[union-attr]
                stack.append((c, False))
    return results[0][0]


_HOLE = Variable("_hole")


@dataclass(frozen=True, eq=False)
class LeafTuple:
    """A uniformly deep term split into its operator scaffold and leaf row.

    ``template`` contributes only its shape: equality and reassembly read the
    leaf contents (variables or constant symbols) from ``leaves``, left to
    right, so the row may be swapped before reassembly.
    """

    template: Term
    leaves: tuple[Variable | Symbol, ...]

    def __post_init__(self):
        for entry in self.leaves:
            if isinstance(entry, Symbol) and entry.arity != 0:
                raise ArityError(f"leaf entry {entry!r} is not a constant")
        if len(self.leaves) != leaf_number(self.template):
            raise ArityError(
                f"{len(self.leaves)} leaves for a template with "
                f"{leaf_number(self.template)} leaf slots"
            )

    def skeleton(self) -> Term:
        """The template with every leaf replaced by an anonymous hole."""
        out = self.template
        for pos in leaf_positions(self.template):
            out = replace_at(out, _HOLE, pos)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LeafTuple):
            return NotImplemented
        return self.leaves == other.leaves and self.skeleton() == other.skeleton()

    def __hash__(self) -> int:
        return hash((self.skeleton(), self.leaves))


def lift(t: Term) -> LeafTuple:
    """Split ``t`` into scaffold and leaf row; requires all leaves at equal depth."""
    d = depth(t)
    if any(k != d for k in leaf_depths(t)):
        raise NonUniformDepthError(
            f"leaves of {t!r} are not all at depth {d}; flatten first"
        )
    return LeafTuple(t, leaf_entries(t))


def assemble(lt: LeafTuple) -> Term:
    """Rebuild a term from a leaf tuple; inverse to ``lift`` on its images."""
    if lt.leaves == leaf_entries(lt.template):
        return lt.template
    out = lt.template
    for pos, entry in zip(leaf_positions(lt.template), lt.leaves):
        out = replace_at(out, leaf_as_term(entry), pos)
    return out


@dataclass(frozen=True)
class Reindexing:
    """Finite routing data of a rewrite between leaf rows.

    ``index_map[i]`` is the 1-based leaf slot of the pattern side whose content
    equals leaf ``i + 1`` of the rewritten side (leftmost such slot).
    ``images[j]`` is the substitution image attached to leaf slot ``j + 1`` of
    the pattern side.
    """

    index_map: tuple[int, ...]
    images: tuple[Term, ...]


def variable_reindexing(l: Term, r_prime: Term, tau: Substitution) -> Reindexing:
    """Leaf-index routing for one rewrite step, ``r_prime = flatten(tau(l))``.

    Raises ``UnmappableLeafError`` if the rewritten side contains a constant
    leaf that never occurs as a leaf of ``l``; such rules are still executable
    through direct evaluation of the ``tau`` images.
    """
    expected = flatten(apply_substitution(tau, l))
    if r_prime != expected:
        raise ArityError("r_prime is not the flattened tau-image of l")
    l_leaves = leaf_entries(l)
    index_map = []
    for entry in leaf_entries(r_prime):
        try:
            index_map.append(l_leaves.index(entry) + 1)
        except ValueError:
            raise UnmappableLeafError(
                f"leaf {entry!r} of the rewritten side does not occur as a leaf of the pattern"
            ) from None
    images = tuple(apply_substitution(tau, leaf_as_term(e)) for e in l_leaves)
    return Reindexing(tuple(index_map), images)

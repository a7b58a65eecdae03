"""First-order terms: signatures, positions, subterm access, substitution, matching.

Terms are immutable finite ordered trees.  A term is either a ``Variable``
leaf or a ``Node`` with an operator ``Symbol`` at its head and exactly
``head.arity`` children.  Positions address nodes as tuples of 1-based child
indices; the empty tuple is the root.

All traversals below use explicit stacks so that term depth is bounded by
memory rather than the interpreter's call stack.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, TypeAlias, Union

from .errors import ArityError, InvalidPositionError, SignatureError

Position: TypeAlias = "tuple[int, ...]"

ROOT: Position = ()


@dataclass(frozen=True, slots=True)
class Symbol:
    """An operator with a fixed arity; arity-0 symbols are constants."""

    name: str
    arity: int

    def __post_init__(self):
        if not self.name:
            raise SignatureError("symbol name must be nonempty")
        if self.arity < 0:
            raise SignatureError(f"symbol {self.name!r} has negative arity")

    def __repr__(self) -> str:
        return f"{self.name}/{self.arity}"


#: Reserved unary padding operator, always interpreted as the identity.
IOTA = Symbol("iota", 1)


@dataclass(frozen=True, slots=True)
class Variable:
    name: str

    def __post_init__(self):
        if not self.name:
            raise SignatureError("variable name must be nonempty")

    def __repr__(self) -> str:
        return f"?{self.name}"


@dataclass(frozen=True, eq=False, repr=False)
class Node:
    """Operator application.  Child count must equal the head's arity."""

    head: Symbol
    children: tuple["Term", ...] = ()
    _hash: int = field(init=False, compare=False)

    def __post_init__(self):
        if len(self.children) != self.head.arity:
            raise ArityError(
                f"{self.head!r} applied to {len(self.children)} children"
            )
        kid_hashes = tuple(
            c._hash if isinstance(c, Node) else hash(c) for c in self.children
        )
        object.__setattr__(self, "_hash", hash((self.head, kid_hashes)))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Node):
            return NotImplemented
        if self._hash != other._hash or self.head != other.head:
            return False
        stack = list(zip(self.children, other.children))
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if isinstance(a, Node):
                if (
                    not isinstance(b, Node)
                    or a._hash != b._hash
                    or a.head != b.head
                ):
                    return False
                stack.extend(zip(a.children, b.children))
            elif a != b:
                return False
        return True

    def __repr__(self) -> str:
        from .dsl import print_term

        return print_term(self)


Term: TypeAlias = Union[Variable, Node]

#: A substitution; variables outside the mapping are fixed.
Substitution: TypeAlias = Mapping[Variable, Term]


def constant(name: str) -> Node:
    return Node(Symbol(name, 0))


class Signature:
    """A finite set of symbols with unique names."""

    def __init__(self, symbols: "tuple[Symbol, ...] | list[Symbol]"):
        by_name: dict[str, Symbol] = {}
        for sym in symbols:
            prior = by_name.get(sym.name)
            if prior is not None and prior != sym:
                raise SignatureError(
                    f"symbol name {sym.name!r} declared with arities "
                    f"{prior.arity} and {sym.arity}"
                )
            by_name.setdefault(sym.name, sym)
        self._by_name = by_name
        self.symbols: tuple[Symbol, ...] = tuple(by_name.values())

    def lookup(self, name: str) -> Optional[Symbol]:
        return self._by_name.get(name)

    def __contains__(self, sym: Symbol) -> bool:
        return self._by_name.get(sym.name) == sym

    def __iter__(self) -> Iterator[Symbol]:
        return iter(self.symbols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Signature):
            return NotImplemented
        return set(self.symbols) == set(other.symbols)

    def __repr__(self) -> str:
        return f"Signature({', '.join(map(repr, self.symbols))})"

    def extended(self) -> "Signature":
        """The signature with the reserved identity operator added."""
        if IOTA in self:
            return self
        if self.lookup(IOTA.name) is not None:
            raise SignatureError("name 'iota' is reserved for the unary identity operator")
        return Signature(self.symbols + (IOTA,))


def _walk(t: Term) -> Iterator[tuple[Position, Term]]:
    """Depth-first, left-to-right traversal yielding (position, subterm)."""
    stack: list[tuple[Position, Term]] = [(ROOT, t)]
    while stack:
        pos, node = stack.pop()
        yield pos, node
        if isinstance(node, Node):
            for i in range(len(node.children), 0, -1):
                stack.append((pos + (i,), node.children[i - 1]))


def positions(t: Term) -> set[Position]:
    """All node positions of ``t``; the size equals the node count."""
    return {pos for pos, _ in _walk(t)}


def subterm_at(t: Term, p: Position) -> Term:
    """The subterm addressed by ``p``; raises if ``p`` is not a position of ``t``."""
    cur = t
    for i in p:
        if not isinstance(cur, Node) or not 1 <= i <= len(cur.children):
            raise InvalidPositionError(p)
        cur = cur.children[i - 1]
    return cur


def replace_at(s: Term, t: Term, p: Position) -> Term:
    """The term ``s`` with the subterm at ``p`` replaced by ``t``."""
    if not p:
        return t
    spine: list[tuple[Node, int]] = []
    cur = s
    for i in p:
        if not isinstance(cur, Node) or not 1 <= i <= len(cur.children):
            raise InvalidPositionError(p)
        spine.append((cur, i))
        cur = cur.children[i - 1]
    result = t
    for node, i in reversed(spine):
        result = Node(node.head, node.children[: i - 1] + (result,) + node.children[i:])
    return result


def variables(t: Term) -> set[Variable]:
    """The set of variables occurring in ``t``; empty iff ``t`` is ground."""
    return {node for _, node in _walk(t) if isinstance(node, Variable)}


def is_ground(t: Term) -> bool:
    return all(not isinstance(node, Variable) for _, node in _walk(t))


def depth(t: Term) -> int:
    """Maximum position length."""
    best = 0
    stack: list[tuple[int, Term]] = [(0, t)]
    while stack:
        d, node = stack.pop()
        if d > best:
            best = d
        if isinstance(node, Node):
            stack.extend((d + 1, c) for c in node.children)
    return best


def is_leaf(t: Term) -> bool:
    return isinstance(t, Variable) or not t.children


def leaf_number(t: Term) -> int:
    """Count of leaf positions (variables and constants), with repetition."""
    return sum(1 for _, node in _walk(t) if is_leaf(node))


def term_size(t: Term) -> int:
    """Total node count of the unfolded tree."""
    return sum(1 for _ in _walk(t))


def dag_size(t: Term) -> int:
    """Count of distinct stored nodes; iterated rewrites share subterms, so
    this, not the tree size, is the memory footprint."""
    seen: set[int] = set()
    pinned: list[Term] = []
    stack: list[Term] = [t]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        pinned.append(node)
        if isinstance(node, Node):
            stack.extend(node.children)
    return len(seen)


def leaf_positions(t: Term) -> tuple[Position, ...]:
    """Leaf positions in left-to-right order."""
    return tuple(pos for pos, node in _walk(t) if is_leaf(node))


def leaf_entries(t: Term) -> tuple[Union[Variable, Symbol], ...]:
    """Leaf contents in left-to-right order: a variable, or a constant's symbol."""
    out: list[Union[Variable, Symbol]] = []
    for _, node in _walk(t):
        if isinstance(node, Variable):
            out.append(node)
        elif not node.children:
            out.append(node.head)
    return tuple(out)


def leaf_as_term(entry: Union[Variable, Symbol]) -> Term:
    return entry if isinstance(entry, Variable) else Node(entry)


def leaf_depths(t: Term) -> tuple[int, ...]:
    out: list[int] = []
    stack: list[tuple[int, Term]] = [(0, t)]
    while stack:
        d, node = stack.pop()
        if is_leaf(node):
            out.append(d)
        else:
            assert isinstance(node, Node)
            stack.extend((d + 1, c) for c in node.children)
    return tuple(out)


def apply_substitution(subst: Substitution, t: Term) -> Term:
    """Homomorphic extension of ``subst`` to ``t``.  Ground terms are fixed."""
    if not subst:
        return t
    results: list[Term] = []
    stack: list[tuple[Term, bool]] = [(t, False)]
    while stack:
        node, expanded = stack.pop()
        if isinstance(node, Variable):
            results.append(subst.get(node, node))
        elif not node.children:
            results.append(node)
        elif expanded:
            n = len(node.children)
            kids = tuple(results[-n:])
            del results[-n:]
            results.append(node if kids == node.children else Node(node.head, kids))
        else:
            stack.append((node, True))
            for c in reversed(node.children):
                stack.append((c, False))
    return results[0]


def match(pattern: Term, subject: Term) -> Optional[dict[Variable, Term]]:
    """Syntactic first-order matching.

    Returns the minimal substitution sigma with ``apply_substitution(sigma,
    pattern) == subject`` when one exists, else ``None``.  Operators must
    agree exactly and repeated pattern variables must bind consistently.
    """
    binding: dict[Variable, Term] = {}
    stack: list[tuple[Term, Term]] = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Variable):
            seen = binding.get(p)
            if seen is None:
                binding[p] = s
            elif seen != s:
                return None
        else:
            if not isinstance(s, Node) or s.head != p.head:
                return None
            stack.extend(zip(p.children, s.children))
    return binding

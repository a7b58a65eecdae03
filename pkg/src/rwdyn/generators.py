"""Seeded random corpora: terms, iterable rules, algebras, models, systems.

Everything takes an explicit ``random.Random`` so runs are reproducible from
a single seed.  Model generation bounds the leaf growth of iteration up front
(by powering the leaf occurrence counts, which is cheap) so that exact
rational comparisons over a 15-step horizon stay desk-sized.
"""

from __future__ import annotations

from fractions import Fraction
from random import Random
from typing import Optional, Sequence

from .correspondence import RewritingModel
from .dynamics import CartesianDynamicalSystem, linear_system
from .rewriting import Identity, RewriteRule
from .terms import (
    Node,
    Position,
    ROOT,
    Signature,
    Symbol,
    Term,
    Variable,
    apply_substitution,
    is_leaf,
    leaf_entries,
    positions,
    replace_at,
    subterm_at,
    variables,
)
from .algebras import SigmaAlgebra
from .vocab import ADD, Affine, Compose, FnExpr, Lit, MUL, NEG, Proj, RATIONAL, SUB

DEFAULT_SYMBOLS = (
    Symbol("a", 0),
    Symbol("b", 0),
    Symbol("u", 1),
    Symbol("f", 2),
    Symbol("g", 2),
)

DEFAULT_SIGNATURE = Signature(DEFAULT_SYMBOLS)

DEFAULT_VARIABLES = (Variable("x"), Variable("y"), Variable("z"))


def random_term(
    rng: Random,
    sig: Signature = DEFAULT_SIGNATURE,
    vars: Sequence[Variable] = DEFAULT_VARIABLES,
    max_depth: int = 3,
    leaf_bias: float = 0.4,
) -> Term:
    """A random term; leaves are variables (when provided) or constants."""
    constants = [s for s in sig if s.arity == 0]
    operators = [s for s in sig if s.arity > 0]
    if max_depth == 0 or not operators or rng.random() < leaf_bias:
        if vars and (not constants or rng.random() < 0.6):
            return rng.choice(list(vars))
        return Node(rng.choice(constants))
    head = rng.choice(operators)
    kids = tuple(
        random_term(rng, sig, vars, max_depth - 1, leaf_bias)
        for _ in range(head.arity)
    )
    return Node(head, kids)


def random_ground_term(
    rng: Random, sig: Signature = DEFAULT_SIGNATURE, max_depth: int = 2
) -> Term:
    return random_term(rng, sig, vars=(), max_depth=max_depth)


def random_pattern(
    rng: Random,
    sig: Signature = DEFAULT_SIGNATURE,
    vars: Sequence[Variable] = DEFAULT_VARIABLES,
    max_depth: int = 3,
    max_leaves: int = 5,
) -> Term:
    """A non-variable pattern with at least one variable and few leaves."""
    while True:
        t = random_term(rng, sig, vars, max_depth)
        if isinstance(t, Variable):
            continue
        if not variables(t):
            continue
        if len(leaf_entries(t)) <= max_leaves:
            return t


def _iteration_growth(l: Term, tau: dict[Variable, Term], steps: int) -> int:
    """Leaf count of ``tau^steps`` applied to ``l``, by counting occurrences."""
    counts: dict[Variable, dict[Variable, int]] = {}
    extra: dict[Variable, int] = {}
    for v in variables(l):
        image = tau.get(v, v)
        occ: dict[Variable, int] = {}
        const = 0
        for entry in leaf_entries(image):
            if isinstance(entry, Variable):
                occ[entry] = occ.get(entry, 0) + 1
            else:
                const += 1
        counts[v] = occ
        extra[v] = const
    leaf_count: dict[Variable, int] = {}
    const_count = 0
    for entry in leaf_entries(l):
        if isinstance(entry, Variable):
            leaf_count[entry] = leaf_count.get(entry, 0) + 1
        else:
            const_count += 1
    for _ in range(steps):
        new_counts: dict[Variable, int] = {}
        for v, n in leaf_count.items():
            const_count += n * extra[v]
            for w, k in counts[v].items():
                new_counts[w] = new_counts.get(w, 0) + n * k
        leaf_count = new_counts
    return const_count + sum(leaf_count.values())


def random_iterable_rule(
    rng: Random,
    sig: Signature = DEFAULT_SIGNATURE,
    vars: Sequence[Variable] = DEFAULT_VARIABLES,
    max_depth: int = 3,
    max_leaves: int = 5,
    growth_steps: int = 15,
    growth_limit: int = 60_000,
) -> tuple[Identity, dict[Variable, Term]]:
    """An identity (l, tau(l)) whose iterated leaf growth stays under the limit."""
    while True:
        l = random_pattern(rng, sig, vars, max_depth, max_leaves)
        vl = sorted(variables(l), key=lambda v: v.name)
        tau: dict[Variable, Term] = {}
        for v in vl:
            roll = rng.random()
            if roll < 0.35:
                tau[v] = rng.choice(vl)
            elif roll < 0.5:
                tau[v] = random_ground_term(rng, sig, max_depth=1)
            else:
                tau[v] = random_term(rng, sig, vl, max_depth=rng.choice((1, 2)))
        if _iteration_growth(l, tau, growth_steps) > growth_limit:
            continue
        return Identity(l, apply_substitution(tau, l)), tau


def random_rational_expr(rng: Random, arity: int, depth: int = 2) -> FnExpr:
    """A random exact carrier function of ``arity`` arguments."""
    small = lambda: Fraction(rng.randint(-3, 3), rng.choice((1, 1, 2, 3)))
    if arity == 0:
        return Lit(small())
    choices = ["proj", "affine", "add"]
    if depth > 0:
        choices += ["compose", "compose"]
    if arity == 2:
        choices.append("sub")
    kind = rng.choice(choices)
    if kind == "proj":
        return Proj(rng.randint(1, arity))
    if kind == "add":
        return ADD
    if kind == "sub":
        return SUB
    if kind == "affine":
        return Affine(
            (tuple(small() for _ in range(arity)),),
            (small(),),
        )
    inner = tuple(
        random_rational_expr(rng, arity, 0) for _ in range(rng.choice((1, 2)))
    )
    outer = random_rational_expr(rng, len(inner), 0)
    return Compose(outer, inner)


def random_rational_algebra(rng: Random, sig: Signature = DEFAULT_SIGNATURE) -> SigmaAlgebra:
    interp = {sym: random_rational_expr(rng, sym.arity) for sym in sig}
    return SigmaAlgebra(sig, RATIONAL, interp)


def random_position_context(
    rng: Random, core: Term, sig: Signature = DEFAULT_SIGNATURE, max_wrap: int = 2
) -> tuple[Term, Position]:
    """Wrap ``core`` into a random ground context, returning its position."""
    t = core
    pos: tuple[int, ...] = ROOT
    for _ in range(rng.randint(0, max_wrap)):
        ops = [s for s in sig if s.arity > 0]
        head = rng.choice(ops)
        i = rng.randint(1, head.arity)
        kids = tuple(
            t if j == i else random_ground_term(rng, sig, max_depth=1)
            for j in range(1, head.arity + 1)
        )
        t = Node(head, kids)
        pos = (i,) + pos
    return t, pos


def random_model(rng: Random, nonroot: bool = True) -> RewritingModel:
    """A random iterable model over the exact carrier, desk-sized for 15 steps."""
    sig = DEFAULT_SIGNATURE
    identity, _ = random_iterable_rule(rng, sig)
    algebra = random_rational_algebra(rng, sig)
    sigma = {
        v: random_ground_term(rng, sig, max_depth=rng.choice((0, 1, 2)))
        for v in variables(identity.lhs)
    }
    core = apply_substitution(sigma, identity.lhs)
    if nonroot:
        t0, pos = random_position_context(rng, core, sig)
    else:
        t0, pos = core, ROOT
    return RewritingModel(RewriteRule(identity, pos), algebra, t0)


def random_rational_linear_system(
    rng: Random, dim: Optional[int] = None, max_dim: int = 4
) -> tuple[CartesianDynamicalSystem, tuple[Fraction, ...]]:
    """A linear system with small exact entries and a random initial state."""
    d = dim or rng.randint(1, max_dim)
    entry = lambda: Fraction(rng.randint(-2, 2), rng.choice((1, 2)))
    A = [[entry() for _ in range(d)] for _ in range(d)]
    b = [entry() for _ in range(d)]
    x0 = tuple(entry() for _ in range(d))
    return linear_system(A, b, RATIONAL), x0


def random_wellconditioned_system(rng: Random, max_dim: int = 4):
    """Float (A, b, x0) with tame spectral radius and nonsingular observation matrix.

    Resamples until the observation matrix is comfortably invertible, so the
    reduction to a recurrence is well posed.
    """
    import numpy as np

    from .recurrence import phi_condition

    while True:
        d = rng.randint(1, max_dim)
        A = np.array([[rng.uniform(-1, 1) for _ in range(d)] for _ in range(d)])
        radius = max(abs(v) for v in np.linalg.eigvals(A)) if d else 1.0
        if radius > 1e-9:
            A = A * (rng.uniform(0.5, 1.0) / radius)
        b = np.array([rng.uniform(-1, 1) for _ in range(d)])
        x0 = np.array([rng.uniform(-1, 1) for _ in range(d)])
        if phi_condition(A, b) < 1e6:
            return A, b, x0


def repeated_eigenvalue_system(rng: Random, d: int = 3):
    """Float (A, b) where A has a genuinely repeated eigenvalue (a Jordan pair)."""
    import numpy as np

    lam = rng.uniform(0.3, 0.9)
    D = np.diag([lam] * 2 + [rng.uniform(-0.9, 0.9) for _ in range(d - 2)])
    while True:
        P = np.array([[rng.uniform(-1, 1) for _ in range(d)] for _ in range(d)])
        if abs(np.linalg.det(P)) > 0.1:
            break
    A = P @ D @ np.linalg.inv(P)
    b = np.array([rng.uniform(0.5, 1.0) for _ in range(d)])
    return A, b


def zero_eigencoordinate_system(rng: Random, d: int = 3):
    """Float (A, b) with distinct eigenvalues but b blind to one eigenvector."""
    import numpy as np

    lams = []
    while len(lams) < d:
        lam = rng.uniform(-0.9, 0.9)
        if all(abs(lam - mu) > 0.2 for mu in lams):
            lams.append(lam)
    D = np.diag(lams)
    while True:
        P = np.array([[rng.uniform(-1, 1) for _ in range(d)] for _ in range(d)])
        if abs(np.linalg.det(P)) > 0.1:
            break
    A = P @ D @ np.linalg.inv(P)
    b_eigen = np.array([rng.uniform(0.5, 1.0) for _ in range(d)])
    b_eigen[rng.randrange(d)] = 0.0
    # rows transform contravariantly: the eigen-coordinates of b are b P
    b = b_eigen @ np.linalg.inv(P)
    return A, b

"""Shared term-building helpers and hypothesis strategies."""

from __future__ import annotations

from fractions import Fraction

import hypothesis.strategies as st
import pytest

from rwdyn import (
    ADD,
    Affine,
    Node,
    Proj,
    RATIONAL,
    SigmaAlgebra,
    Signature,
    Symbol,
    Variable,
    lit,
)

A = Symbol("a", 0)
B = Symbol("b", 0)
C = Symbol("c", 0)
U = Symbol("u", 1)
F = Symbol("f", 2)
G = Symbol("g", 2)
H = Symbol("h", 3)

SIG = Signature((A, B, C, U, F, G, H))

X, Y, Z = Variable("x"), Variable("y"), Variable("z")
VARS = (X, Y, Z)


def a():
    return Node(A)


def b():
    return Node(B)


def c():
    return Node(C)


def u(t):
    return Node(U, (t,))


def f(s, t):
    return Node(F, (s, t))


def g(s, t):
    return Node(G, (s, t))


def h(r, s, t):
    return Node(H, (r, s, t))


@pytest.fixture
def plus_algebra():
    """f and g add, u negates, constants are small numbers; exact carrier."""
    return SigmaAlgebra(
        SIG,
        RATIONAL,
        {
            A: lit(1),
            B: lit(2),
            C: lit(3),
            U: Affine(((Fraction(-1),),), (Fraction(0),)),
            F: ADD,
            G: ADD,
            H: ADD,
        },
    )


def terms(vars=VARS, max_leaves=12):
    """Hypothesis strategy for terms over the shared test signature."""
    leaves = [st.sampled_from([Node(A), Node(B), Node(C)])]
    if vars:
        leaves.append(st.sampled_from(list(vars)))
    return st.recursive(
        st.one_of(*leaves),
        lambda kids: st.one_of(
            st.builds(lambda t: Node(U, (t,)), kids),
            st.builds(lambda s, t: Node(F, (s, t)), kids, kids),
            st.builds(lambda s, t: Node(G, (s, t)), kids, kids),
        ),
        max_leaves=max_leaves,
    )


def ground_terms(max_leaves=12):
    return terms(vars=(), max_leaves=max_leaves)

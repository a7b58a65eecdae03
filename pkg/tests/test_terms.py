"""Positions, subterms, replacement, substitution, and matching."""

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from rwdyn import (
    Node,
    Signature,
    Symbol,
    Variable,
    apply_substitution,
    depth,
    is_ground,
    leaf_number,
    match,
    positions,
    replace_at,
    subterm_at,
    term_size,
    variables,
)
from rwdyn.errors import ArityError, InvalidPositionError, SignatureError

from conftest import A, B, C, F, G, U, VARS, X, Y, Z, a, b, c, f, g, ground_terms, terms, u


def test_positions_of_variable_is_root_only():
    assert positions(X) == {()}


def test_positions_flat_pair():
    assert positions(f(a(), b())) == {(), (1,), (2,)}


def test_positions_nested():
    # hand expansion of the inductive definition for f(g(x), y)-shaped terms
    t = f(u(X), Y)
    assert positions(t) == {(), (1,), (1, 1), (2,)}


@given(terms())
def test_position_count_is_node_count(t):
    assert len(positions(t)) == term_size(t)


def test_subterm_at_root():
    t = f(a(), g(b(), c()))
    assert subterm_at(t, ()) == t


def test_subterm_direct_child():
    t = f(a(), u(b()))
    assert subterm_at(t, (2,)) == u(b())


def test_subterm_nested():
    t = f(u(X), Y)
    assert subterm_at(t, (1, 1)) == X


def test_subterm_invalid_position():
    with pytest.raises(InvalidPositionError):
        subterm_at(f(a(), b()), (3,))
    with pytest.raises(InvalidPositionError):
        subterm_at(a(), (1,))


def test_replace_at_root():
    assert replace_at(f(a(), b()), c(), ()) == c()


def test_replace_at_child():
    assert replace_at(f(a(), b()), c(), (2,)) == f(a(), c())


def test_replace_at_nested():
    t = f(a(), f(b(), c()))
    assert replace_at(t, u(X), (2, 1)) == f(a(), f(u(X), c()))


@given(terms(), st.data())
def test_replace_subterm_roundtrip(t, data):
    p = data.draw(st.sampled_from(sorted(positions(t))))
    assert replace_at(t, subterm_at(t, p), p) == t


@given(terms(), terms(), st.data())
def test_subterm_of_replacement(s, t, data):
    p = data.draw(st.sampled_from(sorted(positions(s))))
    assert subterm_at(replace_at(s, t, p), p) == t


def test_variables_collects_repeats_once():
    assert variables(f(X, g(Y, X))) == {X, Y}


def test_variables_ground():
    assert variables(f(a(), b())) == set()
    assert is_ground(f(a(), b()))


def test_variables_of_variable():
    assert variables(X) == {X}


def test_depth_paper_example():
    assert depth(f(g(X, Y), X)) == 2
    assert leaf_number(f(g(X, Y), X)) == 3


def test_depth_of_leaf():
    assert depth(X) == 0
    assert depth(a()) == 0


def test_depth_leafnumber_second_example():
    t = f(g(f(X, c()), Y), X)
    assert depth(t) == 3
    assert leaf_number(t) == 4


def test_leaf_number_constant():
    assert leaf_number(c()) == 1


@given(terms())
def test_depth_and_leaves_against_position_scan(t):
    # independent recomputation straight from the position set
    pos = positions(t)
    assert depth(t) == max(len(p) for p in pos)
    leaves = [p for p in pos if not any(q[: len(p)] == p and q != p for q in pos)]
    assert leaf_number(t) == len(leaves)


def test_apply_substitution_basic():
    sigma = {X: a(), Y: g(b(), b())}
    assert apply_substitution(sigma, f(X, Y)) == f(a(), g(b(), b()))


def test_apply_substitution_empty_is_identity():
    t = f(X, g(Y, Z))
    assert apply_substitution({}, t) is t


def test_apply_substitution_duplicates_shared_variable():
    xp, yp = Variable("xp"), Variable("yp")
    sigma = {X: f(xp, yp)}
    assert apply_substitution(sigma, g(X, X)) == g(f(xp, yp), f(xp, yp))


def test_substitution_fixes_ground():
    t = f(a(), u(b()))
    assert apply_substitution({X: c()}, t) == t


@given(terms())
def test_substitution_determined_by_variables(t):
    sigma = {X: a(), Y: b(), Z: c()}
    sigma_prime = dict(sigma)
    sigma_prime[Variable("unused")] = f(a(), a())
    assert apply_substitution(sigma, t) == apply_substitution(sigma_prime, t)


def test_match_simple():
    sigma = match(f(X, Y), f(a(), g(b(), b())))
    assert sigma == {X: a(), Y: g(b(), b())}


def test_match_repeated_variable_consistency():
    assert match(f(X, X), f(a(), b())) is None
    assert match(f(X, X), f(a(), a())) == {X: a()}


def test_match_variable_pattern():
    t = f(a(), g(b(), c()))
    assert match(X, t) == {X: t}


def test_match_head_mismatch():
    assert match(f(X, Y), g(a(), b())) is None
    assert match(f(X, Y), a()) is None


@given(terms(), st.data())
@settings(max_examples=200)
def test_match_soundness_and_completeness_on_instances(pattern, data):
    grounds = ground_terms(max_leaves=4)
    sigma = {v: data.draw(grounds) for v in variables(pattern)}
    subject = apply_substitution(sigma, pattern)
    found = match(pattern, subject)
    assert found is not None
    assert apply_substitution(found, pattern) == subject


def test_node_arity_checked():
    with pytest.raises(ArityError):
        Node(F, (a(),))


def test_symbol_validation():
    with pytest.raises(SignatureError):
        Symbol("", 0)
    with pytest.raises(SignatureError):
        Symbol("f", -1)


def test_signature_rejects_arity_overload():
    with pytest.raises(SignatureError):
        Signature((Symbol("f", 2), Symbol("f", 3)))


def test_signature_lookup_and_extend():
    sig = Signature((A, F))
    assert sig.lookup("a") == A
    assert sig.lookup("nope") is None
    ext = sig.extended()
    assert ext.lookup("iota") is not None
    assert ext.extended() is ext


def test_deep_term_equality_is_iterative():
    # builds a term ~5000 deep; naive recursive equality would blow the stack
    t1, t2 = a(), a()
    for _ in range(5000):
        t1, t2 = u(t1), u(t2)
    assert t1 == t2
    assert not (t1 == u(t1))

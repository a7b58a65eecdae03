"""Acceptance gate: every criterion at its stated tolerance, one line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
pass/fail lines.
"""

import json
import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from rwdyn import (
    RATIONAL,
    Identity,
    RewriteRule,
    affine,
    apply_substitution,
    catamorphism,
    embed,
    extend_with_identity,
    fit_linear_recurrence,
    flatten,
    from_recurrence,
    linear_system,
    model_trace,
    project,
    reduce_linear,
    replace_at,
    rewrite_at,
    trajectory,
    unroll,
    vandermonde_check,
)
from rwdyn.dsl import parse_model, parse_term, print_term
from rwdyn.errors import ModelError, ParseError
from rwdyn.generators import (
    DEFAULT_SIGNATURE,
    DEFAULT_VARIABLES,
    random_ground_term,
    random_model,
    random_rational_algebra,
    random_rational_linear_system,
    random_term,
    random_wellconditioned_system,
    repeated_eigenvalue_system,
    zero_eigencoordinate_system,
)
from rwdyn.terms import Node, Symbol, Variable, variables

MODELS = Path(__file__).resolve().parent.parent / "models"


@contextmanager
def criterion(num: int, label: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {num:02d} {label}: FAIL")
        raise
    print(f"ACCEPTANCE {num:02d} {label}: PASS")


def test_criterion_01_projection_equivalence():
    with criterion(1, "projection equals model output, exactly, 200 models"):
        rng = random.Random(1001)
        start = time.monotonic()
        for _ in range(200):
            m = random_model(rng)
            ps = project(m)
            assert ps.outputs(15) == model_trace(m, 15)
        elapsed = time.monotonic() - start
        assert elapsed <= 60.0, f"took {elapsed:.1f}s"


def test_criterion_02_roundtrip_section():
    with criterion(2, "embed-then-project fixes 200 linear systems, exactly"):
        rng = random.Random(1002)
        start = time.monotonic()
        for _ in range(200):
            sys, x0 = random_rational_linear_system(rng, max_dim=4)
            ps = project(embed(sys, x0))
            assert tuple(ps.outputs(30)) == trajectory(sys, x0, 30).outputs
        elapsed = time.monotonic() - start
        assert elapsed <= 60.0, f"took {elapsed:.1f}s"


def test_criterion_03_fibonacci_end_to_end():
    with criterion(3, "embedded two-step sum model traces 1,1,2,3,..."):
        oracle = [1, 1]
        while len(oracle) < 10:
            oracle.append(oracle[-1] + oracle[-2])
        sys, _ = from_recurrence(affine([[1, 1]], [0]), (0, 1), RATIONAL)
        m = embed(sys, (Fraction(1), Fraction(0)))
        assert model_trace(m, 9) == oracle
        mf = parse_model((MODELS / "fibonacci.rwm").read_text())
        assert model_trace(mf.rewriting_model(), 9) == oracle


def test_criterion_04_flatten_preservation():
    with criterion(4, "identity padding preserves evaluation on 1000 pairs"):
        rng = random.Random(1004)
        for _ in range(1000):
            t = random_ground_term(rng, max_depth=rng.choice((1, 2, 3, 4)))
            alg = random_rational_algebra(rng)
            assert catamorphism(extend_with_identity(alg), flatten(t)) == catamorphism(alg, t)


def test_criterion_05_rewriting_function_laws():
    with criterion(5, "surjectivity and injectivity of the rewrite map"):
        rng = random.Random(1005)
        x, y = Variable("x"), Variable("y")
        pair_sym = Symbol("pair", 2)

        def pair(s, t):
            return Node(pair_sym, (s, t))

        grow = Identity(pair(x, y), pair(y, pair(x, y)))
        rule = RewriteRule(grow, ())
        # surjectivity: every instance of the rhs has a preimage mapping onto it
        for _ in range(10_000):
            sigma = {
                x: random_ground_term(rng, max_depth=1),
                y: random_ground_term(rng, max_depth=1),
            }
            target = apply_substitution(sigma, grow.rhs)
            preimage = replace_at(target, apply_substitution(sigma, grow.lhs), ())
            assert rewrite_at(rule, preimage) == target
        # injectivity when both sides use the same variables
        images: dict = {}
        for _ in range(10_000):
            sigma = {
                x: random_ground_term(rng, max_depth=2),
                y: random_ground_term(rng, max_depth=2),
            }
            subject = apply_substitution(sigma, grow.lhs)
            image = rewrite_at(rule, subject)
            prior = images.get(image)
            assert prior is None or prior == subject
            images[image] = subject
        # the collision when the rhs drops a variable
        u_sym = Symbol("u", 1)
        drop = RewriteRule(Identity(pair(x, y), Node(u_sym, (x,))), ())
        t1 = pair(random_ground_term(rng), random_ground_term(rng))
        t2 = pair(t1.children[0], t1.children[0])
        assert rewrite_at(drop, t1) == rewrite_at(drop, t2)


def test_criterion_06_linear_reduction():
    with criterion(6, "linear systems reduce to recurrences"):
        lr = reduce_linear(np.array([[1.0, 1.0], [1.0, 0.0]]), np.array([1.0, 0.0]))
        assert lr is not None
        assert max(abs(c - 1.0) for c in lr.coefficients) <= 1e-9
        rng = random.Random(1006)
        for _ in range(200):
            A, b, x0 = random_wellconditioned_system(rng, max_dim=4)
            lr = reduce_linear(A, b)
            assert lr is not None
            sys = linear_system(A.tolist(), b.tolist())
            want = trajectory(sys, tuple(x0.tolist()), 49).outputs
            got = unroll(lr.to_relation(want[: lr.depth]), 49)
            scale = max(1.0, max(abs(v) for v in want))
            assert max(abs(g - w) for g, w in zip(got, want)) <= 1e-6 * scale
        for _ in range(25):
            A, b = repeated_eigenvalue_system(rng)
            assert reduce_linear(A, b) is None
            A, b = zero_eigencoordinate_system(rng)
            assert reduce_linear(A, b) is None


def test_criterion_07_vandermonde_identity():
    with criterion(7, "product formula matches the direct determinant"):
        rng = random.Random(1007)
        for _ in range(1000):
            d = rng.randint(1, 6)
            b = [rng.uniform(0.1, 2.0) * rng.choice((-1, 1)) for _ in range(d)]
            lam = []
            while len(lam) < d:
                v = rng.uniform(-2.0, 2.0)
                if all(abs(v - w) > 0.05 for w in lam):
                    lam.append(v)
            M = np.array([[b[j] * lam[j] ** k for j in range(d)] for k in range(d)])
            direct = float(np.linalg.det(M))
            formula = vandermonde_check(b, lam)
            assert abs(formula - direct) <= 1e-9 * max(1.0, abs(direct))


def _tones(n, parts):
    return [
        sum(a * math.sin(c * k + p) + b * math.cos(c * k + p) for a, b, c, p in parts)
        for k in range(n)
    ]


def test_criterion_08_sinusoid_fitting():
    with criterion(8, "frequency mixtures fit exactly at depth 2m, not 2m-1"):
        for parts, depth in [
            (((1.0, 0.5, 0.7, 0.0),), 2),
            (((1.0, 0.5, 0.7, 0.0), (0.8, -0.3, 1.3, 0.2)), 4),
        ]:
            seq = _tones(200, parts)
            fit = fit_linear_recurrence(seq, depth)
            assert fit.residual <= 1e-6
            pred = fit.recurrence.extend(seq, 20)
            truth = _tones(220, parts)[200:]
            assert max(abs(p - t) for p, t in zip(pred, truth)) <= 1e-6
            short = fit_linear_recurrence(seq, depth - 1)
            assert short.residual > 1e-3


def test_criterion_09_mpnn_consistency():
    with criterion(9, "message passing matches a per-vertex simulator"):
        from test_dynamics import _random_mpnn_case, mpnn_oracle

        rng = random.Random(1009)
        for _ in range(50):
            sys, h0, nbrs, labels, msg_fn, upd_fn, read_fn = _random_mpnn_case(rng)
            flat = tuple(x for block in h0 for x in block)
            got = [float(v) for v in trajectory(sys, flat, 10).outputs]
            want = mpnn_oracle(nbrs, labels, msg_fn, upd_fn, read_fn, h0, 10)
            assert max(abs(g - w) for g, w in zip(got, want)) <= 1e-9


def test_criterion_10_dsl_roundtrip_and_fuzz():
    with criterion(10, "print-parse identity and total diagnostics"):
        rng = random.Random(1010)
        for _ in range(10_000):
            t = random_term(rng, max_depth=rng.choice((1, 2, 3)))
            assert parse_term(print_term(t), DEFAULT_SIGNATURE, DEFAULT_VARIABLES) == t
        base = [(MODELS / name).read_text() for name in
                ("fibonacci.rwm", "assoc.rwm", "nonroot.rwm", "sinusoid.rwm")]
        for i in range(1000):
            text = list(base[i % len(base)])
            for _ in range(rng.randint(1, 8)):
                op = rng.randrange(3)
                pos = rng.randrange(len(text))
                if op == 0:
                    text[pos] = chr(rng.randrange(32, 127))
                elif op == 1:
                    del text[pos]
                else:
                    text.insert(pos, chr(rng.randrange(32, 127)))
            try:
                parse_model("".join(text))
            except ModelError as exc:
                assert exc.diagnostics
            except ParseError:
                raise AssertionError("parse errors must aggregate into ModelError")


def test_criterion_11_check_suite_runtime(capsys):
    with criterion(11, "the full check suite passes within its budget"):
        from rwdyn.cli import main

        start = time.monotonic()
        code = main(["check"])
        elapsed = time.monotonic() - start
        out = capsys.readouterr().out
        assert code == 0, out
        assert out.count("ok") == 6
        assert elapsed <= 300.0, f"took {elapsed:.1f}s"

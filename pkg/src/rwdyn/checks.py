"""Seeded property suites behind the command-line ``check`` command.

Each suite runs ``cases`` randomized checks from one seed and reports the
first failure as a counterexample string.  Cases are generated small-first,
so a reported counterexample is close to minimal.  The ``mutant`` flag
deliberately corrupts one computation per suite that supports it; it exists
so the suites can demonstrate that they would catch a real defect.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random
from typing import Callable, Optional

import numpy as np

from .algebras import catamorphism, extend_with_identity
from .correspondence import embed, model_trace, project
from .dsl import print_position, print_term
from .dynamics import trajectory
from .generators import (
    DEFAULT_SIGNATURE,
    DEFAULT_VARIABLES,
    random_ground_term,
    random_iterable_rule,
    random_model,
    random_rational_algebra,
    random_rational_linear_system,
    random_term,
)
from .rewriting import RewriteRule, flatten, rewrite_at
from .terms import (
    apply_substitution,
    match,
    positions,
    replace_at,
    subterm_at,
    variables,
)
from .vocab import RATIONAL
from .dsl import parse_term
from .recurrence import vandermonde_check


@dataclass
class SuiteResult:
    name: str
    cases: int
    counterexample: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.counterexample is None


def _size_ramp(i: int, cases: int, lo: int, hi: int) -> int:
    """Small sizes first so failures surface near-minimal cases."""
    span = max(1, cases // (hi - lo + 1))
    return min(hi, lo + i // span)


def suite_terms(rng: Random, cases: int, mutant: bool = False) -> SuiteResult:
    for i in range(cases):
        depth = _size_ramp(i, cases, 1, 4)
        t = random_term(rng, max_depth=depth)
        pos = sorted(positions(t))
        p = pos[rng.randrange(len(pos))]
        if replace_at(t, subterm_at(t, p), p) != t:
            return SuiteResult("terms", i + 1, f"splice at {print_position(p)} of {print_term(t)}")
        s = random_term(rng, max_depth=depth)
        if subterm_at(replace_at(t, s, p), p) != s:
            return SuiteResult("terms", i + 1, f"readback at {print_position(p)} of {print_term(t)}")
        sigma = {v: random_ground_term(rng, max_depth=1) for v in variables(t)}
        subject = apply_substitution(sigma, t)
        found = match(t, subject)
        if found is None or apply_substitution(found, t) != subject:
            return SuiteResult("terms", i + 1, f"match on {print_term(t)}")
        printed = print_term(t)
        if parse_term(printed, DEFAULT_SIGNATURE, DEFAULT_VARIABLES) != t:
            return SuiteResult("terms", i + 1, f"round-trip of {printed}")
    return SuiteResult("terms", cases)


def suite_rewrite(rng: Random, cases: int, mutant: bool = False) -> SuiteResult:
    for i in range(cases):
        identity, tau = random_iterable_rule(rng, growth_steps=6, growth_limit=4000)
        rule = RewriteRule(identity, ())
        vl = sorted(variables(identity.lhs), key=lambda v: v.name)
        items = [(v, random_ground_term(rng, max_depth=1)) for v in vl]
        sigma_fwd = dict(items)
        sigma_rev = dict(reversed(items))
        subject = apply_substitution(sigma_fwd, identity.lhs)
        if apply_substitution(sigma_rev, identity.lhs) != subject:
            return SuiteResult("rewrite", i + 1, f"substitution order on {print_term(identity.lhs)}")
        image = rewrite_at(rule, subject)
        if image != apply_substitution(sigma_fwd, identity.rhs):
            return SuiteResult("rewrite", i + 1, f"well-definedness on {print_term(subject)}")
        # surjectivity: the canonical preimage maps back
        target = apply_substitution(sigma_fwd, identity.rhs)
        preimage = apply_substitution(sigma_fwd, identity.lhs)
        if rewrite_at(rule, preimage) != target:
            return SuiteResult("rewrite", i + 1, f"preimage of {print_term(target)}")
        # closed form of a short iteration
        n = rng.randint(0, 4)
        t, img = subject, identity.lhs
        for _ in range(n):
            t = rewrite_at(rule, t)
            img = apply_substitution(tau, img)
        want = apply_substitution(sigma_fwd, img)
        if mutant and n > 0:
            want = rewrite_at(rule, want)  # deliberately off by one step
        if t != want:
            return SuiteResult("rewrite", i + 1, f"closed form after {n} steps of {print_term(identity.lhs)}")
    return SuiteResult("rewrite", cases)


def suite_flatten(rng: Random, cases: int, mutant: bool = False) -> SuiteResult:
    for i in range(cases):
        depth = _size_ramp(i, cases, 1, 4)
        t = random_ground_term(rng, max_depth=depth)
        alg = random_rational_algebra(rng)
        ext = extend_with_identity(alg)
        if catamorphism(ext, flatten(t)) != catamorphism(alg, t):
            return SuiteResult("flatten", i + 1, f"evaluation changed for {print_term(t)}")
    return SuiteResult("flatten", cases)


def suite_projection(rng: Random, cases: int, mutant: bool = False) -> SuiteResult:
    for i in range(cases):
        m = random_model(rng)
        ps = project(m)
        if mutant and ps.system.dim >= 2:
            # swap two state slots without touching anything else
            from dataclasses import replace

            perm = list(range(ps.system.dim))
            perm[0], perm[1] = perm[1], perm[0]
            ps = replace(ps, x0=tuple(ps.x0[j] for j in perm))
        steps = _size_ramp(i, cases, 4, 15)
        if ps.outputs(steps) != model_trace(m, steps):
            lhs = print_term(m.rule.lhs)
            at = print_position(m.rule.position)
            return SuiteResult(
                "projection", i + 1, f"rule {lhs} at {at} on {print_term(m.initial)}"
            )
    return SuiteResult("projection", cases)


def suite_roundtrip(rng: Random, cases: int, mutant: bool = False) -> SuiteResult:
    for i in range(cases):
        sys, x0 = random_rational_linear_system(rng)
        ps = project(embed(sys, x0))
        steps = _size_ramp(i, cases, 8, 30)
        want = trajectory(sys, x0, steps).outputs
        if tuple(ps.outputs(steps)) != want:
            return SuiteResult("roundtrip", i + 1, f"dimension {sys.dim} system")
    return SuiteResult("roundtrip", cases)


def suite_vandermonde(rng: Random, cases: int, mutant: bool = False) -> SuiteResult:
    for i in range(cases):
        d = _size_ramp(i, cases, 1, 6)
        b = [rng.uniform(0.1, 2.0) * rng.choice((-1, 1)) for _ in range(d)]
        lam: list[float] = []
        while len(lam) < d:
            x = rng.uniform(-2.0, 2.0)
            if all(abs(x - y) > 0.05 for y in lam):
                lam.append(x)
        M = np.array([[b[j] * lam[j] ** k for j in range(d)] for k in range(d)])
        direct = float(np.linalg.det(M))
        formula = vandermonde_check(b, lam)
        if mutant:
            formula = -formula if d > 1 else formula + 1.0
        if abs(formula - direct) > 1e-9 * max(1.0, abs(direct)):
            return SuiteResult(
                "vandermonde",
                i + 1,
                f"d={d} b={[round(x, 3) for x in b]} lambda={[round(x, 3) for x in lam]}",
            )
    return SuiteResult("vandermonde", cases)


SUITES: dict[str, Callable[[Random, int, bool], SuiteResult]] = {
    "terms": suite_terms,
    "rewrite": suite_rewrite,
    "flatten": suite_flatten,
    "projection": suite_projection,
    "roundtrip": suite_roundtrip,
    "vandermonde": suite_vandermonde,
}

DEFAULT_CASES: dict[str, int] = {
    "terms": 400,
    "rewrite": 200,
    "flatten": 300,
    "projection": 120,
    "roundtrip": 120,
    "vandermonde": 500,
}


def run_suite(name: str, seed: int, cases: Optional[int] = None, mutant: bool = False) -> SuiteResult:
    fn = SUITES[name]
    # string seeds hash through sha512 inside Random, stable across processes
    return fn(Random(f"{seed}:{name}"), cases or DEFAULT_CASES[name], mutant)

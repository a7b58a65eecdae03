"""Command-line driver: evaluate, rewrite, trace, project, embed, reduce, fit, check.

Exit codes: 0 success, 1 validation error, 2 verification failure, 3 safety
limit exceeded.  Safety limits default to 10**6 stored term nodes and 10**5
steps and can be overridden with ``RWD_LIMITS=nodes=...,steps=...``.
All randomized commands take an explicit ``--seed`` and produce byte-identical
artifacts for identical configurations.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

from . import __version__
from .algebras import SigmaAlgebra, catamorphism
from .checks import DEFAULT_CASES, SUITES, run_suite
from .correspondence import embed, model_trace, project
from .dsl import (
    ModelFile,
    parse_model,
    print_expr,
    print_model,
    print_position,
    print_term,
)
from .dynamics import system_matrices, trajectory
from .errors import (
    LimitExceededError,
    ModelError,
    NoMatchError,
    ParseError,
    RwdynError,
)
from .recurrence import (
    delay_embedding,
    fit_linear_recurrence,
    phi_condition,
    reduce_linear,
    unroll,
)
from .rewriting import rewrite_at
from .terms import IOTA, Node, Signature, dag_size
from .vocab import FLOAT, RATIONAL, TERM, Carrier, Value, coerce_value, vector_carrier

DEFAULT_SEED = 20240807


class VerificationFailure(RwdynError):
    """A cross-check between two computation routes diverged."""


@dataclass
class Limits:
    max_nodes: int = 1_000_000
    max_steps: int = 100_000

    @classmethod
    def from_env(cls) -> "Limits":
        raw = os.environ.get("RWD_LIMITS", "")
        limits = cls()
        for part in raw.split(","):
            part = part.strip()
            if not part:
                continue
            key, _, value = part.partition("=")
            if key == "nodes" and value.isdigit():
                limits.max_nodes = int(value)
            elif key == "steps" and value.isdigit():
                limits.max_steps = int(value)
        return limits


def _encode_value(v: Value):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, tuple):
        return [_encode_value(x) for x in v]
    if isinstance(v, Node):
        return print_term(v)
    return v


def _emit(records: list[dict], fmt: str, out: io.TextIOBase) -> None:
    if fmt == "jsonl":
        for rec in records:
            out.write(json.dumps(rec, sort_keys=True) + "\n")
    elif fmt == "csv":
        if not records:
            return
        writer = csv.DictWriter(out, fieldnames=list(records[0].keys()))
        writer.writeheader()
        for rec in records:
            writer.writerow(rec)
    else:  # pretty
        for rec in records:
            out.write("  ".join(f"{k}={rec[k]}" for k in rec) + "\n")


def _load_model_file(path: str) -> ModelFile:
    try:
        src = Path(path).read_text()
    except OSError as exc:
        raise ModelError([f"cannot read {path}: {exc.strerror}"]) from None
    mf = parse_model(src)
    for w in mf.warnings:
        print(f"{path}:{w}", file=sys.stderr)
    return mf


_CARRIER_NAMES = {"rational": RATIONAL, "float": FLOAT, "term": TERM}


def _carrier_override(name: str | None) -> Carrier | None:
    if name is None:
        return None
    if name.startswith("vector(") and name.endswith(")"):
        return vector_carrier(int(name[7:-1]))
    if name not in _CARRIER_NAMES:
        raise ModelError([f"unknown carrier {name!r}"])
    return _CARRIER_NAMES[name]


def _model_algebra(mf: ModelFile, carrier: Carrier | None) -> SigmaAlgebra:
    assert mf.interp is not None and mf.carrier is not None
    return SigmaAlgebra(mf.signature, carrier or mf.carrier, mf.interp)


def _out_stream(args):
    if args.output:
        return open(args.output, "w")
    return nullcontext(sys.stdout)


# ---------------------------------------------------------------------------
# commands


def cmd_eval(args, limits: Limits) -> int:
    mf = _load_model_file(args.model)
    if mf.has_model():
        alg = _model_algebra(mf, _carrier_override(args.carrier))
        value = catamorphism(alg, mf.initial_term)
    else:
        sys_, x0 = mf.system_with_state()
        value = trajectory(sys_, x0, 0).outputs[0]
    with _out_stream(args) as out:
        out.write(json.dumps(_encode_value(value), sort_keys=True) + "\n")
    return 0


def cmd_rewrite(args, limits: Limits) -> int:
    mf = _load_model_file(args.model)
    if mf.rule is None or mf.initial_term is None:
        raise ModelError(["file does not define a rule and initial term"])
    steps = args.steps if args.steps is not None else 1
    if steps > limits.max_steps:
        raise LimitExceededError(f"steps {steps} exceed the limit {limits.max_steps}")
    t = mf.initial_term
    records = [{"step": 0, "term": print_term(t)}]
    for k in range(steps):
        t = rewrite_at(mf.rule, t)
        if dag_size(t) > limits.max_nodes:
            raise LimitExceededError(f"term grew past {limits.max_nodes} stored nodes")
        records.append({"step": k + 1, "term": print_term(t)})
    with _out_stream(args) as out:
        if args.format == "pretty":
            out.write(records[-1]["term"] + "\n")
        else:
            _emit(records, args.format, out)
    return 0


def cmd_trace(args, limits: Limits) -> int:
    mf = _load_model_file(args.model)
    steps = args.steps if args.steps is not None else 10
    if steps > limits.max_steps:
        raise LimitExceededError(f"steps {steps} exceed the limit {limits.max_steps}")
    records: list[dict] = []
    if mf.rule is not None and mf.interp is not None and mf.initial_term is not None:
        alg = _model_algebra(mf, _carrier_override(args.carrier))
        t = mf.initial_term
        for k in range(steps + 1):
            rec = {"step": k, "value": _encode_value(catamorphism(alg, t))}
            if args.terms:
                rec["term"] = print_term(t)
            records.append(rec)
            if k < steps:
                t = rewrite_at(mf.rule, t)
                if dag_size(t) > limits.max_nodes:
                    raise LimitExceededError(
                        f"term grew past {limits.max_nodes} stored nodes"
                    )
    else:
        sys_, x0 = mf.system_with_state()
        override = _carrier_override(args.carrier)
        if override is not None:
            sys_ = replace(sys_, carrier=override)
            x0 = tuple(coerce_value(override, v) for v in x0)
        traj = trajectory(sys_, x0, steps, keep_states=args.hidden)
        for k, v in enumerate(traj.outputs):
            rec = {"step": k, "output": _encode_value(v)}
            if args.hidden and traj.states is not None:
                rec["hidden"] = [_encode_value(x) for x in traj.states[k]]
            records.append(rec)
    with _out_stream(args) as out:
        _emit(records, args.format, out)
    return 0


def _tolerance(carrier: Carrier) -> float | None:
    return None if carrier.kind in ("rational", "term") else 1e-9


def _max_divergence(xs, ys) -> float:
    worst = 0.0
    for x, y in zip(xs, ys):
        if isinstance(x, (int, float, Fraction)) and isinstance(y, (int, float, Fraction)):
            worst = max(worst, abs(float(x) - float(y)))
        elif x != y:
            return float("inf")
    return worst


def cmd_project(args, limits: Limits) -> int:
    mf = _load_model_file(args.model)
    model = mf.rewriting_model()
    ps = project(model)
    steps = args.steps if args.steps is not None else 10
    want = model_trace(model, steps)
    got = ps.outputs(steps)
    carrier = model.algebra.carrier
    tol = _tolerance(carrier)
    if tol is None:
        diff = 0.0 if got == want else float("inf")
    else:
        diff = _max_divergence(got, want)
    out_file = ModelFile(
        signature=Signature((IOTA,)),
        system=ps.system,
        initial_state=ps.x0,
        context=ps.context,
    )
    text = print_model(out_file)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    report = {
        "dimension": ps.system.dim,
        "steps": steps,
        "context": print_expr(ps.context),
        "max_abs_diff": diff,
        "exact": tol is None,
    }
    print(json.dumps(report, sort_keys=True), file=sys.stderr)
    if diff > (tol or 0.0):
        raise VerificationFailure(
            f"projected outputs diverge from the model by {diff}"
        )
    return 0


def cmd_embed(args, limits: Limits) -> int:
    mf = _load_model_file(args.system)
    sys_, x0 = mf.system_with_state()
    model = embed(sys_, x0)
    interp = {s: e for s, e in model.algebra.interp.items()}
    out_file = ModelFile(
        signature=model.algebra.signature,
        variables=tuple(
            v for v in sorted(
                {v for v in model.rule.lhs.children}, key=lambda v: v.name  # type: ignore[union-attr]
            )
        ),
        rule=model.rule,
        carrier=model.algebra.carrier,
        interp=interp,
        initial_term=model.initial,
    )
    text = print_model(out_file)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    tol = _tolerance(sys_.carrier)
    if args.verify:
        want = trajectory(sys_, x0, args.verify).outputs
        got = model_trace(model, args.verify)
        diff = _max_divergence(got, want)
        print(
            json.dumps({"verified_steps": args.verify, "max_abs_diff": diff}, sort_keys=True),
            file=sys.stderr,
        )
        if diff > (tol or 0.0):
            raise VerificationFailure(f"embedded model diverges by {diff}")
    if args.roundtrip:
        steps = args.steps if args.steps is not None else 30
        ps = project(model)
        want = trajectory(sys_, x0, steps).outputs
        got = tuple(ps.outputs(steps))
        diff = _max_divergence(got, want)
        print(
            json.dumps({"roundtrip_steps": steps, "max_abs_diff": diff}, sort_keys=True),
            file=sys.stderr,
        )
        if diff > (tol or 0.0):
            raise VerificationFailure(f"round-trip diverges by {diff}")
    return 0


def cmd_reduce(args, limits: Limits) -> int:
    import numpy as np

    mf = _load_model_file(args.system)
    sys_, x0 = (mf.system, mf.initial_state)
    if sys_ is None:
        raise ModelError(["file does not define a system"])
    mats = system_matrices(sys_)
    if mats is None:
        raise ModelError(["system is not in linear form; reduce needs matrix blocks"])
    A = np.array([[float(x) for x in row] for row in mats[0]])
    b = np.array([float(x) for x in mats[1]])
    condition = phi_condition(A, b)
    lr = reduce_linear(A, b)
    if lr is None:
        result = {
            "reducible": False,
            "reason": "observation matrix is numerically singular",
            "condition": condition,
        }
    else:
        result = {
            "reducible": True,
            "depth": lr.depth,
            "coefficients": list(lr.coefficients),
            "constant": lr.constant,
            "condition": condition,
        }
        if x0 is not None:
            steps = args.steps if args.steps is not None else 50
            want = trajectory(
                replace(sys_, carrier=FLOAT),
                tuple(float(v) for v in x0),
                steps,
            ).outputs
            rr = lr.to_relation(want[: lr.depth])
            got = unroll(rr, steps)
            scale = max(1.0, max(abs(float(v)) for v in want))
            result["residual"] = max(
                abs(float(g) - float(w)) for g, w in zip(got, want)
            ) / scale
        else:
            result["residual"] = None
    with _out_stream(args) as out:
        out.write(json.dumps(result, sort_keys=True) + "\n")
    return 0


def _read_sequence(path: str) -> list[float]:
    text = Path(path).read_text()
    values: list[float] = []
    if path.endswith(".jsonl"):
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if isinstance(obj, dict):
                raw = obj.get("value", obj.get("output"))
                if raw is None:
                    raise ModelError([f"jsonl record without value/output: {line}"])
                values.append(float(raw))
            else:
                values.append(float(obj))
    else:
        for line in text.splitlines():
            for field in line.replace(",", " ").split():
                try:
                    values.append(float(Fraction(field)))
                except ValueError:
                    raise ModelError([f"not a number in sequence file: {field!r}"]) from None
    return values


def cmd_fit(args, limits: Limits) -> int:
    import numpy as np

    seq = _read_sequence(args.sequence)
    fit = fit_linear_recurrence(seq, args.depth, constant=args.constant)
    windows = np.array([w[1:] for w in delay_embedding(seq, args.depth)])
    if args.constant:
        windows = np.hstack([windows, np.ones((windows.shape[0], 1))])
    svals = np.linalg.svd(windows, compute_uv=False)
    condition = float("inf") if svals[-1] == 0 else float(svals[0] / svals[-1])
    result = {
        "depth": args.depth,
        "coefficients": list(fit.recurrence.coefficients),
        "constant": fit.recurrence.constant,
        "residual": fit.residual,
        "condition": condition,
        "rank_deficient": fit.rank_deficient,
    }
    if args.predict:
        result["prediction"] = fit.recurrence.extend(seq, args.predict)
    with _out_stream(args) as out:
        out.write(json.dumps(result, sort_keys=True) + "\n")
    return 0


def cmd_check(args, limits: Limits) -> int:
    names = [args.suite] if args.suite else list(SUITES)
    for name in names:
        if name not in SUITES:
            raise ModelError([f"unknown suite {name!r}; choose from {', '.join(SUITES)}"])

    def run(name: str):
        return run_suite(name, args.seed, args.cases, args.inject_mutant)

    if args.parallel:
        with ThreadPoolExecutor(max_workers=min(4, len(names))) as pool:
            results = list(pool.map(run, names))
    else:
        results = [run(name) for name in names]
    failed = False
    with _out_stream(args) as out:
        for res in results:
            if res.passed:
                out.write(f"suite {res.name}: {res.cases} cases, ok\n")
            else:
                failed = True
                out.write(
                    f"suite {res.name}: FAIL at case {res.cases} "
                    f"(counterexample: {res.counterexample})\n"
                )
    if failed:
        raise VerificationFailure("one or more check suites failed")
    return 0


# ---------------------------------------------------------------------------
# wiring


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["jsonl", "csv", "pretty"], default="jsonl")
    common.add_argument("--steps", type=int, default=None)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--carrier", default=None, help="override the file's carrier")
    common.add_argument("--output", default=None, help="write the main artifact here")

    parser = argparse.ArgumentParser(
        prog="rwdyn",
        description="Iterated term rewriting as dynamical systems.",
    )
    parser.add_argument("--version", action="version", version=f"rwdyn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a model's initial term")
    p.add_argument("model")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("rewrite", parents=[common], help="apply the rule --steps times")
    p.add_argument("model")
    p.set_defaults(fn=cmd_rewrite)

    p = sub.add_parser("trace", parents=[common], help="emit one record per step")
    p.add_argument("model")
    p.add_argument("--terms", action="store_true", help="include printed iterates")
    p.add_argument("--hidden", action="store_true", help="include hidden states")
    p.set_defaults(fn=cmd_trace)

    p = sub.add_parser("project", parents=[common], help="model file -> system file")
    p.add_argument("model")
    p.set_defaults(fn=cmd_project)

    p = sub.add_parser("embed", parents=[common], help="system file -> model file")
    p.add_argument("system")
    p.add_argument("--verify", type=int, default=None, metavar="N")
    p.add_argument("--roundtrip", action="store_true")
    p.set_defaults(fn=cmd_embed)

    p = sub.add_parser("reduce", parents=[common], help="linear system -> recurrence JSON")
    p.add_argument("system")
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("fit", parents=[common], help="fit a linear recurrence to data")
    p.add_argument("sequence")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--constant", action="store_true")
    p.add_argument("--predict", type=int, default=None)
    p.set_defaults(fn=cmd_fit)

    p = sub.add_parser("check", parents=[common], help="run the seeded property suites")
    p.add_argument("--suite", default=None)
    p.add_argument("--cases", type=int, default=None)
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--inject-mutant", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(fn=cmd_check)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    limits = Limits.from_env()
    try:
        return args.fn(args, limits)
    except ModelError as exc:
        for d in exc.diagnostics:
            print(f"error: {d}", file=sys.stderr)
        return 1
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 2
    except LimitExceededError as exc:
        print(f"limit exceeded: {exc}", file=sys.stderr)
        return 3
    except (ParseError, NoMatchError, RwdynError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Textual model format: parser and printer for terms, expressions, and model files.

A model file is a sequence of named brace blocks.  ``signature`` declares
operators as ``name/arity``, ``variables`` declares variable names, ``rule``
holds the two sides and the rewrite position, ``algebra`` names the carrier
and one interpretation expression per symbol, ``initial`` holds a ground term
or a state vector, and ``system`` defines a cartesian system either by linear
blocks (``matrix``/``functional``) or by explicit expressions.

The reserved name ``iota`` is implicitly declared as a unary operator and is
always interpreted as the identity, so every file works over the extended
signature.  ``parse_model`` aggregates every diagnostic it can find instead
of stopping at the first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .algebras import SigmaAlgebra
from .correspondence import RewritingModel
from .dynamics import CartesianDynamicalSystem, StateVector, linear_system
from .errors import ModelError, ParseError, RwdynError
from .rewriting import Identity, RewriteRule, iterability_witness
from .terms import (
    IOTA,
    Node,
    Position,
    ROOT,
    Signature,
    Symbol,
    Term,
    Variable,
    is_ground,
    variables as vars_of,
)
from .vocab import (
    ADD,
    Affine,
    Carrier,
    Compose,
    FLOAT,
    FnExpr,
    Lit,
    MUL,
    NEG,
    Prim,
    Proj,
    RATIONAL,
    SUB,
    TANH,
    TERM,
    TupleOf,
    coerce_value,
    vector_carrier,
)

_PRIMS = {"add": ADD, "sub": SUB, "mul": MUL, "neg": NEG, "tanh": TANH}


# ---------------------------------------------------------------------------
# tokens


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT NUMBER PUNCT END
    text: str
    line: int
    col: int


_PUNCT = set("{}()[],:./-")


def _tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    line, col, i = 1, 1, 0
    n = len(src)
    while i < n:
        c = src[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
        elif c in " \t\r":
            i += 1
            col += 1
        elif c == "#":
            while i < n and src[i] != "\n":
                i += 1
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            toks.append(Token("IDENT", src[i:j], line, col))
            col += j - i
            i = j
        elif c.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            if j < n and src[j] == "." and j + 1 < n and src[j + 1].isdigit():
                j += 1
                while j < n and src[j].isdigit():
                    j += 1
            toks.append(Token("NUMBER", src[i:j], line, col))
            col += j - i
            i = j
        elif c in _PUNCT:
            toks.append(Token("PUNCT", c, line, col))
            i += 1
            col += 1
        else:
            raise ParseError(line, col, f"unexpected character {c!r}")
    toks.append(Token("END", "", line, col))
    return toks


class _Cursor:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != "END":
            self.i += 1
        return t

    def at_punct(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "PUNCT" and t.text == text

    def eat_punct(self, text: str) -> bool:
        if self.at_punct(text):
            self.next()
            return True
        return False

    def expect_punct(self, text: str) -> Token:
        t = self.peek()
        if t.kind == "PUNCT" and t.text == text:
            return self.next()
        raise ParseError(t.line, t.col, f"expected {text!r}, found {t.text or 'end of input'!r}")

    def expect_ident(self, what: str = "identifier") -> Token:
        t = self.peek()
        if t.kind == "IDENT":
            return self.next()
        raise ParseError(t.line, t.col, f"expected {what}, found {t.text or 'end of input'!r}")


# ---------------------------------------------------------------------------
# positions


def print_position(p: Position) -> str:
    return ".".join(str(i) for i in p) if p else "e"


def parse_position(src: str) -> Position:
    """``"e"`` is the root; otherwise dot-separated 1-based indices."""
    text = src.strip()
    if text == "e":
        return ROOT
    parts = text.split(".")
    out = []
    for part in parts:
        if not part.isdigit():
            raise ParseError(1, 1, f"malformed position {src!r}")
        i = int(part)
        if i < 1:
            raise ParseError(1, 1, f"position indices are 1-based, got {i}")
        out.append(i)
    return tuple(out)


# ---------------------------------------------------------------------------
# terms


def _parse_term(cur: _Cursor, sig: Signature, declared: dict[str, Variable]) -> Term:
    t = cur.expect_ident("term")
    name = t.text
    if cur.eat_punct("("):
        sym = sig.lookup(name)
        if sym is None:
            raise ParseError(t.line, t.col, f"unknown operator {name!r}")
        args = [_parse_term(cur, sig, declared)]
        while cur.eat_punct(","):
            args.append(_parse_term(cur, sig, declared))
        cur.expect_punct(")")
        if len(args) != sym.arity:
            raise ParseError(
                t.line, t.col, f"{name} expects {sym.arity} arguments, found {len(args)}"
            )
        return Node(sym, tuple(args))
    sym = sig.lookup(name)
    if sym is not None:
        if sym.arity != 0:
            raise ParseError(t.line, t.col, f"{name} expects {sym.arity} arguments, found 0")
        return Node(sym)
    if name in declared:
        return declared[name]
    raise ParseError(t.line, t.col, f"undeclared identifier {name!r}")


def parse_term(src: str, sig: Signature, declared: Sequence[Variable] = ()) -> Term:
    """Parse ``f(x,g(y,z))`` notation against a signature and declared variables."""
    cur = _Cursor(_tokenize(src))
    byname = {v.name: v for v in declared}
    t = _parse_term(cur, sig.extended(), byname)
    end = cur.peek()
    if end.kind != "END":
        raise ParseError(end.line, end.col, f"trailing input {end.text!r}")
    return t


def print_term(t: Term) -> str:
    """Canonical minimal-whitespace form; inverse to ``parse_term``."""
    out: list[str] = []
    stack: list[object] = [t]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
        elif isinstance(item, Variable):
            out.append(item.name)
        else:
            assert isinstance(item, Node)
            if not item.children:
                out.append(item.head.name)
            else:
                out.append(item.head.name + "(")
                stack.append(")")
                for i, c in enumerate(reversed(item.children)):
                    stack.append(c)
                    if i != len(item.children) - 1:
                        stack.append(",")
    return "".join(out)


# ---------------------------------------------------------------------------
# numbers, vectors, expressions


def _parse_number(cur: _Cursor) -> Fraction:
    sign = -1 if cur.eat_punct("-") else 1
    t = cur.peek()
    if t.kind != "NUMBER":
        raise ParseError(t.line, t.col, f"expected number, found {t.text or 'end of input'!r}")
    cur.next()
    if "." in t.text:
        value = Fraction(t.text)
    elif cur.at_punct("/"):
        cur.next()
        den = cur.peek()
        if den.kind != "NUMBER" or "." in den.text:
            raise ParseError(den.line, den.col, "expected integer denominator")
        cur.next()
        if int(den.text) == 0:
            raise ParseError(den.line, den.col, "zero denominator")
        value = Fraction(int(t.text), int(den.text))
    else:
        value = Fraction(int(t.text))
    return sign * value


def _parse_vector(cur: _Cursor) -> tuple[Fraction, ...]:
    cur.expect_punct("[")
    if cur.eat_punct("]"):
        return ()
    out = [_parse_number(cur)]
    while cur.eat_punct(","):
        out.append(_parse_number(cur))
    cur.expect_punct("]")
    return tuple(out)


def _parse_matrix(cur: _Cursor) -> tuple[tuple[Fraction, ...], ...]:
    cur.expect_punct("[")
    rows = [_parse_vector(cur)]
    while cur.eat_punct(","):
        rows.append(_parse_vector(cur))
    cur.expect_punct("]")
    return tuple(rows)


def _parse_expr(cur: _Cursor) -> FnExpr:
    t = cur.peek()
    if t.kind == "NUMBER" or (t.kind == "PUNCT" and t.text == "-"):
        return Lit(_parse_number(cur))
    if t.kind == "PUNCT" and t.text == "[":
        return Lit(_parse_vector(cur))
    name_tok = cur.expect_ident("expression")
    name = name_tok.text
    if name == "proj":
        cur.expect_punct("(")
        idx = _parse_number(cur)
        cur.expect_punct(")")
        if idx.denominator != 1 or idx < 1:
            raise ParseError(name_tok.line, name_tok.col, "proj index must be a positive integer")
        return Proj(int(idx))
    if name == "affine":
        cur.expect_punct("(")
        matrix = _parse_matrix(cur)
        cur.expect_punct(",")
        offset = _parse_vector(cur)
        cur.expect_punct(")")
        try:
            return Affine(matrix, offset)
        except RwdynError as exc:
            raise ParseError(name_tok.line, name_tok.col, str(exc)) from None
    if name == "compose":
        cur.expect_punct("(")
        fn = _parse_expr(cur)
        args = []
        while cur.eat_punct(","):
            args.append(_parse_expr(cur))
        cur.expect_punct(")")
        if not args:
            raise ParseError(name_tok.line, name_tok.col, "compose needs inner expressions")
        return Compose(fn, tuple(args))
    if name == "tuple":
        cur.expect_punct("(")
        parts = [_parse_expr(cur)]
        while cur.eat_punct(","):
            parts.append(_parse_expr(cur))
        cur.expect_punct(")")
        return TupleOf(tuple(parts))
    if name in _PRIMS:
        prim = _PRIMS[name]
        if cur.eat_punct("("):
            args = [_parse_expr(cur)]
            while cur.eat_punct(","):
                args.append(_parse_expr(cur))
            cur.expect_punct(")")
            return Compose(prim, tuple(args))
        return prim
    raise ParseError(name_tok.line, name_tok.col, f"unknown expression {name!r}")


def parse_expr(src: str) -> FnExpr:
    cur = _Cursor(_tokenize(src))
    e = _parse_expr(cur)
    end = cur.peek()
    if end.kind != "END":
        raise ParseError(end.line, end.col, f"trailing input {end.text!r}")
    return e


def print_number(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return repr(float(x))


def _print_vector(v) -> str:
    return "[" + ",".join(print_number(x) for x in v) + "]"


def print_expr(e: FnExpr) -> str:
    match e:
        case Lit(value):
            if isinstance(value, tuple):
                return _print_vector(value)
            if isinstance(value, (Node, Variable)):
                raise RwdynError("term literals have no textual form")
            return print_number(value)
        case Proj(index):
            return f"proj({index})"
        case Prim(name):
            return name
        case Affine(matrix, offset):
            rows = ",".join(_print_vector(r) for r in matrix)
            return f"affine([{rows}],{_print_vector(offset)})"
        case Compose(fn, args):
            inner = ",".join(print_expr(a) for a in args)
            if isinstance(fn, Prim):
                return f"{fn.name}({inner})"
            return f"compose({print_expr(fn)},{inner})"
        case TupleOf(parts):
            return "tuple(" + ",".join(print_expr(p) for p in parts) + ")"
    raise RwdynError(f"expression {e!r} has no textual form")


# ---------------------------------------------------------------------------
# model files


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.severity}: {self.message}"


@dataclass
class ModelFile:
    """Parsed and validated contents of one ``.rwm`` file."""

    signature: Signature
    variables: tuple[Variable, ...] = ()
    rule: Optional[RewriteRule] = None
    carrier: Optional[Carrier] = None
    interp: Optional[dict[Symbol, FnExpr]] = None
    initial_term: Optional[Term] = None
    system: Optional[CartesianDynamicalSystem] = None
    initial_state: Optional[StateVector] = None
    context: Optional[FnExpr] = None
    warnings: tuple[Diagnostic, ...] = ()

    def has_model(self) -> bool:
        return self.rule is not None and self.interp is not None and self.initial_term is not None

    def rewriting_model(self) -> RewritingModel:
        if not self.has_model():
            raise ModelError([Diagnostic(1, 1, "file does not define a rewriting model")])
        assert self.rule and self.interp is not None and self.carrier and self.initial_term
        algebra = SigmaAlgebra(self.signature, self.carrier, self.interp)
        return RewritingModel(self.rule, algebra, self.initial_term)

    def system_with_state(self) -> tuple[CartesianDynamicalSystem, StateVector]:
        if self.system is None:
            raise ModelError([Diagnostic(1, 1, "file does not define a system")])
        if self.initial_state is None:
            raise ModelError([Diagnostic(1, 1, "file has no initial state")])
        state = tuple(
            coerce_value(self.system.carrier, v) for v in self.initial_state
        )
        return self.system, state


_CARRIERS = {"rational": RATIONAL, "float": FLOAT, "term": TERM}


def _parse_carrier(cur: _Cursor) -> Carrier:
    t = cur.expect_ident("carrier kind")
    if t.text == "vector":
        cur.expect_punct("(")
        n = _parse_number(cur)
        cur.expect_punct(")")
        if n.denominator != 1 or n < 1:
            raise ParseError(t.line, t.col, "vector length must be a positive integer")
        return vector_carrier(int(n))
    if t.text not in _CARRIERS:
        raise ParseError(t.line, t.col, f"unknown carrier {t.text!r}")
    return _CARRIERS[t.text]


def _skip_block(cur: _Cursor) -> None:
    """Advance past the current brace block after an error."""
    depth = 0
    while True:
        t = cur.peek()
        if t.kind == "END":
            return
        cur.next()
        if t.kind == "PUNCT" and t.text == "{":
            depth += 1
        elif t.kind == "PUNCT" and t.text == "}":
            depth -= 1
            if depth <= 0:
                return


def _collect_term_tokens(cur: _Cursor) -> tuple[Token, list[Token]]:
    """Grab the tokens of one term: an identifier plus a balanced paren group."""
    start = cur.expect_ident("term")
    toks = [start]
    if cur.at_punct("("):
        depth = 0
        while True:
            t = cur.peek()
            if t.kind == "END":
                break
            if t.kind == "PUNCT" and t.text == "(":
                depth += 1
            elif t.kind == "PUNCT" and t.text == ")":
                depth -= 1
            toks.append(cur.next())
            if depth == 0:
                break
    return start, toks


class _ModelParser:
    def __init__(self, src: str):
        self.diags: list[Diagnostic] = []
        try:
            self.cur = _Cursor(_tokenize(src))
        except ParseError as exc:
            self.diags.append(Diagnostic(exc.line, exc.col, exc.message))
            self.cur = _Cursor([Token("END", "", 1, 1)])
        self.sig_symbols: list[Symbol] = []
        self.var_names: list[tuple[Token, str]] = []
        self.rule_parts: dict[str, object] = {}
        self.algebra_carrier: Optional[Carrier] = None
        self.interp_entries: list[tuple[Token, str, FnExpr]] = []
        self.initial_entries: dict[str, object] = {}
        self.system_entries: dict[str, object] = {}
        self.seen_blocks: set[str] = set()

    def fail(self, tok: Token, message: str, severity: str = "error") -> None:
        self.diags.append(Diagnostic(tok.line, tok.col, message, severity))

    def catch(self, exc: Exception) -> None:
        if isinstance(exc, ParseError):
            self.diags.append(Diagnostic(exc.line, exc.col, exc.message))
        else:
            self.diags.append(Diagnostic(self.cur.peek().line, self.cur.peek().col, str(exc)))

    # -- block readers ------------------------------------------------

    def read_blocks(self) -> None:
        cur = self.cur
        while cur.peek().kind != "END":
            tok = cur.peek()
            if tok.kind != "IDENT":
                self.fail(tok, f"expected a block name, found {tok.text!r}")
                cur.next()
                continue
            name = tok.text
            cur.next()
            if name in self.seen_blocks:
                self.fail(tok, f"duplicate block {name!r}")
                _skip_block(cur)
                continue
            self.seen_blocks.add(name)
            handler = getattr(self, f"block_{name}", None)
            if handler is None:
                self.fail(tok, f"unknown block {name!r}")
                _skip_block(cur)
                continue
            try:
                cur.expect_punct("{")
                handler()
                cur.expect_punct("}")
            except ParseError as exc:
                self.catch(exc)
                _skip_block(cur)

    def block_signature(self) -> None:
        cur = self.cur
        while not cur.at_punct("}"):
            tok = cur.expect_ident("symbol name")
            cur.expect_punct("/")
            arity_tok = cur.peek()
            arity = _parse_number(cur)
            if arity.denominator != 1 or arity < 0:
                raise ParseError(arity_tok.line, arity_tok.col, "arity must be a natural number")
            if tok.text == IOTA.name and int(arity) != 1:
                self.fail(tok, "iota is reserved as the unary identity operator")
            else:
                self.sig_symbols.append(Symbol(tok.text, int(arity)))
            cur.eat_punct(",")

    def block_variables(self) -> None:
        cur = self.cur
        while not cur.at_punct("}"):
            tok = cur.expect_ident("variable name")
            self.var_names.append((tok, tok.text))
            cur.eat_punct(",")

    def block_rule(self) -> None:
        cur = self.cur
        while not cur.at_punct("}"):
            key = cur.expect_ident("rule key")
            cur.expect_punct(":")
            if key.text in ("lhs", "rhs"):
                self.rule_parts[key.text] = _collect_term_tokens(cur)
            elif key.text == "at":
                parts = []
                while cur.peek().kind == "NUMBER" or cur.at_punct(".") or (
                    cur.peek().kind == "IDENT" and cur.peek().text == "e" and not parts
                ):
                    parts.append(cur.next().text)
                try:
                    self.rule_parts["at"] = parse_position("".join(parts))
                except ParseError:
                    self.fail(key, f"malformed position {''.join(parts)!r}")
            else:
                raise ParseError(key.line, key.col, f"unknown rule key {key.text!r}")

    def block_algebra(self) -> None:
        cur = self.cur
        while not cur.at_punct("}"):
            key = cur.expect_ident("algebra entry")
            cur.expect_punct(":")
            if key.text == "carrier":
                self.algebra_carrier = _parse_carrier(cur)
            else:
                expr = _parse_expr(cur)
                self.interp_entries.append((key, key.text, expr))

    def block_initial(self) -> None:
        cur = self.cur
        while not cur.at_punct("}"):
            key = cur.expect_ident("initial entry")
            cur.expect_punct(":")
            if key.text == "term":
                self.initial_entries["term"] = _collect_term_tokens(cur)
            elif key.text == "state":
                self.initial_entries["state"] = _parse_vector(cur)
            else:
                raise ParseError(key.line, key.col, f"unknown initial key {key.text!r}")

    def block_system(self) -> None:
        cur = self.cur
        while not cur.at_punct("}"):
            key = cur.expect_ident("system entry")
            cur.expect_punct(":")
            if key.text == "carrier":
                self.system_entries["carrier"] = _parse_carrier(cur)
            elif key.text == "dim":
                n = _parse_number(cur)
                if n.denominator != 1 or n < 1:
                    raise ParseError(key.line, key.col, "dim must be a positive integer")
                self.system_entries["dim"] = int(n)
            elif key.text == "matrix":
                self.system_entries["matrix"] = (key, _parse_matrix(cur))
            elif key.text == "functional":
                self.system_entries["functional"] = (key, _parse_vector(cur))
            elif key.text == "transition":
                cur.expect_punct("(")
                exprs = [_parse_expr(cur)]
                while cur.eat_punct(","):
                    exprs.append(_parse_expr(cur))
                cur.expect_punct(")")
                self.system_entries["transition"] = (key, tuple(exprs))
            elif key.text == "output":
                self.system_entries["output"] = (key, _parse_expr(cur))
            elif key.text == "context":
                self.system_entries["context"] = _parse_expr(cur)
            else:
                raise ParseError(key.line, key.col, f"unknown system key {key.text!r}")

    # -- assembly -----------------------------------------------------

    def assemble(self) -> ModelFile:
        try:
            signature = Signature(tuple(self.sig_symbols)).extended()
        except RwdynError as exc:
            self.fail(Token("IDENT", "", 1, 1), str(exc))
            signature = Signature((IOTA,))

        declared: dict[str, Variable] = {}
        for tok, name in self.var_names:
            if signature.lookup(name) is not None:
                self.fail(tok, f"variable {name!r} collides with an operator name")
            else:
                declared[name] = Variable(name)

        def term_of(part) -> Optional[Term]:
            start, toks = part
            sub = _Cursor(toks + [Token("END", "", start.line, start.col)])
            try:
                t = _parse_term(sub, signature, declared)
            except ParseError as exc:
                self.catch(exc)
                return None
            if sub.peek().kind != "END":
                self.fail(sub.peek(), f"trailing input {sub.peek().text!r}")
                return None
            return t

        rule: Optional[RewriteRule] = None
        if self.rule_parts:
            lhs = term_of(self.rule_parts["lhs"]) if "lhs" in self.rule_parts else None
            rhs = term_of(self.rule_parts["rhs"]) if "rhs" in self.rule_parts else None
            if "lhs" not in self.rule_parts or "rhs" not in self.rule_parts:
                self.fail(Token("IDENT", "rule", 1, 1), "rule needs both lhs and rhs")
            pos = self.rule_parts.get("at", ROOT)
            if lhs is not None and rhs is not None:
                try:
                    identity = Identity(lhs, rhs)
                except RwdynError as exc:
                    self.fail(Token("IDENT", "rule", 1, 1), str(exc))
                    identity = None
                if identity is not None:
                    if iterability_witness(identity) is None:
                        # bounded tracing still works; projection will refuse
                        self.fail(
                            Token("IDENT", "rule", 1, 1),
                            "rule cannot be iterated indefinitely: "
                            "rhs is not a substitution instance of lhs",
                            severity="warning",
                        )
                    rule = RewriteRule(identity, pos)  # type: ignore[arg-type]

        carrier = self.algebra_carrier
        interp: Optional[dict[Symbol, FnExpr]] = None
        if self.interp_entries or carrier is not None:
            if carrier is None:
                self.fail(Token("IDENT", "algebra", 1, 1), "algebra block needs a carrier")
                carrier = RATIONAL
            interp = {}
            for tok, name, expr in self.interp_entries:
                sym = signature.lookup(name)
                if sym is None:
                    self.fail(tok, f"interpretation for undeclared symbol {name!r}")
                elif sym == IOTA:
                    continue  # implicit identity
                else:
                    interp[sym] = expr
            if carrier.kind != "term":
                for sym in signature:
                    if sym != IOTA and sym not in interp:
                        self.fail(
                            Token("IDENT", "algebra", 1, 1),
                            f"missing interpretation for {sym!r}",
                        )

        initial_term: Optional[Term] = None
        if "term" in self.initial_entries:
            initial_term = term_of(self.initial_entries["term"])
            if initial_term is not None and not is_ground(initial_term):
                names = ", ".join(sorted(v.name for v in vars_of(initial_term)))
                self.fail(Token("IDENT", "initial", 1, 1), f"initial term is not ground ({names})")
                initial_term = None
        initial_state: Optional[StateVector] = self.initial_entries.get("state")  # type: ignore[assignment]

        system: Optional[CartesianDynamicalSystem] = None
        context: Optional[FnExpr] = self.system_entries.get("context")  # type: ignore[assignment]
        if self.system_entries:
            sys_carrier: Carrier = self.system_entries.get("carrier", FLOAT)  # type: ignore[assignment]
            has_linear = "matrix" in self.system_entries or "functional" in self.system_entries
            has_general = "transition" in self.system_entries or "output" in self.system_entries
            if has_linear and has_general:
                self.fail(
                    Token("IDENT", "system", 1, 1),
                    "system block mixes linear and expression forms",
                )
            elif has_linear:
                if "matrix" not in self.system_entries or "functional" not in self.system_entries:
                    self.fail(
                        Token("IDENT", "system", 1, 1),
                        "linear system needs both matrix and functional",
                    )
                else:
                    mk, matrix = self.system_entries["matrix"]  # type: ignore[misc]
                    fk, functional = self.system_entries["functional"]  # type: ignore[misc]
                    d = len(matrix)
                    if any(len(row) != d for row in matrix):
                        self.fail(mk, "transition matrix must be square")
                    elif len(functional) != d:
                        self.fail(fk, "functional length must match the matrix")
                    elif "dim" in self.system_entries and self.system_entries["dim"] != d:
                        self.fail(mk, "declared dim disagrees with the matrix")
                    else:
                        system = linear_system(matrix, functional, sys_carrier)
            elif has_general:
                if "transition" not in self.system_entries or "output" not in self.system_entries:
                    self.fail(
                        Token("IDENT", "system", 1, 1),
                        "system needs both transition and output",
                    )
                else:
                    tk, transition = self.system_entries["transition"]  # type: ignore[misc]
                    _, output = self.system_entries["output"]  # type: ignore[misc]
                    d = self.system_entries.get("dim", len(transition))
                    if d != len(transition):
                        self.fail(tk, "declared dim disagrees with the transition arity")
                    else:
                        system = CartesianDynamicalSystem(
                            int(d), tuple(transition), output, sys_carrier
                        )
            else:
                self.fail(Token("IDENT", "system", 1, 1), "empty system block")
            if system is not None and initial_state is not None:
                if len(initial_state) != system.dim:
                    self.fail(
                        Token("IDENT", "initial", 1, 1),
                        f"state length {len(initial_state)} != system dimension {system.dim}",
                    )
                    initial_state = None

        if rule is not None and initial_term is not None:
            from .rewriting import instance_at

            if not instance_at(initial_term, rule.lhs, rule.position):
                self.fail(
                    Token("IDENT", "initial", 1, 1),
                    "initial term does not match the rule at its position",
                )
        if not self.seen_blocks:
            self.fail(Token("IDENT", "", 1, 1), "empty model file")

        warnings = tuple(d for d in self.diags if d.severity == "warning")
        return ModelFile(
            signature=signature,
            variables=tuple(declared.values()),
            rule=rule,
            carrier=carrier,
            interp=interp,
            initial_term=initial_term,
            system=system,
            initial_state=initial_state,
            context=context,
            warnings=warnings,
        )


def parse_model(src: str) -> ModelFile:
    """Parse and fully validate a model file.

    Raises ``ModelError`` carrying every error-severity diagnostic found;
    warnings (such as a rule that cannot be iterated indefinitely) ride along
    on the returned file.
    """
    parser = _ModelParser(src)
    parser.read_blocks()
    mf = parser.assemble()
    errors = [d for d in parser.diags if d.severity == "error"]
    if errors:
        raise ModelError(parser.diags)
    return mf


def print_model(mf: ModelFile) -> str:
    """Canonical text for a model file; ``parse_model`` returns an equal value."""
    lines: list[str] = []
    symbols = [s for s in mf.signature if s != IOTA]
    if symbols or mf.rule is not None:
        decls = ", ".join(f"{s.name}/{s.arity}" for s in symbols)
        lines.append(f"signature {{ {decls} }}")
    if mf.variables:
        lines.append("variables { " + ", ".join(v.name for v in mf.variables) + " }")
    if mf.rule is not None:
        lines.append("rule {")
        lines.append(f"  lhs: {print_term(mf.rule.lhs)}")
        lines.append(f"  rhs: {print_term(mf.rule.rhs)}")
        lines.append(f"  at: {print_position(mf.rule.position)}")
        lines.append("}")
    if mf.interp is not None and mf.carrier is not None:
        lines.append("algebra {")
        lines.append(f"  carrier: {mf.carrier}")
        for sym in mf.signature:
            if sym == IOTA or sym not in mf.interp:
                continue
            lines.append(f"  {sym.name}: {print_expr(mf.interp[sym])}")
        lines.append("}")
    if mf.system is not None:
        lines.append("system {")
        lines.append(f"  carrier: {mf.system.carrier}")
        lines.append(f"  dim: {mf.system.dim}")
        from .dynamics import system_matrices

        mats = system_matrices(mf.system)
        if mats is not None and mf.system.transition and all(
            isinstance(e, Affine) for e in mf.system.transition
        ) and isinstance(mf.system.output, Affine):
            A, b = mats
            rows = ",".join(_print_vector(r) for r in A)
            lines.append(f"  matrix: [{rows}]")
            lines.append(f"  functional: {_print_vector(b)}")
        else:
            exprs = ", ".join(print_expr(e) for e in mf.system.transition)
            lines.append(f"  transition: ({exprs})")
            lines.append(f"  output: {print_expr(mf.system.output)}")
        if mf.context is not None:
            lines.append(f"  context: {print_expr(mf.context)}")
        lines.append("}")
    if mf.initial_term is not None or mf.initial_state is not None:
        lines.append("initial {")
        if mf.initial_term is not None:
            lines.append(f"  term: {print_term(mf.initial_term)}")
        if mf.initial_state is not None:
            lines.append(f"  state: {_print_vector(mf.initial_state)}")
        lines.append("}")
    return "\n".join(lines) + "\n"

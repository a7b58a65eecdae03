"""Exception hierarchy shared by all rwdyn modules."""

from __future__ import annotations


class RwdynError(Exception):
    """Base class for every error raised by this package."""


class SignatureError(RwdynError):
    """Malformed symbol or signature (empty name, negative arity, name clash)."""


class ArityError(RwdynError):
    """Child count, leaf count, or argument count does not match a declared arity."""


class InvalidPositionError(RwdynError):
    """A position does not address a node of the term at hand."""

    def __init__(self, position: tuple[int, ...], message: str | None = None):
        self.position = position
        super().__init__(message or f"position {'.'.join(map(str, position)) or 'e'} not in term")


class NoMatchError(RwdynError):
    """The rewrite pattern does not match the subject at the rewrite position."""

    def __init__(self, position: tuple[int, ...], message: str | None = None):
        self.position = position
        super().__init__(
            message or f"left-hand side does not match at position {'.'.join(map(str, position)) or 'e'}"
        )


class NotIterableRuleError(RwdynError):
    """The rule's right-hand side is not a substitution instance of its left-hand side."""


class NonUniformDepthError(RwdynError):
    """Leaf lifting requires every leaf of the term at the same depth."""


class UnmappableLeafError(RwdynError):
    """A constant leaf of the rewritten side has no value-equal leaf on the pattern side."""


class UnknownSymbolError(RwdynError):
    """A term uses a symbol the algebra does not interpret."""


class CarrierError(RwdynError):
    """A value or operation does not fit the algebra's carrier."""


class UnboundVariableError(RwdynError):
    """Evaluation reached a variable with no assigned value."""


class DimensionError(RwdynError):
    """State vector or matrix shape mismatch."""


class SequenceTooShortError(RwdynError):
    """Not enough samples for the requested window or fit depth."""


class LimitExceededError(RwdynError):
    """A configured safety limit (term nodes, steps) was exceeded."""


class ParseError(RwdynError):
    """Syntax error with source location."""

    def __init__(self, line: int, col: int, message: str):
        self.line = line
        self.col = col
        self.message = message
        super().__init__(f"{line}:{col}: {message}")


class ModelError(RwdynError):
    """Aggregated validation diagnostics for a model file."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics) or "invalid model")

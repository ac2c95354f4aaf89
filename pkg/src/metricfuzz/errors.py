from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class Span:
    """Half-open character range [start, end) plus 1-based line/column of start."""

    start: int
    end: int
    line: int
    col: int


class FuzzError(Exception):
    kind = "error"

    def __init__(self, message: str, span: Optional[Span] = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def render(self, filename: str = "<input>") -> str:
        if self.span is None:
            return f"{filename}: {self.kind}: {self.message}"
        return f"{filename}:{self.span.line}:{self.span.col}: {self.kind}: {self.message}"


class ParseError(FuzzError):
    kind = "syntax error"


class LexError(ParseError):
    kind = "lexical error"


class UnboundTypeError(ParseError):
    kind = "unbound type identifier"

    def __init__(self, name: str, span: Optional[Span] = None):
        super().__init__(f"type identifier '{name}' is not defined", span)
        self.name = name


class DuplicateDefinitionError(ParseError):
    kind = "duplicate definition"


class TypeCheckError(FuzzError):
    kind = "type error"


class EnvTypeMismatch(TypeCheckError):
    def __init__(self, var: str, left, right, span: Optional[Span] = None):
        from .syntax import pretty_type

        super().__init__(
            f"variable '{var}' used at incompatible types "
            f"{pretty_type(left)} and {pretty_type(right)}",
            span,
        )
        self.var = var
        self.left = left
        self.right = right


class UnboundVariableError(TypeCheckError):
    kind = "unbound variable"


class SensitivityError(TypeCheckError):
    kind = "sensitivity error"

    def __init__(self, binder: str, bound, inferred, span: Optional[Span] = None, what: str = ""):
        detail = f" ({what})" if what else ""
        super().__init__(
            f"'{binder}' is used with sensitivity {inferred} but at most {bound} is allowed{detail}",
            span,
        )
        self.binder = binder
        self.bound = bound
        self.inferred = inferred


class UndefinedUnboxing(SensitivityError):
    kind = "sensitivity error"

    def __init__(self, binder: str, demand, scale, span: Optional[Span] = None):
        FuzzError.__init__(
            self,
            f"cannot unbox into '{binder}': it is used with sensitivity {demand} "
            f"but the box is scaled by {scale}",
            span,
        )
        self.binder = binder
        self.bound = scale
        self.inferred = demand

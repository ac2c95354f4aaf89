"""Abstract syntax: types, terms, values, and sensitivity environments.

Source spans ride along on terms for diagnostics but never take part in
equality, so ``parse(pretty(p)) == p`` compares structure only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, Mapping, NamedTuple, Optional, Tuple, Union

from .errors import EnvTypeMismatch, Span, UnboundTypeError
from .extreal import ExtReal, ZERO, add, ext_max, format_ext, mul

# --------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class Real:
    pass


@dataclass(frozen=True)
class Unit:
    pass


@dataclass(frozen=True)
class Lolli:
    domain: "TypeExpr"
    codomain: "TypeExpr"


@dataclass(frozen=True)
class Tensor:
    left: "TypeExpr"
    right: "TypeExpr"


@dataclass(frozen=True)
class With:
    left: "TypeExpr"
    right: "TypeExpr"


@dataclass(frozen=True)
class Sum:
    left: "TypeExpr"
    right: "TypeExpr"


@dataclass(frozen=True)
class Bang:
    index: ExtReal
    body: "TypeExpr"


@dataclass(frozen=True)
class Ident:
    name: str


TypeExpr = Union[Real, Unit, Lolli, Tensor, With, Sum, Bang, Ident]
DefEnv = Dict[str, TypeExpr]

REAL = Real()
UNIT = Unit()


def type_idents(t: TypeExpr) -> Iterator[str]:
    if isinstance(t, Ident):
        yield t.name
    elif isinstance(t, Bang):
        yield from type_idents(t.body)
    elif isinstance(t, (Lolli,)):
        yield from type_idents(t.domain)
        yield from type_idents(t.codomain)
    elif isinstance(t, (Tensor, With, Sum)):
        yield from type_idents(t.left)
        yield from type_idents(t.right)


def well_formed(phi: Mapping[str, TypeExpr], t: TypeExpr, span: Optional[Span] = None) -> None:
    """Raise UnboundTypeError unless every identifier in ``t`` is bound in ``phi``."""
    for name in type_idents(t):
        if name not in phi:
            raise UnboundTypeError(name, span)
    for idx in _bang_indices(t):
        if not isinstance(idx, ExtReal):
            raise TypeError(f"bang index must be an ExtReal, got {idx!r}")


def _bang_indices(t: TypeExpr) -> Iterator[ExtReal]:
    if isinstance(t, Bang):
        yield t.index
        yield from _bang_indices(t.body)
    elif isinstance(t, Lolli):
        yield from _bang_indices(t.domain)
        yield from _bang_indices(t.codomain)
    elif isinstance(t, (Tensor, With, Sum)):
        yield from _bang_indices(t.left)
        yield from _bang_indices(t.right)


def mentions_lolli(phi: Mapping[str, TypeExpr], t: TypeExpr) -> bool:
    """True when ``t`` contains a function type, looking through identifiers."""
    seen = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Lolli):
            return True
        if isinstance(u, Bang):
            stack.append(u.body)
        elif isinstance(u, (Tensor, With, Sum)):
            stack.extend((u.left, u.right))
        elif isinstance(u, Ident) and u.name not in seen:
            seen.add(u.name)
            stack.append(phi[u.name])
    return False


_TYPE_PREC = {Lolli: 0, Sum: 1, Tensor: 2, With: 2}
_TYPE_OP = {Lolli: "-o", Sum: "+", Tensor: "*", With: "&"}


def pretty_type(t: TypeExpr) -> str:
    if isinstance(t, Real):
        return "real"
    if isinstance(t, Unit):
        return "unit"
    if isinstance(t, Ident):
        return t.name
    if isinstance(t, Bang):
        return f"![{format_ext(t.index)}] {_type_operand(t.body, 3)}"
    if isinstance(t, Lolli):
        return f"{_type_operand(t.domain, 1)} -o {pretty_type(t.codomain)}"
    prec = _TYPE_PREC[type(t)]
    left = pretty_type(t.left)
    # left-assoc: a same-kind left child prints bare, anything looser or a
    # different operator at the same level is parenthesized
    if type(t.left) in _TYPE_PREC and (
        _TYPE_PREC[type(t.left)] < prec or type(t.left) is not type(t)
    ):
        left = f"({left})"
    return f"{left} {_TYPE_OP[type(t)]} {_type_operand(t.right, prec + 1)}"


def _type_operand(t: TypeExpr, min_prec: int) -> str:
    s = pretty_type(t)
    if type(t) in _TYPE_PREC and _TYPE_PREC[type(t)] < min_prec:
        return f"({s})"
    return s


# --------------------------------------------------------------------------
# Terms

_span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Const:
    value: float
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Plus:
    left: "Term"
    right: "Term"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class UnitVal:
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Lam:
    param: str
    annot: TypeExpr
    body: "Term"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class TensorPair:
    left: "Term"
    right: "Term"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class LetPair:
    x: str
    y: str
    bound: "Term"
    body: "Term"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class WithPair:
    left: "Term"
    right: "Term"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Proj:
    index: int
    arg: "Term"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Box:
    index: ExtReal
    body: "Term"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class LetBox:
    x: str
    bound: "Term"
    body: "Term"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Inl:
    other: TypeExpr
    body: "Term"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Inr:
    other: TypeExpr
    body: "Term"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Case:
    scrutinee: "Term"
    x: str
    left: "Term"
    y: str
    right: "Term"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Fold:
    alpha: str
    body: "Term"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Unfold:
    body: "Term"
    span: Optional[Span] = _span


@dataclass(frozen=True)
class Fix:
    index: ExtReal
    fname: str
    param: str
    annot_in: TypeExpr
    annot_out: TypeExpr
    body: "Term"
    span: Optional[Span] = _span


Term = Union[
    Var, Const, Plus, UnitVal, Lam, App, TensorPair, LetPair, WithPair, Proj,
    Box, LetBox, Inl, Inr, Case, Fold, Unfold, Fix,
]


def subterms(e: Term) -> Tuple[Term, ...]:
    if isinstance(e, (Plus, TensorPair, WithPair)):
        return (e.left, e.right)
    if isinstance(e, App):
        return (e.fn, e.arg)
    if isinstance(e, (LetPair, LetBox)):
        return (e.bound, e.body)
    if isinstance(e, Case):
        return (e.scrutinee, e.left, e.right)
    if isinstance(e, (Lam, Box, Inl, Inr, Fold, Unfold, Fix)):
        return (e.body,)
    if isinstance(e, Proj):
        return (e.arg,)
    return ()


def node_count(e: Term) -> int:
    return 1 + sum(node_count(s) for s in subterms(e))


def free_vars(e: Term) -> frozenset:
    if isinstance(e, Var):
        return frozenset([e.name])
    if isinstance(e, Lam):
        return free_vars(e.body) - {e.param}
    if isinstance(e, Fix):
        return free_vars(e.body) - {e.fname, e.param}
    if isinstance(e, LetPair):
        return free_vars(e.bound) | (free_vars(e.body) - {e.x, e.y})
    if isinstance(e, LetBox):
        return free_vars(e.bound) | (free_vars(e.body) - {e.x})
    if isinstance(e, Case):
        return (
            free_vars(e.scrutinee)
            | (free_vars(e.left) - {e.x})
            | (free_vars(e.right) - {e.y})
        )
    out = frozenset()
    for s in subterms(e):
        out |= free_vars(s)
    return out


def term_types(e: Term) -> Iterator[TypeExpr]:
    """Every type annotation appearing in ``e``."""
    if isinstance(e, Lam):
        yield e.annot
    elif isinstance(e, Fix):
        yield e.annot_in
        yield e.annot_out
    elif isinstance(e, (Inl, Inr)):
        yield e.other
    elif isinstance(e, Fold):
        yield Ident(e.alpha)
    for s in subterms(e):
        yield from term_types(s)


def substitute(e: Term, sub: Mapping[str, Term]) -> Term:
    """Replace free variables by closed terms. Closed replacements cannot be
    captured, so no renaming is needed."""
    if not sub:
        return e
    if isinstance(e, Var):
        return sub.get(e.name, e)
    if isinstance(e, (Const, UnitVal)):
        return e
    if isinstance(e, Lam):
        return Lam(e.param, e.annot, substitute(e.body, _without(sub, e.param)), span=e.span)
    if isinstance(e, Fix):
        inner = _without(sub, e.fname, e.param)
        return Fix(e.index, e.fname, e.param, e.annot_in, e.annot_out,
                   substitute(e.body, inner), span=e.span)
    if isinstance(e, LetPair):
        return LetPair(e.x, e.y, substitute(e.bound, sub),
                       substitute(e.body, _without(sub, e.x, e.y)), span=e.span)
    if isinstance(e, LetBox):
        return LetBox(e.x, substitute(e.bound, sub),
                      substitute(e.body, _without(sub, e.x)), span=e.span)
    if isinstance(e, Case):
        return Case(substitute(e.scrutinee, sub),
                    e.x, substitute(e.left, _without(sub, e.x)),
                    e.y, substitute(e.right, _without(sub, e.y)), span=e.span)
    if isinstance(e, Plus):
        return Plus(substitute(e.left, sub), substitute(e.right, sub), span=e.span)
    if isinstance(e, App):
        return App(substitute(e.fn, sub), substitute(e.arg, sub), span=e.span)
    if isinstance(e, TensorPair):
        return TensorPair(substitute(e.left, sub), substitute(e.right, sub), span=e.span)
    if isinstance(e, WithPair):
        return WithPair(substitute(e.left, sub), substitute(e.right, sub), span=e.span)
    if isinstance(e, Proj):
        return Proj(e.index, substitute(e.arg, sub), span=e.span)
    if isinstance(e, Box):
        return Box(e.index, substitute(e.body, sub), span=e.span)
    if isinstance(e, Inl):
        return Inl(e.other, substitute(e.body, sub), span=e.span)
    if isinstance(e, Inr):
        return Inr(e.other, substitute(e.body, sub), span=e.span)
    if isinstance(e, Fold):
        return Fold(e.alpha, substitute(e.body, sub), span=e.span)
    if isinstance(e, Unfold):
        return Unfold(substitute(e.body, sub), span=e.span)
    raise TypeError(f"not a term: {e!r}")


def _without(sub: Mapping[str, Term], *names: str) -> Dict[str, Term]:
    return {k: v for k, v in sub.items() if k not in names}


# --------------------------------------------------------------------------
# Values
#
# Injections, boxes and folds keep the annotation of the term that built
# them (excluded from equality) so a value can be turned back into a
# checkable term.

_annot = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class RealV:
    value: float


@dataclass(frozen=True)
class UnitV:
    pass


@dataclass(frozen=True)
class TensorV:
    left: "Value"
    right: "Value"


@dataclass(frozen=True)
class WithV:
    left: "Value"
    right: "Value"


@dataclass(frozen=True)
class BoxV:
    body: "Value"
    index: Optional[ExtReal] = _annot


@dataclass(frozen=True)
class InlV:
    body: "Value"
    other: Optional[TypeExpr] = _annot


@dataclass(frozen=True)
class InrV:
    body: "Value"
    other: Optional[TypeExpr] = _annot


@dataclass(frozen=True)
class FoldV:
    body: "Value"
    alpha: Optional[str] = _annot


@dataclass(frozen=True, eq=True)
class ClosureV:
    param: str
    body: Term
    captured: Mapping[str, "Value"]
    self_name: Optional[str] = None
    source: Optional[Term] = field(default=None, compare=False, repr=False)

    def __hash__(self) -> int:
        return hash((self.param, self.body, self.self_name))


Value = Union[RealV, UnitV, TensorV, WithV, BoxV, InlV, InrV, FoldV, ClosureV]


def value_to_term(v: Value) -> Term:
    """Read a closed value back as a closed term."""
    if isinstance(v, RealV):
        return Const(v.value)
    if isinstance(v, UnitV):
        return UnitVal()
    if isinstance(v, TensorV):
        return TensorPair(value_to_term(v.left), value_to_term(v.right))
    if isinstance(v, WithV):
        return WithPair(value_to_term(v.left), value_to_term(v.right))
    if isinstance(v, BoxV):
        _need(v.index, v)
        return Box(v.index, value_to_term(v.body))
    if isinstance(v, InlV):
        _need(v.other, v)
        return Inl(v.other, value_to_term(v.body))
    if isinstance(v, InrV):
        _need(v.other, v)
        return Inr(v.other, value_to_term(v.body))
    if isinstance(v, FoldV):
        _need(v.alpha, v)
        return Fold(v.alpha, value_to_term(v.body))
    if isinstance(v, ClosureV):
        _need(v.source, v)
        return substitute(v.source, {k: value_to_term(c) for k, c in v.captured.items()})
    raise TypeError(f"not a value: {v!r}")


def _need(annotation, v) -> None:
    if annotation is None:
        raise ValueError(f"value lacks the annotation needed to read it back: {v!r}")


def pretty_value(v: Value) -> str:
    from .parser import pretty_term

    return pretty_term(value_to_term(v))


# --------------------------------------------------------------------------
# Sensitivity environments


class Binding(NamedTuple):
    sens: ExtReal
    type: TypeExpr


SensEnv = Dict[str, Binding]


def sens_of(g: Mapping[str, Binding], x: str) -> ExtReal:
    b = g.get(x)
    return ZERO if b is None else b.sens


def scale_env(r, g: Mapping[str, Binding]) -> SensEnv:
    return {x: Binding(mul(r, b.sens), b.type) for x, b in g.items()}


def add_env(g: Mapping[str, Binding], d: Mapping[str, Binding]) -> SensEnv:
    """Pointwise sum; a variable missing on one side counts as sensitivity 0."""
    return _combine(g, d, add)


def join_env(g: Mapping[str, Binding], d: Mapping[str, Binding]) -> SensEnv:
    """Pointwise maximum; the least environment above both."""
    return _combine(g, d, ext_max)


def _combine(g, d, op) -> SensEnv:
    out = dict(g)
    for x, b in d.items():
        if x in out:
            a = out[x]
            if a.type != b.type:
                raise EnvTypeMismatch(x, a.type, b.type)
            out[x] = Binding(op(a.sens, b.sens), a.type)
        else:
            out[x] = Binding(op(ZERO, b.sens), b.type)
    return out


def drop(g: Mapping[str, Binding], *names: str) -> SensEnv:
    return {x: b for x, b in g.items() if x not in names}


def env_leq(g: Mapping[str, Binding], d: Mapping[str, Binding]) -> bool:
    """Pointwise order, absent entries read as 0."""
    return all(sens_of(g, x) <= sens_of(d, x) for x in set(g) | set(d))


def format_env(g: Mapping[str, Binding]) -> str:
    if not g:
        return "{}"
    parts = [f"{x} :[{format_ext(b.sens)}] {pretty_type(b.type)}" for x, b in sorted(g.items())]
    return "{" + ", ".join(parts) + "}"


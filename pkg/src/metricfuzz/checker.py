"""Sensitivity type inference.

``infer`` walks a term bottom-up and returns its type together with the
pointwise-least sensitivity environment under which it is derivable. The
declarative rules split and scale environments nondeterministically; here
splitting becomes ``add_env``, shared contexts (``<e1, e2>`` and case
branches) become ``join_env``, and unboxing picks its scale with
``div_ceil``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from . import syntax as S
from .errors import (
    EnvTypeMismatch,
    SensitivityError,
    TypeCheckError,
    UnboundVariableError,
    UndefinedUnboxing,
)
from .extreal import ONE, div_ceil, ext_max, leq, reciprocal_gap
from .syntax import Binding, pretty_type


@dataclass(frozen=True)
class TypingResult:
    type: S.TypeExpr
    env: S.SensEnv


def infer(
    phi: Mapping[str, S.TypeExpr],
    scope: Mapping[str, S.TypeExpr],
    e: S.Term,
    unsafe: bool = False,
) -> TypingResult:
    """Infer the type and minimal sensitivity environment of ``e``.

    ``unsafe`` skips the two sensitivity side conditions on binders (the
    1-sensitivity of lambda bodies and the recursion bound of ``fix``). It
    exists so the property harness can be shown to catch unsound programs.
    """
    return _Checker(phi, unsafe).infer(dict(scope), e)


def check_program(program, unsafe: bool = False) -> TypingResult:
    return infer(program.typedefs, program.freevars, program.main, unsafe=unsafe)


def type_of_value(phi: Mapping[str, S.TypeExpr], v: S.Value) -> S.TypeExpr:
    """Type of a closed value, by re-checking it as a term."""
    res = infer(phi, {}, S.value_to_term(v))
    if res.env:
        raise TypeCheckError(f"value is not closed: {S.format_env(res.env)}")
    return res.type


class _Checker:
    def __init__(self, phi: Mapping[str, S.TypeExpr], unsafe: bool):
        self.phi = phi
        self.unsafe = unsafe

    def fail(self, e: S.Term, message: str):
        raise TypeCheckError(message, e.span)

    def expect(self, e: S.Term, expected: S.TypeExpr, actual: S.TypeExpr, what: str):
        if expected != actual:
            self.fail(e, f"{what}: expected {pretty_type(expected)}, found {pretty_type(actual)}")

    def annot(self, e: S.Term, t: S.TypeExpr) -> None:
        S.well_formed(self.phi, t, e.span)

    def add(self, e: S.Term, g, d):
        try:
            return S.add_env(g, d)
        except EnvTypeMismatch as exc:
            exc.span = e.span
            raise

    def join(self, e: S.Term, g, d):
        try:
            return S.join_env(g, d)
        except EnvTypeMismatch as exc:
            exc.span = e.span
            raise

    def infer(self, scope: dict, e: S.Term) -> TypingResult:
        method = getattr(self, "_" + type(e).__name__)
        return method(scope, e)

    def _Var(self, scope, e: S.Var):
        if e.name not in scope:
            raise UnboundVariableError(f"variable '{e.name}' is not in scope", e.span)
        t = scope[e.name]
        return TypingResult(t, {e.name: Binding(ONE, t)})

    def _Const(self, scope, e):
        return TypingResult(S.REAL, {})

    def _UnitVal(self, scope, e):
        return TypingResult(S.UNIT, {})

    def _Plus(self, scope, e: S.Plus):
        l = self.infer(scope, e.left)
        r = self.infer(scope, e.right)
        self.expect(e.left, S.REAL, l.type, "left operand of +")
        self.expect(e.right, S.REAL, r.type, "right operand of +")
        return TypingResult(S.REAL, self.add(e, l.env, r.env))

    def _Lam(self, scope, e: S.Lam):
        self.annot(e, e.annot)
        body = self.infer({**scope, e.param: e.annot}, e.body)
        used = S.sens_of(body.env, e.param)
        if not self.unsafe and not leq(used, ONE):
            raise SensitivityError(e.param, ONE, used, e.span, "function bodies must be 1-sensitive")
        return TypingResult(S.Lolli(e.annot, body.type), S.drop(body.env, e.param))

    def _App(self, scope, e: S.App):
        f = self.infer(scope, e.fn)
        a = self.infer(scope, e.arg)
        if not isinstance(f.type, S.Lolli):
            self.fail(e.fn, f"applying a non-function of type {pretty_type(f.type)}")
        self.expect(e.arg, f.type.domain, a.type, "function argument")
        return TypingResult(f.type.codomain, self.add(e, f.env, a.env))

    def _TensorPair(self, scope, e: S.TensorPair):
        l = self.infer(scope, e.left)
        r = self.infer(scope, e.right)
        return TypingResult(S.Tensor(l.type, r.type), self.add(e, l.env, r.env))

    def _WithPair(self, scope, e: S.WithPair):
        l = self.infer(scope, e.left)
        r = self.infer(scope, e.right)
        return TypingResult(S.With(l.type, r.type), self.join(e, l.env, r.env))

    def _Proj(self, scope, e: S.Proj):
        a = self.infer(scope, e.arg)
        if not isinstance(a.type, S.With):
            self.fail(e.arg, f"projection expects a & pair, found {pretty_type(a.type)}")
        t = a.type.left if e.index == 1 else a.type.right
        return TypingResult(t, a.env)

    def _LetPair(self, scope, e: S.LetPair):
        bound = self.infer(scope, e.bound)
        if not isinstance(bound.type, S.Tensor):
            self.fail(e.bound, f"let-pair expects a * pair, found {pretty_type(bound.type)}")
        body = self.infer({**scope, e.x: bound.type.left, e.y: bound.type.right}, e.body)
        r = ext_max(S.sens_of(body.env, e.x), S.sens_of(body.env, e.y))
        env = self.add(e, S.scale_env(r, bound.env), S.drop(body.env, e.x, e.y))
        return TypingResult(body.type, env)

    def _Box(self, scope, e: S.Box):
        body = self.infer(scope, e.body)
        return TypingResult(S.Bang(e.index, body.type), S.scale_env(e.index, body.env))

    def _LetBox(self, scope, e: S.LetBox):
        bound = self.infer(scope, e.bound)
        if not isinstance(bound.type, S.Bang):
            self.fail(e.bound, f"let ! expects a boxed value, found {pretty_type(bound.type)}")
        s = bound.type.index
        body = self.infer({**scope, e.x: bound.type.body}, e.body)
        t = S.sens_of(body.env, e.x)
        r = div_ceil(t, s)
        if r is None:
            raise UndefinedUnboxing(e.x, t, s, e.span)
        env = self.add(e, S.scale_env(r, bound.env), S.drop(body.env, e.x))
        return TypingResult(body.type, env)

    def _Inl(self, scope, e: S.Inl):
        self.annot(e, e.other)
        body = self.infer(scope, e.body)
        return TypingResult(S.Sum(body.type, e.other), body.env)

    def _Inr(self, scope, e: S.Inr):
        self.annot(e, e.other)
        body = self.infer(scope, e.body)
        return TypingResult(S.Sum(e.other, body.type), body.env)

    def _Case(self, scope, e: S.Case):
        scrut = self.infer(scope, e.scrutinee)
        if not isinstance(scrut.type, S.Sum):
            self.fail(e.scrutinee, f"case expects a sum, found {pretty_type(scrut.type)}")
        left = self.infer({**scope, e.x: scrut.type.left}, e.left)
        right = self.infer({**scope, e.y: scrut.type.right}, e.right)
        self.expect(e.right, left.type, right.type, "case branches disagree")
        r = ext_max(S.sens_of(left.env, e.x), S.sens_of(right.env, e.y))
        branches = self.join(e, S.drop(left.env, e.x), S.drop(right.env, e.y))
        env = self.add(e, S.scale_env(r, scrut.env), branches)
        return TypingResult(left.type, env)

    def _Fold(self, scope, e: S.Fold):
        if e.alpha not in self.phi:
            self.annot(e, S.Ident(e.alpha))
        body = self.infer(scope, e.body)
        self.expect(e.body, self.phi[e.alpha], body.type, f"fold[{e.alpha}]")
        return TypingResult(S.Ident(e.alpha), body.env)

    def _Unfold(self, scope, e: S.Unfold):
        body = self.infer(scope, e.body)
        if not isinstance(body.type, S.Ident):
            self.fail(e.body, f"unfold expects a recursive type, found {pretty_type(body.type)}")
        return TypingResult(self.phi[body.type.name], body.env)

    def _Fix(self, scope, e: S.Fix):
        self.annot(e, e.annot_in)
        self.annot(e, e.annot_out)
        fn_type = S.Lolli(e.annot_in, e.annot_out)
        lam = S.Lam(e.param, e.annot_in, e.body, span=e.span)
        res = self.infer({**scope, e.fname: fn_type}, lam)
        self.expect(e.body, fn_type, res.type, f"body of fix {e.fname}")
        used = S.sens_of(res.env, e.fname)
        if not self.unsafe and not leq(used, e.index):
            raise SensitivityError(e.fname, e.index, used, e.span, "recursive calls exceed the fix bound")
        scale = reciprocal_gap(e.index)
        return TypingResult(fn_type, S.scale_env(scale, S.drop(res.env, e.fname)))


def declared_sensitivities(program, result: TypingResult) -> S.SensEnv:
    """The inferred environment extended with 0 for unused declarations."""
    env = {}
    for x, t in program.freevars.items():
        env[x] = Binding(S.sens_of(result.env, x), t)
    return env


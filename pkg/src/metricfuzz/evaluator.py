"""Fuel-bounded call-by-value evaluation.

The relation ``e -> v`` is standard left-to-right call-by-value big-step
semantics. It is run on an explicit continuation stack so that deep
recursion in the object program never touches the Python stack. One unit
of fuel is spent per evaluated term node, i.e. per big-step rule
application; running out of fuel stands in for divergence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Union

from . import syntax as S


@dataclass(frozen=True)
class Terminated:
    value: S.Value
    fuel_used: int


@dataclass(frozen=True)
class FuelExhausted:
    fuel_used: int


@dataclass(frozen=True)
class Stuck:
    description: str


Outcome = Union[Terminated, FuelExhausted, Stuck]


class _StuckSignal(Exception):
    pass


def evaluate(
    phi: Optional[Mapping[str, S.TypeExpr]],
    env: Mapping[str, S.Value],
    e: S.Term,
    fuel: int,
) -> Outcome:
    """Evaluate ``e`` under the value environment ``env``.

    ``phi`` is accepted for symmetry with the checker; fold and unfold are
    untyped at run time, so evaluation never consults it.
    """
    return _Machine(fuel).run(e, dict(env))


def apply_value(
    phi: Optional[Mapping[str, S.TypeExpr]],
    fn: S.Value,
    arg: S.Value,
    fuel: int,
) -> Outcome:
    """Apply a closure value to an argument value (one application rule)."""
    return _Machine(fuel).run_apply(fn, arg)


def run_program(program, inputs: Mapping[str, S.Value], fuel: int) -> Outcome:
    return evaluate(program.typedefs, inputs, program.main, fuel)


class _Machine:
    def __init__(self, fuel: int):
        if fuel < 0:
            raise ValueError("fuel must be nonnegative")
        self.fuel = fuel
        self.used = 0
        self._fv: Dict[int, frozenset] = {}

    def run(self, e: S.Term, env: Dict[str, S.Value]) -> Outcome:
        try:
            return self._loop(e, env, [])
        except _StuckSignal as exc:
            return Stuck(str(exc))

    def run_apply(self, fn: S.Value, arg: S.Value) -> Outcome:
        if self.used >= self.fuel:
            return FuelExhausted(self.used)
        self.used += 1
        try:
            body, env = self._enter(fn, arg)
            return self._loop(body, env, [])
        except _StuckSignal as exc:
            return Stuck(str(exc))

    def _free(self, e: S.Term) -> frozenset:
        key = id(e)
        fv = self._fv.get(key)
        if fv is None:
            fv = self._fv[key] = S.free_vars(e)
        return fv

    def _closure(self, e, env, param, body, self_name) -> S.ClosureV:
        captured = {x: env[x] for x in sorted(self._free(e)) if x in env}
        return S.ClosureV(param, body, captured, self_name, source=e)

    @staticmethod
    def _enter(fn: S.Value, arg: S.Value):
        if not isinstance(fn, S.ClosureV):
            raise _StuckSignal(f"applying a non-function value {fn!r}")
        env = dict(fn.captured)
        if fn.self_name is not None:
            env[fn.self_name] = fn
        env[fn.param] = arg
        return fn.body, env

    def _loop(self, e: Optional[S.Term], env: Dict[str, S.Value], stack: List[tuple]) -> Outcome:
        value: Optional[S.Value] = None
        while True:
            if e is not None:
                if self.used >= self.fuel:
                    return FuelExhausted(self.used)
                self.used += 1
                t = type(e)
                if t is S.Var:
                    if e.name not in env:
                        raise _StuckSignal(f"unbound variable '{e.name}'")
                    value, e = env[e.name], None
                elif t is S.Const:
                    value, e = S.RealV(e.value), None
                elif t is S.UnitVal:
                    value, e = S.UnitV(), None
                elif t is S.Lam:
                    value, e = self._closure(e, env, e.param, e.body, None), None
                elif t is S.Fix:
                    value, e = self._closure(e, env, e.param, e.body, e.fname), None
                elif t is S.Plus:
                    stack.append(("plus", e.right, env))
                    e = e.left
                elif t is S.App:
                    stack.append(("app", e.arg, env))
                    e = e.fn
                elif t is S.TensorPair:
                    stack.append(("tensor", e.right, env))
                    e = e.left
                elif t is S.WithPair:
                    stack.append(("with", e.right, env))
                    e = e.left
                elif t is S.Proj:
                    stack.append(("proj", e.index))
                    e = e.arg
                elif t is S.Box:
                    stack.append(("box", e.index))
                    e = e.body
                elif t is S.LetPair:
                    stack.append(("letpair", e, env))
                    e = e.bound
                elif t is S.LetBox:
                    stack.append(("letbox", e, env))
                    e = e.bound
                elif t is S.Inl:
                    stack.append(("inl", e.other))
                    e = e.body
                elif t is S.Inr:
                    stack.append(("inr", e.other))
                    e = e.body
                elif t is S.Case:
                    stack.append(("case", e, env))
                    e = e.scrutinee
                elif t is S.Fold:
                    stack.append(("fold", e.alpha))
                    e = e.body
                elif t is S.Unfold:
                    stack.append(("unfold",))
                    e = e.body
                else:
                    raise _StuckSignal(f"not a term: {e!r}")
                continue

            if not stack:
                return Terminated(value, self.used)
            frame = stack.pop()
            tag = frame[0]
            if tag in ("plus", "app", "tensor", "with"):
                # first operand done; evaluate the second
                stack.append((tag + "2", value))
                e, env = frame[1], frame[2]
            elif tag == "plus2":
                a = frame[1]
                if not (isinstance(a, S.RealV) and isinstance(value, S.RealV)):
                    raise _StuckSignal("adding non-real values")
                value = S.RealV(a.value + value.value)
            elif tag == "app2":
                e, env = self._enter(frame[1], value)
            elif tag == "tensor2":
                value = S.TensorV(frame[1], value)
            elif tag == "with2":
                value = S.WithV(frame[1], value)
            elif tag == "proj":
                if not isinstance(value, S.WithV):
                    raise _StuckSignal("projecting from a non-& pair")
                value = value.left if frame[1] == 1 else value.right
            elif tag == "box":
                value = S.BoxV(value, index=frame[1])
            elif tag == "inl":
                value = S.InlV(value, other=frame[1])
            elif tag == "inr":
                value = S.InrV(value, other=frame[1])
            elif tag == "fold":
                value = S.FoldV(value, alpha=frame[1])
            elif tag == "unfold":
                if not isinstance(value, S.FoldV):
                    raise _StuckSignal("unfolding a non-folded value")
                value = value.body
            elif tag == "letpair":
                term, outer = frame[1], frame[2]
                if not isinstance(value, S.TensorV):
                    raise _StuckSignal("let-pair on a non-* pair")
                env = {**outer, term.x: value.left, term.y: value.right}
                e = term.body
            elif tag == "letbox":
                term, outer = frame[1], frame[2]
                if not isinstance(value, S.BoxV):
                    raise _StuckSignal("let ! on an unboxed value")
                env = {**outer, term.x: value.body}
                e = term.body
            elif tag == "case":
                term, outer = frame[1], frame[2]
                if isinstance(value, S.InlV):
                    env = {**outer, term.x: value.body}
                    e = term.left
                elif isinstance(value, S.InrV):
                    env = {**outer, term.y: value.body}
                    e = term.right
                else:
                    raise _StuckSignal("case on a non-injection")
            else:  # pragma: no cover
                raise AssertionError(tag)

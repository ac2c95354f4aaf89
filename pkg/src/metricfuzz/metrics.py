"""Distances between closed values, by structural recursion on their type.

Each type constructor contributes its metric: absolute difference on reals,
scaling for ``![r]``, sum for ``*``, max for ``&``, infinity across
different injections, and the sup metric on functions. The sup cannot be
computed, so function distances are a maximum over sampled probe arguments
and are reported as a lower bound.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Tuple

from . import syntax as S
from .evaluator import FuelExhausted, Stuck, Terminated, apply_value
from .extreal import INF, ZERO, ExtReal, add, ext_max, mul, to_json
from .generate import GenConfig, UnsupportedType, gen_value

EXACT = "exact"
LOWER_BOUND = "lower_bound"


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class DistanceResult:
    value: ExtReal
    mode: str = EXACT

    @property
    def exact(self) -> bool:
        return self.mode == EXACT

    def to_json(self) -> dict:
        return {"value": to_json(self.value), "mode": self.mode}


@dataclass(frozen=True)
class MetricConfig:
    samples: int = 16
    probe_fuel: int = 2000
    rng_seed: int = 0

    def __post_init__(self):
        if self.samples < 1 or self.probe_fuel < 1:
            raise ValueError("samples and probe_fuel must be at least 1")


def value_distance(
    phi: Mapping[str, S.TypeExpr],
    t: S.TypeExpr,
    v1: S.Value,
    v2: S.Value,
    cfg: MetricConfig = MetricConfig(),
) -> DistanceResult:
    d, exact = _distance(phi, t, v1, v2, cfg)
    return DistanceResult(d, EXACT if exact else LOWER_BOUND)


def env_distance(
    phi: Mapping[str, S.TypeExpr],
    declared: Mapping[str, S.Binding],
    s1: Mapping[str, S.Value],
    s2: Mapping[str, S.Value],
    cfg: MetricConfig = MetricConfig(),
) -> DistanceResult:
    """Distance between two substitutions in the scaled tensor of ``declared``."""
    total, exact = ZERO, True
    for x in sorted(declared):
        if x not in s1 or x not in s2:
            raise MetricError(f"substitution is missing a binding for '{x}'")
        b = declared[x]
        d, ex = _distance(phi, b.type, s1[x], s2[x], cfg)
        total = add(total, mul(b.sens, d))
        exact = exact and ex
    return DistanceResult(total, EXACT if exact else LOWER_BOUND)


def _shape(t, v1, v2) -> MetricError:
    return MetricError(f"values {v1!r} and {v2!r} do not have type {S.pretty_type(t)}")


def _distance(phi, t, v1, v2, cfg) -> Tuple[ExtReal, bool]:
    # explicit work stack: long lists would exhaust Python's recursion limit
    todo = [("eval", t, v1, v2)]
    done = []  # (distance, exact) results in post-order
    while todo:
        item = todo.pop()
        op = item[0]
        if op == "eval":
            _, t, v1, v2 = item
            _step(phi, t, v1, v2, cfg, todo, done)
        elif op == "scale":
            d, exact = done.pop()
            done.append((mul(item[1], d), exact))
        else:
            dr, er = done.pop()
            dl, el = done.pop()
            done.append((add(dl, dr) if op == "add" else ext_max(dl, dr), el and er))
    return done.pop()


def _step(phi, t, v1, v2, cfg, todo, done) -> None:
    if isinstance(t, S.Real):
        if not (isinstance(v1, S.RealV) and isinstance(v2, S.RealV)):
            raise _shape(t, v1, v2)
        done.append((ExtReal(abs(v1.value - v2.value)), True))
    elif isinstance(t, S.Unit):
        if not (isinstance(v1, S.UnitV) and isinstance(v2, S.UnitV)):
            raise _shape(t, v1, v2)
        done.append((ZERO, True))
    elif isinstance(t, S.Bang):
        if not (isinstance(v1, S.BoxV) and isinstance(v2, S.BoxV)):
            raise _shape(t, v1, v2)
        todo.append(("scale", t.index))
        todo.append(("eval", t.body, v1.body, v2.body))
    elif isinstance(t, (S.Tensor, S.With)):
        pair = S.TensorV if isinstance(t, S.Tensor) else S.WithV
        if not (isinstance(v1, pair) and isinstance(v2, pair)):
            raise _shape(t, v1, v2)
        todo.append(("add" if isinstance(t, S.Tensor) else "max",))
        todo.append(("eval", t.right, v1.right, v2.right))
        todo.append(("eval", t.left, v1.left, v2.left))
    elif isinstance(t, S.Sum):
        for v in (v1, v2):
            if not isinstance(v, (S.InlV, S.InrV)):
                raise _shape(t, v1, v2)
        if type(v1) is not type(v2):
            done.append((INF, True))
        else:
            side = t.left if isinstance(v1, S.InlV) else t.right
            todo.append(("eval", side, v1.body, v2.body))
    elif isinstance(t, S.Ident):
        if not (isinstance(v1, S.FoldV) and isinstance(v2, S.FoldV)):
            raise _shape(t, v1, v2)
        todo.append(("eval", phi[t.name], v1.body, v2.body))
    elif isinstance(t, S.Lolli):
        done.append(_function_distance(phi, t, v1, v2, cfg))
    else:
        raise TypeError(f"not a type: {t!r}")


def _function_distance(phi, t: S.Lolli, v1, v2, cfg: MetricConfig) -> Tuple[ExtReal, bool]:
    if not (isinstance(v1, S.ClosureV) and isinstance(v2, S.ClosureV)):
        raise _shape(t, v1, v2)
    if v1 == v2:
        # same code, same captured values: the same function
        return ZERO, True
    best = ZERO
    for k in range(cfg.samples):
        rng = random.Random(f"{cfg.rng_seed}:{k}")
        arg = probe_value(phi, t.domain, rng)
        o1 = apply_value(phi, v1, arg, cfg.probe_fuel)
        o2 = apply_value(phi, v2, arg, cfg.probe_fuel)
        if isinstance(o1, Stuck) or isinstance(o2, Stuck):
            raise MetricError(f"probe application got stuck: {o1!r} / {o2!r}")
        if isinstance(o1, Terminated) and isinstance(o2, Terminated):
            d, _ = _distance(phi, t.codomain, o1.value, o2.value, cfg)
        elif isinstance(o1, FuelExhausted) and isinstance(o2, FuelExhausted):
            d = ZERO
        else:
            d = INF
        best = ext_max(best, d)
    return best, False


_PROBE_CFG = GenConfig()


def probe_value(phi, t: S.TypeExpr, rng: random.Random) -> S.Value:
    """An argument for probing a function of domain ``t``.

    First-order domains use the ordinary generator. Function domains get a
    constant function, or a shift ``x + c`` when the domain is ``real -o real``.
    """
    if not S.mentions_lolli(phi, t):
        return gen_value(phi, t, rng, _PROBE_CFG)
    if isinstance(t, S.Lolli):
        if t.domain == S.REAL and t.codomain == S.REAL and rng.random() < 0.5:
            c = gen_value(phi, S.REAL, rng, _PROBE_CFG).value
            lam = S.Lam("_p", S.REAL, S.Plus(S.Var("_p"), S.Const(c)))
        else:
            out = probe_value(phi, t.codomain, rng)
            lam = S.Lam("_p", t.domain, S.value_to_term(out))
        return S.ClosureV(lam.param, lam.body, {}, None, source=lam)
    if isinstance(t, S.Bang):
        return S.BoxV(probe_value(phi, t.body, rng), index=t.index)
    if isinstance(t, S.Tensor):
        return S.TensorV(probe_value(phi, t.left, rng), probe_value(phi, t.right, rng))
    if isinstance(t, S.With):
        return S.WithV(probe_value(phi, t.left, rng), probe_value(phi, t.right, rng))
    if isinstance(t, S.Sum):
        if rng.random() < 0.5:
            return S.InlV(probe_value(phi, t.left, rng), other=t.right)
        return S.InrV(probe_value(phi, t.right, rng), other=t.left)
    raise UnsupportedType(f"cannot build probe arguments of type {S.pretty_type(t)}")

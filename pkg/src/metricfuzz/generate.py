"""Random first-order values for the property harness.

Reals are drawn on a dyadic grid (``GenConfig.resolution``) so that sums of
generated inputs are computed exactly in floating point; perturbations are
snapped toward zero on the same grid and so never exceed ``delta``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Mapping, Sequence, Tuple

from . import syntax as S
from .extreal import ExtReal


class UnsupportedType(ValueError):
    pass


@dataclass(frozen=True)
class GenConfig:
    real_range: Tuple[float, float] = (-8.0, 8.0)
    perturb_delta: float = 1.0
    max_list_depth: int = 5
    trials: int = 1000
    fuel: int = 2000
    tolerance: float = 1e-9
    seed: int = 0
    resolution: float = 2.0 ** -10

    def __post_init__(self):
        lo, hi = self.real_range
        if not lo <= hi:
            raise ValueError("real_range must satisfy lo <= hi")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.tolerance < 0:
            raise ValueError("tolerance must be nonnegative")
        if self.perturb_delta < 0:
            raise ValueError("perturb_delta must be nonnegative")
        if self.max_list_depth < 0 or self.fuel < 0 or self.resolution < 0:
            raise ValueError("depth, fuel and resolution must be nonnegative")


class _Exhausted(Exception):
    """No value fits in the remaining fold budget."""


class _Generator:
    def __init__(self, phi: Mapping[str, S.TypeExpr], rng: random.Random, cfg: GenConfig):
        self.phi = phi
        self.rng = rng
        self.cfg = cfg

    def real(self) -> float:
        lo, hi = self.cfg.real_range
        x = lo + self.rng.random() * (hi - lo)
        res = self.cfg.resolution
        if res > 0:
            x = min(max(round(x / res) * res, lo), hi)
        return x

    def gen(self, t: S.TypeExpr, budget: int) -> S.Value:
        if isinstance(t, S.Real):
            return S.RealV(self.real())
        if isinstance(t, S.Unit):
            return S.UnitV()
        if isinstance(t, S.Tensor):
            return S.TensorV(self.gen(t.left, budget), self.gen(t.right, budget))
        if isinstance(t, S.With):
            return S.WithV(self.gen(t.left, budget), self.gen(t.right, budget))
        if isinstance(t, S.Bang):
            return S.BoxV(self.gen(t.body, budget), index=t.index)
        if isinstance(t, S.Sum):
            sides = [0, 1]
            self.rng.shuffle(sides)
            for side in sides:
                try:
                    if side == 0:
                        return S.InlV(self.gen(t.left, budget), other=t.right)
                    return S.InrV(self.gen(t.right, budget), other=t.left)
                except _Exhausted:
                    continue
            raise _Exhausted()
        if isinstance(t, S.Ident):
            if budget == 0:
                raise _Exhausted()
            return S.FoldV(self.gen(self.phi[t.name], budget - 1), alpha=t.name)
        if isinstance(t, S.Lolli):
            raise UnsupportedType(f"cannot generate values of function type {S.pretty_type(t)}")
        raise TypeError(f"not a type: {t!r}")


def gen_value(
    phi: Mapping[str, S.TypeExpr],
    t: S.TypeExpr,
    rng: random.Random,
    cfg: GenConfig = GenConfig(),
) -> S.Value:
    """A random closed value of first-order type ``t``."""
    try:
        return _Generator(phi, rng, cfg).gen(t, cfg.max_list_depth)
    except _Exhausted:
        raise UnsupportedType(
            f"no value of {S.pretty_type(t)} fits within {cfg.max_list_depth} fold layers"
        ) from None


def perturb(v: S.Value, rng: random.Random, delta: float, resolution: float = 0.0) -> S.Value:
    """Same shape as ``v``; every real moves by at most ``delta``."""
    if isinstance(v, S.RealV):
        u = rng.uniform(-delta, delta)
        if resolution > 0:
            u = math.trunc(u / resolution) * resolution
        return S.RealV(v.value + u)
    if isinstance(v, S.UnitV):
        return v
    if isinstance(v, S.TensorV):
        return S.TensorV(perturb(v.left, rng, delta, resolution), perturb(v.right, rng, delta, resolution))
    if isinstance(v, S.WithV):
        return S.WithV(perturb(v.left, rng, delta, resolution), perturb(v.right, rng, delta, resolution))
    if isinstance(v, S.BoxV):
        return S.BoxV(perturb(v.body, rng, delta, resolution), index=v.index)
    if isinstance(v, S.InlV):
        return S.InlV(perturb(v.body, rng, delta, resolution), other=v.other)
    if isinstance(v, S.InrV):
        return S.InrV(perturb(v.body, rng, delta, resolution), other=v.other)
    if isinstance(v, S.FoldV):
        return S.FoldV(perturb(v.body, rng, delta, resolution), alpha=v.alpha)
    raise UnsupportedType(f"cannot perturb {v!r}")


def gen_nearby_pair(
    phi: Mapping[str, S.TypeExpr],
    t: S.TypeExpr,
    rng: random.Random,
    delta: float,
    cfg: GenConfig = GenConfig(),
) -> Tuple[S.Value, S.Value]:
    v = gen_value(phi, t, rng, cfg)
    return v, perturb(v, rng, delta, cfg.resolution)


def decaying_list_type(r, alpha: str = "dlist") -> Tuple[S.DefEnv, S.TypeExpr]:
    """``alpha = unit + real * ![r] alpha`` and its unfolding."""
    body = S.Sum(S.UNIT, S.Tensor(S.REAL, S.Bang(ExtReal(r), S.Ident(alpha))))
    return {alpha: body}, S.Ident(alpha)


def make_list(elements: Sequence[float], r, alpha: str = "dlist") -> S.Value:
    """The decaying list ``[e0, e1, ...]`` as a chain of folds."""
    r = ExtReal(r)
    tail_type = S.Tensor(S.REAL, S.Bang(r, S.Ident(alpha)))
    v: S.Value = S.FoldV(S.InlV(S.UnitV(), other=tail_type), alpha=alpha)
    for x in reversed(elements):
        cell = S.TensorV(S.RealV(float(x)), S.BoxV(v, index=r))
        v = S.FoldV(S.InrV(cell, other=S.UNIT), alpha=alpha)
    return v


def list_elements(v: S.Value) -> list:
    """Inverse of ``make_list`` for decaying lists of reals."""
    out = []
    while True:
        if not isinstance(v, S.FoldV):
            raise ValueError(f"not a list: {v!r}")
        cell = v.body
        if isinstance(cell, S.InlV):
            return out
        out.append(cell.body.left.value)
        v = cell.body.right.body

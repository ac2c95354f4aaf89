"""Extended nonnegative reals: [0, inf] with an infinity-absorbing sum and a
non-commutative product (0 * inf = inf, inf * 0 = 0).

Every sensitivity and every distance in the toolchain is an ``ExtReal``.
"""

from __future__ import annotations

import functools
import math
import struct
from typing import Optional, Union

Number = Union[int, float, "ExtReal"]


@functools.total_ordering
class ExtReal:
    """An element of [0, inf]. Finite payloads are IEEE doubles."""

    __slots__ = ("_v",)

    def __init__(self, value: Number = 0.0):
        if isinstance(value, ExtReal):
            self._v = value._v
            return
        v = float(value)
        if math.isnan(v):
            raise ValueError("ExtReal cannot be NaN")
        if v < 0:
            raise ValueError(f"ExtReal must be nonnegative, got {value!r}")
        self._v = v + 0.0  # folds -0.0 into 0.0

    @property
    def is_inf(self) -> bool:
        return self._v == math.inf

    def __float__(self) -> float:
        return self._v

    def __add__(self, other: Number) -> "ExtReal":
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other: Number) -> "ExtReal":
        return mul(self, other)

    def __rmul__(self, other: Number) -> "ExtReal":
        # other * self: the left operand is the scaling factor
        return mul(other, self)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ExtReal):
            return self._v == other._v
        if isinstance(other, (int, float)):
            return self._v == other
        return NotImplemented

    def __lt__(self, other: Number) -> bool:
        return self._v < float(ext(other))

    def __hash__(self) -> int:
        return hash(self._v)

    def __repr__(self) -> str:
        return f"ExtReal({format_ext(self)})"

    def __str__(self) -> str:
        return format_ext(self)


def ext(x: Number) -> ExtReal:
    return x if isinstance(x, ExtReal) else ExtReal(x)


ZERO = ExtReal(0.0)
ONE = ExtReal(1.0)
INF = ExtReal(math.inf)


def add(a: Number, b: Number) -> ExtReal:
    # IEEE addition already absorbs +inf
    return ExtReal(float(ext(a)) + float(ext(b)))


def mul(a: Number, b: Number) -> ExtReal:
    """Scale ``b`` by ``a``. ``r * inf = inf`` for every r; ``inf * r`` is 0 iff r = 0."""
    a, b = ext(a), ext(b)
    if b.is_inf:
        return INF
    if a.is_inf:
        return ZERO if b._v == 0.0 else INF
    return ExtReal(a._v * b._v)


def leq(a: Number, b: Number) -> bool:
    return float(ext(a)) <= float(ext(b))


def ext_max(*xs: Number) -> ExtReal:
    return max((ext(x) for x in xs), default=ZERO)


def div_ceil(t: Number, s: Number) -> Optional[ExtReal]:
    """Least r with ``mul(r, s) >= t``, or None when no such r exists."""
    t, s = ext(t), ext(s)
    if t._v == 0.0:
        return ZERO
    if s.is_inf:
        return ZERO
    if s._v == 0.0:
        return None
    if t.is_inf:
        return INF
    r = t._v / s._v
    while r * s._v < t._v:
        r = math.nextafter(r, math.inf)
    # least double whose rounded product still covers t; the product is
    # monotone in r, so bisect on the bit patterns of nonnegative doubles
    lo, hi = 0, _bits(r)
    while lo < hi:
        mid = (lo + hi) // 2
        if _double(mid) * s._v >= t._v:
            hi = mid
        else:
            lo = mid + 1
    r = _double(hi)
    return ExtReal(r)


def _bits(x: float) -> int:
    return struct.unpack("<q", struct.pack("<d", x))[0]


def _double(bits: int) -> float:
    return struct.unpack("<d", struct.pack("<q", bits))[0]


def reciprocal_gap(r: Number) -> ExtReal:
    """Scaling factor 1/(1-r) for r < 1, and inf otherwise."""
    r = ext(r)
    if r._v < 1.0:
        return ExtReal(1.0 / (1.0 - r._v))
    return INF


def parse_ext(text: str) -> ExtReal:
    if text == "inf":
        return INF
    v = float(text)
    if math.isinf(v):
        raise ValueError(f"use 'inf' for infinity, got {text!r}")
    return ExtReal(v)


def format_ext(x: Number) -> str:
    v = float(ext(x))
    if v == math.inf:
        return "inf"
    return format_real(v)


def format_real(v: float) -> str:
    """Shortest text that reads back to exactly ``v``."""
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v)) if v != 0 or math.copysign(1.0, v) > 0 else "-0.0"
    return repr(v)


def to_json(x: Number) -> Union[float, str]:
    v = float(ext(x))
    return "inf" if v == math.inf else v


def from_json(obj: Union[float, int, str]) -> ExtReal:
    if obj == "inf":
        return INF
    return ExtReal(obj)

"""Pointwise products of PQL and slice-preserving factored functions.

Such a product h = g_1 g_2 ... g_m is neither PQL nor slice-preserving in
general, but |h| = |g_1| ... |g_m|, so every log-modulus quantity is a sum over
the parts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import POLE, AmbiguousPoint
from .pql import PQLFunction
from .quaternion import Quaternion, qmul
from .slicefn import FactoredSlicePreserving, ZeroPoleLedger

PART_TYPES = (PQLFunction, FactoredSlicePreserving)


@dataclass(frozen=True)
class MixedProduct:
    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ValueError("a product needs at least one part")
        for p in parts:
            if not isinstance(p, PART_TYPES):
                raise TypeError(f"unsupported part {type(p).__name__}")
        object.__setattr__(self, "parts", parts)

    def __call__(self, x):
        x = Quaternion.coerce(x)
        values = [p(x) for p in self.parts]
        zeros = [i for i, v in enumerate(values) if v is not POLE and v.norm2() == 0.0]
        poles = [i for i, v in enumerate(values) if v is POLE]
        if zeros and poles:
            raise AmbiguousPoint(x, zeros, poles)
        if poles:
            return POLE
        acc = values[0]
        for v in values[1:]:
            acc = acc * v
        return acc

    def evaluate(self, xs) -> np.ndarray:
        acc = self.parts[0].evaluate(xs)
        for p in self.parts[1:]:
            acc = qmul(acc, p.evaluate(xs))
        return acc

    def log_abs(self, xs) -> np.ndarray:
        acc = self.parts[0].log_abs(xs)
        for p in self.parts[1:]:
            acc = acc + p.log_abs(xs)
        return acc

    def laplacian_log_abs(self, x) -> float:
        return sum(p.laplacian_log_abs(x) for p in self.parts)

    def ledger(self) -> ZeroPoleLedger:
        led = ZeroPoleLedger()
        for p in self.parts:
            led = led.merged(p.ledger())
        return led

    @property
    def origin_order(self) -> int:
        return self.ledger().origin_order

    def without_origin(self) -> "MixedProduct":
        return MixedProduct(tuple(strip_origin(p) for p in self.parts))

    def to_dict(self) -> dict:
        return {"parts": [part_to_dict(p) for p in self.parts]}


def strip_origin(f):
    """f with its x^k factor removed (same modulus as x^{-k} f)."""
    if isinstance(f, FactoredSlicePreserving):
        return f.without_monomial()
    return f.without_origin()


def origin_order(f) -> int:
    if isinstance(f, FactoredSlicePreserving):
        return f.monomial_power
    return f.origin_order


def part_to_dict(p) -> dict:
    kind = "slice_preserving_factored" if isinstance(p, FactoredSlicePreserving) else "pql"
    return {"kind": kind, **p.to_dict()}

"""rho-Blaschke factors.

punctual     B(x) = (rho^2 - x a^c)(rho (x - a))^-1, a PQL function with a zero
             at rho^2 (a^c)^-1 and a pole at a.
spherical    B(x) = (rho^2 (x - a)^s)^-1 (x - rho^2 a^-1)^s |a|^2, slice-preserving,
             spherical zero S_{rho^2 a^-1} and spherical pole S_a.
semiregular  B(x) = (rho^2 - x a^c) * (rho (x - a))^{-*}; evaluation only.

All three have modulus one on |x| = rho.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import POLE, DomainError
from .pql import PQLFunction
from .quaternion import Quaternion, as_qarray, inverse, qconj, qmul, qnorm2
from .slicefn import (
    FactoredSlicePreserving,
    QuatCoeffSeries,
    RealCoeffSeries,
    characteristic_polynomial,
    star_product,
)

KINDS = ("punctual", "spherical", "semiregular")


@dataclass(frozen=True)
class BlaschkeSpec:
    a: Quaternion
    rho: float
    kind: str = "punctual"

    def __post_init__(self):
        a = Quaternion.coerce(self.a)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "rho", float(self.rho))
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if a.norm2() == 0.0:
            raise DomainError("Blaschke factor needs a != 0")
        if not abs(a) < self.rho:
            raise ValueError(f"need |a| < rho, got |a|={abs(a)} rho={self.rho}")
        if self.kind == "spherical" and a.is_real():
            raise ValueError("spherical Blaschke factor needs a non-real a")

    @property
    def zero(self) -> Quaternion:
        """rho^2 (a^c)^-1 (punctual) or a representative of the zero sphere."""
        if self.kind == "punctual":
            return inverse(self.a.conj()) * self.rho ** 2
        return inverse(self.a) * self.rho ** 2

    def __call__(self, x):
        x = Quaternion.coerce(x)
        a, rho = self.a, self.rho
        if self.kind == "punctual":
            d = x - a
            if d.norm2() == 0.0:
                return POLE
            return (rho * rho - x * a.conj()) * inverse(d) * (1.0 / rho)
        den = characteristic_polynomial(a).to_quat()(x)
        if den.norm2() == 0.0:
            return POLE
        if self.kind == "spherical":
            num = characteristic_polynomial(self.zero).to_quat()(x)
            # num and den lie in the same slice, so num den^-1 = num den^c / |den|^2
            return num * den.conj() * (a.norm2() / (rho * rho * den.norm2()))
        num = _semiregular_numerator(a, rho)(x)
        return inverse(den * (rho * rho)) * num

    def evaluate(self, xs) -> np.ndarray:
        xs = as_qarray(xs)
        a, rho = self.a.to_array(), self.rho
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "punctual":
                d = xs - a
                num = -qmul(xs, qconj(a))
                num[..., 0] += rho * rho
                return qmul(num, qconj(d) / qnorm2(d)[..., None]) / rho
            den = characteristic_polynomial(self.a).to_quat().evaluate(xs)
            if self.kind == "spherical":
                num = characteristic_polynomial(self.zero).to_quat().evaluate(xs)
                scale = self.a.norm2() / (rho * rho * qnorm2(den))
                return qmul(num, qconj(den)) * scale[..., None]
            num = _semiregular_numerator(self.a, rho).evaluate(xs)
            return qmul(qconj(den) / (rho * rho * qnorm2(den))[..., None], num)

    def log_abs(self, xs) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.sqrt(qnorm2(self.evaluate(xs))))

    def to_pql(self) -> PQLFunction:
        if self.kind != "punctual":
            raise DomainError("only the punctual factor is a PQL function")
        a, rho = self.a, self.rho
        # rho^2 - x a^c = -(x - rho^2 (a^c)^-1) a^c
        return PQLFunction((Quaternion(-1.0), a.conj(), Quaternion(1.0 / rho)),
                           (self.zero, a), (1, -1))

    def to_factored(self) -> FactoredSlicePreserving:
        if self.kind != "spherical":
            raise DomainError("only the spherical factor is slice-preserving")
        return FactoredSlicePreserving(
            sphere_factors=((self.zero, 1), (self.a, -1)),
            tail=RealCoeffSeries((self.a.norm2() / self.rho ** 2,)),
        )

    def to_dict(self) -> dict:
        return {"a": self.a.to_list(), "rho": self.rho, "kind": self.kind}


def _semiregular_numerator(a: Quaternion, rho: float) -> QuatCoeffSeries:
    # (rho^2 - x a^c) * (rho (x - a))^c
    left = QuatCoeffSeries((Quaternion(rho * rho), -a.conj()))
    right = QuatCoeffSeries((-(a.conj()) * rho, Quaternion(rho)))
    return star_product(left, right)


def eval_blaschke(B: BlaschkeSpec, x):
    return B(x)


def laplacian_log_blaschke_at_zero(B: BlaschkeSpec) -> float:
    """Closed-form Laplacian of log|B| at the origin."""
    a, rho = B.a, B.rho
    n2 = a.norm2()
    if n2 == 0.0:
        raise DomainError("a must be nonzero")
    if B.kind == "punctual":
        return 2.0 / (rho ** 4 * n2) * (n2 * n2 - rho ** 4)
    if B.kind == "spherical":
        return 2.0 / (rho ** 4 * n2 * n2) * (rho ** 4 - n2 * n2) * cone_bracket(a)
    raise DomainError("no closed form for the semiregular factor")


def cone_bracket(a) -> float:
    """2|a|^2 - (a + a^c)^2 = 2 (beta^2 - alpha^2) for a = alpha + I beta."""
    a = Quaternion.coerce(a)
    return 2.0 * a.norm2() - a.trace() ** 2


def blaschke_ledger(B: BlaschkeSpec):
    if B.kind == "punctual":
        return B.to_pql().ledger()
    if B.kind == "spherical":
        return B.to_factored().ledger()
    raise DomainError("semiregular factor has no ledger in this library")


def boundary_modulus_error(B: BlaschkeSpec, xs) -> float:
    """max | |B(x)| - 1 | over the given boundary points."""
    return float(np.max(np.abs(np.sqrt(qnorm2(B.evaluate(xs))) - 1.0)))


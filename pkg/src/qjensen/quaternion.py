"""Quaternion arithmetic and the slice decomposition x = alpha + I*beta.

Scalar values use :class:`Quaternion`; bulk work (quadrature grids, stencils)
uses float arrays whose last axis holds the coordinates ``[x0, x1, x2, x3]``
with respect to the basis 1, i, j, k.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DomainError

_Real = (int, float, np.floating, np.integer)


class Quaternion:
    """x0 + x1 i + x2 j + x3 k in double precision."""

    __slots__ = ("x0", "x1", "x2", "x3")

    def __init__(self, x0=0.0, x1=0.0, x2=0.0, x3=0.0):
        object.__setattr__(self, "x0", float(x0))
        object.__setattr__(self, "x1", float(x1))
        object.__setattr__(self, "x2", float(x2))
        object.__setattr__(self, "x3", float(x3))

    def __setattr__(self, name, value):
        raise AttributeError("Quaternion is immutable")

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        a = np.asarray(a, dtype=float)
        if a.shape != (4,):
            raise ValueError(f"expected 4 components, got shape {a.shape}")
        return cls(*a)

    @classmethod
    def coerce(cls, value) -> "Quaternion":
        if isinstance(value, Quaternion):
            return value
        if isinstance(value, _Real):
            return cls(value)
        return cls.from_array(value)

    def to_array(self) -> np.ndarray:
        return np.array([self.x0, self.x1, self.x2, self.x3])

    def to_list(self) -> list:
        return [self.x0, self.x1, self.x2, self.x3]

    def __iter__(self):
        yield from (self.x0, self.x1, self.x2, self.x3)

    def __getitem__(self, i):
        return (self.x0, self.x1, self.x2, self.x3)[i]

    def __repr__(self):
        return f"Quaternion({self.x0!r}, {self.x1!r}, {self.x2!r}, {self.x3!r})"

    def __str__(self):
        parts = [f"{self.x0:g}"]
        for v, u in ((self.x1, "i"), (self.x2, "j"), (self.x3, "k")):
            parts.append(f"{'+' if v >= 0 else '-'}{abs(v):g}{u}")
        return "".join(parts)

    def __eq__(self, other):
        if isinstance(other, _Real):
            other = Quaternion(other)
        if not isinstance(other, Quaternion):
            return NotImplemented
        return (self.x0, self.x1, self.x2, self.x3) == (other.x0, other.x1, other.x2, other.x3)

    def __hash__(self):
        return hash((self.x0, self.x1, self.x2, self.x3))

    # arithmetic

    def __neg__(self):
        return Quaternion(-self.x0, -self.x1, -self.x2, -self.x3)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, _Real):
            return Quaternion(self.x0 + other, self.x1, self.x2, self.x3)
        if not isinstance(other, Quaternion):
            return NotImplemented
        return Quaternion(self.x0 + other.x0, self.x1 + other.x1,
                          self.x2 + other.x2, self.x3 + other.x3)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, _Real):
            return Quaternion(self.x0 - other, self.x1, self.x2, self.x3)
        if not isinstance(other, Quaternion):
            return NotImplemented
        return Quaternion(self.x0 - other.x0, self.x1 - other.x1,
                          self.x2 - other.x2, self.x3 - other.x3)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, _Real):
            return Quaternion(self.x0 * other, self.x1 * other, self.x2 * other, self.x3 * other)
        if not isinstance(other, Quaternion):
            return NotImplemented
        return mul(self, other)

    def __rmul__(self, other):
        # reals commute with everything
        if isinstance(other, _Real):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        # right division p / q = p q^{-1}
        if isinstance(other, _Real):
            if other == 0:
                raise DomainError("division by zero")
            return Quaternion(self.x0 / other, self.x1 / other, self.x2 / other, self.x3 / other)
        if not isinstance(other, Quaternion):
            return NotImplemented
        return mul(self, inverse(other))

    def __rtruediv__(self, other):
        if isinstance(other, _Real):
            return inverse(self) * other
        return NotImplemented

    def __abs__(self):
        return math.sqrt(self.norm2())

    def norm2(self) -> float:
        return self.x0 * self.x0 + self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3

    def conj(self) -> "Quaternion":
        return Quaternion(self.x0, -self.x1, -self.x2, -self.x3)

    @property
    def real(self) -> float:
        return self.x0

    @property
    def imag(self) -> "Quaternion":
        return Quaternion(0.0, self.x1, self.x2, self.x3)

    def imag_norm(self) -> float:
        return math.sqrt(self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3)

    def is_real(self) -> bool:
        return self.x1 == 0.0 and self.x2 == 0.0 and self.x3 == 0.0

    def trace(self) -> float:
        """q + q^c, a real number."""
        return 2.0 * self.x0

    def isclose(self, other, rtol=1e-12, atol=1e-14) -> bool:
        other = Quaternion.coerce(other)
        return abs(self - other) <= atol + rtol * max(abs(self), abs(other))


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)
ZERO = Quaternion()


def mul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product."""
    a0, a1, a2, a3 = p.x0, p.x1, p.x2, p.x3
    b0, b1, b2, b3 = q.x0, q.x1, q.x2, q.x3
    return Quaternion(
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    )


def inverse(q: Quaternion) -> Quaternion:
    n2 = q.norm2()
    if n2 == 0.0:
        raise DomainError("zero quaternion has no inverse")
    return Quaternion(q.x0 / n2, -q.x1 / n2, -q.x2 / n2, -q.x3 / n2)


class SliceCoords(NamedTuple):
    alpha: float
    beta: float
    unit: Quaternion
    real_point: bool

    def reconstruct(self) -> Quaternion:
        return self.alpha + self.unit * self.beta


def slice_decompose(q: Quaternion) -> SliceCoords:
    """Write q = alpha + I beta with beta >= 0 and I a unit imaginary.

    For real q the unit is set to i and ``real_point`` is True.
    """
    q = Quaternion.coerce(q)
    beta = q.imag_norm()
    if beta == 0.0:
        return SliceCoords(q.x0, 0.0, I, True)
    return SliceCoords(q.x0, beta, Quaternion(0.0, q.x1 / beta, q.x2 / beta, q.x3 / beta), False)


# array helpers: last axis holds [x0, x1, x2, x3]

def as_qarray(x) -> np.ndarray:
    if isinstance(x, Quaternion):
        return x.to_array()
    a = np.asarray(x, dtype=float)
    if a.shape[-1:] != (4,):
        raise ValueError(f"last axis must have length 4, got shape {a.shape}")
    return a


def qmul(p, q) -> np.ndarray:
    p = as_qarray(p)
    q = as_qarray(q)
    a0, a1, a2, a3 = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    b0, b1, b2, b3 = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack([
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    ], axis=-1)


def qconj(q) -> np.ndarray:
    return as_qarray(q) * np.array([1.0, -1.0, -1.0, -1.0])


def qnorm2(q) -> np.ndarray:
    q = as_qarray(q)
    return np.einsum("...i,...i->...", q, q)


def qabs(q) -> np.ndarray:
    return np.sqrt(qnorm2(q))


def qinv(q) -> np.ndarray:
    """Elementwise inverse; zero entries give inf components."""
    q = as_qarray(q)
    with np.errstate(divide="ignore", invalid="ignore"):
        return qconj(q) / qnorm2(q)[..., None]


def slice_parts(x):
    """Return (alpha, beta, unit) arrays for points x of shape (..., 4).

    Real points get unit i.
    """
    x = as_qarray(x)
    alpha = x[..., 0]
    beta = np.sqrt(np.einsum("...i,...i->...", x[..., 1:], x[..., 1:]))
    unit = np.zeros_like(x)
    nz = beta > 0
    unit[..., 1:] = np.where(nz[..., None], x[..., 1:] / np.where(nz, beta, 1.0)[..., None], 0.0)
    unit[..., 1] = np.where(nz, unit[..., 1], 1.0)
    return alpha, beta, unit


def complex_to_slice(w, unit) -> np.ndarray:
    """Map complex values w = u + iv to u + I v with I taken from ``unit``."""
    w = np.asarray(w)
    out = unit * np.imag(w)[..., None]
    out[..., 0] = np.real(w)
    return out


def random_unit_quaternions(rng: np.random.Generator, n=None) -> np.ndarray:
    shape = (4,) if n is None else (n, 4)
    v = rng.standard_normal(shape)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def random_unit_imaginary(rng: np.random.Generator) -> Quaternion:
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    return Quaternion(0.0, *v)

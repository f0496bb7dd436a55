"""PQL functions a0 (x - q1)^M1 a1 ... (x - qN)^MN aN with M_k = +-1,
and the Moebius constructor (ax + b)(cx + d)^-1."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import POLE, AmbiguousPoint, DegenerateTransform
from .quaternion import ONE, Quaternion, inverse, qabs, qinv, qmul
from .slicefn import LedgerEntry, ZeroPoleLedger


@dataclass(frozen=True)
class PQLFunction:
    a: tuple
    q: tuple = ()
    M: tuple = ()

    def __post_init__(self):
        a = tuple(Quaternion.coerce(v) for v in self.a)
        q = tuple(Quaternion.coerce(v) for v in self.q)
        M = tuple(int(m) for m in self.M)
        if len(a) != len(q) + 1 or len(M) != len(q):
            raise ValueError(f"need N+1 constants for N factors, got {len(a)} and {len(q)}")
        if any(v.norm2() == 0.0 for v in a):
            raise ValueError("PQL constants must be nonzero")
        if any(m not in (1, -1) for m in M):
            raise ValueError("PQL exponents must be +1 or -1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "M", M)

    @classmethod
    def from_factors(cls, factors, constants=None) -> "PQLFunction":
        """Build from [(q_k, M_k), ...] with all constants 1 unless given."""
        factors = list(factors)
        if constants is None:
            constants = [ONE] * (len(factors) + 1)
        return cls(tuple(constants), tuple(f[0] for f in factors), tuple(f[1] for f in factors))

    @classmethod
    def constant(cls, a0) -> "PQLFunction":
        return cls((a0,))

    @property
    def n_factors(self) -> int:
        return len(self.q)

    def __call__(self, x):
        x = Quaternion.coerce(x)
        zeros = [k for k, (qk, m) in enumerate(zip(self.q, self.M)) if m > 0 and x == qk]
        poles = [k for k, (qk, m) in enumerate(zip(self.q, self.M)) if m < 0 and x == qk]
        if zeros and poles:
            raise AmbiguousPoint(x, zeros, poles)
        if poles:
            return POLE
        acc = self.a[0]
        for qk, m, ak in zip(self.q, self.M, self.a[1:]):
            d = x - qk
            acc = acc * (d if m > 0 else inverse(d)) * ak
        return acc

    def evaluate(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        acc = np.broadcast_to(self.a[0].to_array(), xs.shape).copy()
        for qk, m, ak in zip(self.q, self.M, self.a[1:]):
            d = xs - qk.to_array()
            acc = qmul(qmul(acc, d if m > 0 else qinv(d)), ak.to_array())
        return acc

    def log_abs(self, xs) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(qabs(self.evaluate(xs)))

    def log_abs_by_factors(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        acc = np.full(xs.shape[:-1], sum(math.log(abs(ak)) for ak in self.a))
        with np.errstate(divide="ignore"):
            for qk, m in zip(self.q, self.M):
                acc = acc + m * np.log(qabs(xs - qk.to_array()))
        return acc

    def laplacian_log_abs(self, x) -> float:
        """Sum of M_k * 2/|x - q_k|^2."""
        x = Quaternion.coerce(x)
        return sum(m * 2.0 / (x - qk).norm2() for qk, m in zip(self.q, self.M))

    @property
    def origin_order(self) -> int:
        return sum(m for qk, m in zip(self.q, self.M) if qk.norm2() == 0.0)

    def without_origin(self) -> "PQLFunction":
        """Drop the factors x^{+-1}, merging the neighbouring constants.

        The result has the same modulus as x^{-k} f (moduli are multiplicative)
        but in general not the same values, since x does not commute with the
        constants.
        """
        a, q, M = [self.a[0]], [], []
        for qk, m, ak in zip(self.q, self.M, self.a[1:]):
            if qk.norm2() == 0.0:
                a[-1] = a[-1] * ak
            else:
                q.append(qk)
                M.append(m)
                a.append(ak)
        return PQLFunction(tuple(a), tuple(q), tuple(M))

    def ledger(self) -> ZeroPoleLedger:
        """Points q_k with their signs; factors at the origin go to ``origin_order``."""
        counts: dict = {}
        for qk, m in zip(self.q, self.M):
            if qk.norm2() == 0.0:
                continue
            key = (qk, m)
            counts[key] = counts.get(key, 0) + 1
        entries = tuple(
            LedgerEntry("point_zero" if m > 0 else "point_pole", qk, n) for (qk, m), n in counts.items()
        )
        return ZeroPoleLedger(entries, self.origin_order)

    def to_dict(self) -> dict:
        return {"a": [v.to_list() for v in self.a], "q": [v.to_list() for v in self.q], "M": list(self.M)}


def evaluate_pql(f: PQLFunction, x):
    return f(x)


def pql_ledger(f: PQLFunction) -> ZeroPoleLedger:
    return f.ledger()


def _left_proportional(a, b, c, d, tol=1e-14) -> bool:
    # rows (a, b) and (c, d) are left-proportional iff (c, d) = lam (a, b) for some lam
    if a.norm2() > 0:
        lam = c * inverse(a)
        return abs(lam * b - d) <= tol * max(1.0, abs(d), abs(lam * b))
    if c.norm2() > 0:
        return False if b.norm2() > 0 else True
    # a = c = 0: both rows lie on the second column
    return True


def from_mobius(a, b, c, d) -> PQLFunction:
    """g(x) = (ax + b)(cx + d)^-1 in PQL form.

    Raises DegenerateTransform when the rows of [[a, b], [c, d]] are left
    proportional (the map is then constant or undefined).
    """
    a, b, c, d = (Quaternion.coerce(v) for v in (a, b, c, d))
    if _left_proportional(a, b, c, d):
        raise DegenerateTransform("rows of the Moebius matrix are left-proportional")
    a_zero, c_zero = a.norm2() == 0.0, c.norm2() == 0.0
    if not a_zero and not c_zero:
        # ax + b = a(x + a^-1 b);  (cx + d)^-1 = (x + c^-1 d)^-1 c^-1
        return PQLFunction((a, ONE, inverse(c)), (-(inverse(a) * b), -(inverse(c) * d)), (1, -1))
    if c_zero:
        # affine: (ax + b) d^-1
        return PQLFunction((a, inverse(d)), (-(inverse(a) * b),), (1,))
    # a = 0: b (x + c^-1 d)^-1 c^-1
    return PQLFunction((b, inverse(c)), (-(inverse(c) * d),), (-1,))

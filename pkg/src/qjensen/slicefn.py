"""Slice functions: power series with right coefficients, the star product,
symmetrization, spherical and slice derivatives, and factored slice-preserving
functions together with their zero/pole ledgers.

A slice-preserving function maps every complex slice C_I into itself, so its
value at alpha + I beta is F(alpha + i beta) lifted back to C_I, where F is a
holomorphic function with real Taylor coefficients.  The factored class below
evaluates itself that way.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import POLE, DomainError
from .quaternion import (
    ZERO,
    Quaternion,
    as_qarray,
    complex_to_slice,
    inverse,
    qmul,
    slice_decompose,
    slice_parts,
)

SYMMETRIZE_ATOL = 1e-12
TAIL_WARN_LEVEL = 1e-9


def _lift(w: complex, x: Quaternion) -> Quaternion:
    """Send u + iv in C to u + Iv where I is the imaginary unit of x."""
    sc = slice_decompose(x)
    return w.real + sc.unit * w.imag


def _to_complex(x: Quaternion) -> complex:
    sc = slice_decompose(x)
    return complex(sc.alpha, sc.beta)


# ---------------------------------------------------------------------------
# power series with coefficients on the right


@dataclass(frozen=True)
class RealCoeffSeries:
    """sum_n x^n a_n with real a_n; slice-preserving."""

    coefficients: tuple
    radius_hint: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if not self.coefficients:
            object.__setattr__(self, "coefficients", (0.0,))
        if not self.radius_hint > 0:
            raise ValueError("radius_hint must be positive")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def complex_eval(self, z):
        acc = np.zeros_like(np.asarray(z, dtype=complex))
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc

    def complex_derivative(self, z, order=1):
        coeffs = np.polynomial.polynomial.polyder(np.array(self.coefficients), order)
        acc = np.zeros_like(np.asarray(z, dtype=complex))
        for c in reversed(coeffs):
            acc = acc * z + c
        return acc

    def __call__(self, x) -> Quaternion:
        x = Quaternion.coerce(x)
        return _lift(complex(self.complex_eval(_to_complex(x))), x)

    def evaluate(self, xs) -> np.ndarray:
        alpha, beta, unit = slice_parts(xs)
        return complex_to_slice(self.complex_eval(alpha + 1j * beta), unit)

    def to_quat(self) -> "QuatCoeffSeries":
        return QuatCoeffSeries(tuple(Quaternion(c) for c in self.coefficients), self.radius_hint)


@dataclass(frozen=True)
class QuatCoeffSeries:
    """sum_n x^n a_n with quaternionic a_n (coefficients on the right)."""

    coefficients: tuple
    radius_hint: float = math.inf

    def __post_init__(self):
        coeffs = tuple(Quaternion.coerce(c) for c in self.coefficients) or (ZERO,)
        object.__setattr__(self, "coefficients", coeffs)
        if not self.radius_hint > 0:
            raise ValueError("radius_hint must be positive")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def is_slice_preserving(self) -> bool:
        return all(c.is_real() for c in self.coefficients)

    def __call__(self, x) -> Quaternion:
        x = Quaternion.coerce(x)
        # Horner with left multiplication: a0 + x(a1 + x(a2 + ...))
        acc = ZERO
        for c in reversed(self.coefficients):
            acc = c + x * acc
        return acc

    def evaluate(self, xs) -> np.ndarray:
        xs = as_qarray(xs)
        acc = np.zeros_like(xs)
        for c in reversed(self.coefficients):
            acc = c.to_array() + qmul(xs, acc)
        return acc

    def derivative(self) -> "QuatCoeffSeries":
        """Coefficients of the slice derivative, sum x^(n-1) n a_n."""
        if self.degree == 0:
            return QuatCoeffSeries((ZERO,), self.radius_hint)
        return QuatCoeffSeries(
            tuple(c * n for n, c in enumerate(self.coefficients) if n > 0), self.radius_hint
        )

    def trimmed(self, atol=0.0) -> "QuatCoeffSeries":
        coeffs = list(self.coefficients)
        while len(coeffs) > 1 and abs(coeffs[-1]) <= atol:
            coeffs.pop()
        return QuatCoeffSeries(tuple(coeffs), self.radius_hint)


def as_quat_series(f) -> QuatCoeffSeries:
    if isinstance(f, QuatCoeffSeries):
        return f
    if isinstance(f, RealCoeffSeries):
        return f.to_quat()
    return QuatCoeffSeries(tuple(Quaternion.coerce(c) for c in f))


def characteristic_polynomial(q) -> RealCoeffSeries:
    """(x - q)^s = x^2 - x(q + q^c) + q q^c."""
    q = Quaternion.coerce(q)
    return RealCoeffSeries((q.norm2(), -q.trace(), 1.0))


def star_product(f, g) -> QuatCoeffSeries:
    """Slice product: Cauchy convolution of the coefficient sequences."""
    f = as_quat_series(f)
    g = as_quat_series(g)
    a, b = f.coefficients, g.coefficients
    out = []
    for n in range(len(a) + len(b) - 1):
        acc = ZERO
        for j in range(max(0, n - len(b) + 1), min(n, len(a) - 1) + 1):
            acc = acc + a[j] * b[n - j]
        out.append(acc)
    return QuatCoeffSeries(tuple(out), min(f.radius_hint, g.radius_hint))


def star_eval(f, g, x) -> Quaternion:
    """(f*g)(x) = f(x) g(f(x)^-1 x f(x)), and 0 where f vanishes."""
    f = as_quat_series(f)
    g = as_quat_series(g)
    x = Quaternion.coerce(x)
    fx = f(x)
    if fx.norm2() == 0.0:
        return ZERO
    return fx * g(inverse(fx) * x * fx)


def conjugate_series(f) -> QuatCoeffSeries:
    f = as_quat_series(f)
    return QuatCoeffSeries(tuple(c.conj() for c in f.coefficients), f.radius_hint)


def symmetrize(f, atol: float = SYMMETRIZE_ATOL) -> RealCoeffSeries:
    """f^s = f^c * f.  Imaginary residue above ``atol`` is a bug upstream."""
    prod = star_product(conjugate_series(f), f)
    worst = max(c.imag_norm() for c in prod.coefficients)
    if worst > atol:
        raise DomainError(f"symmetrization left imaginary coefficient of size {worst:.3e}")
    return RealCoeffSeries(tuple(c.real for c in prod.coefficients), prod.radius_hint)


def slice_reciprocal_eval(f, x):
    """Pointwise f^{-*}(x) = (f^s(x))^{-1} f^c(x); POLE on the zero set of f^s."""
    f = as_quat_series(f)
    x = Quaternion.coerce(x)
    fs = symmetrize(f)(x)
    if fs.norm2() == 0.0:
        return POLE
    return inverse(fs) * conjugate_series(f)(x)


def spherical_value(f: Callable, x) -> Quaternion:
    """(f(x) + f(x^c)) / 2."""
    x = Quaternion.coerce(x)
    return (f(x) + f(x.conj())) * 0.5


def spherical_derivative(f: Callable, x) -> Quaternion:
    """Im(x)^-1 (f(x) - f(x^c)) / 2; undefined on the real axis."""
    x = Quaternion.coerce(x)
    if x.is_real():
        raise DomainError("spherical derivative needs a non-real point")
    return inverse(x.imag) * (f(x) - f(x.conj())) * 0.5


def slice_derivative(f, x, which: str = "dc") -> Quaternion:
    """``"dc"`` gives the slice derivative; ``"dcbar"`` its conjugate-direction
    counterpart, which vanishes for series since they are regular."""
    f = as_quat_series(f)
    if which == "dcbar":
        return ZERO
    if which != "dc":
        raise ValueError(f"which must be 'dc' or 'dcbar', not {which!r}")
    return f.derivative()(x)


def laplacian_log_abs_slice(f: Callable, df: Callable, x) -> float:
    """Laplacian of log|f| at non-real x for slice-preserving f, via
    -2 d_s((d_c f) f^c) / |f|^2.  ``df`` evaluates the slice derivative."""
    x = Quaternion.coerce(x)
    fx = f(x)
    h = spherical_derivative(lambda y: df(y) * f(y).conj(), x)
    return -2.0 * h.real / fx.norm2()


# ---------------------------------------------------------------------------
# zero/pole bookkeeping

ZERO_KINDS = ("real_zero", "sphere_zero", "point_zero")
POLE_KINDS = ("real_pole", "sphere_pole", "point_pole")


class LedgerEntry(NamedTuple):
    kind: str
    point: Quaternion
    multiplicity: int

    @property
    def modulus(self) -> float:
        return abs(self.point)

    @property
    def is_zero(self) -> bool:
        return self.kind in ZERO_KINDS

    @property
    def sign(self) -> int:
        return 1 if self.is_zero else -1

    @property
    def alpha(self) -> float:
        return self.point.real

    @property
    def beta(self) -> float:
        return self.point.imag_norm()

    def distance(self, x) -> float:
        """Euclidean distance from x to the point or sphere of this entry."""
        x = Quaternion.coerce(x)
        if self.kind.startswith("sphere"):
            return math.hypot(x.real - self.alpha, x.imag_norm() - self.beta)
        return abs(x - self.point)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "point": self.point.to_list(), "multiplicity": self.multiplicity}


@dataclass(frozen=True)
class ZeroPoleLedger:
    """Multiset of zeros and poles.  ``origin_order`` is the signed order at 0."""

    entries: tuple = ()
    origin_order: int = 0

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        for e in self.entries:
            if e.multiplicity <= 0:
                raise ValueError("ledger multiplicities must be positive")

    def _of(self, kind):
        return [e for e in self.entries if e.kind == kind]

    @property
    def real_zeros(self):
        return self._of("real_zero")

    @property
    def real_poles(self):
        return self._of("real_pole")

    @property
    def sphere_zeros(self):
        return self._of("sphere_zero")

    @property
    def sphere_poles(self):
        return self._of("sphere_pole")

    @property
    def isolated_points(self):
        return [(e.point, e.sign) for e in self.entries if e.kind.startswith("point")
                for _ in range(e.multiplicity)]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def filtered(self, rho: float) -> "ZeroPoleLedger":
        return ZeroPoleLedger(tuple(e for e in self.entries if e.modulus < rho), self.origin_order)

    def boundary_contact(self, rho: float, delta: float = 1e-9) -> list:
        return [e for e in self.entries if abs(e.modulus - rho) <= delta]

    def merged(self, other: "ZeroPoleLedger") -> "ZeroPoleLedger":
        return ZeroPoleLedger(self.entries + other.entries, self.origin_order + other.origin_order)

    def zero_count(self, r: float) -> int:
        """Zeros of modulus < r counted with factor multiplicity."""
        return sum(e.multiplicity for e in self.entries if e.is_zero and e.modulus < r)

    def total_multiplicity(self, r: float) -> int:
        """Zeros of modulus < r with spheres weighted twice (degree of f^s)."""
        return sum(e.multiplicity * (2 if e.kind == "sphere_zero" else 1)
                   for e in self.entries if e.is_zero and e.modulus < r)

    def min_distance(self, x) -> float:
        d = [e.distance(x) for e in self.entries]
        if self.origin_order:
            d.append(abs(Quaternion.coerce(x)))
        return min(d, default=math.inf)

    def to_dict(self) -> dict:
        return {"origin_order": self.origin_order, "entries": [e.to_dict() for e in self.entries]}


# ---------------------------------------------------------------------------
# factored slice-preserving functions


def _normalize_factors(pairs, sphere: bool):
    out = []
    for item in pairs:
        point, mult = item
        mult = int(mult)
        if mult == 0:
            continue
        if sphere:
            q = Quaternion.coerce(point)
            if q.is_real():
                raise ValueError("sphere factors need a non-real quaternion; use a real factor")
            # (x - q)^s only depends on the sphere S_q; keep the representative with the
            # imaginary part along +i-direction of q itself
            out.append((q, mult))
        else:
            r = float(point)
            if r == 0.0:
                raise ValueError("real factor at 0; use monomial_power")
            out.append((r, mult))
    return tuple(out)


@dataclass(frozen=True)
class FactoredSlicePreserving:
    """x^n prod (x - r_h)^{n_h} prod ((x - q_k)^s)^{n_k} tail(x).

    Negative multiplicities are poles.  ``tail`` must be zero-free on the working
    ball; this is the caller's promise, checked only by :meth:`check_tail`.
    """

    monomial_power: int = 0
    real_factors: tuple = ()
    sphere_factors: tuple = ()
    tail: RealCoeffSeries | None = None

    def __post_init__(self):
        object.__setattr__(self, "monomial_power", int(self.monomial_power))
        object.__setattr__(self, "real_factors", _normalize_factors(self.real_factors, False))
        object.__setattr__(self, "sphere_factors", _normalize_factors(self.sphere_factors, True))
        if self.tail is not None and not isinstance(self.tail, RealCoeffSeries):
            object.__setattr__(self, "tail", RealCoeffSeries(tuple(self.tail)))
        if self.tail is not None and all(c == 0 for c in self.tail.coefficients):
            raise ValueError("tail is identically zero")
        signs = {}
        for r, m in self.real_factors:
            signs.setdefault(("r", r), set()).add(m > 0)
        for q, m in self.sphere_factors:
            key = ("s", q.real, q.imag_norm())
            signs.setdefault(key, set()).add(m > 0)
        for key, s in signs.items():
            if len(s) > 1:
                raise ValueError(f"zero and pole share the same set {key[1:]}; such ledgers are rejected")

    # evaluation --------------------------------------------------------

    def _complex_factors(self, z):
        """Yield (factor value F_k(z), multiplicity) pairs; F(z) = prod F_k^m_k * tail."""
        if self.monomial_power:
            yield z, self.monomial_power
        for r, m in self.real_factors:
            yield z - r, m
        for q, m in self.sphere_factors:
            yield (z * z - q.trace() * z) + q.norm2(), m

    def complex_eval(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            acc = np.ones_like(z)
            for w, m in self._complex_factors(z):
                acc = acc * w ** m
            if self.tail is not None:
                acc = acc * self.tail.complex_eval(z)
        return acc

    def complex_log_derivative(self, z):
        """F'(z) / F(z)."""
        z = np.asarray(z, dtype=complex)
        acc = np.zeros_like(z)
        if self.monomial_power:
            acc = acc + self.monomial_power / z
        for r, m in self.real_factors:
            acc = acc + m / (z - r)
        for q, m in self.sphere_factors:
            acc = acc + m * (2 * z - q.trace()) / ((z * z - q.trace() * z) + q.norm2())
        if self.tail is not None:
            acc = acc + self.tail.complex_derivative(z) / self.tail.complex_eval(z)
        return acc

    def _pole_at(self, z: complex) -> bool:
        for w, m in self._complex_factors(np.asarray(z)):
            if m < 0 and w == 0:
                return True
        return False

    def __call__(self, x):
        x = Quaternion.coerce(x)
        z = _to_complex(x)
        if self._pole_at(z):
            return POLE
        return _lift(complex(self.complex_eval(z)), x)

    def evaluate(self, xs) -> np.ndarray:
        """Vectorized values; points on the pole set give inf/nan components."""
        alpha, beta, unit = slice_parts(xs)
        return complex_to_slice(self.complex_eval(alpha + 1j * beta), unit)

    def evaluate_by_factors(self, x):
        """Same value computed as a product of quaternion factor values."""
        x = Quaternion.coerce(x)
        if self._pole_at(_to_complex(x)):
            return POLE
        acc = Quaternion(1.0)

        def pw(v: Quaternion, m: int) -> Quaternion:
            base = v if m > 0 else inverse(v)
            out = Quaternion(1.0)
            for _ in range(abs(m)):
                out = out * base
            return out

        if self.monomial_power:
            acc = acc * pw(x, self.monomial_power)
        for r, m in self.real_factors:
            acc = acc * pw(x - r, m)
        for q, m in self.sphere_factors:
            acc = acc * pw(characteristic_polynomial(q).to_quat()(x), m)
        if self.tail is not None:
            acc = acc * self.tail.to_quat()(x)
        return acc

    def log_abs(self, xs) -> np.ndarray:
        """log|f| on an array of points, summed factor by factor."""
        alpha, beta, _ = slice_parts(xs)
        z = alpha + 1j * beta
        with np.errstate(divide="ignore", invalid="ignore"):
            acc = np.zeros(z.shape)
            for w, m in self._complex_factors(z):
                acc = acc + m * np.log(np.abs(w))
            if self.tail is not None:
                acc = acc + np.log(np.abs(self.tail.complex_eval(z)))
        return acc

    def slice_derivative(self, x):
        """d_c f at x, from the logarithmic derivative on the complex slice."""
        x = Quaternion.coerce(x)
        z = _to_complex(x)
        return _lift(complex(self.complex_eval(z) * self.complex_log_derivative(z)), x)

    def laplacian_log_abs(self, x) -> float:
        """Closed-form Laplacian of log|f| off the zero/pole set.

        For an axially symmetric log|F(alpha + i beta)| with F holomorphic the
        4D Laplacian reduces to (2/beta) d/dbeta log|F|, which on the real axis
        becomes -2 Re (log F)''.
        """
        x = Quaternion.coerce(x)
        z = _to_complex(x)
        if z.imag == 0.0:
            return -2.0 * float(np.real(self._log_second_derivative(z)))
        return -2.0 * float(np.imag(self.complex_log_derivative(z))) / z.imag

    def _log_second_derivative(self, z):
        acc = 0.0 + 0.0j
        if self.monomial_power:
            acc += -self.monomial_power / z ** 2
        for r, m in self.real_factors:
            acc += -m / (z - r) ** 2
        for q, m in self.sphere_factors:
            t, n2 = q.trace(), q.norm2()
            p = z * z - t * z + n2
            dp = 2 * z - t
            acc += m * (2 * p - dp * dp) / p ** 2
        if self.tail is not None:
            g = self.tail.complex_eval(z)
            g1 = self.tail.complex_derivative(z, 1)
            g2 = self.tail.complex_derivative(z, 2)
            acc += (g2 * g - g1 * g1) / g ** 2
        return acc

    # structure ----------------------------------------------------------

    def ledger(self) -> ZeroPoleLedger:
        entries = []
        for r, m in self.real_factors:
            entries.append(LedgerEntry("real_zero" if m > 0 else "real_pole", Quaternion(r), abs(m)))
        for q, m in self.sphere_factors:
            entries.append(LedgerEntry("sphere_zero" if m > 0 else "sphere_pole", q, abs(m)))
        return ZeroPoleLedger(tuple(entries), self.monomial_power)

    def without_monomial(self) -> "FactoredSlicePreserving":
        return FactoredSlicePreserving(0, self.real_factors, self.sphere_factors, self.tail)

    def is_regular(self) -> bool:
        return self.monomial_power >= 0 and all(
            m > 0 for _, m in self.real_factors + self.sphere_factors)

    def check_tail(self, rho: float, n: int = 24) -> float:
        """Sample |tail| on a coarse grid of the closed ball; warn if it nearly vanishes."""
        if self.tail is None:
            return math.inf
        if self.tail.radius_hint <= rho:
            warnings.warn(f"tail radius hint {self.tail.radius_hint} does not cover rho={rho}")
        # slice-preserving: enough to sample the closed upper half-disc of C_i
        a = np.linspace(-rho, rho, 2 * n + 1)
        b = np.linspace(0.0, rho, n + 1)
        A, B = np.meshgrid(a, b)
        inside = A ** 2 + B ** 2 <= rho ** 2 * (1 + 1e-12)
        vals = np.abs(self.tail.complex_eval(A[inside] + 1j * B[inside]))
        least = float(vals.min())
        if least < TAIL_WARN_LEVEL:
            warnings.warn(f"tail nearly vanishes on the ball of radius {rho} (min |tail| = {least:.3e})")
        return least

    def to_series(self) -> RealCoeffSeries:
        """Polynomial coefficients when f has no poles; tails are multiplied in."""
        if not self.is_regular():
            raise DomainError("only pole-free factorizations expand to a polynomial")
        poly = np.polynomial.Polynomial([1.0])
        x = np.polynomial.Polynomial([0.0, 1.0])
        poly = poly * x ** self.monomial_power
        for r, m in self.real_factors:
            poly = poly * (x - r) ** m
        for q, m in self.sphere_factors:
            poly = poly * np.polynomial.Polynomial(characteristic_polynomial(q).coefficients) ** m
        if self.tail is not None:
            poly = poly * np.polynomial.Polynomial(self.tail.coefficients)
        radius = self.tail.radius_hint if self.tail is not None else math.inf
        return RealCoeffSeries(tuple(poly.coef), radius)

    def to_dict(self) -> dict:
        d = {
            "monomial_power": self.monomial_power,
            "real_factors": [[r, m] for r, m in self.real_factors],
            "sphere_factors": [[q.to_list(), m] for q, m in self.sphere_factors],
        }
        if self.tail is not None:
            d["tail"] = list(self.tail.coefficients)
        return d


def evaluate_factored(f: FactoredSlicePreserving, x):
    return f(x)

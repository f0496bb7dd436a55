"""Quadrature on the 3-sphere, on unit 2-spheres of imaginary units and on 4-balls.

Points on the 3-sphere of radius rho are parametrized by hyperspherical angles

    y = rho (cos psi, sin psi cos theta, sin psi sin theta cos phi, sin psi sin theta sin phi)

with surface element rho^3 sin^2(psi) sin(theta) dpsi dtheta dphi.  psi is the
angle from the real axis, so functions of (Re y, |Im y|), such as log|f| for
slice-preserving f, depend on psi alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import POLE, SingularNode
from .quaternion import Quaternion, as_qarray, qmul, random_unit_quaternions

DEFAULT_GRID = (48, 48, 96)
ROTATION_RETRIES = 5
NEAR_SINGULAR = 1e-6


def _gauss(n: int, a: float, b: float):
    x, w = leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def _psi_rule(n: int, breaks=()):
    """Composite Gauss-Legendre in psi on [0, pi] with weight sin^2 psi."""
    edges = sorted({0.0, math.pi, *(float(b) for b in breaks if 0.0 < b < math.pi)})
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = _gauss(n, a, b)
        nodes.append(x)
        weights.append(w * np.sin(x) ** 2)
    return np.concatenate(nodes), np.concatenate(weights)


def _sphere_dirs(n_theta: int, n_phi: int):
    """Unit vectors in R^3 with weights summing to 4 pi (GL in cos theta, trapezoid in phi)."""
    c, wc = leggauss(n_theta)
    s = np.sqrt(1.0 - c * c)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    dirs = np.stack([
        np.repeat(c, n_phi),
        np.repeat(s, n_phi) * np.tile(np.cos(phi), n_theta),
        np.repeat(s, n_phi) * np.tile(np.sin(phi), n_theta),
    ], axis=-1)
    w = np.repeat(wc, n_phi) * (2.0 * math.pi / n_phi)
    return dirs, w


@dataclass(frozen=True)
class S3Grid:
    """Tensor rule on the 3-sphere of radius ``rho``.

    ``rotation`` is an optional pair (u, v) of unit quaternions; nodes are
    mapped by y -> u y v, a rotation of R^4 that keeps the weights.
    ``psi_breaks`` splits the psi range into panels, each with ``n_psi`` nodes.
    """

    n_psi: int = DEFAULT_GRID[0]
    n_theta: int = DEFAULT_GRID[1]
    n_phi: int = DEFAULT_GRID[2]
    rho: float = 1.0
    rotation: tuple | None = None
    psi_breaks: tuple = ()
    points: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if min(self.n_psi, self.n_theta, self.n_phi) < 1:
            raise ValueError("node counts must be positive")
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        object.__setattr__(self, "psi_breaks", tuple(float(b) for b in self.psi_breaks))
        psi, wpsi = _psi_rule(self.n_psi, self.psi_breaks)
        dirs, wdir = _sphere_dirs(self.n_theta, self.n_phi)
        pts = np.empty((psi.size, dirs.shape[0], 4))
        pts[..., 0] = np.cos(psi)[:, None]
        pts[..., 1:] = np.sin(psi)[:, None, None] * dirs[None, :, :]
        pts = pts.reshape(-1, 4)
        if self.rotation is not None:
            u, v = (np.asarray(Quaternion.coerce(q).to_array()) for q in self.rotation)
            pts = qmul(qmul(u, pts), v)
        w = (wpsi[:, None] * wdir[None, :]).reshape(-1) * self.rho ** 3
        object.__setattr__(self, "points", pts * self.rho)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return self.weights.size

    @property
    def area(self) -> float:
        return 2.0 * math.pi ** 2 * self.rho ** 3

    def with_radius(self, rho: float) -> "S3Grid":
        return S3Grid(self.n_psi, self.n_theta, self.n_phi, rho, self.rotation, self.psi_breaks)

    def rotated(self, rng: np.random.Generator) -> "S3Grid":
        u, v = random_unit_quaternions(rng, 2)
        return S3Grid(self.n_psi, self.n_theta, self.n_phi, self.rho,
                      (Quaternion(*u), Quaternion(*v)), self.psi_breaks)

    def to_dict(self) -> dict:
        d = {"n_psi": self.n_psi, "n_theta": self.n_theta, "n_phi": self.n_phi, "rho": self.rho}
        if self.psi_breaks:
            d["psi_breaks"] = list(self.psi_breaks)
        if self.rotation is not None:
            d["rotation"] = [q.to_list() for q in self.rotation]
        return d


def weighted_sum(values: np.ndarray, weights: np.ndarray) -> float:
    """Correctly rounded sum of values * weights; independent of evaluation order."""
    return math.fsum((np.asarray(values, dtype=float) * weights).tolist())


def _values(g: Callable, pts: np.ndarray) -> np.ndarray:
    vals = g(pts)
    if vals is POLE:
        return np.full(pts.shape[0], np.nan)
    return np.asarray(vals, dtype=float).reshape(pts.shape[0])


def _too_close(grid: S3Grid, singularities) -> bool:
    if singularities is None:
        return False
    if hasattr(singularities, "entries"):
        d = np.full(grid.size, np.inf)
        for e in singularities.entries:
            if e.kind.startswith("sphere"):
                p = grid.points
                dist = np.hypot(p[:, 0] - e.alpha, np.linalg.norm(p[:, 1:], axis=1) - e.beta)
            else:
                dist = np.linalg.norm(grid.points - e.point.to_array(), axis=1)
            d = np.minimum(d, dist)
        if singularities.origin_order:
            d = np.minimum(d, np.linalg.norm(grid.points, axis=1))
    else:
        d = np.full(grid.size, np.inf)
        for s in singularities:
            d = np.minimum(d, np.linalg.norm(grid.points - Quaternion.coerce(s).to_array(), axis=1))
    return bool(np.min(d) < NEAR_SINGULAR)


def mean_on_s3(g: Callable, rho: float = 1.0, grid: S3Grid | None = None, *,
               singularities=None, seed: int = 0, retries: int = ROTATION_RETRIES) -> float:
    """Average of g over the 3-sphere of radius rho.

    ``g`` maps an (n, 4) array of points to n real values.  If a node returns a
    non-finite value, or lies within 1e-6 of a known singularity, the grid is
    re-oriented at random (up to ``retries`` times) before giving up with
    :class:`SingularNode`.
    """
    if grid is None:
        grid = S3Grid(rho=rho)
    elif grid.rho != rho:
        grid = grid.with_radius(rho)
    rng = np.random.default_rng(seed)
    for attempt in range(retries + 1):
        if not _too_close(grid, singularities):
            vals = _values(g, grid.points)
            if np.all(np.isfinite(vals)):
                return weighted_sum(vals, grid.weights) / grid.area
        grid = grid.rotated(rng)
    raise SingularNode(f"integrand singular at a node of the radius-{rho} grid after {retries} rotations")


def mc_mean_on_s3(g: Callable, rho: float, n: int, rng: np.random.Generator,
                  chunk: int = 1_000_000) -> tuple:
    """Monte-Carlo mean over the 3-sphere (normalized Gaussian directions).

    Returns (mean, standard error).  Never used by the engines; oracle only.
    """
    total, total_sq, done = 0.0, 0.0, 0
    while done < n:
        m = min(chunk, n - done)
        v = rng.standard_normal((m, 4))
        v *= rho / np.linalg.norm(v, axis=1, keepdims=True)
        vals = _values(g, v)
        total += math.fsum(vals.tolist())
        total_sq += math.fsum((vals * vals).tolist())
        done += m
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    return mean, math.sqrt(var / n)


@dataclass(frozen=True)
class S2Rule:
    n_theta: int = 48
    n_phi: int = 96

    def nodes(self):
        return _sphere_dirs(self.n_theta, self.n_phi)


def mean_on_s2_units(g: Callable, alpha: float, beta: float, rule: S2Rule = S2Rule()):
    """Average of g(alpha + I beta) over unit imaginary I (uniform measure).

    ``g`` takes an (n, 4) array of points; real or quaternion values (n, 4)
    are both accepted.  Multiply by 4 pi for the integral against the area
    measure of the unit 2-sphere (see :func:`integral_on_s2_units`).
    """
    dirs, w = rule.nodes()
    pts = np.zeros((dirs.shape[0], 4))
    pts[:, 0] = alpha
    pts[:, 1:] = beta * dirs
    vals = np.asarray(g(pts), dtype=float)
    total = 4.0 * math.pi
    if vals.ndim == 2:
        return Quaternion(*(weighted_sum(vals[:, c], w) / total for c in range(4)))
    return weighted_sum(vals, w) / total


def integral_on_s2_units(g: Callable, alpha: float, beta: float, rule: S2Rule = S2Rule()):
    m = mean_on_s2_units(g, alpha, beta, rule)
    return m * (4.0 * math.pi)


@dataclass(frozen=True)
class BallResolution:
    n_r: int = 32
    n_psi: int = 32
    n_theta: int = 24
    n_phi: int = 48

    @classmethod
    def coerce(cls, value) -> "BallResolution":
        if value is None:
            return cls()
        if isinstance(value, BallResolution):
            return value
        return cls(*(int(v) for v in value))

    def to_dict(self) -> dict:
        return {"n_r": self.n_r, "n_psi": self.n_psi, "n_theta": self.n_theta, "n_phi": self.n_phi}


def ball4_nodes(center, radius: float, resolution=None, r_breaks=(), psi_breaks=(),
                rotation=None):
    """Nodes and weights of the tensor rule on the 4-ball B(center, radius)."""
    res = BallResolution.coerce(resolution)
    c = as_qarray(Quaternion.coerce(center))
    edges = sorted({0.0, float(radius), *(float(b) for b in r_breaks if 0.0 < b < radius)})
    rs, wr = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = _gauss(res.n_r, a, b)
        rs.append(x)
        wr.append(w * x ** 3)
    r = np.concatenate(rs)
    wr = np.concatenate(wr)
    unit = S3Grid(res.n_psi, res.n_theta, res.n_phi, 1.0, rotation, psi_breaks)
    pts = c + r[:, None, None] * unit.points[None, :, :]
    w = wr[:, None] * unit.weights[None, :]
    return pts.reshape(-1, 4), w.reshape(-1)


def ball4_integral(g: Callable, center=0.0, radius: float = 1.0, resolution=None,
                   r_breaks=(), psi_breaks=(), rotation=None) -> float:
    """Integral of g over the 4-ball B(center, radius), radial GL times an S3Grid."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    pts, w = ball4_nodes(center, radius, resolution, r_breaks, psi_breaks, rotation)
    vals = _values(g, pts)
    return weighted_sum(vals, w)


def _profile_polys(kmax: int):
    """P_k with d^k/ds^k exp(1 - w) = P_k(w) exp(1 - w), w = 1/(1 - s)."""
    polys = [np.polynomial.Polynomial([1.0])]
    w2 = np.polynomial.Polynomial([0.0, 0.0, 1.0])
    for _ in range(kmax):
        p = polys[-1]
        polys.append((p.deriv() - p) * w2)
    return polys


_P = _profile_polys(4)


@dataclass(frozen=True)
class BumpFunction:
    """phi(x) = exp(1 - 1/(1 - t^2)) for t = |x - center| / radius < 1, else 0.

    phi(center) = 1.  Laplacian and bilaplacian are exact (chain rule in
    s = t^2), so no finite differences are needed for the adjoint pairing.
    """

    center: Quaternion = Quaternion()
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", Quaternion.coerce(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    def _s(self, xs):
        d = as_qarray(xs) - self.center.to_array()
        return np.einsum("...i,...i->...", d, d) / self.radius ** 2

    def _derivs(self, s, orders):
        s = np.asarray(s, dtype=float)
        inside = s < 1.0
        w = 1.0 / (1.0 - np.where(inside, s, 0.0))
        base = np.where(inside, np.exp(1.0 - w), 0.0)
        return [np.where(inside, _P[k](w) * base, 0.0) for k in orders]

    def __call__(self, xs) -> np.ndarray:
        if isinstance(xs, Quaternion):
            return float(self._derivs(self._s(xs), [0])[0])
        return self._derivs(self._s(xs), [0])[0]

    def value(self, x) -> float:
        return float(self(Quaternion.coerce(x)))

    def laplacian(self, xs) -> np.ndarray:
        s = self._s(xs)
        f1, f2 = self._derivs(s, [1, 2])
        return (4.0 * s * f2 + 8.0 * f1) / self.radius ** 2

    def bilaplacian(self, xs) -> np.ndarray:
        s = self._s(xs)
        f2, f3, f4 = self._derivs(s, [2, 3, 4])
        return (16.0 * s * s * f4 + 96.0 * s * f3 + 96.0 * f2) / self.radius ** 4

    def to_dict(self) -> dict:
        return {"center": self.center.to_list(), "radius": self.radius}

"""Finite-difference Laplacian, bilaplacian and Cauchy-Fueter operators on
functions of a quaternionic variable, with Richardson extrapolation.

Evaluators are vectorized: they take an array of points with shape (n, 4) and
return shape (n,) for real-valued functions or (n, 4) for quaternion-valued
ones.  Use :func:`vectorize` to adapt a scalar callable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ClearanceError
from .quaternion import Quaternion, as_qarray, qmul

_AXES = np.eye(4)
# fixed stencil order: +e0, -e0, +e1, -e1, ... (deterministic reductions)
_STAR = np.concatenate([np.stack([e, -e]) for e in _AXES])


@dataclass(frozen=True)
class FDConfig:
    """Step control.  ``h=None`` means 1e-2 * max(1, |x|) at each point.

    The bilaplacian nests two Laplacian stencils, the outer one with step
    ``outer_factor * h``.  It extrapolates over ``bilaplacian_levels`` levels
    (default ``richardson_levels + 1``): a fourth derivative loses four digits
    to cancellation, so it needs the extra order to stay near 1e-5.
    """

    h: float | None = None
    richardson_levels: int = 2
    min_clearance: float | None = None
    outer_factor: float = 1.0
    bilaplacian_levels: int | None = None

    def __post_init__(self):
        if self.h is not None and not self.h > 0:
            raise ValueError("h must be positive")
        if self.richardson_levels < 0:
            raise ValueError("richardson_levels must be >= 0")
        if self.bilaplacian_levels is not None and self.bilaplacian_levels < 0:
            raise ValueError("bilaplacian_levels must be >= 0")
        if not self.outer_factor > 0:
            raise ValueError("outer_factor must be positive")
        if self.min_clearance is not None:
            if not self.min_clearance > 0:
                raise ValueError("min_clearance must be positive")
            if self.h is not None and self.h > self.min_clearance / 8:
                raise ValueError("h must not exceed min_clearance / 8")

    def step(self, x) -> float:
        x = Quaternion.coerce(x)
        h = self.h if self.h is not None else 1e-2 * max(1.0, abs(x))
        if self.min_clearance is not None:
            h = min(h, self.min_clearance / 8)
        return h

    def steps(self, h: float, levels: int | None = None) -> list:
        """Richardson steps h, 2h, ..., (levels + 1) h.

        Growing the step instead of halving it keeps the cancellation error of
        the nested bilaplacian small.
        """
        levels = self.richardson_levels if levels is None else levels
        return [h * (k + 1) for k in range(levels + 1)]

    @property
    def bilap_levels(self) -> int:
        if self.bilaplacian_levels is not None:
            return self.bilaplacian_levels
        return self.richardson_levels + 1


DEFAULT_FD = FDConfig()


def vectorize(f: Callable) -> Callable:
    """Turn a scalar callable on Quaternion into an array evaluator."""

    def g(xs):
        xs = as_qarray(xs)
        out = [f(Quaternion.from_array(p)) for p in xs.reshape(-1, 4)]
        first = out[0] if out else 0.0
        if isinstance(first, Quaternion):
            return np.array([o.to_array() for o in out]).reshape(xs.shape)
        return np.array(out, dtype=float).reshape(xs.shape[:-1])

    return g


def richardson(values, steps=None, ratio: float = 2.0, order: int = 2) -> float:
    """Polynomial extrapolation to step 0 of estimates with error a1 h^order + a2 h^(2 order) + ...

    ``steps`` defaults to the geometric sequence 1, 1/ratio, 1/ratio^2, ...
    Any distinct positive steps work (Neville's algorithm in t = h^order).
    """
    vals = [float(v) for v in values]
    if steps is None:
        steps = [ratio ** -k for k in range(len(vals))]
    t = [float(s) ** order for s in steps]
    table = list(vals)
    n = len(table)
    for k in range(1, n):
        for i in range(n - 1, k - 1, -1):
            table[i] = table[i] + (table[i] - table[i - 1]) * t[i] / (t[i - k] - t[i])
    return table[-1]


def richardson_linear(values, ratio: float = 2.0) -> list:
    """Neville table for an error expansion in h, h^2, h^3, ...; returns the diagonal."""
    rows = [[float(v) for v in values]]
    k = 1
    while len(rows[-1]) > 1:
        f = ratio ** k
        prev = rows[-1]
        rows.append([(f * prev[i + 1] - prev[i]) / (f - 1.0) for i in range(len(prev) - 1)])
        k += 1
    return [r[-1] for r in rows]


def _check_clearance(x: Quaternion, reach: float, cfg: FDConfig, singularities) -> None:
    if singularities is None:
        return
    d = singularities.min_distance(x) if hasattr(singularities, "min_distance") else min(
        (abs(x - Quaternion.coerce(s)) for s in singularities), default=math.inf)
    need = cfg.min_clearance if cfg.min_clearance is not None else 0.0
    if d < need or d <= reach:
        raise ClearanceError(f"singular set at distance {d:.3e} from {x}; stencil reach {reach:.3e}")


def _laplacian_points(x: np.ndarray, h: float) -> np.ndarray:
    return np.concatenate([x[None, :], x[None, :] + h * _STAR])


def _laplacian_combine(vals: np.ndarray, h: float) -> float:
    # vals: center followed by the 8 star points
    return (math.fsum(vals[1:]) - 8.0 * vals[0]) / (h * h)


def laplacian_fd(u: Callable, x, cfg: FDConfig = DEFAULT_FD, singularities=None) -> float:
    """Sum of second central differences over the four axes, extrapolated.

    ``singularities`` (a ledger or a list of points) enables the clearance check;
    for black-box evaluators clearance is the caller's business.
    """
    x = Quaternion.coerce(x)
    h = cfg.step(x)
    xa = x.to_array()
    steps = cfg.steps(h)
    _check_clearance(x, steps[-1], cfg, singularities)
    pts = np.concatenate([_laplacian_points(xa, s) for s in steps])
    vals = np.asarray(u(pts), dtype=float).reshape(len(steps), 9)
    return richardson([_laplacian_combine(v, s) for v, s in zip(vals, steps)], steps)


def bilaplacian_fd(u: Callable, x, cfg: FDConfig = DEFAULT_FD, singularities=None) -> float:
    """Laplacian stencil applied to extrapolated Laplacian values, extrapolated again."""
    x = Quaternion.coerce(x)
    h = cfg.step(x)
    outer_steps = cfg.steps(cfg.outer_factor * h, cfg.bilap_levels)
    inner_steps = cfg.steps(h, cfg.bilap_levels)
    levels = len(inner_steps)
    _check_clearance(x, outer_steps[-1] + inner_steps[-1], cfg, singularities)
    xa = x.to_array()
    centers = np.concatenate([_laplacian_points(xa, s) for s in outer_steps])  # (levels*9, 4)
    pts = np.concatenate([
        _laplacian_points(c, s) for c in centers for s in inner_steps
    ])
    vals = np.asarray(u(pts), dtype=float).reshape(len(centers), levels, 9)
    inner = np.array([
        richardson([_laplacian_combine(vals[c, j], inner_steps[j]) for j in range(levels)],
                   inner_steps)
        for c in range(len(centers))
    ]).reshape(levels, 9)
    return richardson([_laplacian_combine(inner[k], outer_steps[k]) for k in range(levels)],
                      outer_steps)


_CF_UNITS = {
    "D_CF": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], dtype=float),
    "Dbar_CF": np.array([[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]], dtype=float),
}


def partial_derivatives_fd(f: Callable, x, cfg: FDConfig = DEFAULT_FD) -> np.ndarray:
    """Central-difference partials d f / d x_i, extrapolated; shape (4, 4)."""
    x = Quaternion.coerce(x)
    h = cfg.step(x)
    xa = x.to_array()
    steps = cfg.steps(h)
    pts = np.concatenate([xa[None, :] + s * _STAR for s in steps])
    vals = np.asarray(f(pts), dtype=float).reshape(len(steps), 4, 2, -1)
    out = []
    for i in range(4):
        per_level = [(vals[k, i, 0] - vals[k, i, 1]) / (2 * s) for k, s in enumerate(steps)]
        comps = [richardson([lvl[c] for lvl in per_level], steps) for c in range(vals.shape[-1])]
        out.append(comps)
    return np.array(out)


def cauchy_fueter_fd(f: Callable, x, which: str = "D_CF", cfg: FDConfig = DEFAULT_FD,
                     singularities=None) -> Quaternion:
    """D_CF f = df/dx0 + i df/dx1 + j df/dx2 + k df/dx3 (units on the left);
    ``which="Dbar_CF"`` flips the signs of the imaginary units."""
    if which not in _CF_UNITS:
        raise ValueError(f"which must be one of {tuple(_CF_UNITS)}")
    x = Quaternion.coerce(x)
    _check_clearance(x, cfg.step(x), cfg, singularities)
    d = partial_derivatives_fd(f, x, cfg)
    return Quaternion(*qmul(_CF_UNITS[which], d).sum(axis=0))


def mollified_log_laplacians(x, eps: float) -> tuple:
    """Closed-form Laplacian and bilaplacian of log(|x|^2 + eps^2)."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    r2 = Quaternion.coerce(x).norm2()
    e2 = eps * eps
    s = r2 + e2
    return 4.0 * (r2 + 2.0 * e2) / s ** 2, -96.0 * e2 * e2 / s ** 4


def mollified_log(xs, eps: float) -> np.ndarray:
    xs = as_qarray(xs)
    return np.log(np.einsum("...i,...i->...", xs, xs) + eps * eps)

"""Distributional checks of the Riesz measure of log|f|.

The pairing of Delta^2 log|f| with a test function phi is computed in adjoint
form, (1/gamma) * integral of log|f| Delta^2 phi, since log|f| is locally
integrable while Delta^2 log|f| is singular on the zero/pole set.

Three integration routes are provided:

``ball``   tensor rule on the support of phi (any f);
``point``  for PQL f.  log|f| is a sum of log|x - q_k|, and each term times
           Delta^2 phi is symmetric about the line through q_k and the centre
           of phi, which leaves a 2D integral in polar coordinates around q_k;
``axial``  for slice-preserving f only.  log|f| depends on (Re x, |Im x|), so
           the 4D integral reduces to a plane integral against the average of
           Delta^2 phi over the 2-sphere of imaginary units, which for a radial
           bump has a closed form.  Logarithmic singularities are integrated in
           polar coordinates centred on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .diffops import mollified_log_laplacians
from .jensen import as_function
from .mixed import MixedProduct
from .pql import PQLFunction
from .quadrature import (
    BallResolution,
    BumpFunction,
    S2Rule,
    ball4_integral,
    integral_on_s2_units,
    weighted_sum,
)
from .quaternion import Quaternion, random_unit_quaternions
from .slicefn import FactoredSlicePreserving, ZeroPoleLedger

GAMMA = -48.0
# Delta^2 log|x| = FUNDAMENTAL_4D * delta_0 in R^4 (the mollifier integral below
# has total mass -16 pi^2, and log|x|^2 = 2 log|x|)
FUNDAMENTAL_4D = -8.0 * math.pi ** 2
RADIAL_GRADING = 6
SINGULAR_RETRIES = 5


def radial_breaks(radius: float, levels: int = RADIAL_GRADING) -> tuple:
    """Panel ends where 1 - |x - c|^2 / R^2 halves; the bump's derivatives
    concentrate towards the rim."""
    return tuple(radius * math.sqrt(1.0 - 2.0 ** -k) for k in range(1, levels + 1))


# ---------------------------------------------------------------------------
# predictions

@dataclass(frozen=True)
class RieszPrediction:
    """Point masses (q, weight) and sphere masses ((alpha, beta), weight), in units of gamma."""

    point_masses: tuple = ()
    sphere_masses: tuple = ()
    gamma: float = GAMMA

    def __post_init__(self):
        object.__setattr__(self, "point_masses",
                           tuple((Quaternion.coerce(q), int(w)) for q, w in self.point_masses))
        object.__setattr__(self, "sphere_masses",
                           tuple(((float(a), float(b)), int(w)) for (a, b), w in self.sphere_masses))

    @classmethod
    def from_ledger(cls, ledger: ZeroPoleLedger, gamma: float = GAMMA) -> "RieszPrediction":
        points, spheres = [], []
        if ledger.origin_order:
            points.append((Quaternion(), ledger.origin_order))
        for e in ledger.entries:
            w = e.sign * e.multiplicity
            if e.kind.startswith("sphere"):
                spheres.append(((e.alpha, e.beta), w))
            else:
                points.append((e.point, w))
        return cls(tuple(points), tuple(spheres), gamma)

    @classmethod
    def from_function(cls, f, gamma: float = GAMMA) -> "RieszPrediction":
        return cls.from_ledger(as_function(f).ledger(), gamma)

    def to_dict(self) -> dict:
        return {
            "point_masses": [[q.to_list(), w] for q, w in self.point_masses],
            "sphere_masses": [[[a, b], w] for (a, b), w in self.sphere_masses],
            "gamma": self.gamma,
        }


def predicted_pairing(pred: RieszPrediction, phi: BumpFunction, rule: S2Rule = S2Rule()) -> float:
    """sum w phi(q) + sum w * integral over the unit sphere S of phi(alpha + I beta) dsigma(I)."""
    total = [w * phi.value(q) for q, w in pred.point_masses]
    total += [w * integral_on_s2_units(phi, a, b, rule) for (a, b), w in pred.sphere_masses]
    return math.fsum(total)


# ---------------------------------------------------------------------------
# ball route

def _ball_raw(f, phi: BumpFunction, resolution, seed: int) -> float:
    rng = np.random.default_rng(seed)
    rotation = None
    for _ in range(SINGULAR_RETRIES + 1):
        with np.errstate(divide="ignore", invalid="ignore"):
            val = ball4_integral(lambda x: f.log_abs(x) * phi.bilaplacian(x), phi.center, phi.radius,
                                 resolution, r_breaks=radial_breaks(phi.radius), rotation=rotation)
        if math.isfinite(val):
            return val
        # a node hit the zero set; re-orient the angular grid
        u, v = random_unit_quaternions(rng, 2)
        rotation = (Quaternion(*u), Quaternion(*v))
    raise FloatingPointError("pairing integrand not finite after re-orienting the grid")


# ---------------------------------------------------------------------------
# axial route

_T_NODES, _T_WEIGHTS = leggauss(16)


def _rim_antiderivative(phi: BumpFunction, s):
    # d/ds [16 s^2 F''' + 64 s F'' + 32 F'] = 16 s^2 F'''' + 96 s F''' + 96 F''
    s = np.asarray(s, dtype=float)
    f1, f2, f3 = phi._derivs(s, [1, 2, 3])
    return 16.0 * s * s * f3 + 64.0 * s * f2 + 32.0 * f1


def _profile_bilaplacian(phi: BumpFunction, s):
    s = np.asarray(s, dtype=float)
    f2, f3, f4 = phi._derivs(s, [2, 3, 4])
    return (16.0 * s * s * f4 + 96.0 * s * f3 + 96.0 * f2) / phi.radius ** 4


def axial_weight(phi: BumpFunction, alpha, beta) -> np.ndarray:
    """beta^2 times the integral of Delta^2 phi(alpha + I beta) over unit imaginary I.

    Even in beta; a 4D integral of an axially symmetric u equals the plane
    integral of u against this weight over beta > 0.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.abs(np.asarray(beta, dtype=float))
    c0, b, R = phi.center.real, phi.center.imag_norm(), phi.radius
    d2 = (alpha - c0) ** 2
    s_min = (d2 + (beta - b) ** 2) / (R * R)
    s_max = (d2 + (beta + b) ** 2) / (R * R)
    spread = beta * b / (R * R)
    out = np.zeros(np.broadcast(alpha, beta).shape)
    wide = spread > 1e-3
    with np.errstate(divide="ignore", invalid="ignore"):
        diff = _rim_antiderivative(phi, s_max) - _rim_antiderivative(phi, s_min)
        closed = math.pi * beta * diff / (b * R * R)
    out = np.where(wide, closed, out)
    narrow = ~wide
    if np.any(narrow):
        a_n, b_n = np.broadcast_to(alpha, out.shape)[narrow], np.broadcast_to(beta, out.shape)[narrow]
        s = ((a_n - c0) ** 2 + b_n ** 2 + b * b)[:, None] - 2.0 * b * b_n[:, None] * _T_NODES[None, :]
        avg = _profile_bilaplacian(phi, s / (R * R)) @ _T_WEIGHTS
        out[narrow] = 2.0 * math.pi * b_n ** 2 * avg
    return out


@dataclass(frozen=True)
class AxialResolution:
    n_panels: int = 64
    n_gauss: int = 16
    n_angle: int = 512
    grading: int = 24

    @classmethod
    def coerce(cls, value) -> "AxialResolution":
        if value is None:
            return cls()
        if isinstance(value, AxialResolution):
            return value
        return cls(*(int(v) for v in value))

    def to_dict(self) -> dict:
        return {"n_panels": self.n_panels, "n_gauss": self.n_gauss, "n_angle": self.n_angle,
                "grading": self.grading}


def _polar_rule(center: complex, reach: float, res: AxialResolution, rim: bool = False):
    """Polar tensor rule on the disc |z - center| < reach.

    Radial panels are graded towards 0 (log singularity at the centre) or, with
    ``rim=True``, towards the rim where the bump profile steepens.
    """
    x, w = leggauss(res.n_gauss)
    if rim:
        graded = radial_breaks(reach, res.grading)
    else:
        graded = tuple(reach * 2.0 ** -k for k in range(1, res.grading + 1))
    edges = sorted({0.0, *graded, *(reach * k / res.n_panels for k in range(1, res.n_panels + 1))})
    rs, wr = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        rs.append(a + half * (x + 1.0))
        wr.append(half * w)
    r = np.concatenate(rs)
    wr = np.concatenate(wr)
    th = 2.0 * math.pi * np.arange(res.n_angle) / res.n_angle
    z = center + r[:, None] * np.exp(1j * th)[None, :]
    weights = (wr * r)[:, None] * np.full(res.n_angle, 2.0 * math.pi / res.n_angle)[None, :]
    return z.reshape(-1), weights.reshape(-1), np.repeat(r, res.n_angle)


def _support_cover(phi: BumpFunction) -> list:
    """Discs of the (alpha, beta) plane covering the support of the even axial weight."""
    c0, b, R = phi.center.real, phi.center.imag_norm(), phi.radius
    if b >= R:
        return [(complex(c0, b), R), (complex(c0, -b), R)]
    return [(complex(c0, 0.0), b + R)]


def _plane_integral(phi: BumpFunction, res: AxialResolution, z0: complex | None = None, smooth=None) -> float:
    """Whole-plane integral of (log|z - z0| or smooth(z)) times the even axial weight."""
    total = []
    for m, rad in _support_cover(phi):
        if z0 is not None and abs(z0 - m) < rad:
            z, w, r = _polar_rule(z0, abs(z0 - m) + rad, res)
            inside = np.abs(z - m) < rad
            with np.errstate(divide="ignore"):
                vals = np.where(inside, np.log(r) * axial_weight(phi, z.real, z.imag), 0.0)
        else:
            z, w, _ = _polar_rule(m, rad, res, rim=True)
            g = axial_weight(phi, z.real, z.imag)
            vals = (np.log(np.abs(z - z0)) if z0 is not None else smooth(z)) * g
        total.append(weighted_sum(vals, w))
    return math.fsum(total)


def _axial_raw(f: FactoredSlicePreserving, phi: BumpFunction, resolution) -> float:
    res = AxialResolution.coerce(resolution)
    terms = []
    # half-plane integral = half of the whole-plane integral of the even extension;
    # log|z - p| and log|z - conj p| contribute equally
    if f.monomial_power:
        terms.append(0.5 * f.monomial_power * _plane_integral(phi, res, 0j))
    for r0, m in f.real_factors:
        terms.append(0.5 * m * _plane_integral(phi, res, complex(r0, 0.0)))
    for q, m in f.sphere_factors:
        terms.append(m * _plane_integral(phi, res, complex(q.real, q.imag_norm())))
    if f.tail is not None:
        tail = f.tail
        terms.append(0.5 * _plane_integral(phi, res, smooth=lambda z: np.log(np.abs(tail.complex_eval(z)))))
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# point route


@dataclass(frozen=True)
class PointResolution:
    n_panels: int = 32
    n_gauss: int = 16
    n_psi_panels: int = 4
    grading: int = 24

    @classmethod
    def coerce(cls, value) -> "PointResolution":
        if value is None:
            return cls()
        if isinstance(value, PointResolution):
            return value
        return cls(*(int(v) for v in value))

    def to_dict(self) -> dict:
        return {"n_panels": self.n_panels, "n_gauss": self.n_gauss, "n_psi_panels": self.n_psi_panels,
                "grading": self.grading}


def _panels(edges, x, w):
    rs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        rs.append(a + half * (x + 1.0))
        ws.append(half * w)
    return np.concatenate(rs), np.concatenate(ws)


def _point_raw(q: Quaternion, phi: BumpFunction, res: PointResolution) -> float:
    """Integral of log|x - q| Delta^2 phi(x) over R^4.

    With r = |x - q| and psi the angle between x - q and c - q, the integrand
    depends on (r, psi) only; the other two angles give a factor 4 pi.
    """
    R = phi.radius
    d = abs(phi.center - q)
    lo, hi = max(0.0, d - R), d + R
    x, w = leggauss(res.n_gauss)
    levels = range(1, RADIAL_GRADING + 1)
    edges = {lo, hi, *(lo + (hi - lo) * k / res.n_panels for k in range(1, res.n_panels))}
    edges |= {d + R * math.sqrt(1.0 - 2.0 ** -k) for k in levels}
    edges |= {d - R * math.sqrt(1.0 - 2.0 ** -k) for k in levels}
    edges.add(abs(R - d))
    if lo == 0.0:
        # log singularity at r = 0
        edges |= {hi * 2.0 ** -k for k in range(1, res.grading + 1)}
    r, wr = _panels(sorted(e for e in edges if lo <= e <= hi), x, w)
    total = []
    for rk, wk in zip(r, wr):
        if d == 0.0:
            s = np.array([rk * rk / (R * R)])
            inner = 0.5 * math.pi * float(_profile_bilaplacian(phi, s)[0])
        else:
            cmax = (rk * rk + d * d - R * R) / (2.0 * rk * d)
            if cmax >= 1.0:
                continue
            pmax = math.pi if cmax <= -1.0 else math.acos(cmax)
            # panels where 1 - s halves, then uniform ones
            br = {0.0, pmax, *(pmax * k / res.n_psi_panels for k in range(1, res.n_psi_panels))}
            for k in levels:
                c = (rk * rk + d * d - (1.0 - 2.0 ** -k) * R * R) / (2.0 * rk * d)
                if -1.0 < c < 1.0:
                    br.add(math.acos(c))
            psi, wp = _panels(sorted(b for b in br if b <= pmax), x, w)
            s = (rk * rk - 2.0 * rk * d * np.cos(psi) + d * d) / (R * R)
            inner = weighted_sum(_profile_bilaplacian(phi, s) * np.sin(psi) ** 2, wp)
        total.append(wk * math.log(rk) * rk ** 3 * inner)
    return 4.0 * math.pi * math.fsum(total)


def _pql_raw(f, phi: BumpFunction, resolution) -> float:
    # the constants contribute log|a_k| times the integral of Delta^2 phi, which is 0
    res = PointResolution.coerce(resolution)
    return math.fsum(m * _point_raw(qk, phi, res) for qk, m in zip(f.q, f.M))


# ---------------------------------------------------------------------------
# pairings and reports

METHODS = ("auto", "ball", "axial", "point")


def pairing_raw(f, phi: BumpFunction, resolution=None, method: str = "auto", seed: int = 0) -> float:
    """Integral of log|f| * Delta^2 phi over the support of phi.

    ``auto`` splits a product into its parts (log|f| is a sum) and uses the
    axial route for slice-preserving parts and the point route for PQL parts.
    ``resolution`` applies to whichever route runs; with ``auto`` pass None.
    """
    f = as_function(f)
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    if method == "auto":
        parts = f.parts if isinstance(f, MixedProduct) else (f,)
        return math.fsum(
            _axial_raw(p, phi, None) if isinstance(p, FactoredSlicePreserving) else _pql_raw(p, phi, None)
            for p in parts
        )
    if method == "point":
        if not isinstance(f, PQLFunction):
            raise TypeError("the point route needs a PQL function")
        return _pql_raw(f, phi, resolution)
    if method == "axial":
        if not isinstance(f, FactoredSlicePreserving):
            raise TypeError("the axial route needs a slice-preserving function")
        return _axial_raw(f, phi, resolution)
    return _ball_raw(f, phi, BallResolution.coerce(resolution), seed)


def pairing(f, phi: BumpFunction, resolution=None, gamma: float = GAMMA, method: str = "auto",
            seed: int = 0) -> float:
    """(1/gamma) * integral of log|f| Delta^2 phi, the action of (1/gamma) Delta^2 log|f| on phi."""
    return pairing_raw(f, phi, resolution, method, seed) / gamma


@dataclass
class RieszReport:
    pairing: float
    prediction: float
    gamma: float
    raw_integral: float
    unit_prediction: float
    method: str
    resolution: dict
    phi: dict
    metadata: dict = field(default_factory=dict)

    @property
    def residual(self) -> float:
        return abs(self.pairing - self.prediction)

    @property
    def measured_gamma(self):
        """raw integral / unit-weight prediction: the constant the data imply."""
        if self.unit_prediction == 0.0:
            return None
        return self.raw_integral / self.unit_prediction

    def to_dict(self) -> dict:
        return {
            "pairing": self.pairing,
            "prediction": self.prediction,
            "residual": self.residual,
            "gamma": self.gamma,
            "raw_integral": self.raw_integral,
            "unit_prediction": self.unit_prediction,
            "measured_gamma": self.measured_gamma,
            "method": self.method,
            "resolution": self.resolution,
            "phi": self.phi,
            "metadata": self.metadata,
        }


def riesz_residual(f, phi: BumpFunction, resolution=None, gamma: float = GAMMA, method: str = "auto",
                   seed: int = 0, rule: S2Rule = S2Rule()) -> RieszReport:
    """Compare the adjoint pairing with the measure predicted from the ledger."""
    g = as_function(f)
    pred = RieszPrediction.from_ledger(g.ledger(), gamma)
    unit = predicted_pairing(pred, phi, rule)
    raw = pairing_raw(g, phi, resolution, method, seed)
    if method == "auto":
        res = {"axial": AxialResolution().to_dict(), "point": PointResolution().to_dict()}
    elif method == "point":
        res = PointResolution.coerce(resolution).to_dict()
    elif method == "axial":
        res = AxialResolution.coerce(resolution).to_dict()
    else:
        res = BallResolution.coerce(resolution).to_dict()
    meta = {"prediction_terms": pred.to_dict()}
    if pred.sphere_masses:
        meta["sphere_note"] = ("sphere masses are predicted as gamma times the area integral over the unit "
                               "sphere of imaginary units; compare measured_gamma with gamma")
    return RieszReport(raw / gamma, unit, gamma, raw, unit, method, res, phi.to_dict(), meta)


def sphere_constant(p, phi: BumpFunction, resolution=None, gamma: float = GAMMA,
                    method: str = "axial", rule: S2Rule = S2Rule()) -> dict:
    """Measured constant for f = (x - p)^s: raw pairing over the integral of phi on S_p.

    A genuine multiple of the area measure of the unit sphere would give the
    same ratio for every test function.
    """
    p = Quaternion.coerce(p)
    f = FactoredSlicePreserving(sphere_factors=((p, 1),))
    raw = pairing_raw(f, phi, resolution, method)
    s = integral_on_s2_units(phi, p.real, p.imag_norm(), rule)
    ratio = raw / s if s != 0.0 else None
    agrees = ratio is not None and abs(ratio - gamma) <= 1e-3 * abs(gamma)
    return {"raw_integral": raw, "sphere_integral": s, "measured_constant": ratio, "gamma": gamma,
            "agrees_with_gamma": agrees, "phi": phi.to_dict(), "method": method}


# ---------------------------------------------------------------------------
# mollifier

_U_NODES, _U_WEIGHTS = leggauss(64)


def _mollifier_radial(eps: float, phi: BumpFunction | None) -> float:
    """Integral of Delta^2 log(|x|^2 + eps^2) * phi(x) over R^4, phi radial about 0 or 1."""
    if phi is None:
        # r = eps tan t maps [0, inf) to [0, pi/2); composite GL in t
        edges = np.linspace(0.0, 0.5 * math.pi, 9)
        total = []
        for a, b in zip(edges[:-1], edges[1:]):
            half = 0.5 * (b - a)
            t = a + half * (_U_NODES + 1.0)
            r = eps * np.tan(t)
            dr = eps / np.cos(t) ** 2
            bil = np.array([mollified_log_laplacians(Quaternion(v), eps)[1] for v in r])
            total.append(weighted_sum(bil * 2.0 * math.pi ** 2 * r ** 3 * dr, half * _U_WEIGHTS))
        return math.fsum(total)
    R = phi.radius
    edges = sorted({0.0, R, *(eps * 2.0 ** k for k in range(-4, 12) if eps * 2.0 ** k < R),
                    *radial_breaks(R)})
    total = []
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        r = a + half * (_U_NODES + 1.0)
        pts = np.zeros((r.size, 4))
        pts[:, 0] = r
        bil = -96.0 * eps ** 4 / (r * r + eps * eps) ** 4
        vals = bil * phi(pts + phi.center.to_array()) * 2.0 * math.pi ** 2 * r ** 3
        total.append(weighted_sum(vals, half * _U_WEIGHTS))
    return math.fsum(total)


@dataclass
class MollifierTable:
    eps: list
    values: list
    target: float
    errors: list
    monotone: bool
    full_space_mass: float

    def to_dict(self) -> dict:
        return {"eps": self.eps, "values": self.values, "target": self.target, "errors": self.errors,
                "monotone": self.monotone, "full_space_mass": self.full_space_mass}


def mollified_delta_check(eps_sequence, phi: BumpFunction | None = None, gamma: float = GAMMA) -> MollifierTable:
    """Integrals of Delta^2 log(|x|^2 + eps^2) against phi (phi = 1 if None; else a bump
    centred at the origin) and their distance to 2 gamma phi(0)."""
    eps_sequence = [float(e) for e in eps_sequence]
    if any(e <= 0 for e in eps_sequence):
        raise ValueError("eps must be positive")
    if any(b >= a for a, b in zip(eps_sequence[:-1], eps_sequence[1:])):
        raise ValueError("eps must decrease")
    if phi is not None and phi.center.norm2() != 0.0:
        raise ValueError("the bump must be centred at the origin")
    phi0 = 1.0 if phi is None else phi.value(Quaternion())
    target = 2.0 * gamma * phi0
    values = [_mollifier_radial(e, phi) for e in eps_sequence]
    errors = [abs(v - target) for v in values]
    monotone = all(b < a for a, b in zip(errors[:-1], errors[1:]))
    mass = _mollifier_radial(1.0, None)
    return MollifierTable(eps_sequence, values, target, errors, monotone, mass)


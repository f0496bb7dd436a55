"""Jensen formulas on balls of H: term assembly, residuals and corollaries.

For f with zeros and poles inside B_rho and none on the boundary,

    log|f(0)| = mean_{dB_rho} log|f| - (rho^2/8) Dlog|f|(0) + sum of corrections,

one correction per ledger entry.  Writing t(s) = log(rho/s) + (s^4 - rho^4)/(4 rho^2 s^2):

    real zero r          -t(|r|)          real pole       +t(|r|)
    isolated zero q      -t(|q|)          isolated pole   +t(|q|)
    spherical zero S_a   -[log(rho^2/|a|^2) + (rho^4 - |a|^4)/(4 rho^2 |a|^4) c(a)]
    spherical pole S_a   +[same]

with c(a) = 2|a|^2 - (a + a^c)^2 = 2(beta^2 - alpha^2).  Corrections are
repeated according to the factor multiplicity in the ledger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .blaschke import BlaschkeSpec, cone_bracket
from .diffops import DEFAULT_FD, FDConfig, laplacian_fd, richardson_linear
from .errors import (
    BoundaryContact,
    ExtrapolationUnstable,
    GuardFailed,
    OriginSingular,
    PreconditionFailed,
)
from .mixed import MixedProduct, origin_order, strip_origin
from .pql import PQLFunction
from .quadrature import S3Grid, mean_on_s3
from .quaternion import Quaternion, qabs
from .slicefn import FactoredSlicePreserving, LedgerEntry, ZeroPoleLedger

BOUNDARY_DELTA = 1e-9
BOUNDARY_EPS = (4e-3, 2e-3, 1e-3)
CONE_ATOL = 1e-12
NCOUNT_HALF_NOTE = ("counting bound uses the factor 1/2 of the final derived line; "
                    "the displayed inequality omits it")

BRANCHES = {"real": "real_point", "sphere": "spherical", "point": "pql"}


# ---------------------------------------------------------------------------
# per-entry terms

def point_term(s: float, rho: float) -> float:
    """log(rho/s) + (s^4 - rho^4) / (4 rho^2 s^2), for a zero or pole of modulus s."""
    return math.log(rho / s) + 0.25 * (s ** 4 - rho ** 4) / (rho * rho * s * s)


def spherical_term(a, rho: float) -> float:
    a = Quaternion.coerce(a)
    n2 = a.norm2()
    return math.log(rho * rho / n2) + 0.25 * (rho ** 4 - n2 * n2) / (rho * rho * n2 * n2) * cone_bracket(a)


def entry_correction(e: LedgerEntry, rho: float) -> float:
    """Signed contribution of one ledger entry (with its multiplicity)."""
    if e.kind.startswith("sphere"):
        t = spherical_term(e.point, rho)
    else:
        t = point_term(e.modulus, rho)
    return -e.sign * e.multiplicity * t


def non_cancellation_quantity(r: float, a, rho: float) -> float:
    """Sum of the two rational parts of a real-zero and a spherical-zero term."""
    a = Quaternion.coerce(a)
    n2 = a.norm2()
    return (0.25 * (rho ** 4 - n2 * n2) / (rho * rho * n2 * n2) * cone_bracket(a)
            + 0.25 * (r ** 4 - rho ** 4) / (rho * rho * r * r))


# ---------------------------------------------------------------------------
# report

@dataclass(frozen=True)
class Correction:
    source: LedgerEntry
    branch: str
    value: float

    def to_dict(self) -> dict:
        return {"source": self.source.to_dict(), "branch": self.branch, "value": self.value}


@dataclass
class JensenReport:
    lhs: float
    mean_term: float
    laplacian_term: float
    corrections: list
    rho: float
    metadata: dict = field(default_factory=dict)

    @property
    def correction_sum(self) -> float:
        return math.fsum(c.value for c in self.corrections)

    @property
    def residual(self) -> float:
        return self.lhs - (self.mean_term - self.laplacian_term + self.correction_sum)

    @property
    def predicted_mean(self) -> float:
        """The mean that makes the residual vanish."""
        return self.lhs + self.laplacian_term - self.correction_sum

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "lhs": self.lhs,
            "mean_term": self.mean_term,
            "laplacian_term": self.laplacian_term,
            "corrections": [c.to_dict() for c in self.corrections],
            "correction_sum": self.correction_sum,
            "predicted_mean": self.predicted_mean,
            "residual": self.residual,
            "metadata": self.metadata,
        }


# ---------------------------------------------------------------------------
# helpers

_ORIGIN = np.zeros((1, 4))


def _log_abs_at_zero(f) -> float:
    with np.errstate(divide="ignore", invalid="ignore"):
        v = float(f.log_abs(_ORIGIN)[0])
    if not math.isfinite(v):
        raise OriginSingular(origin_order(f) if not isinstance(f, MixedProduct) else f.origin_order)
    return v


def as_function(f):
    if isinstance(f, (list, tuple)):
        return MixedProduct(tuple(f))
    if isinstance(f, BlaschkeSpec):
        if f.kind == "punctual":
            return f.to_pql()
        if f.kind == "spherical":
            return f.to_factored()
        raise PreconditionFailed("the semiregular Blaschke factor has no Jensen ledger")
    if not isinstance(f, (FactoredSlicePreserving, PQLFunction, MixedProduct)):
        raise TypeError(f"unsupported function type {type(f).__name__}")
    return f


def _order(f) -> int:
    return f.origin_order if isinstance(f, MixedProduct) else origin_order(f)


def _clearance(ledger: ZeroPoleLedger, rho: float) -> dict:
    gaps = [abs(e.modulus - rho) for e in ledger.entries]
    gap = min(gaps, default=math.inf)
    return {"min_boundary_gap": gap, "relative_gap": gap / rho, "entries": len(gaps)}


def _corrections(ledger: ZeroPoleLedger, rho: float, delta: float = BOUNDARY_DELTA) -> list:
    out = []
    for e in ledger.entries:
        if e.modulus < rho - delta:
            out.append(Correction(e, BRANCHES[e.kind.split("_")[0]], entry_correction(e, rho)))
    return out


def _laplacian_term(f1, rho: float, fd_check: bool, fd: FDConfig, meta: dict) -> float:
    lap = float(f1.laplacian_log_abs(Quaternion()))
    meta["laplacian_at_0"] = lap
    meta["laplacian_source"] = "closed_form"
    if fd_check:
        meta["laplacian_at_0_fd"] = laplacian_fd(f1.log_abs, Quaternion(), fd)
    return rho * rho / 8.0 * lap


def _validate_rho(rho) -> float:
    rho = float(rho)
    if not (rho > 0 and math.isfinite(rho)):
        raise ValueError("rho must be positive and finite")
    return rho


def _base_meta(f, rho, grid: S3Grid, fd: FDConfig, ledger: ZeroPoleLedger) -> dict:
    return {
        "function": type(f).__name__,
        "grid": grid.to_dict() | {"rho": rho},
        "fd": {"h": fd.h, "richardson_levels": fd.richardson_levels},
        "clearance": _clearance(ledger, rho),
    }


def _interior_report(f, rho, grid, fd, fd_check, branch) -> JensenReport:
    ledger = f.ledger()
    contact = ledger.boundary_contact(rho, BOUNDARY_DELTA)
    if contact:
        raise BoundaryContact(contact, rho)
    k = _order(f)
    if k:
        raise OriginSingular(k)
    meta = _base_meta(f, rho, grid, fd, ledger) | {"case": branch}
    lhs = _log_abs_at_zero(f)
    lap = _laplacian_term(f, rho, fd_check, fd, meta)
    mean = mean_on_s3(f.log_abs, rho, grid, singularities=ledger)
    return JensenReport(lhs, mean, lap, _corrections(ledger, rho), rho, meta)


# ---------------------------------------------------------------------------
# engines

def jensen_terms_slice_preserving(f: FactoredSlicePreserving, rho: float, grid: S3Grid | None = None,
                                  fd: FDConfig = DEFAULT_FD, fd_check: bool = False) -> JensenReport:
    """Jensen terms for a factored slice-preserving function.

    Ledger entries outside B_rho behave like a zero-free tail: they enter the
    mean and the Laplacian but give no correction.
    """
    if not isinstance(f, FactoredSlicePreserving):
        raise TypeError("expected a FactoredSlicePreserving function")
    rho = _validate_rho(rho)
    return _interior_report(f, rho, grid or S3Grid(rho=rho), fd, fd_check, "slice_preserving")


def jensen_terms_pql(f: PQLFunction, rho: float, grid: S3Grid | None = None,
                     fd: FDConfig = DEFAULT_FD, fd_check: bool = False) -> JensenReport:
    """Jensen terms for a PQL function; factors with |q_k| > rho give no correction."""
    if not isinstance(f, PQLFunction):
        raise TypeError("expected a PQLFunction")
    rho = _validate_rho(rho)
    return _interior_report(f, rho, grid or S3Grid(rho=rho), fd, fd_check, "pql")


def jensen_mixed(parts, rho: float, grid: S3Grid | None = None, fd: FDConfig = DEFAULT_FD,
                 fd_check: bool = False) -> JensenReport:
    """Jensen terms for an ordered product of PQL and slice-preserving parts."""
    h = parts if isinstance(parts, MixedProduct) else MixedProduct(tuple(parts))
    rho = _validate_rho(rho)
    return _interior_report(h, rho, grid or S3Grid(rho=rho), fd, fd_check, "mixed")


def origin_case(f, k: int | None = None, rho: float = 1.0, grid: S3Grid | None = None,
                fd: FDConfig = DEFAULT_FD, fd_check: bool = False) -> JensenReport:
    """f = x^k f_1 with f_1(0) finite and nonzero.

    The left side becomes k log(rho) + log|f_1(0)|; the Laplacian term and the
    corrections come from f_1, the mean from f itself.
    """
    f = as_function(f)
    rho = _validate_rho(rho)
    actual = _order(f)
    if k is not None and int(k) != actual:
        raise PreconditionFailed(f"declared origin order {k} but the ledger says {actual}")
    grid = grid or S3Grid(rho=rho)
    f1 = f.without_origin() if isinstance(f, MixedProduct) else strip_origin(f)
    ledger = f1.ledger()
    contact = ledger.boundary_contact(rho, BOUNDARY_DELTA)
    if contact:
        raise BoundaryContact(contact, rho)
    meta = _base_meta(f, rho, grid, fd, ledger) | {"case": "origin", "origin_order": actual}
    lhs = actual * math.log(rho) + _log_abs_at_zero(f1)
    lap = _laplacian_term(f1, rho, fd_check, fd, meta)
    mean = mean_on_s3(f.log_abs, rho, grid, singularities=f.ledger())
    return JensenReport(lhs, mean, lap, _corrections(ledger, rho), rho, meta)


def _entry_log_abs(e: LedgerEntry):
    m = e.sign * e.multiplicity
    p = e.point.to_array()
    if e.kind.startswith("sphere"):
        t, n2 = e.point.trace(), e.point.norm2()

        def g(xs):
            xs = np.asarray(xs, dtype=float)
            a = xs[..., 0]
            b2 = np.einsum("...i,...i->...", xs[..., 1:], xs[..., 1:])
            w = (a * a - b2 - t * a + n2) + 1j * np.sqrt(b2) * (2 * a - t)
            return m * np.log(np.abs(w))
        return g

    def g(xs):
        return m * np.log(qabs(np.asarray(xs, dtype=float) - p))
    return g


def _graded_breaks(psi0: float, eps: float, levels: int = 14) -> tuple:
    out = [psi0]
    for k in range(levels):
        d = 0.25 * eps * 2.0 ** k
        out += [psi0 - d, psi0 + d]
    return tuple(b for b in out if 0.0 < b < math.pi)


def _boundary_entry_mean(e: LedgerEntry, r: float, eps: float, n_psi: int) -> float:
    """Mean of one boundary factor over the sphere of radius r, on a grid graded
    towards the (near-)singularity.  The factor depends on psi only once the
    grid axis points at it, so two polar and four azimuthal nodes suffice."""
    rotation = None
    if e.kind.startswith("sphere"):
        psi0 = math.atan2(e.beta, e.alpha)
    elif e.point.is_real():
        psi0 = 0.0 if e.alpha > 0 else math.pi
    else:
        rotation = (e.point * (1.0 / e.modulus), Quaternion(1.0))
        psi0 = 0.0
    grid = S3Grid(n_psi, 2, 4, r, rotation, _graded_breaks(psi0, eps))
    return mean_on_s3(_entry_log_abs(e), r, grid)


def boundary_case(f, rho: float, eps=BOUNDARY_EPS, tolerance: float = 1e-4,
                  grid: S3Grid | None = None, fd: FDConfig = DEFAULT_FD,
                  fd_check: bool = False) -> JensenReport:
    """Jensen terms when some zeros or poles lie on the sphere |x| = rho.

    Only strictly interior entries give corrections.  The mean is taken at the
    radii rho (1 + eps_n) and extrapolated linearly in eps to eps = 0; factors
    on the boundary are integrated separately on graded grids.
    """
    f = as_function(f)
    rho = _validate_rho(rho)
    grid = grid or S3Grid(rho=rho)
    eps = tuple(float(e) for e in eps)
    if len(eps) < 2 or any(b >= a for a, b in zip(eps[:-1], eps[1:])) or eps[-1] <= 0:
        raise ValueError("eps must be a decreasing sequence of positive numbers")
    ratios = {round(a / b, 12) for a, b in zip(eps[:-1], eps[1:])}
    if len(ratios) != 1:
        raise ValueError("eps must be geometric")
    ratio = ratios.pop()
    k = _order(f)
    f1 = f.without_origin() if isinstance(f, MixedProduct) else (strip_origin(f) if k else f)
    ledger = f1.ledger()
    on_boundary = ledger.boundary_contact(rho, BOUNDARY_DELTA)
    meta = _base_meta(f, rho, grid, fd, ledger) | {
        "case": "boundary",
        "boundary_entries": [e.to_dict() for e in on_boundary],
        "eps": list(eps),
    }
    lhs = k * math.log(rho) + _log_abs_at_zero(f1)
    lap = _laplacian_term(f1, rho, fd_check, fd, meta)

    singular = [_entry_log_abs(e) for e in on_boundary]

    def remainder(xs):
        acc = f.log_abs(xs)
        for g in singular:
            acc = acc - g(xs)
        return acc

    means = []
    for e_n in eps:
        r = rho * (1.0 + e_n)
        m = mean_on_s3(remainder, r, grid.with_radius(r))
        m += math.fsum(_boundary_entry_mean(e, r, e_n, grid.n_psi) for e in on_boundary)
        means.append(m)
    diag = richardson_linear(means, ratio)
    meta["means_at_eps"] = means
    meta["extrapolants"] = diag
    if abs(diag[-1] - diag[-2]) > 10.0 * tolerance:
        raise ExtrapolationUnstable(f"successive extrapolants {diag[-2]!r} and {diag[-1]!r} disagree")
    return JensenReport(lhs, diag[-1], lap, _corrections(ledger, rho), rho, meta)


def jensen_report(f, rho: float, grid: S3Grid | None = None, fd: FDConfig = DEFAULT_FD,
                  fd_check: bool = False, tolerance: float = 1e-4) -> JensenReport:
    """Route to the plain, origin or boundary engine as the ledger requires."""
    f = as_function(f)
    rho = _validate_rho(rho)
    ledger = f.ledger()
    if ledger.boundary_contact(rho, BOUNDARY_DELTA):
        return boundary_case(f, rho, grid=grid, fd=fd, fd_check=fd_check, tolerance=tolerance)
    if _order(f):
        return origin_case(f, None, rho, grid, fd, fd_check)
    return _interior_report(f, rho, grid or S3Grid(rho=rho), fd, fd_check, type(f).__name__)


def cone_case_report(f: FactoredSlicePreserving, rho: float, grid: S3Grid | None = None,
                     fd: FDConfig = DEFAULT_FD) -> JensenReport:
    """Jensen report for f whose zeros and poles all lie on the cone beta = |alpha|.

    There the bracket 2|a|^2 - (a + a^c)^2 vanishes and each spherical
    correction reduces to its logarithm.
    """
    if not isinstance(f, FactoredSlicePreserving):
        raise TypeError("expected a FactoredSlicePreserving function")
    ledger = f.ledger()
    scale = max(1.0, rho)
    for e in ledger.entries:
        if not e.kind.startswith("sphere"):
            raise PreconditionFailed(f"real entry {e.point} is not on the cone boundary")
        if abs(e.beta - abs(e.alpha)) > CONE_ATOL * scale:
            raise PreconditionFailed(f"sphere through {e.point} is off the cone boundary by "
                                     f"{abs(e.beta - abs(e.alpha)):.3e}")
    report = jensen_terms_slice_preserving(f, rho, grid, fd)
    report.metadata["case"] = "cone"
    report.metadata["brackets"] = [cone_bracket(e.point) for e in ledger.entries]
    return report


def mean_value_residual(u, rho: float, grid: S3Grid | None = None, fd: FDConfig = DEFAULT_FD) -> float:
    """u(0) - (mean of u on |x| = rho - (rho^2/8) Du(0)); zero for biharmonic u.

    ``u`` maps an (n, 4) array to n values.  The Laplacian is taken by finite
    differences.
    """
    rho = _validate_rho(rho)
    u0 = float(np.asarray(u(_ORIGIN), dtype=float)[0])
    mean = mean_on_s3(u, rho, grid)
    return u0 - (mean - rho * rho / 8.0 * laplacian_fd(u, Quaternion(), fd))


# ---------------------------------------------------------------------------
# corollaries

def _in_cone(e: LedgerEntry) -> bool:
    return e.beta > 0 and e.beta >= abs(e.alpha)


class ZeroCountBound(NamedTuple):
    bound: float
    n_actual: int
    max_modulus: float
    holds: bool
    metadata: dict


def _max_modulus(f: FactoredSlicePreserving, R: float, n_psi: int = 2048) -> float:
    # |f| is a function of (Re y, |Im y|), hence of psi alone on the sphere
    psi = np.linspace(0.0, math.pi, n_psi + 1)
    z = R * (np.cos(psi) + 1j * np.sin(psi))
    return float(np.max(np.abs(f.complex_eval(z))))


def zero_count_bound(f: FactoredSlicePreserving, r: float, R: float, tolerance: float = 1e-9,
                     n_psi: int = 2048) -> ZeroCountBound:
    """Upper bound for the number of zeros of modulus < r.

        N(r) <= (1/2) (log M(R) - log|f(0)| - (R^2/8) Dlog|f|(0)) / (log R - log r)

    N counts spherical zeros by factor multiplicity.  M(R) is the maximum of
    |f| on |x| = R, sampled densely along psi.
    """
    if not isinstance(f, FactoredSlicePreserving):
        raise TypeError("expected a FactoredSlicePreserving function")
    if not 0 < r < R:
        raise ValueError("need 0 < r < R")
    if f.monomial_power != 0:
        raise PreconditionFailed("f(0) must be finite and nonzero")
    if not f.is_regular():
        raise PreconditionFailed("the counting bound is for functions without poles")
    ledger = f.ledger()
    outside = [e for e in ledger.entries if not _in_cone(e)]
    if outside:
        raise PreconditionFailed(f"zeros outside the cone: {[e.point for e in outside]}")
    M = _max_modulus(f, R, n_psi)
    lhs0 = _log_abs_at_zero(f)
    lap = float(f.laplacian_log_abs(Quaternion()))
    bound = 0.5 * (math.log(M) - lhs0 - R * R / 8.0 * lap) / (math.log(R) - math.log(r))
    n = ledger.zero_count(r)
    meta = {"log_M": math.log(M), "log_abs_f0": lhs0, "laplacian_at_0": lap, "note": NCOUNT_HALF_NOTE,
            "multiplicity": "factor"}
    return ZeroCountBound(bound, n, M, n <= bound + tolerance, meta)


class ZeroFreeRadius(NamedTuple):
    radius: float
    guard: float
    vacuous: bool
    consistent: bool


def zero_free_radius(f: FactoredSlicePreserving, strict: bool = False,
                     check_maps_into_ball: bool = True) -> ZeroFreeRadius:
    """Radius sqrt|f^s(0)| exp(Dlog|f^s|(0) / 16) of a zero-free ball.

    For slice-preserving f, f^s = f^2.  The guard |f^s(0)| exp(Dlog|f^s|(0) / 8)
    must not exceed 1; otherwise every r < 1 works and the radius is 1
    (``strict=True`` raises GuardFailed instead).
    """
    if not isinstance(f, FactoredSlicePreserving):
        raise TypeError("expected a FactoredSlicePreserving function")
    if f.monomial_power != 0 or not f.is_regular():
        raise PreconditionFailed("f must be regular with f(0) != 0")
    ledger = f.ledger()
    if any(not _in_cone(e) for e in ledger.entries if e.modulus < 1.0):
        raise PreconditionFailed("zeros in the unit ball must lie in the cone")
    if check_maps_into_ball and _max_modulus(f, 1.0) >= 1.0:
        raise PreconditionFailed("f must map the unit ball into itself")
    log_fs0 = 2.0 * _log_abs_at_zero(f)
    lap_fs = 2.0 * float(f.laplacian_log_abs(Quaternion()))
    guard = math.exp(log_fs0 + lap_fs / 8.0)
    if guard > 1.0:
        if strict:
            raise GuardFailed(f"guard quantity {guard} exceeds 1")
        return ZeroFreeRadius(1.0, guard, True, True)
    radius = math.exp(0.5 * log_fs0 + lap_fs / 16.0)
    consistent = all(e.modulus >= radius for e in ledger.entries if e.is_zero)
    return ZeroFreeRadius(radius, guard, False, consistent)


def blaschke_sphere_mean(B: BlaschkeSpec, r: float) -> float:
    """Closed-form mean of log|B| over |x| = r for r > max(|a|, rho^2/|a|)."""
    a, rho = B.a, B.rho
    n = abs(a)
    if not r > max(n, rho * rho / n):
        raise PreconditionFailed(f"need r > max(|a|, rho^2/|a|) = {max(n, rho * rho / n)}")
    if B.kind == "punctual":
        return math.log(n / rho) + 0.25 * (rho ** 4 - n ** 4) / (n * n * r * r)
    if B.kind == "spherical":
        return 2.0 * math.log(n / rho) - 0.25 * (rho ** 4 - n ** 4) / (n ** 4 * r * r) * cone_bracket(a)
    raise PreconditionFailed("no closed form for the semiregular factor")


def blaschke_sphere_mean_limit(B: BlaschkeSpec) -> float:
    n = abs(B.a)
    return (1.0 if B.kind == "punctual" else 2.0) * math.log(n / B.rho)


def pql_sphere_mean(f: PQLFunction, rho: float) -> float:
    """Closed-form mean of log|f| over |x| = rho when every q_k lies in B_rho minus 0."""
    if not isinstance(f, PQLFunction):
        raise TypeError("expected a PQLFunction")
    rho = _validate_rho(rho)
    for qk in f.q:
        if qk.norm2() == 0.0 or not abs(qk) < rho:
            raise PreconditionFailed(f"need 0 < |q_k| < rho, got |q_k| = {abs(qk)}")
    lap = sum(m * 2.0 / qk.norm2() for qk, m in zip(f.q, f.M))
    consts = math.fsum(math.log(abs(ak)) for ak in f.a)
    terms = math.fsum(m * (math.log(rho) + 0.25 * (abs(qk) ** 4 - rho ** 4) / (rho * rho * qk.norm2()))
                      for qk, m in zip(f.q, f.M))
    return rho * rho / 8.0 * lap + consts + terms


def quadrature_sphere_mean(f, r: float, grid: S3Grid | None = None) -> float:
    f = as_function(f) if not isinstance(f, BlaschkeSpec) else f
    ledger = None if isinstance(f, BlaschkeSpec) else f.ledger()
    return mean_on_s3(f.log_abs, r, grid, singularities=ledger)

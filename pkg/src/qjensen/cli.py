"""Command-line front end.

    qjensen COMMAND SPEC.json [flags]

Commands: eval, jensen, riesz, blaschke-verify, bounds, sphere-mean.  Exit
status is 0 when the checked quantity is within --tolerance, 2 when it is not,
and 1 for bad input or a failed precondition.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import specfile
from .blaschke import (
    BlaschkeSpec,
    blaschke_ledger,
    boundary_modulus_error,
    laplacian_log_blaschke_at_zero,
)
from .diffops import FDConfig, laplacian_fd
from .errors import POLE, QJensenError, SpecError
from .jensen import (
    as_function,
    blaschke_sphere_mean,
    jensen_report,
    pql_sphere_mean,
    quadrature_sphere_mean,
    zero_count_bound,
    zero_free_radius,
)
from .pql import PQLFunction
from .quadrature import DEFAULT_GRID, BumpFunction, S3Grid
from .quaternion import Quaternion, random_unit_quaternions
from .riesz import GAMMA, METHODS, mollified_delta_check, riesz_residual
from .slicefn import FactoredSlicePreserving

COMMANDS = ("eval", "jensen", "riesz", "blaschke-verify", "bounds", "sphere-mean")
DEFAULT_TOLERANCE = {
    "eval": None,
    "jensen": 1e-4,
    "riesz": 1e-3,
    "blaschke-verify": 1e-10,
    "bounds": 1e-9,
    "sphere-mean": 1e-4,
}
LAPLACIAN_RTOL = 1e-6
BOUNDARY_POINTS = 200


class InputError(Exception):
    pass


def _floats(text: str, n: int | None = None, name: str = "value") -> list:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"{name}: expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise InputError(f"{name}: expected {n} numbers, got {len(vals)}")
    if not all(math.isfinite(v) for v in vals):
        raise InputError(f"{name}: numbers must be finite")
    return vals


def _grid(args, rho: float) -> S3Grid:
    try:
        n = [int(t) for t in args.grid.split(",")]
    except ValueError:
        raise InputError(f"--grid: expected three integers, got {args.grid!r}") from None
    if len(n) != 3 or min(n) < 1:
        raise InputError("--grid: expected three positive integers n_psi,n_theta,n_phi")
    return S3Grid(*n, rho=rho)


def _fd(args) -> FDConfig:
    try:
        return FDConfig(h=args.fd_h, richardson_levels=args.richardson)
    except ValueError as exc:
        raise InputError(f"--fd-h/--richardson: {exc}") from None


def _need(args, name: str):
    v = getattr(args, name)
    if v is None:
        raise InputError(f"--{name.replace('_', '-')} is required for {args.command}")
    return v


def _qvalue(v):
    return None if v is POLE else v.to_list()


# ---------------------------------------------------------------------------
# commands; each returns (report dict, checked value or None)

def cmd_eval(f, args):
    pts = [Quaternion(*_floats(a, 4, "--at")) for a in (args.at or ["0,0,0,0"])]
    out = []
    for x in pts:
        row = {"x": x.to_list()}
        try:
            v = f(x)
            row["value"] = _qvalue(v)
            row["abs"] = math.inf if v is POLE else abs(v)
        except QJensenError as exc:
            row["error"] = {"type": type(exc).__name__, "message": str(exc)}
        out.append(row)
    led = blaschke_ledger(f) if isinstance(f, BlaschkeSpec) else f.ledger()
    return {"points": out, "ledger": led.to_dict()}, None


def cmd_jensen(f, args):
    rho = _need(args, "rho")
    rep = jensen_report(f, rho, grid=_grid(args, rho), fd=_fd(args), fd_check=args.fd_check,
                        tolerance=args.tolerance)
    return rep.to_dict(), abs(rep.residual)


def cmd_riesz(f, args):
    center = Quaternion(*_floats(_need(args, "center"), 4, "--center"))
    phi = BumpFunction(center, _need(args, "radius"))
    rep = riesz_residual(f, phi, gamma=args.gamma, method=args.method, seed=args.seed)
    out = rep.to_dict()
    if args.eps_list:
        eps = _floats(args.eps_list, None, "--eps-list")
        out["mollifier"] = {
            "unit": mollified_delta_check(eps, None, args.gamma).to_dict(),
            "bump": mollified_delta_check(eps, BumpFunction(Quaternion(), phi.radius), args.gamma).to_dict(),
        }
    return out, rep.residual


def cmd_blaschke_verify(f, args):
    if not isinstance(f, BlaschkeSpec):
        raise InputError("blaschke-verify needs a blaschke_punctual or blaschke_spherical spec")
    rng = np.random.default_rng(args.seed)
    xs = random_unit_quaternions(rng, BOUNDARY_POINTS) * f.rho
    mod_err = boundary_modulus_error(f, xs)
    closed = laplacian_log_blaschke_at_zero(f)
    fd = laplacian_fd(f.log_abs, Quaternion(), _fd(args))
    rel = abs(fd - closed) / max(abs(closed), 1e-300)
    out = {
        "boundary_points": BOUNDARY_POINTS,
        "boundary_modulus_error": mod_err,
        "laplacian_closed_form": closed,
        "laplacian_fd": fd,
        "laplacian_relative_error": rel,
        "laplacian_rtol": LAPLACIAN_RTOL,
        "ledger": blaschke_ledger(f).to_dict(),
    }
    # a Laplacian breach counts as a tolerance breach as well
    return out, mod_err if rel <= LAPLACIAN_RTOL else math.inf


def cmd_bounds(f, args):
    r, R = _need(args, "r"), _need(args, "R")
    g = as_function(f)
    if not isinstance(g, FactoredSlicePreserving):
        raise InputError("bounds needs a slice-preserving function")
    b = zero_count_bound(g, r, R, tolerance=args.tolerance)
    out = {"zero_count": {"r": r, "R": R, "bound": b.bound, "n_actual": b.n_actual,
                          "max_modulus": b.max_modulus, "holds": b.holds, "metadata": b.metadata}}
    try:
        z = zero_free_radius(g)
        out["zero_free_radius"] = z._asdict()
    except QJensenError as exc:
        out["zero_free_radius"] = {"skipped": type(exc).__name__, "message": str(exc)}
    excess = max(0.0, b.n_actual - b.bound)
    return out, excess


def cmd_sphere_mean(f, args):
    r = _need(args, "r")
    if isinstance(f, BlaschkeSpec):
        closed = blaschke_sphere_mean(f, r)
    elif isinstance(f, PQLFunction):
        closed = pql_sphere_mean(f, r)
    else:
        raise InputError("sphere-mean needs a Blaschke or PQL spec")
    quad = quadrature_sphere_mean(f, r, _grid(args, r))
    return {"r": r, "closed_form": closed, "quadrature": quad, "difference": abs(closed - quad)}, abs(closed - quad)


HANDLERS = {
    "eval": cmd_eval,
    "jensen": cmd_jensen,
    "riesz": cmd_riesz,
    "blaschke-verify": cmd_blaschke_verify,
    "bounds": cmd_bounds,
    "sphere-mean": cmd_sphere_mean,
}


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qjensen", description="Jensen formulas and Riesz measures for "
                                "quaternionic slice functions.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("spec", help="JSON function description ('-' reads stdin)")
    p.add_argument("--rho", type=float, help="radius of the Jensen ball")
    p.add_argument("--r", type=float, help="inner radius (bounds) or sphere radius (sphere-mean)")
    p.add_argument("--R", type=float, help="outer radius for the zero-count bound")
    p.add_argument("--grid", default=",".join(map(str, DEFAULT_GRID)), help="n_psi,n_theta,n_phi")
    p.add_argument("--fd-h", type=float, default=None, help="finite-difference step")
    p.add_argument("--richardson", type=int, default=2, help="Richardson levels")
    p.add_argument("--eps-list", help="decreasing mollifier widths for riesz, comma-separated")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--at", action="append", help="evaluation point x0,x1,x2,x3 (repeatable)")
    p.add_argument("--center", help="bump centre x0,x1,x2,x3 for riesz")
    p.add_argument("--radius", type=float, help="bump radius for riesz")
    p.add_argument("--method", choices=METHODS, default="auto", help="pairing quadrature route")
    p.add_argument("--gamma", type=float, default=GAMMA, help="normalizing constant of the measure")
    p.add_argument("--fd-check", action="store_true", help="also compute the Laplacian term by FD")
    return p


def _flags(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "spec")}


def _text(doc, indent: int = 0) -> list:
    pad = "  " * indent
    lines = []
    for k, v in doc.items():
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.extend(_text(v, indent + 1))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{pad}{k}:")
            for i, item in enumerate(v):
                lines.append(f"{pad}  [{i}]")
                lines.extend(_text(item, indent + 2))
        else:
            lines.append(f"{pad}{k:<24} {json.dumps(v)}" if indent == 0 else f"{pad}{k}: {json.dumps(v)}")
    return lines


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, allow_nan=True)
    return "\n".join(_text(doc))


def _read_spec(path: str):
    if path == "-":
        return specfile.loads(sys.stdin.read())
    return specfile.load(path)


def run(argv=None) -> tuple:
    """Parse, dispatch and render; returns (exit code, stdout text, stderr text)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (1 if exc.code else 0), "", ""
    if args.tolerance is None:
        args.tolerance = DEFAULT_TOLERANCE[args.command]
    try:
        f = _read_spec(args.spec)
        report, checked = HANDLERS[args.command](f, args)
    except (SpecError, InputError, QJensenError, ValueError, TypeError) as exc:
        diag = {"command": args.command, "error": {"type": type(exc).__name__, "message": str(exc),
                                                  "path": getattr(exc, "path", "")}}
        return 1, "", render(diag, args.format)
    if checked is None or args.tolerance is None:
        status, code = "ok", 0
    else:
        status, code = ("pass", 0) if checked <= args.tolerance else ("breach", 2)
    doc = {
        "command": args.command,
        "status": status,
        "tolerance": args.tolerance,
        "checked_value": checked,
        "spec": specfile.to_dict(f),
        "flags": _flags(args),
        "report": report,
    }
    return code, render(doc, args.format), ""


def main(argv=None) -> int:
    code, out, err = run(argv)
    if out:
        print(out)
    if err:
        print(err, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

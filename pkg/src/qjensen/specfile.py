"""JSON function descriptions for the command line.

One document declares one function::

    {"kind": "slice_preserving_factored", "monomial_power": 0,
     "real_factors": [[0.5, 1]], "sphere_factors": [[[0, 1, 0, 0], 1]],
     "tail": [2.0, 0.3]}
    {"kind": "pql", "a": [[1, 0, 0, 0], [1, 0, 0, 0]], "q": [[0, 0, 0.5, 0]], "M": [1]}
    {"kind": "blaschke_punctual", "a": [0, 0.3, 0, 0], "rho": 1.0}
    {"kind": "blaschke_spherical", "a": [0.1, 0.3, 0, 0], "rho": 1.0}
    {"kind": "mixed", "parts": [<pql or slice_preserving_factored>, ...]}

Quaternions are lists [x0, x1, x2, x3].  Unknown fields are errors, and every
constructor check runs again on load.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .blaschke import BlaschkeSpec
from .errors import SpecError
from .mixed import MixedProduct, part_to_dict
from .pql import PQLFunction
from .quaternion import Quaternion
from .slicefn import FactoredSlicePreserving, RealCoeffSeries

KINDS = ("slice_preserving_factored", "pql", "blaschke_punctual", "blaschke_spherical", "mixed")

_FIELDS = {
    "slice_preserving_factored": ({"kind"}, {"monomial_power", "real_factors", "sphere_factors", "tail"}),
    "pql": ({"kind", "a"}, {"q", "M"}),
    "blaschke_punctual": ({"kind", "a", "rho"}, set()),
    "blaschke_spherical": ({"kind", "a", "rho"}, set()),
    "mixed": ({"kind", "parts"}, set()),
}
_PART_KINDS = ("slice_preserving_factored", "pql")


def _join(path: str, key) -> str:
    if isinstance(key, int):
        return f"{path}[{key}]"
    return f"{path}.{key}" if path else key


def _real(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SpecError(f"expected a number, got {json.dumps(v)}", path)
    v = float(v)
    if not math.isfinite(v):
        raise SpecError("number must be finite", path)
    return v


def _int(v, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise SpecError(f"expected an integer, got {json.dumps(v)}", path)
    return v


def _list(v, path: str, length: int | None = None) -> list:
    if not isinstance(v, list):
        raise SpecError(f"expected a list, got {json.dumps(v)}", path)
    if length is not None and len(v) != length:
        raise SpecError(f"expected {length} entries, got {len(v)}", path)
    return v


def _quat(v, path: str) -> Quaternion:
    v = _list(v, path, 4)
    return Quaternion(*(_real(c, _join(path, i)) for i, c in enumerate(v)))


def _pairs(v, path: str, point) -> tuple:
    out = []
    for i, item in enumerate(_list(v, path)):
        p = _join(path, i)
        item = _list(item, p, 2)
        m = _int(item[1], _join(p, 1))
        if m == 0:
            raise SpecError("multiplicity must be nonzero", _join(p, 1))
        out.append((point(item[0], _join(p, 0)), m))
    return tuple(out)


def _check_fields(d, path: str) -> str:
    if not isinstance(d, dict):
        raise SpecError("expected an object", path)
    kind = d.get("kind")
    if kind not in KINDS:
        raise SpecError(f"kind must be one of {list(KINDS)}, got {json.dumps(kind)}", _join(path, "kind"))
    required, optional = _FIELDS[kind]
    missing = sorted(required - d.keys())
    if missing:
        raise SpecError(f"missing field(s) {missing}", path)
    unknown = sorted(d.keys() - required - optional)
    if unknown:
        raise SpecError(f"unknown field(s) {unknown} for kind {kind}", path)
    return kind


def _build(d, path: str):
    kind = _check_fields(d, path)
    if kind == "slice_preserving_factored":
        tail = None
        if "tail" in d:
            coeffs = _list(d["tail"], _join(path, "tail"))
            if not coeffs:
                raise SpecError("tail needs at least one coefficient", _join(path, "tail"))
            tail = RealCoeffSeries(tuple(_real(c, _join(_join(path, "tail"), i)) for i, c in enumerate(coeffs)))
        return FactoredSlicePreserving(
            monomial_power=_int(d.get("monomial_power", 0), _join(path, "monomial_power")),
            real_factors=_pairs(d.get("real_factors", []), _join(path, "real_factors"), _real),
            sphere_factors=_pairs(d.get("sphere_factors", []), _join(path, "sphere_factors"), _quat),
            tail=tail,
        )
    if kind == "pql":
        a = tuple(_quat(v, _join(_join(path, "a"), i)) for i, v in enumerate(_list(d["a"], _join(path, "a"))))
        q = tuple(_quat(v, _join(_join(path, "q"), i)) for i, v in enumerate(_list(d.get("q", []), _join(path, "q"))))
        M = tuple(_int(v, _join(_join(path, "M"), i)) for i, v in enumerate(_list(d.get("M", []), _join(path, "M"))))
        return PQLFunction(a, q, M)
    if kind in ("blaschke_punctual", "blaschke_spherical"):
        return BlaschkeSpec(_quat(d["a"], _join(path, "a")), _real(d["rho"], _join(path, "rho")),
                            kind.split("_", 1)[1])
    parts = _list(d["parts"], _join(path, "parts"))
    if not parts:
        raise SpecError("a mixed product needs at least one part", _join(path, "parts"))
    built = []
    for i, p in enumerate(parts):
        pp = _join(_join(path, "parts"), i)
        if isinstance(p, dict) and p.get("kind") not in _PART_KINDS:
            raise SpecError(f"mixed parts must have kind in {list(_PART_KINDS)}", _join(pp, "kind"))
        built.append(_build(p, pp))
    return MixedProduct(tuple(built))


def from_dict(d: dict):
    """Validate a parsed document and build the function it describes."""
    try:
        return _build(d, "")
    except SpecError:
        raise
    except (ValueError, TypeError) as exc:
        # constructor invariants (|a| < rho, +-1 exponents, ...)
        raise SpecError(str(exc)) from exc


def loads(text: str):
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from exc
    return from_dict(d)


def load(path) -> object:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read spec file: {exc.strerror}", str(path)) from exc
    return loads(text)


def to_dict(f) -> dict:
    """Canonical document for f; ``from_dict(to_dict(f)) == f``."""
    if isinstance(f, BlaschkeSpec):
        if f.kind == "semiregular":
            raise SpecError("the semiregular Blaschke factor has no spec-file kind")
        return {"kind": f"blaschke_{f.kind}", **{k: v for k, v in f.to_dict().items() if k != "kind"}}
    if isinstance(f, MixedProduct):
        return {"kind": "mixed", "parts": [part_to_dict(p) for p in f.parts]}
    if isinstance(f, (FactoredSlicePreserving, PQLFunction)):
        return part_to_dict(f)
    raise TypeError(f"unsupported function type {type(f).__name__}")

import json

import pytest
from hypothesis import given, strategies as st

from qjensen import specfile
from qjensen.blaschke import BlaschkeSpec
from qjensen.errors import SpecError
from qjensen.mixed import MixedProduct
from qjensen.pql import PQLFunction
from qjensen.quaternion import Quaternion
from qjensen.slicefn import FactoredSlicePreserving

DOCS = [
    {"kind": "slice_preserving_factored", "monomial_power": 1, "real_factors": [[0.5, 2]],
     "sphere_factors": [[[0.1, 0.3, 0, 0], -1]], "tail": [2.0, 0.3]},
    {"kind": "pql", "a": [[1, 0, 0, 0], [0, 1, 0, 0]], "q": [[0, 0, 0.5, 0]], "M": [1]},
    {"kind": "blaschke_punctual", "a": [0, 0.3, 0, 0], "rho": 1.0},
    {"kind": "blaschke_spherical", "a": [0.1, 0.3, 0, 0], "rho": 2.0},
    {"kind": "mixed", "parts": [{"kind": "pql", "a": [[1, 0, 0, 0], [1, 0, 0, 0]], "q": [[0, 0.2, 0, 0]], "M": [-1]},
                                {"kind": "slice_preserving_factored", "real_factors": [[0.4, 1]]}]},
]
TYPES = [FactoredSlicePreserving, PQLFunction, BlaschkeSpec, BlaschkeSpec, MixedProduct]


@pytest.mark.parametrize("doc, cls", list(zip(DOCS, TYPES)))
def test_round_trip(doc, cls):
    f = specfile.from_dict(doc)
    assert isinstance(f, cls)
    d = specfile.to_dict(f)
    assert specfile.to_dict(specfile.loads(json.dumps(d))) == d
    x = Quaternion(0.3, -0.2, 0.7, 0.1)
    assert abs(specfile.from_dict(d)(x) - f(x)) == 0.0


@given(st.lists(st.tuples(st.floats(-2, 2).filter(lambda a: abs(a) > 1e-6), st.integers(-3, 3).filter(bool)),
                max_size=4, unique_by=lambda t: t[0]))
def test_real_factor_round_trip(pairs):
    doc = {"kind": "slice_preserving_factored", "real_factors": [[a, m] for a, m in pairs]}
    assert specfile.to_dict(specfile.from_dict(doc)) == specfile.to_dict(specfile.from_dict(
        specfile.to_dict(specfile.from_dict(doc))))


@pytest.mark.parametrize("doc, path", [
    ({"kind": "pql", "a": [[1, 0, 0, 0]], "extra": 1}, ""),
    ({"kind": "nope"}, "kind"),
    ({"kind": "pql", "a": [[1, 0, 0]]}, "a[0]"),
    ({"kind": "pql", "a": [[1, 0, 0, "x"]]}, "a[0][3]"),
    ({"kind": "slice_preserving_factored", "real_factors": [[0.5, 0]]}, "real_factors[0][1]"),
    ({"kind": "slice_preserving_factored", "real_factors": [[0.5, True]]}, "real_factors[0][1]"),
    ({"kind": "slice_preserving_factored", "tail": []}, "tail"),
    ({"kind": "mixed", "parts": []}, "parts"),
    ({"kind": "mixed", "parts": [{"kind": "blaschke_punctual", "a": [0, 0, 0, 0], "rho": 1}]}, "parts[0].kind"),
    ({"kind": "mixed", "parts": [{"kind": "pql", "a": [[1, 0, 0, 0], [1, 0, 0, 0]], "q": [[0, 0, 0, 0]],
                                  "M": [2]}]}, None),
    ({"kind": "blaschke_punctual", "a": [0, 1.5, 0, 0], "rho": 1.0}, None),
    ({"kind": "blaschke_punctual", "a": [0, 0.5, 0, 0]}, ""),
])
def test_rejections(doc, path):
    with pytest.raises(SpecError) as ei:
        specfile.from_dict(doc)
    if path is not None:
        assert ei.value.path == path


def test_json_errors_have_location():
    with pytest.raises(SpecError) as ei:
        specfile.loads('{"kind": "pql",\n "a": [}')
    assert ei.value.path.startswith("line 2")
    with pytest.raises(SpecError):
        specfile.load("/nonexistent/spec.json")


def test_semiregular_has_no_kind():
    with pytest.raises(SpecError):
        specfile.to_dict(BlaschkeSpec(Quaternion(0, 0.3), 1.0, "semiregular"))

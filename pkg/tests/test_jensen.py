import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracle_values import MC_CASES
from qjensen import specfile
from qjensen.blaschke import BlaschkeSpec
from qjensen.errors import BoundaryContact, OriginSingular, PreconditionFailed
from qjensen.jensen import (
    blaschke_sphere_mean, blaschke_sphere_mean_limit, boundary_case, cone_case_report, entry_correction,
    jensen_mixed, jensen_report, jensen_terms_pql, jensen_terms_slice_preserving, mean_value_residual,
    non_cancellation_quantity, origin_case, pql_sphere_mean, quadrature_sphere_mean, spherical_term,
    zero_count_bound, zero_free_radius,
)
from qjensen.pql import PQLFunction
from qjensen.quaternion import I, J, Quaternion
from qjensen.slicefn import FactoredSlicePreserving

x_minus_i_s = FactoredSlicePreserving(sphere_factors=((I, 1),))


def test_x_minus_i_s_rho_2():
    rep = jensen_terms_slice_preserving(x_minus_i_s, 2.0)
    assert [c.branch for c in rep.corrections] == ["spherical"]
    assert rep.corrections[0].value == pytest.approx(-(math.log(4) + 0.25 * 3.75 * 2))
    assert rep.predicted_mean == pytest.approx(math.log(4) - 1 / 8, abs=1e-14)
    assert rep.mean_term == pytest.approx(math.log(4) - 1 / 8, abs=1e-12)
    assert abs(rep.residual) < 1e-4


def test_x_minus_j_half():
    f = PQLFunction.from_factors([(J * 0.5, 1)])
    rep = jensen_terms_pql(f, 1.0)
    assert rep.predicted_mean == pytest.approx(1 / 16, abs=1e-14)
    assert abs(rep.residual) < 1e-5


def test_no_interior_entries():
    f = FactoredSlicePreserving(real_factors=((3.0, 1),))
    rep = jensen_report(f, 1.0)
    assert rep.corrections == [] and abs(rep.residual) < 1e-6
    tail_only = FactoredSlicePreserving(tail=[1.5, 0.2, -0.1])
    assert abs(jensen_report(tail_only, 0.9).residual) < 1e-10


def test_constant_pql():
    rep = jensen_report(PQLFunction.constant(Quaternion(0, 2, 0, 0)), 1.0)
    assert rep.lhs == pytest.approx(math.log(2))
    assert rep.mean_term == pytest.approx(math.log(2))
    assert rep.laplacian_term == 0 and rep.corrections == []


def test_outside_pql_factor_gives_no_correction():
    q1, q2, q3 = Quaternion(0.2, 0.1, 0, 0), Quaternion(0, 1.5, 0.2, 0), Quaternion(0, 0, -0.3, 0.2)
    f = PQLFunction.from_factors([(q1, 1), (q2, 1), (q3, 1)])
    rep = jensen_terms_pql(f, 1.0)
    assert sorted(c.source.point.to_list() for c in rep.corrections) == sorted([q1.to_list(), q3.to_list()])
    assert abs(rep.residual) < 1e-6


@pytest.mark.parametrize("case", MC_CASES, ids=[c["name"] for c in MC_CASES])
def test_regression_against_monte_carlo(case):
    f = specfile.from_dict(case["spec"])
    rep = jensen_report(f, case["rho"])
    assert abs(rep.residual) < 1e-4
    assert abs(rep.mean_term - case["mean"]) < 3 * case["stderr"]


def test_mixed_parts_reduce_to_single_engines():
    f = FactoredSlicePreserving(real_factors=((0.4, 1),), sphere_factors=((Quaternion(0.1, 0.5, 0, 0), -1),))
    a = jensen_mixed([f], 1.0)
    b = jensen_terms_slice_preserving(f, 1.0)
    assert a.residual == pytest.approx(b.residual, abs=1e-14) and a.mean_term == b.mean_term
    g = PQLFunction.from_factors([(Quaternion(0.1, 0.2, 0.3, 0), 1)])
    assert jensen_mixed([g], 1.0).mean_term == jensen_terms_pql(g, 1.0).mean_term


def test_mixed_product_combines_corrections():
    q1, q2 = Quaternion(0.3, 0, 0.2, 0), Quaternion(-0.1, 0.4, 0, 0.3)
    f = FactoredSlicePreserving(sphere_factors=((Quaternion(0.2, 0.5, 0, 0), 1),), tail=[1.2, 0.1])
    h = [PQLFunction.from_factors([(q1, 1)]), f, PQLFunction.from_factors([(q2, -1), (q2, -1)])]
    rep = jensen_mixed(h, 1.0)
    branches = sorted((c.branch, c.source.multiplicity, c.source.sign) for c in rep.corrections)
    assert branches == [("pql", 1, 1), ("pql", 2, -1), ("spherical", 1, 1)]
    assert abs(rep.residual) < 1e-4


def test_corrections_are_separable():
    # moving rho past a new entry adds exactly that entry's correction
    f = FactoredSlicePreserving(real_factors=((0.3, 1), (0.9, -2)), sphere_factors=((Quaternion(0.1, 0.5, 0, 0), 1),))
    r1, r2 = 0.7, 1.2
    inner = jensen_report(f, r1).corrections
    outer = jensen_report(f, r2)
    new = [e for e in f.ledger().entries if r1 < e.modulus < r2]
    expected = math.fsum(entry_correction(e, r2) for e in new) + math.fsum(
        entry_correction(c.source, r2) for c in inner)
    assert abs(outer.correction_sum - expected) < 1e-10


def test_non_cancellation_quantity(rng):
    for _ in range(1000):
        rho = rng.uniform(0.5, 2.0)
        r = rng.uniform(0.05, 0.95) * rho
        a = Quaternion.from_array(rng.standard_normal(4))
        a = a * (rng.uniform(0.05, 0.95) * rho / abs(a))
        assert non_cancellation_quantity(r, a, rho) != 0.0


def test_origin_case_examples():
    x = FactoredSlicePreserving(1)
    rep = origin_case(x, 1, 2.0)
    assert rep.lhs == pytest.approx(math.log(2)) and abs(rep.residual) < 1e-8
    f = FactoredSlicePreserving(2, ((3.0, 1),))
    assert origin_case(f, 2, 1.0).lhs == pytest.approx(math.log(3))
    inv = FactoredSlicePreserving(-1)
    assert origin_case(inv, -1, 1.0).lhs == 0.0
    with pytest.raises(PreconditionFailed):
        origin_case(x, 2, 1.0)


def test_origin_case_pql_and_routing():
    f = PQLFunction((Quaternion(0, 1, 1, 0), Quaternion(2.0), Quaternion(0, 0, 0, 1)),
                    (Quaternion(), Quaternion(0.2, 0.3, 0, 0)), (1, -1))
    rep = jensen_report(f, 1.0)
    assert rep.metadata["case"] == "origin" and abs(rep.residual) < 1e-6
    with pytest.raises(OriginSingular):
        jensen_terms_pql(f, 1.0)


def test_boundary_case_sphere_on_boundary():
    rep = jensen_report(x_minus_i_s, 1.0)
    assert rep.metadata["case"] == "boundary" and rep.corrections == []
    assert abs(rep.residual) < 1e-3
    with pytest.raises(BoundaryContact):
        jensen_terms_slice_preserving(x_minus_i_s, 1.0)


def test_boundary_case_real_and_point():
    f = FactoredSlicePreserving(real_factors=((1.0, 1), (0.4, 1)))
    rep = boundary_case(f, 1.0)
    assert rep.lhs == 0.0 + math.log(0.4) and len(rep.corrections) == 1
    assert abs(rep.residual) < 1e-3
    g = PQLFunction.from_factors([(Quaternion(0, 0.6, 0.8, 0), 1), (Quaternion(0.2, 0, 0, 0.1), -1)])
    assert abs(boundary_case(g, 1.0).residual) < 1e-3


def test_cone_case():
    t = 0.6
    a = Quaternion(t, t, 0, 0)
    f = FactoredSlicePreserving(sphere_factors=((a, 1),))
    rep = cone_case_report(f, 1.0)
    assert rep.metadata["brackets"] == [pytest.approx(0.0, abs=1e-15)]
    assert rep.corrections[0].value == pytest.approx(-math.log(1 / a.norm2()))
    with pytest.raises(PreconditionFailed):
        cone_case_report(FactoredSlicePreserving(sphere_factors=((Quaternion(1, 0.5, 0, 0), 1),)), 2.0)
    assert spherical_term(I, 1.0) != spherical_term(Quaternion(0.5 ** 0.5, 0.5 ** 0.5), 1.0)


def random_cone_function(rng):
    sph = []
    for _ in range(rng.integers(1, 4)):
        alpha = rng.uniform(-0.6, 0.6)
        beta = abs(alpha) + rng.uniform(0.02, 0.4)
        sph.append((Quaternion(alpha, beta, 0, 0), int(rng.integers(1, 3))))
    return FactoredSlicePreserving(sphere_factors=tuple(sph), tail=[rng.uniform(1, 2), rng.uniform(-0.3, 0.3)])


def test_zero_count_bound_holds(rng):
    for _ in range(20):
        f = random_cone_function(rng)
        r = rng.uniform(0.3, 1.0)
        b = zero_count_bound(f, r, r * math.e)
        assert b.holds, b


def test_zero_count_example():
    f = FactoredSlicePreserving(sphere_factors=((I * 0.3, 1),))
    b = zero_count_bound(f, 0.5, 0.5 * math.e)
    assert b.n_actual == 1 and b.bound >= 1
    with pytest.raises(PreconditionFailed):
        zero_count_bound(FactoredSlicePreserving(real_factors=((0.2, 1),)), 0.5, 1.0)


def test_zero_free_radius():
    f = FactoredSlicePreserving(sphere_factors=((Quaternion(0.1, 0.5, 0, 0), 1),), tail=[0.5])
    z = zero_free_radius(f)
    assert not z.vacuous and z.consistent and z.radius < abs(Quaternion(0.1, 0.5, 0, 0))
    # guard at its boundary value: f^s(0) = 1 and no Laplacian
    one = FactoredSlicePreserving(tail=[1.0])
    assert zero_free_radius(one, check_maps_into_ball=False).radius == pytest.approx(1.0)


def test_blaschke_sphere_means():
    B = BlaschkeSpec(Quaternion(0.5), 1.0)
    assert blaschke_sphere_mean(B, 3.0) == pytest.approx(math.log(0.5) + (1 - 1 / 16) / (4 * 0.25 * 9))
    for kind in ("punctual", "spherical"):
        B = BlaschkeSpec(Quaternion(0.2, 0.4, -0.1, 0.1), 1.0, kind)
        for r in (2.5, 4.0):
            assert abs(blaschke_sphere_mean(B, r) - quadrature_sphere_mean(B, r)) < 1e-4
        assert abs(blaschke_sphere_mean(B, 1e3) - blaschke_sphere_mean_limit(B)) < 1e-3
    with pytest.raises(PreconditionFailed):
        blaschke_sphere_mean(BlaschkeSpec(Quaternion(0.5), 1.0), 1.5)


def test_pql_sphere_mean():
    f = PQLFunction((Quaternion(1, 1, 0, 0), Quaternion(0, 0, 2, 0), Quaternion(0.5)),
                    (Quaternion(0.1, 0.3, 0, 0.2), Quaternion(-0.4, 0, 0.1, 0)), (1, -1))
    assert abs(pql_sphere_mean(f, 1.0) - quadrature_sphere_mean(f, 1.0)) < 1e-4
    assert pql_sphere_mean(PQLFunction.from_factors([(J * 0.5, 1)]), 1.0) == pytest.approx(1 / 16)


@given(st.floats(0.5, 2.0), st.floats(-1, 1), st.floats(-1, 1))
def test_mean_value_property(rho, a, b):
    q = np.array([a, b, 0.0, 0.0]) + [0.0, 0.0, 2.5, 0.0]
    u = lambda xs: np.log(np.linalg.norm(xs - q, axis=-1)) + 0.3 * xs[..., 0] + np.sum(xs ** 2, axis=-1)
    assert abs(mean_value_residual(u, rho)) < 1e-6

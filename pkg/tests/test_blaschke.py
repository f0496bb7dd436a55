import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qjensen.blaschke import (
    BlaschkeSpec, blaschke_ledger, boundary_modulus_error, cone_bracket, laplacian_log_blaschke_at_zero,
)
from qjensen.diffops import laplacian_fd
from qjensen.errors import POLE
from qjensen.quaternion import I, Quaternion, random_unit_quaternions

coord = st.floats(min_value=-0.5, max_value=0.5, allow_nan=False)
inner = st.builds(Quaternion, coord, coord, coord, coord).filter(lambda a: a.norm2() > 1e-2)
rhos = st.floats(min_value=1.0, max_value=3.0)


@pytest.mark.parametrize("kind", ["punctual", "spherical", "semiregular"])
def test_boundary_modulus(kind, rng):
    for _ in range(10):
        rho = rng.uniform(0.5, 3.0)
        a = Quaternion.from_array(rng.uniform(-1, 1, 4))
        a = a * (rho * rng.uniform(0.1, 0.9) / abs(a))
        B = BlaschkeSpec(a, rho, kind)
        xs = random_unit_quaternions(rng, 200) * rho
        assert boundary_modulus_error(B, xs) < 1e-10


@given(inner, rhos)
def test_scalar_and_vector_paths_agree(a, rho):
    for kind in ("punctual", "spherical", "semiregular"):
        B = BlaschkeSpec(a * 1.0, rho, kind) if kind == "punctual" or not a.is_real() else None
        if B is None:
            continue
        x = Quaternion(0.1, -0.7, 0.3, 0.2)
        v = B(x)
        if v is POLE:
            continue
        assert np.allclose(B.evaluate(x.to_array()[None])[0], v.to_array(), rtol=1e-10, atol=1e-12)


def test_punctual_zero_and_pole():
    B = BlaschkeSpec(Quaternion(0.5), 1.0)
    assert B(Quaternion(2.0)).norm2() == 0.0
    assert B(Quaternion(0.5)) is POLE
    assert abs(B(Quaternion(0.1, 0.2, 0.1, 0))) > 1


def test_spherical_zero_sphere():
    a = Quaternion(0.1, 0.3, 0.2, 0)
    B = BlaschkeSpec(a, 1.0, "spherical")
    z = B.zero
    other = z.real + Quaternion(0, 0, 0, 1) * z.imag_norm()
    assert abs(B(other)) < 1e-12


def test_ledgers():
    a = Quaternion(0.1, 0.3, 0.2, 0)
    led = blaschke_ledger(BlaschkeSpec(a, 2.0))
    kinds = {e.kind: e.point for e in led.entries}
    assert kinds["point_pole"] == a
    assert kinds["point_zero"].isclose(4.0 * (a / a.norm2()))
    led = blaschke_ledger(BlaschkeSpec(a, 2.0, "spherical"))
    assert sorted(e.kind for e in led.entries) == ["sphere_pole", "sphere_zero"]


def test_laplacian_examples():
    assert math.isclose(laplacian_log_blaschke_at_zero(BlaschkeSpec(Quaternion(0.5), 1.0)), -7.5)
    assert math.isclose(laplacian_log_blaschke_at_zero(BlaschkeSpec(I, 2.0, "spherical")), 3.75)


def test_laplacian_exact_rationals():
    # exact values from a symbolic computation for a = 1/5 + 3/10 i - 1/10 j, rho = 1
    a = Quaternion(0.2, 0.3, -0.1, 0)
    assert math.isclose(laplacian_log_blaschke_at_zero(BlaschkeSpec(a, 1.0)), -2451 / 175, rel_tol=1e-14)
    assert math.isclose(laplacian_log_blaschke_at_zero(BlaschkeSpec(a, 1.0, "spherical")), 14706 / 1225,
                        rel_tol=1e-14)


@pytest.mark.parametrize("kind", ["punctual", "spherical"])
def test_laplacian_matches_fd(kind, rng):
    for _ in range(5):
        rho = rng.uniform(0.8, 2.0)
        a = Quaternion.from_array(rng.uniform(-1, 1, 4))
        a = a * (rho * rng.uniform(0.3, 0.8) / abs(a))
        B = BlaschkeSpec(a, rho, kind)
        cf = laplacian_log_blaschke_at_zero(B)
        assert abs(laplacian_fd(B.log_abs, Quaternion()) - cf) <= 1e-6 * abs(cf)


def test_real_limit_factor_two():
    a0, rho = 0.4, 1.3
    pun = laplacian_log_blaschke_at_zero(BlaschkeSpec(Quaternion(a0), rho))
    sph = laplacian_log_blaschke_at_zero(BlaschkeSpec(Quaternion(a0, 1e-9, 0, 0), rho, "spherical"))
    assert math.isclose(sph, 2 * pun, rel_tol=1e-12)


def test_cone_bracket():
    assert cone_bracket(Quaternion(0.3, 0.3, 0, 0)) == pytest.approx(0.0, abs=1e-16)
    assert cone_bracket(Quaternion(0.5)) == pytest.approx(-0.5)


def test_rejects_bad_parameters():
    with pytest.raises(ValueError):
        BlaschkeSpec(Quaternion(1.5), 1.0)
    with pytest.raises(ValueError):
        BlaschkeSpec(Quaternion(0.5), 1.0, "spherical")
    with pytest.raises(ValueError):
        BlaschkeSpec(Quaternion(), 1.0)

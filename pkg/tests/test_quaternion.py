import math

import numpy as np
import pytest
from hypothesis import given

from conftest import nonzero_quats, quats
from qjensen.errors import DomainError
from qjensen.quaternion import (
    I, J, K, ONE, Quaternion, inverse, qabs, qconj, qinv, qmul, random_unit_imaginary,
    slice_decompose, slice_parts,
)

TOL = 1e-13


def close(p, q, tol=TOL):
    scale = max(1.0, abs(p), abs(q))
    return abs(p - q) <= tol * scale * scale


def test_unit_table():
    assert I * J == K and J * K == I and K * I == J
    assert J * I == -K
    for u in (I, J, K):
        assert u * u == -ONE


@given(quats, quats, quats)
def test_associative(p, q, r):
    lhs, rhs = (p * q) * r, p * (q * r)
    assert abs(lhs - rhs) <= TOL * max(1.0, abs(p) * abs(q) * abs(r))


@given(quats, quats, quats)
def test_distributive(p, q, r):
    assert abs(p * (q + r) - (p * q + p * r)) <= TOL * max(1.0, abs(p) * (abs(q) + abs(r)))


@given(quats, quats)
def test_norm_multiplicative(p, q):
    assert math.isclose(abs(p * q), abs(p) * abs(q), rel_tol=TOL, abs_tol=TOL)


@given(quats, quats)
def test_conjugate_reverses(p, q):
    assert close((p * q).conj(), q.conj() * p.conj())


@given(nonzero_quats)
def test_inverse(q):
    assert close(q * inverse(q), ONE, 1e-12)
    assert close(inverse(q) * q, ONE, 1e-12)


@given(quats)
def test_slice_decompose_roundtrip(q):
    sc = slice_decompose(q)
    assert sc.beta >= 0
    assert close(sc.reconstruct(), q)
    assert math.isclose(abs(sc.unit), 1.0, rel_tol=1e-15)


def test_real_point_gets_i():
    sc = slice_decompose(Quaternion(2.5))
    assert sc.real_point and sc.unit == I and sc.beta == 0.0


def test_array_ops_match_scalar(rng):
    p = rng.standard_normal((20, 4))
    q = rng.standard_normal((20, 4))
    pq = qmul(p, q)
    for a, b, c in zip(p, q, pq):
        assert np.allclose((Quaternion.from_array(a) * Quaternion.from_array(b)).to_array(), c, atol=1e-15)
    assert np.allclose(qmul(p, qinv(p)), np.tile([1.0, 0, 0, 0], (20, 1)), atol=1e-14)
    assert np.allclose(qabs(qconj(p)), qabs(p))


def test_slice_parts_real_rows():
    alpha, beta, unit = slice_parts(np.array([[1.0, 0, 0, 0], [0.0, 0, 3, 4]]))
    assert alpha.tolist() == [1.0, 0.0]
    assert beta.tolist() == [0.0, 5.0]
    assert unit.tolist() == [[0, 1, 0, 0], [0, 0, 0.6, 0.8]]


def test_random_unit_imaginary(rng):
    u = random_unit_imaginary(rng)
    assert u.real == 0.0 and math.isclose(abs(u), 1.0)
    assert close(u * u, -ONE)


def test_division_by_zero():
    with pytest.raises(DomainError):
        inverse(Quaternion())

import math

import numpy as np
import pytest

from qjensen.diffops import (
    FDConfig, bilaplacian_fd, laplacian_fd, mollified_log, mollified_log_laplacians, richardson,
    richardson_linear, vectorize,
)
from qjensen.errors import ClearanceError
from qjensen.quaternion import I, J, ONE, Quaternion
from qjensen.slicefn import FactoredSlicePreserving, QuatCoeffSeries, star_product


def log_abs_of(series):
    return lambda xs: np.log(np.linalg.norm(series.evaluate(xs), axis=-1))


def test_richardson_removes_h2_and_h4():
    f = lambda h: 3.0 + 2.0 * h ** 2 - 5.0 * h ** 4
    steps = [0.1, 0.2, 0.3]
    assert richardson([f(h) for h in steps], steps) == pytest.approx(3.0, abs=1e-13)
    # default geometric steps
    assert richardson([f(2.0 ** -k) for k in range(3)]) == pytest.approx(3.0, abs=1e-13)


def test_richardson_linear():
    f = lambda h: 1.0 + h - h ** 2
    diag = richardson_linear([f(0.1 * 2.0 ** -k) for k in range(3)])
    assert diag[-1] == pytest.approx(1.0, abs=1e-14)


def test_laplacian_of_polynomial():
    u = lambda xs: xs[..., 0] ** 2 * xs[..., 1] ** 2 + xs[..., 2] ** 3
    x = Quaternion(0.3, -0.4, 0.5, 0.1)
    exact = 2 * x.x1 ** 2 + 2 * x.x0 ** 2 + 6 * x.x2
    assert laplacian_fd(u, x) == pytest.approx(exact, rel=1e-10)


def test_log_laplacian_law(rng):
    u = lambda xs: np.log(np.linalg.norm(xs, axis=-1))
    for x in rng.uniform(-2, 2, (20, 4)):
        x = Quaternion.from_array(x)
        if abs(x) < 0.2:
            continue
        assert abs(laplacian_fd(u, x) / (2 / x.norm2()) - 1) < 1e-6


def test_counterexample_values():
    lin = lambda q: QuatCoeffSeries((-q, ONE))
    pij = star_product(lin(I), lin(J))
    pi2i = star_product(lin(I), lin(2 * I))
    assert abs(bilaplacian_fd(log_abs_of(pij), Quaternion()) - 64) < 1e-3
    assert abs(bilaplacian_fd(log_abs_of(pi2i), Quaternion()) + 72) < 1e-3


def test_bilaplacian_of_polynomial():
    u = lambda xs: np.sum(xs ** 2, axis=-1) ** 2
    # Delta^2 |x|^4 = 192 in four dimensions
    assert bilaplacian_fd(u, Quaternion(0.2, 0.1, 0, -0.3)) == pytest.approx(192, rel=1e-7)


def test_log_biharmonic_slice_preserving():
    f = FactoredSlicePreserving(1, ((0.5, 2),), ((Quaternion(0.1, 0.3, 0.4, 0), -1),), [2, 0.1])
    x = Quaternion(0.6, 0.5, -0.4, 0.3)
    assert abs(bilaplacian_fd(f.log_abs, x, singularities=f.ledger())) < 1e-4


def test_clearance_check():
    f = FactoredSlicePreserving(real_factors=((0.5, 1),))
    with pytest.raises(ClearanceError):
        laplacian_fd(f.log_abs, Quaternion(0.51), FDConfig(min_clearance=0.1), singularities=f.ledger())


def test_config_validation():
    with pytest.raises(ValueError):
        FDConfig(h=-1.0)
    with pytest.raises(ValueError):
        FDConfig(h=0.1, min_clearance=0.2)
    assert FDConfig(h=0.01).steps(0.01) == [0.01, 0.02, 0.03]
    assert FDConfig().bilap_levels == 3


def test_vectorize():
    g = vectorize(lambda q: abs(q) ** 2)
    xs = np.array([[1.0, 0, 0, 0], [0, 2.0, 0, 0]])
    assert g(xs).tolist() == [1.0, 4.0]


@pytest.mark.parametrize("eps", [0.3, 1.0])
def test_mollified_closed_forms(eps):
    u = lambda xs: mollified_log(xs, eps)
    x = Quaternion(0.2, 0.3, -0.1, 0.4)
    lap, bilap = mollified_log_laplacians(x, eps)
    assert laplacian_fd(u, x) == pytest.approx(lap, rel=1e-8)
    assert bilaplacian_fd(u, x) == pytest.approx(bilap, rel=1e-5)
    with pytest.raises(ValueError):
        mollified_log_laplacians(x, 0.0)


def test_fixed_stencil_determinism():
    u = lambda xs: np.sin(xs[..., 0]) * np.cos(xs[..., 3])
    x = Quaternion(0.1, 0.2, 0.3, 0.4)
    assert bilaplacian_fd(u, x) == bilaplacian_fd(u, x)
    assert math.isfinite(bilaplacian_fd(u, x))

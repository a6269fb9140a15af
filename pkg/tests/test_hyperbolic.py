import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from vaxjo.hyperbolic import J, HyperbolicNumber

finite = st.floats(-10, 10)


def test_j_squares_to_one():
    assert J * J == HyperbolicNumber(1.0, 0.0)


def test_exp_j_is_cosh_sinh():
    z = HyperbolicNumber.exp_j(0.5)
    assert (z.x, z.y) == pytest.approx((math.cosh(0.5), math.sinh(0.5)))
    assert z.modulus_squared() == pytest.approx(1.0)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_exp_j_adds_angles(s, t):
    prod = HyperbolicNumber.exp_j(s) * HyperbolicNumber.exp_j(t)
    direct = HyperbolicNumber.exp_j(s + t)
    assert prod.x == pytest.approx(direct.x, rel=1e-9, abs=1e-9)
    assert prod.y == pytest.approx(direct.y, rel=1e-9, abs=1e-9)


@given(finite, finite, finite, finite)
def test_modulus_is_multiplicative(a, b, c, d):
    z, w = HyperbolicNumber(a, b), HyperbolicNumber(c, d)
    assert (z * w).modulus_squared() == pytest.approx(z.modulus_squared() * w.modulus_squared(), abs=1e-6)


@given(finite, finite)
def test_conjugate_product_is_modulus(a, b):
    z = HyperbolicNumber(a, b)
    prod = z * z.conjugate()
    assert prod.x == pytest.approx(z.modulus_squared(), abs=1e-9)
    assert prod.y == pytest.approx(0.0, abs=1e-9)


def test_scalar_arithmetic():
    z = HyperbolicNumber(1.0, 2.0)
    assert 2 * z == HyperbolicNumber(2.0, 4.0)
    assert z + 1 == HyperbolicNumber(2.0, 2.0)
    assert 1 - z == HyperbolicNumber(0.0, -2.0)
    assert -z == HyperbolicNumber(-1.0, -2.0)
    assert tuple(z) == (1.0, 2.0)

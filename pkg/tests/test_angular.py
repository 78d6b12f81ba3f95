import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.physics.wigner import wigner_3j

from shgoints.angular import (
    AngularKey,
    Wigner3jKey,
    binomial,
    double_factorial,
    eps_coeff,
    product_coupling,
    wigner3j,
)


def test_binomial_examples():
    assert binomial(5, 2) == 10
    assert all(binomial(n, 0) == 1 for n in range(80))
    assert binomial(3, 5) == 0
    assert binomial(3, -1) == 0
    # beyond the table the exact fallback still returns integers
    assert binomial(100, 50) == math.comb(100, 50)
    with pytest.raises(ValueError):
        binomial(-1, 0)


def test_double_factorial_examples():
    assert double_factorial(-1) == 1
    assert double_factorial(0) == 1
    assert double_factorial(5) == 15
    assert double_factorial(6) == 48
    assert double_factorial(71) == math.prod(range(71, 0, -2))
    with pytest.raises(ValueError):
        double_factorial(-2)


def test_angular_key():
    assert AngularKey(2, -1).index == 5
    with pytest.raises(ValueError):
        AngularKey(1, 2)
    with pytest.raises(ValueError):
        AngularKey(-1, 0)


def test_eps_examples():
    for l in range(7):
        for m in range(-l, l + 1):
            assert eps_coeff(l, 0, m, 0) == 1.0
    assert eps_coeff(2, 1, 0, 0) == 2.0
    assert eps_coeff(1, 1, 1, 1) == 1.0
    assert eps_coeff(3, 1, 0, 2) == 0.0  # |m2| > l2 is a zero, not an error
    with pytest.raises(ValueError):
        eps_coeff(1, 2, 0, 0)
    with pytest.raises(ValueError):
        eps_coeff(1, 0, 3, 0)


def test_wigner3j_examples():
    assert wigner3j(1, 1, 0, 0, 0, 0) == pytest.approx(-1 / math.sqrt(3), abs=1e-15)
    assert wigner3j(2, 2, 0, 0, 0, 0) == pytest.approx(1 / math.sqrt(5), abs=1e-15)
    assert wigner3j(1, 2, 5, 0, 0, 0) == 0.0
    assert wigner3j(Wigner3jKey(1, 1, 0, 0, 0, 0)) == wigner3j(1, 1, 0, 0, 0, 0)
    assert wigner3j(1, 1, 1, 1, 0, 0) == 0.0  # m-sum violation
    assert wigner3j(1, 1, 1, 0, 0, 0) == 0.0  # odd parity with all m = 0


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 6), st.integers(0, 6), st.data())
def test_wigner3j_matches_sympy(l1, l2, data):
    l3 = data.draw(st.integers(abs(l1 - l2), l1 + l2))
    m1 = data.draw(st.integers(-l1, l1))
    m2 = data.draw(st.integers(-l2, l2))
    m3 = -m1 - m2
    ref = float(wigner_3j(l1, l2, l3, m1, m2, m3)) if abs(m3) <= l3 else 0.0
    assert wigner3j(l1, l2, l3, m1, m2, m3) == pytest.approx(ref, abs=1e-14)


def test_wigner3j_orthogonality():
    l1, l2 = 3, 2
    for l3 in range(1, 6):
        for l3p in range(1, 6):
            s = sum(
                wigner3j(l1, l2, l3, m1, m2, -m1 - m2) * wigner3j(l1, l2, l3p, m1, m2, -m1 - m2)
                for m1 in range(-l1, l1 + 1)
                for m2 in range(-l2, l2 + 1)
            )
            # summing over m3 as well collects 2 l3 + 1 copies of 1 / (2 l3 + 1)
            assert s == pytest.approx(float(l3 == l3p), abs=1e-14)


def test_product_coupling_selection():
    assert product_coupling(1, 0, 1, 0, 1) == 0.0  # parity
    assert product_coupling(2, 2, 2, 1, 2) == 0.0  # |m| > lc
    assert product_coupling(0, 0, 3, -2, 3) == pytest.approx(1.0)

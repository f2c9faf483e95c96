"""Tests for the certified Bessel and incomplete gamma functions."""

from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest

from poincare_relations.errors import InvalidWeightError
from poincare_relations.special import bessel_i, bessel_j, incomplete_gamma_upper

from .conftest import within

HALF = Fraction(1, 2)


def _mp_order(nu):
    """Return nu as a global mpmath number."""
    frac = Fraction(nu)
    return mpmath.mpf(frac.numerator) / frac.denominator


def test_bessel_at_zero():
    """Test J_0(0) = 1 and J_nu(0) = 0 for nu > 0."""
    first = bessel_j(0, 0)
    assert first.value == 1
    assert first.abs_error == 0
    assert bessel_j(5, 0).value == 0
    assert bessel_i(HALF, 0).value == 0


@pytest.mark.parametrize(
    ("nu", "x"),
    [(0, 1), (1, "2.5"), (HALF, 3), (11, "37.75"), (Fraction(13, 2), 20)],
)
def test_bessel_j_against_reference(nu, x):
    """Test J_nu(x) against mpmath at 300 bits."""
    result = bessel_j(nu, x)
    with mpmath.workprec(300):
        reference = mpmath.besselj(_mp_order(nu), mpmath.mpf(x))
    assert within(result.value, reference, result.abs_error, 1e-60)
    assert result.abs_error < 1e-30


@pytest.mark.parametrize(
    ("nu", "x"), [(0, 1), (HALF, 1), (11, 30), (Fraction(9, 2), 5)]
)
def test_bessel_i_against_reference(nu, x):
    """Test I_nu(x) against mpmath at 300 bits."""
    result = bessel_i(nu, x)
    with mpmath.workprec(300):
        reference = mpmath.besseli(_mp_order(nu), mpmath.mpf(x))
    assert within(result.value, reference, result.abs_error, 1e-60)


def test_bessel_half_order_closed_form():
    """Test I_(1/2)(1) = sqrt(2/pi) sinh(1)."""
    result = bessel_i(HALF, 1)
    assert float(result) == pytest.approx(0.937674888245488, rel=1e-14)


def test_bessel_small_argument():
    """Test J_3(x) ~ (x/2)^3 / 3! for small x."""
    assert float(bessel_j(3, "0.01")) == pytest.approx(0.005**3 / 6, rel=1e-4)


def test_bessel_zero_with_argument_error():
    """Test that a propagated argument error covers a true zero of J_(1/2)."""
    with mpmath.workprec(256):
        x = +mpmath.pi
    result = bessel_j(HALF, x, x_error=1e-35)
    assert result.contains(0)


@pytest.mark.parametrize(
    ("nu", "x"), [(1, "0.5"), (Fraction(3, 2), 2), (5, "7.25"), (11, 20)]
)
def test_bessel_j_recurrence(nu, x):
    """Test J_(nu-1) + J_(nu+1) = (2 nu / x) J_nu within the combined bounds."""
    below = bessel_j(nu - 1, x)
    above = bessel_j(nu + 1, x)
    middle = bessel_j(nu, x)
    with mpmath.workprec(512):
        factor = 2 * _mp_order(nu)
        factor /= mpmath.mpf(x)
        lhs = mpmath.mpf(below.value) + mpmath.mpf(above.value)
        rhs = factor * mpmath.mpf(middle.value)
        bound = (
            mpmath.mpf(below.abs_error)
            + mpmath.mpf(above.abs_error)
            + factor * mpmath.mpf(middle.abs_error)
        )
    assert within(lhs, rhs, bound, 1e-60)


@pytest.mark.parametrize(
    ("nu", "x"), [(1, "0.5"), (Fraction(3, 2), 2), (5, "7.25"), (11, 30)]
)
def test_bessel_i_recurrence(nu, x):
    """Test I_(nu-1) - I_(nu+1) = (2 nu / x) I_nu within the combined bounds."""
    below = bessel_i(nu - 1, x)
    above = bessel_i(nu + 1, x)
    middle = bessel_i(nu, x)
    with mpmath.workprec(512):
        factor = 2 * _mp_order(nu)
        factor /= mpmath.mpf(x)
        lhs = mpmath.mpf(below.value) - mpmath.mpf(above.value)
        rhs = factor * mpmath.mpf(middle.value)
        bound = (
            mpmath.mpf(below.abs_error)
            + mpmath.mpf(above.abs_error)
            + factor * mpmath.mpf(middle.abs_error)
        )
    assert within(lhs, rhs, bound, 1e-60)


def test_bessel_precision_doubling():
    """Test that the 128 and 256 bit values agree within their bounds."""
    low = bessel_j(11, "37.75", precision_bits=128)
    high = bessel_j(11, "37.75", precision_bits=256)
    assert within(low.value, high.value, low.abs_error + high.abs_error)
    assert high.abs_error < low.abs_error


def test_bessel_i_increasing():
    """Test I_2(1) < I_2(2)."""
    assert bessel_i(2, 1).value < bessel_i(2, 2).value


@pytest.mark.parametrize(("nu", "x"), [(1, -1), (-1, 1), (Fraction(-3, 2), 1)])
def test_bessel_rejects(nu, x):
    """Test negative arguments and orders at or below -1."""
    with pytest.raises(InvalidWeightError):
        bessel_j(nu, x)


def test_incomplete_gamma_exponential():
    """Test Gamma(1, x) = e^-x."""
    result = incomplete_gamma_upper(1, "2.5")
    with mpmath.workprec(300):
        reference = mpmath.exp(-mpmath.mpf("2.5"))
    assert within(result.value, reference, result.abs_error, 1e-60)


def test_incomplete_gamma_values():
    """Test Gamma(s, 0) = Gamma(s) and Gamma(2, 1) = 2/e."""
    whole = incomplete_gamma_upper(Fraction(7, 2), 0)
    with mpmath.workprec(300):
        gamma_ref = mpmath.gamma(mpmath.mpf(7) / 2)
        two_over_e = 2 / mpmath.e
    assert within(whole.value, gamma_ref, whole.abs_error, 1e-60)
    partial = incomplete_gamma_upper(2, 1)
    assert within(partial.value, two_over_e, partial.abs_error, 1e-60)
    assert float(incomplete_gamma_upper(11, 4)) == pytest.approx(
        float(mpmath.gammainc(11, 4)), rel=1e-12
    )


@pytest.mark.parametrize(("s", "x"), [(0, 1), (-1, 1), (2, -1)])
def test_incomplete_gamma_rejects(s, x):
    """Test s <= 0 and negative x."""
    with pytest.raises(InvalidWeightError):
        incomplete_gamma_upper(s, x)

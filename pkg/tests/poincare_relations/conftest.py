"""
Shared fixtures and golden values for poincare_relations tests.

Weight-24 coefficients are displays of a(m, 24, 1; n) with the published
misprints corrected: a(1;1) has its missing zero back, a(2;3) and a(3;2)
carry their minus sign, and some entries are truncated rather than rounded.
Exact values (tau, j, Delta) are classical.
"""

from __future__ import annotations

from decimal import ROUND_DOWN, ROUND_HALF_EVEN, Decimal

import mpmath
import pytest

from poincare_relations.config import RunConfig
from poincare_relations.exactarith import WeightProfile

# a(m, 24, 1; n) displays, keyed by (m, n)
CLASSICAL_K24 = {
    (1, 1): "1.00010085",
    (1, 2): "132.988977",
    (1, 3): "189296.261",
    (2, 1): "0.00001585",
    (2, 2): "2.45743136",
    (2, 3): "-114.854805",
    (3, 1): "0.00000201",
    (3, 2): "-0.01023411",
    (3, 3): "0.88465633",
}

# tau(3, 14; n): coefficients of E_14 / Delta^3
TAU_3_14 = {-3: 1, -2: 48, -1: -195660}

J_COEFFS = {-1: 1, 0: 744, 1: 196884, 2: 21493760}

# Ramanujan tau(n), n = 1..8
DELTA_COEFFS = [1, -24, 252, -1472, 4830, -6048, -16744, 84480]

COROLLARY_K24 = {1: -195660, 2: 402653184, 3: 94143178827}

# (m, n) pairs for the xi-duality checks
DUALITY_PAIRS = [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (3, 1), (2, 3)]


def half_ulp(printed: str) -> float:
    """Return half a unit in the last printed place."""
    exponent = Decimal(printed).as_tuple().exponent
    return 0.5 * 10.0**exponent


def ulp(printed: str) -> float:
    """Return one unit in the last printed place."""
    return 2 * half_ulp(printed)


def matches_display(value, printed: str) -> bool:
    """Return True when value truncated or rounded to the printed places is printed."""
    shown = Decimal(printed)
    with mpmath.workprec(512):
        exact = Decimal(mpmath.nstr(mpmath.mpf(value), 40, strip_zeros=False))
    places = Decimal(1).scaleb(shown.as_tuple().exponent)
    return shown in (
        exact.quantize(places, rounding=ROUND_DOWN),
        exact.quantize(places, rounding=ROUND_HALF_EVEN),
    )


def within(value, reference, bound, slack=0) -> bool:
    """Compare mpmath numbers at 512 bits: |value - reference| <= bound + slack."""
    with mpmath.workprec(512):
        gap = abs(mpmath.mpf(value) - mpmath.mpf(reference))
        return gap <= mpmath.mpf(bound) + mpmath.mpf(slack)


@pytest.fixture
def run_config() -> RunConfig:
    """Return the default run configuration."""
    return RunConfig()


@pytest.fixture
def weight24() -> WeightProfile:
    """Return k = 24 on SL_2(Z)."""
    return WeightProfile.create(24, 1)


@pytest.fixture
def weight12() -> WeightProfile:
    """Return k = 12 on SL_2(Z)."""
    return WeightProfile.create(12, 1)


@pytest.fixture
def weight15_2() -> WeightProfile:
    """Return k = 15/2 on Gamma_0(4)."""
    return WeightProfile.create("15/2", 4)

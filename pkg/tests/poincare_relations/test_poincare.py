"""Tests for the Poincare series coefficient c-sums."""

from __future__ import annotations

import math
import random
from unittest.mock import patch

import mpmath
import pytest

from poincare_relations.config import RunConfig
from poincare_relations.const import FAMILY_CLASSICAL, FAMILY_MAASS_ZERO
from poincare_relations.errors import InvalidWeightError, UnreachableTolerance
from poincare_relations.exactarith import WeightProfile
from poincare_relations.poincare import (
    classical_coeff,
    maass_coeff_negative,
    maass_coeff_positive,
    maass_coeff_zero,
    maass_nonholomorphic_term,
    nonholomorphic_coeff,
    poincare_coeff,
    xi_image_coeff,
)

from .conftest import (
    CLASSICAL_K24,
    COROLLARY_K24,
    DUALITY_PAIRS,
    half_ulp,
    matches_display,
    ulp,
    within,
)


def _duality_sides(w, m, n, target):
    """Return both sides of xi Q(-m) = (4 pi m)^(k-1)/(k-2)! P(m) at q^n with bounds."""
    classical = classical_coeff(w, m, n, target)
    negative = nonholomorphic_coeff(w, m, -n, target)
    with mpmath.workprec(512):
        k = mpmath.mpf(w.k.numerator) / w.k.denominator
        left_factor = mpmath.power(4 * mpmath.pi * m, k - 1) / mpmath.gamma(k - 1)
        right_factor = mpmath.power(4 * mpmath.pi * n, k - 1)
        left = left_factor * mpmath.mpf(classical.value)
        right = -right_factor * mpmath.mpf(negative.value)
        bound = left_factor * mpmath.mpf(classical.total_bound) + right_factor * (
            mpmath.mpf(negative.total_bound)
        )
    return left, right, bound


@pytest.mark.parametrize(("m", "n"), list(CLASSICAL_K24))
def test_classical_weight24_table(weight24, m, n):
    """Test a(m, 24, 1; n) against its display to every shown digit."""
    printed = CLASSICAL_K24[(m, n)]
    result = classical_coeff(weight24, m, n)
    assert float(result.total_bound) < half_ulp(printed)
    assert matches_display(result.value, printed)
    assert within(result.value, printed, ulp(printed))
    assert abs(result.imag_part) <= result.total_bound
    assert not result.heuristic


@pytest.mark.parametrize("n", [1, 2, 3])
def test_weight24_table_satisfies_relation(weight24, n):
    """Test that the computed table annihilates the exact weight 24 relation."""
    results = {m: classical_coeff(weight24, m, n, 1e-15) for m in COROLLARY_K24}
    with mpmath.workprec(512):
        terms = [
            alpha * mpmath.mpf(results[m].value) for m, alpha in COROLLARY_K24.items()
        ]
        residual = mpmath.fsum(terms)
        bound = mpmath.fsum(
            abs(alpha) * mpmath.mpf(results[m].total_bound)
            for m, alpha in COROLLARY_K24.items()
        )
        largest = max(abs(term) for term in terms)
    assert abs(residual) <= bound
    assert abs(residual) / largest < 1e-6


def test_classical_result_fields(weight24, run_config):
    """Test the bookkeeping carried by a certified coefficient."""
    result = classical_coeff(weight24, 1, 2, config=run_config)
    assert result.family == FAMILY_CLASSICAL
    assert (result.m, result.n) == (1, 2)
    assert result.weight == weight24
    assert result.total_bound <= run_config.target_error
    assert result.tail_bound <= run_config.target_error / 2
    assert result.contains(result.value)
    data = result.as_dict()
    assert data["k"] == "24"
    assert data["value"].startswith("132.98897")


def test_classical_half_integral_is_real(weight15_2):
    """Test that the phase keeps half-integral coefficients real."""
    for m, n in [(1, 1), (1, 2), (3, 2)]:
        result = classical_coeff(weight15_2, m, n)
        assert abs(result.imag_part) <= result.total_bound
        assert result.c_used % 4 == 0


def test_classical_cutoff_is_sound(weight12):
    """Test that doubling the cutoff stays inside the first bound."""
    first = classical_coeff(weight12, 2, 3, 1e-8)
    second = classical_coeff(weight12, 2, 3, 1e-8, cutoff=2 * first.c_used)
    assert within(first.value, second.value, first.total_bound + second.rounding_bound)


@pytest.mark.parametrize(("m", "n"), list(CLASSICAL_K24))
def test_classical_envelope(weight24, m, n):
    """Test |a(m; n) - delta| against the trivial Kloosterman and Bessel envelope."""
    result = classical_coeff(weight24, m, n)
    with mpmath.workprec(512):
        k = mpmath.mpf(24)
        envelope = (
            2
            * mpmath.pi
            * mpmath.power(mpmath.mpf(n) / m, (k - 1) / 2)
            * mpmath.power(2 * mpmath.pi * mpmath.sqrt(m * n), k - 1)
            * mpmath.zeta(k - 1)
            / mpmath.gamma(k)
        )
        offset = mpmath.mpf(result.value) - (1 if m == n else 0)
    assert within(offset, 0, envelope + mpmath.mpf(result.total_bound))
    if m == n and envelope < 1:
        assert result.value > 0


@pytest.mark.parametrize(
    ("family", "w", "m", "n"),
    [
        ("positive", WeightProfile.create(12, 1), 1, 1),
        ("positive", WeightProfile.create(24, 1), 2, 3),
        ("positive", WeightProfile.create("15/2", 4), 1, 2),
        ("zero", WeightProfile.create(12, 1), 2, 0),
        ("negative", WeightProfile.create(12, 1), 1, -2),
        ("negative", WeightProfile.create("15/2", 4), 2, -1),
    ],
)
def test_maass_cutoff_is_sound(family, w, m, n):
    """Test that doubling the Maass cutoffs stays inside the first bound."""

    def compute(cutoff=None):
        if family == "positive":
            return maass_coeff_positive(w, m, n, 1e-8, cutoff=cutoff)
        if family == "zero":
            return maass_coeff_zero(w, m, 1e-8, cutoff=cutoff)
        return maass_coeff_negative(w, m, n, 1e-8, cutoff=cutoff)

    first = compute()
    second = compute(2 * first.c_used)
    assert second.c_used == 2 * first.c_used
    assert second.tail_bound <= first.tail_bound
    assert within(first.value, second.value, first.total_bound + second.rounding_bound)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_maass_zero_at_fixed_cutoff(weight12, m):
    """Test b(-m; 0) at C = 100 against its closed form through zeta(12)."""
    result = maass_coeff_zero(weight12, m, cutoff=100)
    assert result.c_used == 100
    with mpmath.workprec(512):
        divisor_sum = sum(mpmath.power(d, -11) for d in range(1, m + 1) if m % d == 0)
        exact = (
            -mpmath.power(2 * mpmath.pi, 12)
            * mpmath.power(m, 11)
            * divisor_sum
            / (mpmath.factorial(11) * mpmath.zeta(12))
        )
    assert result.tail_bound < 1e-9
    assert within(result.value, exact, result.total_bound)


def test_duality_random_tuples():
    """Test the xi duality identity on 20 seeded random (m, n, k, N) tuples."""
    rng = random.Random(20240915)
    weights = [
        WeightProfile.create(12, 1),
        WeightProfile.create(24, 1),
        WeightProfile.create("15/2", 4),
    ]
    for _ in range(20):
        w = rng.choice(weights)
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        left, right, bound = _duality_sides(w, m, n, 1e-9)
        assert within(left, right, bound), (w, m, n)


def test_imaginary_part_counts_as_error(weight12):
    """Test that a stray imaginary part widens the bound or fails the target."""
    noisy = (mpmath.mpc(1, "1e-6"), mpmath.mpf(0))
    with patch("poincare_relations.poincare._csum", return_value=noisy):
        result = classical_coeff(weight12, 1, 1, 1.0, cutoff=10)
        assert abs(result.imag_part) > 6e-6
        assert result.rounding_bound >= abs(result.imag_part)
        with pytest.raises(UnreachableTolerance):
            classical_coeff(weight12, 1, 1, 1e-9, cutoff=10)


def test_thread_count_does_not_change_result(weight12):
    """Test that chunked summation is deterministic across thread counts."""
    single = classical_coeff(weight12, 1, 1, config=RunConfig(threads=1), cutoff=300)
    pooled = classical_coeff(weight12, 1, 1, config=RunConfig(threads=4), cutoff=300)
    assert single.value == pooled.value
    assert single.rounding_bound == pooled.rounding_bound


@pytest.mark.parametrize(("k", "level"), [(12, 1), (24, 1)])
@pytest.mark.parametrize(("m", "n"), DUALITY_PAIRS)
def test_xi_image_duality(k, level, m, n):
    """Test xi_(2-k) Q(-m) = (4 pi m)^(k-1) / (k-2)! * P(m) coefficientwise."""
    w = WeightProfile.create(k, level)
    image = xi_image_coeff(w, m, n)
    classical = classical_coeff(w, m, n)
    with mpmath.workprec(512):
        kk = mpmath.mpf(k)
        factor = mpmath.power(4 * mpmath.pi * m, kk - 1) / mpmath.gamma(kk - 1)
        expected = factor * mpmath.mpf(classical.value)
        bound = factor * mpmath.mpf(classical.total_bound)
        bound += mpmath.mpf(image.total_bound)
    assert within(image.value, expected, bound)


@pytest.mark.parametrize(("m", "n"), DUALITY_PAIRS)
def test_duality_half_integral(weight15_2, m, n):
    """Test the same identity for k = 15/2 on Gamma_0(4)."""
    left, right, bound = _duality_sides(weight15_2, m, n, 1e-9)
    assert within(left, right, bound)


def test_maass_positive_sign(weight12):
    """Test b(-1, 12, 1; 1) < 0: the c = 1 term dominates with K = 1."""
    result = maass_coeff_positive(weight12, 1, 1)
    assert result.value < 0
    assert abs(result.imag_part) <= result.total_bound


def test_maass_positive_half_integral(weight15_2):
    """Test that b(-m; n) is real for half-integral weight."""
    result = maass_coeff_positive(weight15_2, 1, 1)
    assert abs(result.imag_part) <= result.total_bound


def test_maass_zero_envelope(weight12):
    """Test |b(-1; 0)| <= (2 pi)^12 / 11! * zeta(11)."""
    result = maass_coeff_zero(weight12, 1)
    envelope = (2 * math.pi) ** 12 / math.factorial(11) * 1.001
    assert abs(float(result.value)) <= envelope
    assert result.n == 0


def test_nonholomorphic_leading_term(weight12):
    """Test that c^-(-m) adds -1/(k-2)! to the c-sum."""
    partial = maass_coeff_negative(weight12, 2, -2)
    full = nonholomorphic_coeff(weight12, 2, -2)
    leading = -1 / math.factorial(10)
    assert float(full.value) == pytest.approx(float(partial.value) + leading, rel=1e-12)
    off_diagonal = nonholomorphic_coeff(weight12, 2, -3)
    assert off_diagonal.value == maass_coeff_negative(weight12, 2, -3).value


def test_nonholomorphic_term_at_height(weight12):
    """Test c^-(n) Gamma(k-1, 4 pi |n| y) against mpmath's gammainc."""
    coeff = nonholomorphic_coeff(weight12, 1, -1)
    term = maass_nonholomorphic_term(weight12, 1, -1, "0.5")
    expected = float(coeff.value) * float(mpmath.gammainc(11, 2 * mpmath.pi))
    assert float(term.value) == pytest.approx(expected, rel=1e-10)
    with pytest.raises(InvalidWeightError):
        maass_nonholomorphic_term(weight12, 1, -1, 0)


def test_weight_two_is_heuristic():
    """Test that k = 2 flags its tail estimate as heuristic."""
    w = WeightProfile.create(2, 1)
    result = classical_coeff(w, 1, 1, 100, cutoff=200)
    assert result.heuristic
    assert result.c_used == 200


@pytest.mark.parametrize(
    ("w", "m", "n"),
    [
        (WeightProfile.create(13, 1), 1, 1),
        (WeightProfile.create(12, 1), 0, 1),
        (WeightProfile.create(12, 1), 1, -1),
    ],
)
def test_classical_rejects(w, m, n):
    """Test odd integral weight and non-positive indices."""
    with pytest.raises(InvalidWeightError):
        classical_coeff(w, m, n)


def test_negative_family_needs_negative_n(weight12):
    """Test the sign check of the nonholomorphic family."""
    with pytest.raises(InvalidWeightError):
        maass_coeff_negative(weight12, 1, 1)


def test_unreachable_precision(weight24):
    """Test that rounding above the target raises UnreachableTolerance."""
    config = RunConfig(precision_bits=64)
    with pytest.raises(UnreachableTolerance):
        classical_coeff(weight24, 1, 1, 1e-20, config=config)


def test_unreachable_cutoff(weight15_2):
    """Test that a tail above the target at max_cutoff raises UnreachableTolerance."""
    config = RunConfig(max_cutoff=8)
    with pytest.raises(UnreachableTolerance):
        classical_coeff(weight15_2, 3, 3, 1e-12, config=config)


def test_poincare_coeff_dispatch(weight12):
    """Test family dispatch and its validation."""
    with patch(
        "poincare_relations.poincare.maass_coeff_zero", wraps=maass_coeff_zero
    ) as zero:
        poincare_coeff(FAMILY_MAASS_ZERO, weight12, 1, 0)
    zero.assert_called_once()
    with pytest.raises(InvalidWeightError):
        poincare_coeff(FAMILY_MAASS_ZERO, weight12, 1, 2)
    with pytest.raises(InvalidWeightError):
        poincare_coeff("R", weight12, 1, 1)

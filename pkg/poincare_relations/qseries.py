"""Exact truncated Laurent series in q and the level-one generators E_s, Delta, j."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import TYPE_CHECKING, Any

import voluptuous as vol
from sympy import bernoulli, divisor_sigma

from .const import ADMISSIBLE_EISENSTEIN_WEIGHTS
from .errors import InvalidSeriesError, InvalidWeightError, TruncationError
from .exactarith import admissible_pair, dim_cusp_forms_level1
from .helpers import to_fraction

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator, Mapping, Sequence

_LOGGER = logging.getLogger(__name__)

QSERIES_SCHEMA = vol.Schema(
    {
        vol.Required("lowest_exponent"): vol.Coerce(int),
        vol.Required("trunc_order"): vol.Coerce(int),
        vol.Required("coeffs"): [vol.Coerce(to_fraction)],
    }
)

PRINCIPAL_PART_SCHEMA = vol.Schema(
    {vol.Coerce(int): vol.Coerce(to_fraction)},
)


@dataclass(frozen=True, slots=True)
class QSeries:
    """
    A Laurent series sum_n a_n q^n known exactly for n <= trunc_order.

    `coefficients[i]` is the coefficient of q^(lowest_exponent + i). The
    leading coefficient is nonzero; a series that vanishes up to its
    truncation has no coefficients and lowest_exponent = trunc_order + 1.
    Coefficients above trunc_order are unknown, not zero.
    """

    lowest_exponent: int
    coefficients: tuple[Fraction, ...]
    trunc_order: int

    def __post_init__(self) -> None:
        """Check the normal form produced by QSeries.build."""
        expected = self.trunc_order - self.lowest_exponent + 1
        if expected < 0 or len(self.coefficients) != expected:
            msg = (
                f"Malformed series: lowest {self.lowest_exponent}, "
                f"trunc {self.trunc_order}, {len(self.coefficients)} coefficients"
            )
            raise InvalidSeriesError(msg)
        if self.coefficients and self.coefficients[0] == 0:
            msg = "Series leading coefficient must be nonzero"
            raise InvalidSeriesError(msg)

    @classmethod
    def build(
        cls, lowest: int, coeffs: Iterable[Any], trunc_order: int
    ) -> QSeries:
        """Normalize raw coefficients starting at q^lowest into a QSeries."""
        values = [to_fraction(c) for c in coeffs][: max(trunc_order - lowest + 1, 0)]
        values.extend([Fraction(0)] * (trunc_order - lowest + 1 - len(values)))
        skip = 0
        while skip < len(values) and values[skip] == 0:
            skip += 1
        if skip == len(values):
            return cls.zero(trunc_order)
        return cls(lowest + skip, tuple(values[skip:]), trunc_order)

    @classmethod
    def zero(cls, trunc_order: int) -> QSeries:
        """Return 0 + O(q^(trunc_order + 1))."""
        return cls(trunc_order + 1, (), trunc_order)

    @classmethod
    def one(cls, trunc_order: int) -> QSeries:
        """Return 1 + O(q^(trunc_order + 1))."""
        return cls.monomial(0, 1, trunc_order)

    @classmethod
    def monomial(cls, exponent: int, coeff: Any, trunc_order: int) -> QSeries:
        """Return coeff * q^exponent + O(q^(trunc_order + 1))."""
        if exponent > trunc_order:
            return cls.zero(trunc_order)
        return cls.build(exponent, [coeff], trunc_order)

    @property
    def is_zero(self) -> bool:
        """Return True when every known coefficient vanishes."""
        return not self.coefficients

    def coefficient(self, n: int) -> Fraction:
        """Return the coefficient of q^n; raise TruncationError past trunc_order."""
        if n > self.trunc_order:
            msg = (
                f"Coefficient of q^{n} unknown: series truncated at "
                f"q^{self.trunc_order}"
            )
            raise TruncationError(msg)
        if n < self.lowest_exponent:
            return Fraction(0)
        return self.coefficients[n - self.lowest_exponent]

    __getitem__ = coefficient

    def items(self) -> Iterator[tuple[int, Fraction]]:
        """Yield (exponent, coefficient) for every nonzero known coefficient."""
        for offset, value in enumerate(self.coefficients):
            if value:
                yield self.lowest_exponent + offset, value

    def truncate(self, order: int) -> QSeries:
        """Forget every coefficient above q^order."""
        if order >= self.trunc_order:
            return self
        return QSeries.build(
            self.lowest_exponent, self.coefficients, order
        )

    def shift(self, exponent: int) -> QSeries:
        """Multiply by q^exponent."""
        return QSeries(
            self.lowest_exponent + exponent,
            self.coefficients,
            self.trunc_order + exponent,
        )

    def scale(self, factor: Any) -> QSeries:
        """Multiply every coefficient by an exact rational."""
        value = to_fraction(factor)
        if value == 0:
            return QSeries.zero(self.trunc_order)
        return QSeries(
            self.lowest_exponent,
            tuple(c * value for c in self.coefficients),
            self.trunc_order,
        )

    def principal_part(self) -> PrincipalPart:
        """Return the terms with negative exponent as a PrincipalPart."""
        return PrincipalPart.from_mapping(
            {-n: value for n, value in self.items() if n < 0}
        )

    def has_integer_coefficients(self) -> bool:
        """Return True when every known coefficient is an integer."""
        return all(c.denominator == 1 for c in self.coefficients)

    def to_json_dict(self) -> dict[str, Any]:
        """Serialize as {lowest_exponent, trunc_order, coeffs: ["p/q", ...]}."""
        return {
            "lowest_exponent": self.lowest_exponent,
            "trunc_order": self.trunc_order,
            "coeffs": [str(c) for c in self.coefficients],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping[str, Any]) -> QSeries:
        """Validate and load a dict produced by to_json_dict."""
        try:
            valid = QSERIES_SCHEMA(dict(data))
        except (vol.Invalid, ZeroDivisionError) as err:
            msg = f"Invalid q-series JSON: {err}"
            raise InvalidSeriesError(msg) from err
        return cls.build(
            valid["lowest_exponent"], valid["coeffs"], valid["trunc_order"]
        )

    def __add__(self, other: Any) -> QSeries:
        if isinstance(other, QSeries):
            return series_add(self, other)
        return series_add(self, QSeries.monomial(0, other, self.trunc_order))

    __radd__ = __add__

    def __neg__(self) -> QSeries:
        return self.scale(-1)

    def __sub__(self, other: Any) -> QSeries:
        return self + (-other)

    def __rsub__(self, other: Any) -> QSeries:
        return (-self) + other

    def __mul__(self, other: Any) -> QSeries:
        if isinstance(other, QSeries):
            return series_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> QSeries:
        if isinstance(other, QSeries):
            return series_mul(self, series_inv(other))
        return self.scale(1 / to_fraction(other))

    def __pow__(self, exponent: int) -> QSeries:
        return series_pow(self, exponent)


@dataclass(frozen=True, slots=True)
class PrincipalPart:
    """Coefficients beta_m of q^(-m) for m >= 1, all nonzero."""

    terms: dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Reject nonpositive exponents and zero coefficients."""
        for m, beta in self.terms.items():
            if not isinstance(m, int) or m < 1:
                msg = f"Principal part exponents must be positive, got {m!r}"
                raise InvalidSeriesError(msg)
            if beta == 0:
                msg = f"Principal part coefficient of q^-{m} must be nonzero"
                raise InvalidSeriesError(msg)

    @classmethod
    def from_mapping(cls, terms: Mapping[Any, Any]) -> PrincipalPart:
        """Build from {m: beta}, dropping zero coefficients."""
        try:
            valid = PRINCIPAL_PART_SCHEMA(dict(terms))
        except (vol.Invalid, ZeroDivisionError) as err:
            msg = f"Invalid principal part: {err}"
            raise InvalidSeriesError(msg) from err
        return cls({m: beta for m, beta in sorted(valid.items()) if beta != 0})

    @property
    def degree(self) -> int:
        """Return the largest pole order (0 for an empty principal part)."""
        return max(self.terms, default=0)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.terms.items())))

    def as_series(self, trunc_order: int = 0) -> QSeries:
        """Return sum beta_m q^(-m) as a QSeries with zeros up to trunc_order."""
        if not self.terms:
            return QSeries.zero(trunc_order)
        lowest = -self.degree
        coeffs = [self.terms.get(-n, Fraction(0)) for n in range(lowest, 0)]
        return QSeries.build(lowest, coeffs, trunc_order)

    def to_json_dict(self) -> dict[str, str]:
        """Serialize as {"m": "p/q"}."""
        return {str(m): str(beta) for m, beta in sorted(self.terms.items())}


def series_add(a: QSeries, b: QSeries) -> QSeries:
    """Return a + b known up to the smaller truncation order."""
    trunc = min(a.trunc_order, b.trunc_order)
    lowest = min(a.lowest_exponent, b.lowest_exponent)
    if lowest > trunc:
        return QSeries.zero(trunc)
    coeffs = [a.coefficient(n) + b.coefficient(n) for n in range(lowest, trunc + 1)]
    return QSeries.build(lowest, coeffs, trunc)


def series_mul(a: QSeries, b: QSeries) -> QSeries:
    """
    Return a * b.

    The product is known up to min(T_a + v_b, T_b + v_a), where T is the
    truncation order and v the lowest exponent of each factor.
    """
    trunc = min(
        a.trunc_order + b.lowest_exponent, b.trunc_order + a.lowest_exponent
    )
    if a.is_zero or b.is_zero:
        return QSeries.zero(trunc)
    lowest = a.lowest_exponent + b.lowest_exponent
    coeffs = [Fraction(0)] * (trunc - lowest + 1)
    for i, x in enumerate(a.coefficients):
        if not x:
            continue
        limit = min(len(b.coefficients), len(coeffs) - i)
        for j in range(limit):
            coeffs[i + j] += x * b.coefficients[j]
    return QSeries.build(lowest, coeffs, trunc)


def series_inv(a: QSeries) -> QSeries:
    """
    Return 1 / a, keeping the relative precision of a.

    For a = q^v (a_0 + a_1 q + ...) + O(q^(T+1)) the inverse starts at q^-v and
    is known up to q^(T - 2v).
    """
    if a.is_zero:
        msg = (
            "Cannot invert a series with no nonzero coefficient up to "
            f"q^{a.trunc_order}"
        )
        raise TruncationError(msg)
    v = a.lowest_exponent
    relative = a.trunc_order - v
    lead = a.coefficients[0]
    inverse = [1 / lead]
    for n in range(1, relative + 1):
        acc = sum(
            (a.coefficients[i] * inverse[n - i] for i in range(1, n + 1)),
            Fraction(0),
        )
        inverse.append(-acc / lead)
    return QSeries.build(-v, inverse, -v + relative)


def series_pow(a: QSeries, exponent: int) -> QSeries:
    """Return a^exponent by repeated squaring; negative powers invert first."""
    if exponent == 0:
        return QSeries.one(max(a.trunc_order - a.lowest_exponent, 0))
    if exponent < 0:
        return series_pow(series_inv(a), -exponent)
    result: QSeries | None = None
    base = a
    while exponent:
        if exponent & 1:
            result = base if result is None else series_mul(result, base)
        exponent >>= 1
        if exponent:
            base = series_mul(base, base)
    assert result is not None  # noqa: S101
    return result


def eisenstein_bernoulli_factor(s: int) -> Fraction:
    """Return -2s / B_s, the coefficient of sigma_(s-1)(n) q^n in E_s."""
    b_s = bernoulli(s)
    return Fraction(-2 * s) / Fraction(int(b_s.p), int(b_s.q))


@lru_cache(maxsize=64)
def eisenstein(s: int, order: int) -> QSeries:
    """Return the normalized Eisenstein series E_s up to q^order (E_0 = 1)."""
    if s not in ADMISSIBLE_EISENSTEIN_WEIGHTS:
        msg = (
            f"Eisenstein weight must be one of {ADMISSIBLE_EISENSTEIN_WEIGHTS}, "
            f"got {s}"
        )
        raise InvalidWeightError(msg)
    if s == 0:
        return QSeries.one(order)
    factor = eisenstein_bernoulli_factor(s)
    coeffs = [Fraction(1)]
    coeffs.extend(factor * int(divisor_sigma(n, s - 1)) for n in range(1, order + 1))
    return QSeries.build(0, coeffs, order)


def _euler_product(order: int) -> QSeries:
    """Return prod_(n>=1) (1 - q^n) from the pentagonal number theorem."""
    coeffs = [0] * (order + 1)
    coeffs[0] = 1
    k = 1
    while k * (3 * k - 1) // 2 <= order:
        sign = -1 if k % 2 else 1
        for pentagonal in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if pentagonal <= order:
                coeffs[pentagonal] += sign
        k += 1
    return QSeries.build(0, coeffs, order)


@lru_cache(maxsize=64)
def delta(order: int) -> QSeries:
    """Return Delta = q prod (1 - q^n)^24 up to q^order."""
    if order < 1:
        msg = f"Delta needs order >= 1, got {order}"
        raise TruncationError(msg)
    return series_pow(_euler_product(order - 1), 24).shift(1)


@lru_cache(maxsize=64)
def j_invariant(order: int) -> QSeries:
    """Return j = E_4^3 / Delta up to q^order."""
    if order < -1:
        msg = f"j needs order >= -1, got {order}"
        raise TruncationError(msg)
    working = order + 2
    result = series_pow(eisenstein(4, working), 3) / delta(working)
    return result.truncate(order)


@lru_cache(maxsize=64)
def tau_coeffs(r: int, s: int, order: int) -> QSeries:
    """Return E_s / Delta^r = sum_n tau(r, s; n) q^n up to q^order."""
    if r < 1:
        msg = f"Pole order r must be positive, got {r}"
        raise InvalidWeightError(msg)
    working = max(order + 2 * r, r)
    result = eisenstein(s, working) / series_pow(delta(working), r)
    return result.truncate(order)


def _miller_monomial(k: int, j: int, order: int) -> QSeries:
    """Return Delta^j E_4^b E_6^c with 4b + 6c = k - 12j."""
    rest = k - 12 * j
    c = 1 if rest % 4 == 2 else 0  # noqa: PLR2004
    b = (rest - 6 * c) // 4
    result = series_pow(delta(order), j)
    if b:
        result *= series_pow(eisenstein(4, order), b)
    if c:
        result *= eisenstein(6, order)
    return result.truncate(order)


def cusp_basis_level1(k: int, order: int) -> list[QSeries]:
    """
    Return the reduced basis g_1, ..., g_d of S_k(SL_2(Z)).

    Each g_i = q^i + O(q^(d+1)) with integer coefficients, obtained by back
    substitution over the monomials Delta^j E_4^b E_6^c.
    """
    d = dim_cusp_forms_level1(k)
    if d == 0:
        return []
    order = max(order, d)
    basis = [_miller_monomial(k, j, order) for j in range(1, d + 1)]
    for i in range(d - 2, -1, -1):
        reduced = basis[i]
        for j in range(i + 1, d):
            pivot = reduced.coefficient(j + 1)
            if pivot:
                reduced -= basis[j].scale(pivot)
        basis[i] = reduced
    _LOGGER.debug("Reduced cusp basis for k=%s: d=%s, order=%s", k, d, order)
    return basis


def _strip_polynomial(poly: Sequence[Any]) -> list[Fraction]:
    """Return polynomial coefficients (constant first) without trailing zeros."""
    values = [to_fraction(c) for c in poly]
    while values and values[-1] == 0:
        values.pop()
    return values


def weakly_holomorphic_level1(
    k: Any, poly: Sequence[Any], order: int
) -> QSeries:
    """
    Return (E_s / Delta^r) F(j) of weight 2 - k up to q^order.

    `poly` lists the coefficients of F, constant term first; (s, r) is the
    admissible pair with s - 12r = 2 - k.
    """
    s, r = admissible_pair(to_fraction(k))
    coeffs = _strip_polynomial(poly)
    if not coeffs:
        return QSeries.zero(order)
    working = order + r + len(coeffs) + 1
    base = tau_coeffs(r, s, working)
    j_series = j_invariant(working)
    total = QSeries.zero(working)
    power = QSeries.one(working)
    for e, coeff in enumerate(coeffs):
        if e:
            power *= j_series
        if coeff:
            total += (base * power).scale(coeff)
    return total.truncate(order)


def j_polynomial_of(f: QSeries) -> tuple[Fraction, ...] | None:
    """
    Return F (constant term first) with f = F(j), or None if f is not one.

    Every known coefficient of f - F(j) must vanish; f needs trunc_order >= 0.
    """
    if f.trunc_order < 0:
        msg = "Need the constant term to recover a polynomial in j"
        raise TruncationError(msg)
    degree = max(-f.lowest_exponent, 0) if not f.is_zero else 0
    working = f.trunc_order + degree + 1
    j_series = j_invariant(working)
    powers = [QSeries.one(working)]
    for _ in range(degree):
        powers.append(powers[-1] * j_series)
    residual = f
    poly = [Fraction(0)] * (degree + 1)
    for e in range(degree, -1, -1):
        coeff = residual.coefficient(-e)
        if coeff:
            poly[e] = coeff
            residual -= powers[e].scale(coeff)
    if not residual.is_zero:
        _LOGGER.debug(
            "Series is not a polynomial in j: residual starts at q^%s",
            residual.lowest_exponent,
        )
        return None
    return tuple(_strip_polynomial(poly))

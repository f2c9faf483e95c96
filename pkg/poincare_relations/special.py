"""Bessel functions and incomplete gamma with certified absolute error bounds."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .const import DEFAULT_PRECISION_BITS, SERIES_MAX_TERMS, SERIES_RATIO_LIMIT
from .errors import InvalidWeightError, UnreachableTolerance
from .helpers import to_fraction, unit_roundoff, working_context

_LOGGER = logging.getLogger(__name__)

GUARD_BITS = 10


@dataclass(frozen=True, slots=True)
class BoundedReal:
    """A real number together with a bound on its absolute error."""

    value: Any  # mpf
    abs_error: Any  # mpf

    def __float__(self) -> float:
        """Return the value as a float."""
        return float(self.value)

    def contains(self, other: Any) -> bool:
        """Return True when `other` lies within value +- abs_error."""
        return abs(self.value - other) <= self.abs_error


def _order(ctx: Any, nu: Fraction | int) -> Any:
    """Convert an order nu to an mpf of the active context."""
    frac = to_fraction(nu)
    return ctx.mpf(frac.numerator) / frac.denominator


def _series_precision(prec: int, x: Any) -> int:
    """Return the working precision for a series with terms up to e^x in size."""
    return prec + int(float(x) / math.log(2)) + GUARD_BITS


def _bessel_series(
    nu: Fraction | int,
    x: Any,
    *,
    alternating: bool,
    precision_bits: int,
    x_error: Any,
) -> BoundedReal:
    """
    Sum (x/2)^nu * sum_j (+-1)^j (x/2)^(2j) / (j! Gamma(j + nu + 1)).

    The loop stops once the term ratio is at most SERIES_RATIO_LIMIT and the
    next term is below one unit of roundoff relative to the absolute sum, so
    the tail is bounded by twice that next term.
    """
    with working_context(precision_bits) as outer:
        x_val = outer.mpf(x)
        if x_val < 0:
            msg = f"Bessel argument must be non-negative, got {x_val}"
            raise InvalidWeightError(msg)
        order = _order(outer, nu)
        if order <= -1:
            msg = f"Bessel order must exceed -1, got {nu}"
            raise InvalidWeightError(msg)
        x_err = outer.mpf(x_error)
        wp = _series_precision(outer.prec, x_val)

    if x_val == 0:
        with working_context(precision_bits) as ctx:
            value = ctx.mpf(1) if order == 0 else ctx.mpf(0)
            propagated = _propagated(
                ctx, _order(ctx, nu), x_val, x_err, 1, alternating=alternating
            )
            return BoundedReal(value=value, abs_error=propagated)

    with working_context(wp) as ctx:
        half_x = ctx.mpf(x_val) / 2
        order = _order(ctx, nu)
        square = half_x * half_x
        term = ctx.power(half_x, order) / ctx.gamma(order + 1)
        total = term
        abs_total = abs(term)
        j = 0
        while True:
            denom = (j + 1) * (j + 1 + order)
            ratio = square / denom
            term = -term * ratio if alternating else term * ratio
            negligible = abs(term) <= unit_roundoff(ctx, abs_total)
            if ratio <= SERIES_RATIO_LIMIT and negligible:
                break
            total += term
            abs_total += abs(term)
            j += 1
            if j >= SERIES_MAX_TERMS:
                msg = (
                    f"Bessel series for nu={nu}, x={float(x_val):.6g} did not converge "
                    f"within {SERIES_MAX_TERMS} terms"
                )
                raise UnreachableTolerance(msg)
        tail = 2 * abs(term)
        rounding = unit_roundoff(ctx, abs_total * (2 * j + 10))
        error = tail + rounding

    with working_context(precision_bits) as ctx:
        value = +ctx.mpf(total)
        # Final rounding to the caller's precision
        error = ctx.mpf(error) + unit_roundoff(ctx, abs(value))
        propagated = _propagated(
            ctx, _order(ctx, nu), x_val, x_err, abs_total, alternating=alternating
        )
        if _LOGGER.isEnabledFor(logging.DEBUG):
            _LOGGER.debug(
                "Bessel %s_%s(%s): %d terms, error %s",
                "J" if alternating else "I",
                nu,
                ctx.nstr(x_val, 8),
                j + 1,
                ctx.nstr(error + propagated, 3),
            )
        return BoundedReal(value=value, abs_error=error + propagated)


def _propagated(
    ctx: Any, order: Any, x: Any, x_error: Any, magnitude: Any, *, alternating: bool
) -> Any:
    """Bound the change caused by an error of `x_error` in the argument."""
    if not x_error:
        return ctx.mpf(0)
    if alternating:
        # |J_nu'| <= 1 for nu >= 1, and the absolute series bounds it otherwise
        slope = ctx.mpf(1) if order >= 1 else ctx.mpf(magnitude) * 2
        return slope * x_error
    # I_nu' = I_(nu+1) + (nu/x) I_nu <= (1 + nu/x) I_nu, taken at x + x_error
    x_hi = x + x_error
    growth = ctx.exp(x_error)
    slope = ctx.mpf(magnitude) * growth * (1 + order / x_hi if x_hi else 1)
    return 2 * slope * x_error


def bessel_j(
    nu: Fraction | int,
    x: Any,
    *,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    x_error: Any = 0,
) -> BoundedReal:
    """Return J_nu(x) for real nu > -1 and x >= 0 with a rigorous error bound."""
    return _bessel_series(
        nu, x, alternating=True, precision_bits=precision_bits, x_error=x_error
    )


def bessel_i(
    nu: Fraction | int,
    x: Any,
    *,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    x_error: Any = 0,
) -> BoundedReal:
    """Return I_nu(x) for real nu > -1 and x >= 0 with a rigorous error bound."""
    return _bessel_series(
        nu, x, alternating=False, precision_bits=precision_bits, x_error=x_error
    )


def incomplete_gamma_upper(
    s: Fraction | int,
    x: Any,
    *,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> BoundedReal:
    """
    Return Gamma(s, x) for s > 0 and x >= 0.

    Uses Gamma(s) - x^s e^-x sum_n x^n / (s (s+1) ... (s+n)); every term is
    positive, and the working precision is raised by x / ln 2 bits to absorb
    the cancellation against Gamma(s).
    """
    with working_context(precision_bits) as outer:
        x_val = outer.mpf(x)
        order = _order(outer, s)
        if order <= 0:
            msg = f"Incomplete gamma needs s > 0, got {s}"
            raise InvalidWeightError(msg)
        if x_val < 0:
            msg = f"Incomplete gamma needs x >= 0, got {x_val}"
            raise InvalidWeightError(msg)
        wp = _series_precision(outer.prec, x_val)

    with working_context(wp) as ctx:
        order = _order(ctx, s)
        complete = ctx.gamma(order)
        if x_val == 0:
            lower = ctx.mpf(0)
            tail = ctx.mpf(0)
            n = 0
        else:
            x_wp = ctx.mpf(x_val)
            term = 1 / order
            total = term
            n = 0
            while True:
                ratio = x_wp / (order + n + 1)
                term *= ratio
                if ratio <= SERIES_RATIO_LIMIT and term <= unit_roundoff(ctx, total):
                    break
                total += term
                n += 1
                if n >= SERIES_MAX_TERMS:
                    msg = (
                        f"Incomplete gamma series for s={s}, x={float(x_val):.6g} "
                        f"did not converge within {SERIES_MAX_TERMS} terms"
                    )
                    raise UnreachableTolerance(msg)
            prefactor = ctx.power(x_wp, order) * ctx.exp(-x_wp)
            lower = prefactor * total
            tail = 2 * prefactor * term
        value = complete - lower
        rounding = unit_roundoff(ctx, (abs(complete) + abs(lower)) * (n + 10))
        error = tail + rounding

    with working_context(precision_bits) as ctx:
        result = +ctx.mpf(value)
        return BoundedReal(
            value=result, abs_error=ctx.mpf(error) + unit_roundoff(ctx, abs(result))
        )

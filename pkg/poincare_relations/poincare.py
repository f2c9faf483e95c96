"""
Fourier coefficients of Poincare series from their Kloosterman-Bessel c-sums.

Every coefficient is a finite sum over moduli c = N, 2N, ..., C plus a
rigorous bound on the omitted tail c > C and on the accumulated rounding.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

from .config import RunConfig
from .const import (
    FAMILY_CLASSICAL,
    FAMILY_MAASS_NEGATIVE,
    FAMILY_MAASS_POSITIVE,
    FAMILY_MAASS_ZERO,
    HEURISTIC_CUTOFF,
    SUMMATION_CHUNK_SIZE,
)
from .errors import InvalidWeightError, UnreachableTolerance
from .exactarith import WeightProfile, kloosterman
from .helpers import unit_roundoff, working_context
from .special import BoundedReal, bessel_i, bessel_j, incomplete_gamma_upper

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

_LOGGER = logging.getLogger(__name__)

FAMILY_XI_IMAGE = "xi"


@dataclass(frozen=True, slots=True)
class CoeffResult:
    """
    A Fourier coefficient with a certified error bound.

    The true coefficient lies within value +- total_bound. `imag_part` is the
    computed imaginary part of a coefficient that is real in exact
    arithmetic; it must itself lie within total_bound.
    """

    family: str
    m: int
    n: int
    weight: WeightProfile
    value: Any  # mpf
    imag_part: Any  # mpf
    tail_bound: Any  # mpf
    rounding_bound: Any  # mpf
    c_used: int
    heuristic: bool = False

    @property
    def total_bound(self) -> Any:
        """Return tail_bound + rounding_bound."""
        return self.tail_bound + self.rounding_bound

    def contains(self, other: Any) -> bool:
        """Return True when `other` lies in value +- total_bound."""
        return abs(self.value - other) <= self.total_bound

    def as_dict(self) -> dict[str, Any]:
        """Return a JSON friendly summary."""
        return {
            "family": self.family,
            "m": self.m,
            "n": self.n,
            "k": str(self.weight.k),
            "N": self.weight.N,
            "value": _nstr(self.value),
            "total_bound": _nstr(self.total_bound, 6),
            "tail_bound": _nstr(self.tail_bound, 6),
            "rounding_bound": _nstr(self.rounding_bound, 6),
            "c_used": self.c_used,
            "heuristic": self.heuristic,
        }


def _nstr(value: Any, digits: int = 20) -> str:
    """Format an mpmath number with `digits` significant digits."""
    with working_context(max(4 * digits, 64)) as ctx:
        return ctx.nstr(value, digits)


def _check_profile(w: WeightProfile) -> None:
    """Reject weights for which the Poincare series vanish identically."""
    if w.k < 2:  # noqa: PLR2004
        msg = f"Poincare coefficients need k >= 2, got {w.k}"
        raise InvalidWeightError(msg)
    if w.is_integral and not w.is_even:
        msg = (
            f"Odd integral weight {w.k}: -I lies in Gamma_0({w.N}) and the "
            "Poincare series vanish identically"
        )
        raise InvalidWeightError(msg)


def _check_index(name: str, value: int, *, sign: int) -> None:
    """Require an integer index of the given sign (1, 0 or -1)."""
    if not isinstance(value, int) or isinstance(value, bool):
        msg = f"{name} must be an integer, got {value!r}"
        raise InvalidWeightError(msg)
    if (value > 0) - (value < 0) != sign:
        kind = {1: "positive", 0: "zero", -1: "negative"}[sign]
        msg = f"{name} must be {kind}, got {value}"
        raise InvalidWeightError(msg)


def _resolve(
    config: RunConfig | None, target_error: float | None
) -> tuple[RunConfig, float]:
    """Return the effective configuration and target error."""
    cfg = config or RunConfig()
    target = cfg.target_error if target_error is None else float(target_error)
    if target <= 0:
        msg = f"target_error must be positive, got {target}"
        raise InvalidWeightError(msg)
    return cfg, target


@dataclass(frozen=True, slots=True)
class _Cutoff:
    """A chosen c-sum cutoff with its tail bound."""

    c_max: int
    tail: Any
    heuristic: bool


def _power_tail(ctx: Any, w: WeightProfile, scale: Any, c_max: int) -> Any:
    """
    Bound scale * sum_(c > C, N | c) c^(1-k).

    Integral comparison gives N^(1-k) (C/N)^(2-k) / (k-2).
    """
    k = ctx.mpf(w.k.numerator) / w.k.denominator
    big_n = w.N
    return (
        scale
        * ctx.power(big_n, 1 - k)
        * ctx.power(ctx.mpf(c_max) / big_n, 2 - k)
        / (k - 2)
    )


def _choose_cutoff(
    ctx: Any,
    w: WeightProfile,
    target: float,
    cfg: RunConfig,
    tail_at: Callable[[int], Any],
    cutoff: int | None,
) -> _Cutoff:
    """
    Pick the smallest multiple of N whose tail bound is at most target / 2.

    `tail_at(C)` must be nonincreasing in C. An explicit `cutoff` is used as
    given (rounded up to a multiple of N).
    """
    big_n = w.N
    if cutoff is not None:
        c_max = max(-(-cutoff // big_n), 1) * big_n
        return _Cutoff(c_max, tail_at(c_max), heuristic=False)

    goal = ctx.mpf(target) / 2
    limit = max(cfg.max_cutoff // big_n, 1)
    if tail_at(limit * big_n) > goal:
        msg = (
            f"Tail bound at the maximum cutoff {limit * big_n} exceeds "
            f"{target:.3g} for {w}; raise max_cutoff or the target error"
        )
        _LOGGER.warning(msg)
        raise UnreachableTolerance(msg)
    # Bisection over multiples of N
    low, high = 1, limit
    while low < high:
        mid = (low + high) // 2
        if tail_at(mid * big_n) <= goal:
            high = mid
        else:
            low = mid + 1
    c_max = low * big_n
    return _Cutoff(c_max, tail_at(c_max), heuristic=False)


def _heuristic_cutoff(
    ctx: Any, w: WeightProfile, cfg: RunConfig, scale: Any, cutoff: int | None
) -> _Cutoff:
    """
    Weight 2 cutoff: fixed C with a Weil-type C^(-1/2) log C tail estimate.

    The c-sum converges only conditionally here, so the estimate is flagged
    heuristic and is not a proof.
    """
    big_n = w.N
    c_max = cutoff if cutoff is not None else HEURISTIC_CUTOFF * big_n
    c_max = min(max(-(-c_max // big_n), 1) * big_n, max(cfg.max_cutoff, big_n))
    estimate = scale * ctx.log(c_max + 1) / ctx.sqrt(c_max)
    return _Cutoff(c_max, estimate, heuristic=True)


def _leading_scale(ctx: Any, prefactor: Any, mn: int, k: Any) -> Any:
    """Return |prefactor| (2 pi sqrt(mn))^(k-1) / Gamma(k), the c^(1-k) envelope."""
    return abs(prefactor) * ctx.power(2 * ctx.pi * ctx.sqrt(mn), k - 1) / ctx.gamma(k)


def _power_cutoff(
    ctx: Any,
    w: WeightProfile,
    target: float,
    cfg: RunConfig,
    scale: Any,
    cutoff: int | None,
) -> _Cutoff:
    """Choose the cutoff for a c-sum whose terms are at most scale * c^(1-k)."""
    if w.k == 2:  # noqa: PLR2004
        return _heuristic_cutoff(ctx, w, cfg, scale, cutoff)
    return _choose_cutoff(
        ctx, w, target, cfg, lambda c_max: _power_tail(ctx, w, scale, c_max), cutoff
    )


def _sum_chunk(
    moduli: Sequence[int], term: Callable[[Any, int], tuple[Any, Any]], prec: int
) -> tuple[Any, Any, Any, Any]:
    """Sum one chunk of moduli; return (re, im, error, magnitude)."""
    with working_context(prec) as ctx:
        re_parts = []
        im_parts = []
        error = ctx.mpf(0)
        magnitude = ctx.mpf(0)
        for c in moduli:
            value, term_error = term(ctx, c)
            value = ctx.mpc(value)
            re_parts.append(value.real)
            im_parts.append(value.imag)
            error += term_error
            magnitude += abs(value)
        return ctx.fsum(re_parts), ctx.fsum(im_parts), error, magnitude


def _csum(
    w: WeightProfile,
    c_max: int,
    term: Callable[[Any, int], tuple[Any, Any]],
    cfg: RunConfig,
) -> tuple[Any, Any]:
    """
    Return (sum, error) of term(c) over c = N, 2N, ..., c_max.

    Moduli are cut into fixed chunks; chunk sums are combined in order, so
    the result does not depend on the number of worker threads.
    """
    moduli = list(range(w.N, c_max + 1, w.N))
    chunks = [
        moduli[i : i + SUMMATION_CHUNK_SIZE]
        for i in range(0, len(moduli), SUMMATION_CHUNK_SIZE)
    ]
    prec = cfg.precision_bits
    if cfg.threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            partials = list(pool.map(lambda ch: _sum_chunk(ch, term, prec), chunks))
    else:
        partials = [_sum_chunk(ch, term, prec) for ch in chunks]

    with working_context(prec) as ctx:
        real = ctx.fsum(p[0] for p in partials)
        imag = ctx.fsum(p[1] for p in partials)
        error = ctx.fsum(p[2] for p in partials)
        magnitude = ctx.fsum(p[3] for p in partials)
        # Per-term products and both levels of summation
        error += unit_roundoff(ctx, magnitude * (len(moduli) + 2 * len(chunks) + 8))
        return ctx.mpc(real, imag), error


def _weight(ctx: Any, w: WeightProfile) -> Any:
    """Return k as an mpf."""
    return ctx.mpf(w.k.numerator) / w.k.denominator


def _i_power(ctx: Any, exponent: Any) -> Any:
    """Return i^exponent = e^(i pi exponent / 2)."""
    return ctx.expjpi(exponent / 2)


def _bessel_term(
    w_sum: WeightProfile,
    m: int,
    n: int,
    w: WeightProfile,
    bessel: Callable[..., BoundedReal],
    prec: int,
) -> Callable[[Any, int], tuple[Any, Any]]:
    """Build c -> K(m, n, c)/c * Bessel_(k-1)(4 pi sqrt(|mn|)/c) with its error."""
    order = w.k - 1
    root_mn = abs(m * n)

    def term(ctx: Any, c: int) -> tuple[Any, Any]:
        kv = kloosterman(w_sum, m, n, c, precision_bits=prec)
        x = 4 * ctx.pi * ctx.sqrt(root_mn) / c
        x_error = unit_roundoff(ctx, 8 * x)
        bv = bessel(order, x, precision_bits=prec, x_error=x_error)
        k_abs = abs(kv.value)
        value = kv.value * bv.value / c
        error = (
            k_abs * bv.abs_error + kv.rounding_bound * (abs(bv.value) + bv.abs_error)
        ) / c + unit_roundoff(ctx, 4 * abs(value))
        return value, error

    return term


def _finish(
    family: str,
    m: int,
    n: int,
    w: WeightProfile,
    prefactor: Any,
    shift: Any,
    total: Any,
    error: Any,
    cut: _Cutoff,
    target: float,
    cfg: RunConfig,
) -> CoeffResult:
    """Scale a c-sum by its prefactor, add the exact shift and certify."""
    with working_context(cfg.precision_bits) as ctx:
        scaled = ctx.mpc(prefactor) * total
        value = ctx.mpf(shift) + scaled.real
        size = abs(prefactor)
        rounding = size * error + unit_roundoff(ctx, 8 * (abs(scaled) + abs(value)))
        # The coefficient is real; a computed imaginary part is error.
        if abs(scaled.imag) > rounding:
            _LOGGER.debug(
                "Imaginary part %s exceeds the rounding bound %s; widening",
                ctx.nstr(scaled.imag, 3),
                ctx.nstr(rounding, 3),
            )
            rounding = abs(scaled.imag)
        tail = ctx.mpf(cut.tail)
        result = CoeffResult(
            family=family,
            m=m,
            n=n,
            weight=w,
            value=value,
            imag_part=scaled.imag,
            tail_bound=tail,
            rounding_bound=rounding,
            c_used=cut.c_max,
            heuristic=cut.heuristic,
        )
        if result.total_bound > target:
            msg = (
                f"{family} coefficient (m={m}, n={n}, {w}) reached "
                f"{ctx.nstr(result.total_bound, 3)} > target {target:.3g} at "
                f"{cfg.precision_bits} bits and C={cut.c_max}"
            )
            _LOGGER.warning(msg)
            raise UnreachableTolerance(msg)
        if cut.heuristic:
            _LOGGER.warning(
                "Weight 2 %s coefficient (m=%s, n=%s) uses a heuristic tail estimate",
                family,
                m,
                n,
            )
        _LOGGER.debug(
            "%s(m=%s, n=%s, %s) = %s +- %s with C=%s",
            family,
            m,
            n,
            w,
            ctx.nstr(value, 15),
            ctx.nstr(result.total_bound, 3),
            cut.c_max,
        )
        return result


def classical_coeff(
    w: WeightProfile,
    m: int,
    n: int,
    target_error: float | None = None,
    *,
    config: RunConfig | None = None,
    cutoff: int | None = None,
) -> CoeffResult:
    """
    Return a(m, k, N; n), the n-th coefficient of the cuspidal Poincare series.

    a = delta_(m,n) + 2 pi i^-k (n/m)^((k-1)/2)
        * sum_(N | c) K_k(m, n, c)/c J_(k-1)(4 pi sqrt(mn)/c).
    The phase i^-k equals i^k for even k and keeps the result real for
    half-integral k.
    """
    _check_profile(w)
    _check_index("m", m, sign=1)
    _check_index("n", n, sign=1)
    cfg, target = _resolve(config, target_error)
    prec = cfg.precision_bits

    with working_context(prec) as ctx:
        k = _weight(ctx, w)
        ratio = ctx.power(ctx.mpf(n) / m, (k - 1) / 2)
        prefactor = 2 * ctx.pi * _i_power(ctx, -k) * ratio
        # |K| <= c and |J_nu(x)| <= (x/2)^nu / Gamma(nu + 1)
        scale = _leading_scale(ctx, prefactor, m * n, k)
        cut = _power_cutoff(ctx, w, target, cfg, scale, cutoff)

    term = _bessel_term(w, m, n, w, bessel_j, prec)
    total, error = _csum(w, cut.c_max, term, cfg)
    shift = 1 if m == n else 0
    return _finish(
        FAMILY_CLASSICAL, m, n, w, prefactor, shift, total, error, cut, target, cfg
    )


def maass_coeff_positive(
    w: WeightProfile,
    m: int,
    n: int,
    target_error: float | None = None,
    *,
    config: RunConfig | None = None,
    cutoff: int | None = None,
) -> CoeffResult:
    """
    Return b(-m, k, N; n) for n > 0, a coefficient of the holomorphic part of Q(-m).

    b = -2 pi i^k (m/n)^((k-1)/2)
        * sum_(N | c) K_(2-k)(-m, n, c)/c I_(k-1)(4 pi sqrt(mn)/c).
    """
    _check_profile(w)
    _check_index("m", m, sign=1)
    _check_index("n", n, sign=1)
    cfg, target = _resolve(config, target_error)
    prec = cfg.precision_bits

    with working_context(prec) as ctx:
        k = _weight(ctx, w)
        ratio = ctx.power(ctx.mpf(m) / n, (k - 1) / 2)
        prefactor = -2 * ctx.pi * _i_power(ctx, k) * ratio
        base = _leading_scale(ctx, prefactor, m * n, k)
        x_numerator = 4 * ctx.pi * ctx.sqrt(m * n)

        def tail_at(c_max: int) -> Any:
            # e^(x^2 / (4k)) at the first omitted modulus
            x_first = x_numerator / (c_max + w.N)
            growth = ctx.exp(x_first * x_first / (4 * k))
            return _power_tail(ctx, w, base * growth, c_max)

        if w.k == 2:  # noqa: PLR2004
            cut = _heuristic_cutoff(
                ctx, w, cfg, base * ctx.exp(x_numerator**2 / (4 * k * w.N**2)), cutoff
            )
        else:
            cut = _choose_cutoff(ctx, w, target, cfg, tail_at, cutoff)

    term = _bessel_term(w.dual(), -m, n, w, bessel_i, prec)
    total, error = _csum(w, cut.c_max, term, cfg)
    return _finish(
        FAMILY_MAASS_POSITIVE, m, n, w, prefactor, 0, total, error, cut, target, cfg
    )


def maass_coeff_zero(
    w: WeightProfile,
    m: int,
    target_error: float | None = None,
    *,
    config: RunConfig | None = None,
    cutoff: int | None = None,
) -> CoeffResult:
    """
    Return b(-m, k, N; 0), the constant term of Q(-m).

    b = -(2 pi i)^k m^(k-1) / (k-1)! * sum_(N | c) K_(2-k)(-m, 0, c) / c^k.
    """
    _check_profile(w)
    _check_index("m", m, sign=1)
    cfg, target = _resolve(config, target_error)
    prec = cfg.precision_bits
    dual = w.dual()

    with working_context(prec) as ctx:
        k = _weight(ctx, w)
        prefactor = (
            -ctx.power(2 * ctx.pi, k)
            * _i_power(ctx, k)
            * ctx.power(m, k - 1)
            / ctx.gamma(k)
        )
        cut = _power_cutoff(ctx, w, target, cfg, abs(prefactor), cutoff)

    def term(ctx: Any, c: int) -> tuple[Any, Any]:
        kv = kloosterman(dual, -m, 0, c, precision_bits=prec)
        denominator = ctx.power(c, _weight(ctx, w))
        value = kv.value / denominator
        error = kv.rounding_bound / denominator + unit_roundoff(ctx, 4 * abs(value))
        return value, error

    total, error = _csum(w, cut.c_max, term, cfg)
    return _finish(
        FAMILY_MAASS_ZERO, m, 0, w, prefactor, 0, total, error, cut, target, cfg
    )


def maass_coeff_negative(
    w: WeightProfile,
    m: int,
    n: int,
    target_error: float | None = None,
    *,
    config: RunConfig | None = None,
    cutoff: int | None = None,
) -> CoeffResult:
    """
    Return the c-sum b(-m, k, N; n) for n < 0 in the nonholomorphic part of Q(-m).

    b = -2 pi i^k / (k-2)! |m/n|^((k-1)/2)
        * sum_(N | c) K_(2-k)(-m, n, c)/c J_(k-1)(4 pi sqrt|mn| / c).
    The leading term -1/(k-2)! at n = -m is not part of this sum; see
    nonholomorphic_coeff.
    """
    _check_profile(w)
    _check_index("m", m, sign=1)
    _check_index("n", n, sign=-1)
    cfg, target = _resolve(config, target_error)
    prec = cfg.precision_bits

    with working_context(prec) as ctx:
        k = _weight(ctx, w)
        ratio = ctx.power(ctx.mpf(m) / -n, (k - 1) / 2)
        prefactor = -2 * ctx.pi * _i_power(ctx, k) * ratio / ctx.gamma(k - 1)
        scale = _leading_scale(ctx, prefactor, -m * n, k)
        cut = _power_cutoff(ctx, w, target, cfg, scale, cutoff)

    term = _bessel_term(w.dual(), -m, n, w, bessel_j, prec)
    total, error = _csum(w, cut.c_max, term, cfg)
    return _finish(
        FAMILY_MAASS_NEGATIVE, m, n, w, prefactor, 0, total, error, cut, target, cfg
    )


def nonholomorphic_coeff(
    w: WeightProfile,
    m: int,
    n: int,
    target_error: float | None = None,
    *,
    config: RunConfig | None = None,
    cutoff: int | None = None,
) -> CoeffResult:
    """Return c^-(n) of Q(-m) for n < 0, including -1/(k-2)! at n = -m."""
    partial = maass_coeff_negative(
        w, m, n, target_error, config=config, cutoff=cutoff
    )
    if n != -m:
        return partial
    cfg, _ = _resolve(config, target_error)
    with working_context(cfg.precision_bits) as ctx:
        k = _weight(ctx, w)
        leading = -1 / ctx.gamma(k - 1)
        value = partial.value + leading
        rounding = partial.rounding_bound + unit_roundoff(ctx, 4 * abs(value))
    return CoeffResult(
        family=FAMILY_MAASS_NEGATIVE,
        m=m,
        n=n,
        weight=w,
        value=value,
        imag_part=partial.imag_part,
        tail_bound=partial.tail_bound,
        rounding_bound=rounding,
        c_used=partial.c_used,
        heuristic=partial.heuristic,
    )


def xi_image_coeff(
    w: WeightProfile,
    m: int,
    n: int,
    target_error: float | None = None,
    *,
    config: RunConfig | None = None,
    cutoff: int | None = None,
) -> CoeffResult:
    """
    Return the n-th coefficient of xi_(2-k) Q(-m).

    The coefficient is -(4 pi)^(k-1) conj(c^-(-n)) n^(k-1), which equals
    (4 pi m)^(k-1) / (k-2)! * a(m, k, N; n).
    """
    _check_index("n", n, sign=1)
    cfg, target = _resolve(config, target_error)
    with working_context(cfg.precision_bits) as ctx:
        k = _weight(ctx, w)
        factor = ctx.power(4 * ctx.pi, k - 1) * ctx.power(n, k - 1)
    # The factor can be large; certify c^-(-n) to the correspondingly smaller error
    inner_target = float(target / factor) if factor > 1 else target
    inner = nonholomorphic_coeff(
        w, m, -n, inner_target, config=cfg, cutoff=cutoff
    )
    with working_context(cfg.precision_bits) as ctx:
        value = -factor * inner.value
        rounding = factor * inner.rounding_bound + unit_roundoff(ctx, 4 * abs(value))
        return CoeffResult(
            family=FAMILY_XI_IMAGE,
            m=m,
            n=n,
            weight=w,
            value=value,
            imag_part=factor * inner.imag_part,
            tail_bound=factor * inner.tail_bound,
            rounding_bound=rounding,
            c_used=inner.c_used,
            heuristic=inner.heuristic,
        )


def maass_nonholomorphic_term(
    w: WeightProfile,
    m: int,
    n: int,
    y: Any,
    target_error: float | None = None,
    *,
    config: RunConfig | None = None,
) -> BoundedReal:
    """Return c^-(n) Gamma(k-1, 4 pi |n| y), the q^n weight in Q^-(-m) at height y."""
    cfg, _ = _resolve(config, target_error)
    coeff = nonholomorphic_coeff(w, m, n, target_error, config=cfg)
    with working_context(cfg.precision_bits) as ctx:
        height = ctx.mpf(y)
        if height <= 0:
            msg = f"Height y must be positive, got {y}"
            raise InvalidWeightError(msg)
        argument = 4 * ctx.pi * -n * height
        gamma = incomplete_gamma_upper(
            w.k - 1, argument, precision_bits=cfg.precision_bits
        )
        value = coeff.value * gamma.value
        error = (
            abs(coeff.value) * gamma.abs_error
            + coeff.total_bound * (abs(gamma.value) + gamma.abs_error)
            + unit_roundoff(ctx, 4 * abs(value))
        )
        return BoundedReal(value=value, abs_error=error)


def poincare_coeff(
    family: str,
    w: WeightProfile,
    m: int,
    n: int,
    target_error: float | None = None,
    *,
    config: RunConfig | None = None,
    cutoff: int | None = None,
) -> CoeffResult:
    """Dispatch on the coefficient family name used by the CLI."""
    if family == FAMILY_CLASSICAL:
        return classical_coeff(w, m, n, target_error, config=config, cutoff=cutoff)
    if family == FAMILY_MAASS_POSITIVE:
        return maass_coeff_positive(
            w, m, n, target_error, config=config, cutoff=cutoff
        )
    if family == FAMILY_MAASS_ZERO:
        if n != 0:
            msg = f"The constant-term family takes n = 0, got {n}"
            raise InvalidWeightError(msg)
        return maass_coeff_zero(w, m, target_error, config=config, cutoff=cutoff)
    if family == FAMILY_MAASS_NEGATIVE:
        return maass_coeff_negative(
            w, m, n, target_error, config=config, cutoff=cutoff
        )
    msg = f"Unknown coefficient family {family!r}"
    raise InvalidWeightError(msg)

"""Exact integer arithmetic: Kronecker symbols, Kloosterman sums, dimensions."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, prod
from typing import TYPE_CHECKING, Any

from sympy import primefactors, totient
from sympy.functions.combinatorial.numbers import jacobi_symbol

from .const import (
    ADMISSIBLE_EISENSTEIN_WEIGHTS,
    DEFAULT_PRECISION_BITS,
    KLOOSTERMAN_CACHE_SIZE,
)
from .errors import InvalidWeightError
from .helpers import to_fraction, unit_roundoff, working_context

if TYPE_CHECKING:
    from collections.abc import Sequence

_LOGGER = logging.getLogger(__name__)

# Powers of i as Gaussian integers (real, imag)
_I_POWERS: tuple[tuple[int, int], ...] = ((1, 0), (0, 1), (-1, 0), (0, -1))


@dataclass(frozen=True, slots=True)
class WeightProfile:
    """Weight k in (1/2)Z together with the level N of Gamma_0(N)."""

    k: Fraction
    N: int
    half_integral: bool

    def __post_init__(self) -> None:
        """Validate the structural invariants shared by k and its dual 2 - k."""
        if not isinstance(self.k, Fraction) or self.k.denominator not in (1, 2):
            msg = f"Weight must lie in (1/2)Z, got {self.k!r}"
            raise InvalidWeightError(msg)
        if not isinstance(self.N, int) or self.N < 1:
            msg = f"Level must be a positive integer, got {self.N!r}"
            raise InvalidWeightError(msg)
        if self.half_integral != (self.k.denominator == 2):
            msg = f"half_integral={self.half_integral} contradicts k={self.k}"
            raise InvalidWeightError(msg)
        if self.half_integral and self.N % 4:
            msg = f"Half-integral weight {self.k} requires 4 | N, got N={self.N}"
            raise InvalidWeightError(msg)

    @classmethod
    def create(cls, k: Any, N: int = 1) -> WeightProfile:  # noqa: N803
        """Build a profile for a holomorphic weight k >= 2 on Gamma_0(N)."""
        try:
            weight = to_fraction(k)
        except (TypeError, ValueError, ZeroDivisionError) as err:
            msg = f"Cannot parse weight {k!r}"
            raise InvalidWeightError(msg) from err
        if weight < 2:  # noqa: PLR2004
            msg = f"Weight must satisfy k >= 2, got {weight}"
            raise InvalidWeightError(msg)
        return cls(k=weight, N=N, half_integral=weight.denominator == 2)

    def dual(self) -> WeightProfile:
        """Return the profile of the dual weight 2 - k at the same level."""
        return WeightProfile(k=2 - self.k, N=self.N, half_integral=self.half_integral)

    @property
    def two_k(self) -> int:
        """Return the integer 2k."""
        return int(2 * self.k)

    @property
    def is_integral(self) -> bool:
        """Return True when k is an integer."""
        return not self.half_integral

    @property
    def is_even(self) -> bool:
        """Return True when k is an even integer."""
        return self.is_integral and self.k.numerator % 2 == 0

    def __str__(self) -> str:
        """Return a compact "k=.., N=.." label."""
        return f"k={self.k}, N={self.N}"


@dataclass(frozen=True, slots=True)
class KloostermanValue:
    """A Kloosterman sum K_k(m, n, c) with its rounding bound."""

    value: Any  # mpc
    rounding_bound: Any  # mpf
    c: int

    @property
    def real(self) -> Any:
        """Return the real part."""
        return self.value.real

    @property
    def imag(self) -> Any:
        """Return the imaginary part."""
        return self.value.imag


def kronecker_symbol(a: int, b: int) -> int:
    """
    Return the Kronecker symbol (a/b).

    Fully extended: (a/0) is 1 for a = +-1 and 0 otherwise, (a/-1) is the sign
    of a, and (a/2) is 0 for even a, 1 for a = +-1 (mod 8), -1 for a = +-3 (mod 8).
    The odd part is delegated to the Jacobi symbol.
    """
    if b == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if b < 0:
        b = -b
        if a < 0:
            result = -result
    twos = (b & -b).bit_length() - 1
    b >>= twos
    if twos:
        if a % 2 == 0:
            return 0
        if twos % 2 and a % 8 in (3, 5):
            result = -result
    if b == 1:
        return result
    return result * int(jacobi_symbol(a % b, b))


def epsilon(d: int) -> complex:
    """Return epsilon_d: 1 if d = 1 (mod 4), i if d = 3 (mod 4)."""
    return 1j ** _epsilon_exponent(d)


def _epsilon_exponent(d: int) -> int:
    """Return e with epsilon_d = i^e."""
    if d % 2 == 0:
        msg = f"epsilon_d is only defined for odd d, got {d}"
        raise InvalidWeightError(msg)
    return 0 if d % 4 == 1 else 1


def euler_phi(c: int) -> int:
    """Return Euler's totient of a positive integer."""
    return int(totient(c))


@lru_cache(maxsize=KLOOSTERMAN_CACHE_SIZE)
def kloosterman_weights(
    twist: int | None, m: int, n: int, c: int
) -> tuple[tuple[int, int, int], ...]:
    """
    Collapse a Kloosterman sum into Gaussian-integer weights per residue.

    Returns tuples (r, re, im) meaning the sum equals
    sum (re + i*im) * e(r/c) over the listed residues r (mod c). `twist` is
    None for integral weight and 2k mod 4 for half-integral weight, in which
    case each residue v carries (c/v) * epsilon_v^(2k).
    """
    re_weights = [0] * c
    im_weights = [0] * c
    if c == 1:
        re_weights[0] = 1
    else:
        for v in range(1, c):
            if gcd(v, c) != 1:
                continue
            v_bar = pow(v, -1, c)
            r = (m * v_bar + n * v) % c
            if twist is None:
                re_weights[r] += 1
                continue
            symbol = kronecker_symbol(c, v)
            exponent = twist * _epsilon_exponent(v) % 4
            unit_re, unit_im = _I_POWERS[exponent]
            re_weights[r] += symbol * unit_re
            im_weights[r] += symbol * unit_im
    return tuple(
        (r, re_weights[r], im_weights[r])
        for r in range(c)
        if re_weights[r] or im_weights[r]
    )


def kloosterman(
    w: WeightProfile,
    m: int,
    n: int,
    c: int,
    *,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> KloostermanValue:
    """
    Evaluate K_k(m, n, c) by direct summation over primitive residues.

    Integral weight: sum over v (mod c)* of e((m*v_bar + n*v)/c), which is real
    because v -> -v permutes the terms into their conjugates. Half-integral
    weight inserts (c/v)^(2k) * epsilon_v^(2k); this needs 4 | c.
    """
    if c <= 0:
        msg = f"Kloosterman modulus must be positive, got c={c}"
        raise InvalidWeightError(msg)
    if w.half_integral and c % 4:
        msg = f"Half-integral Kloosterman sums need 4 | c, got c={c}"
        raise InvalidWeightError(msg)

    twist = w.two_k % 4 if w.half_integral else None
    weights = kloosterman_weights(twist, m % c, n % c, c)

    with working_context(precision_bits) as ctx:
        re_terms = []
        im_terms = []
        mass = 0
        for r, w_re, w_im in weights:
            mass += abs(w_re) + abs(w_im)
            if r == 0:
                re_terms.append(ctx.mpf(w_re))
                im_terms.append(ctx.mpf(w_im))
                continue
            turn = ctx.mpf(2 * r) / c
            cos_r = ctx.cospi(turn)
            if twist is None:
                re_terms.append(w_re * cos_r)
                continue
            sin_r = ctx.sinpi(turn)
            re_terms.append(w_re * cos_r - w_im * sin_r)
            im_terms.append(w_re * sin_r + w_im * cos_r)
        value = ctx.mpc(ctx.fsum(re_terms), ctx.fsum(im_terms))
        rounding = unit_roundoff(ctx, 8 * max(mass, 1))
    return KloostermanValue(value=value, rounding_bound=rounding, c=c)


def dim_cusp_forms_level1(k: int) -> int:
    """Return d_k = dim S_k(SL_2(Z)) for even k >= 4."""
    if isinstance(k, Fraction):
        if k.denominator != 1:
            msg = f"Level-one dimension needs an even integer weight, got {k}"
            raise InvalidWeightError(msg)
        k = k.numerator
    if k % 2 or k < 4:  # noqa: PLR2004
        msg = f"Level-one dimension needs an even integer weight k >= 4, got {k}"
        raise InvalidWeightError(msg)
    if k % 12 == 2:  # noqa: PLR2004
        return k // 12 - 1
    return k // 12


def admissible_pair(k: int) -> tuple[int, int]:
    """
    Return the unique (s, r) with s - 12r = 2 - k, s admissible and r >= 1.

    Every weakly holomorphic form of weight 2 - k on SL_2(Z) is
    E_s / Delta^r * F(j) for this pair.
    """
    if isinstance(k, Fraction):
        if k.denominator != 1:
            msg = f"No level-one weakly holomorphic forms of weight 2 - {k}"
            raise InvalidWeightError(msg)
        k = k.numerator
    if k % 2:
        msg = f"No level-one weakly holomorphic forms of odd weight 2 - {k}"
        raise InvalidWeightError(msg)
    for s in ADMISSIBLE_EISENSTEIN_WEIGHTS:
        twelve_r = s + k - 2
        if twelve_r % 12 == 0 and twelve_r >= 12:  # noqa: PLR2004
            return s, twelve_r // 12
    msg = f"No admissible (s, r) with r >= 1 for target weight 2 - {k}"
    raise InvalidWeightError(msg)


def gamma0_index(N: int) -> int:  # noqa: N803
    """Return the index [SL_2(Z) : Gamma_0(N)] = N * prod_{p | N} (1 + 1/p)."""
    if N < 1:
        msg = f"Level must be positive, got {N}"
        raise InvalidWeightError(msg)
    primes: Sequence[int] = primefactors(N)
    return N * prod(p + 1 for p in primes) // prod(primes)


def nonvanishing_bound(k: Any, N: int = 1) -> int:  # noqa: N803
    """
    Return floor((k - 2) / 12 * [SL_2(Z) : Gamma_0(N)]).

    For 1 <= m <= bound the valence formula gives P(m, k, N) != 0 whenever
    S_k(N) is nonzero. At level 1 the only exception is k = 14: the bound is 1
    but S_14 = 0. For k = 2 (mod 12) the bound is d_k + 1, so one relation
    exists among P(1), ..., P(bound).
    """
    weight = to_fraction(k)
    return int((weight - 2) / 12 * gamma0_index(N))

"""Helper functions for poincare_relations (working precision & rounding)."""

from __future__ import annotations

import logging
import threading
from contextlib import contextmanager
from fractions import Fraction
from typing import TYPE_CHECKING

from mpmath.ctx_mp import MPContext

from .const import MIN_PRECISION_BITS

if TYPE_CHECKING:
    from collections.abc import Iterator

_LOGGER = logging.getLogger(__name__)

_THREAD_STATE = threading.local()


def _thread_context() -> MPContext:
    """Return the mpmath context owned by the calling thread."""
    ctx = getattr(_THREAD_STATE, "ctx", None)
    if ctx is None:
        ctx = MPContext()
        _THREAD_STATE.ctx = ctx
        _LOGGER.debug(
            "Created mpmath context for thread %s", threading.current_thread().name
        )
    return ctx


@contextmanager
def working_context(bits: int) -> Iterator[MPContext]:
    """
    Yield a thread-local mpmath context running at `bits` of precision.

    The global `mpmath.mp` context is never touched, so c-sums evaluated in
    worker threads cannot race on the working precision. Nested uses restore
    the outer precision on exit.
    """
    ctx = _thread_context()
    with ctx.workprec(max(int(bits), MIN_PRECISION_BITS)):
        yield ctx


def unit_roundoff(ctx: MPContext, scale: int = 1) -> object:
    """Return `scale` units of roundoff (2^-prec) in the given context."""
    return ctx.ldexp(ctx.mpf(scale), -ctx.prec)


def to_fraction(value: object) -> Fraction:
    """Coerce ints, strings like "p/q" and Fractions to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        msg = f"Cannot interpret boolean {value!r} as a rational"
        raise TypeError(msg)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return Fraction(value)
    msg = f"Cannot interpret {value!r} as a rational"
    raise TypeError(msg)

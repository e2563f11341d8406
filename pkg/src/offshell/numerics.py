"""Configurable-precision real arithmetic.

All quantities in the library are `gmpy2.mpfr` values whose precision is
taken from the active (thread-local) gmpy2 context.  Callers pick the
working precision once, via :func:`precision` or :func:`set_precision`,
and every operation downstream inherits it.  53 bits gives native-double
behavior behind the same interface.
"""

from __future__ import annotations

import contextlib

import gmpy2
from gmpy2 import mpfr

from .errors import DomainError

MIN_PRECISION_BITS = 53


def set_precision(bits: int) -> None:
    """Set the working precision (mantissa bits) of the current thread."""
    if bits < MIN_PRECISION_BITS:
        raise ValueError(f"precision_bits must be >= {MIN_PRECISION_BITS}, got {bits}")
    gmpy2.get_context().precision = bits


def get_precision() -> int:
    return gmpy2.get_context().precision


@contextlib.contextmanager
def precision(bits: int):
    """Context manager scoping the working precision."""
    if bits < MIN_PRECISION_BITS:
        raise ValueError(f"precision_bits must be >= {MIN_PRECISION_BITS}, got {bits}")
    previous = get_precision()
    set_precision(bits)
    try:
        yield
    finally:
        set_precision(previous)


def real(x) -> mpfr:
    """Convert to an mpfr at the working precision.

    Strings are parsed as decimal literals; floats convert exactly
    (they are already binary).
    """
    if isinstance(x, str):
        return mpfr(x)
    return mpfr(x)


def is_finite(x) -> bool:
    return gmpy2.is_finite(x)


def require_finite(x, name: str) -> mpfr:
    v = real(x)
    if not gmpy2.is_finite(v):
        raise DomainError(f"{name} must be finite, got {v}")
    return v


def sqrt_pos(x, what: str = "value") -> mpfr:
    """Square root of a strictly positive quantity; fails loudly otherwise."""
    if x <= 0:
        raise DomainError(f"{what} must be > 0, got {x}")
    return gmpy2.sqrt(x)


def pow_half_odd(x, twice_exponent: int, what: str = "value") -> mpfr:
    """x**(twice_exponent/2) for strictly positive x and odd twice_exponent.

    Half-integer powers (3/2, 5/2, 7/2, 9/2 ...) appear throughout the
    renormalized force; computing them as sqrt * integer powers keeps
    them exact to the working precision and never strays into complex
    territory.
    """
    r = sqrt_pos(x, what)
    n = (twice_exponent - 1) // 2
    return r * x ** n if n else r


def sig_digits(bits: int) -> int:
    """Decimal significant digits carried by CSV output at a given precision."""
    return max(17, bits // 3)


def format_real(x, digits: int) -> str:
    """Deterministic decimal rendering with the given significant digits."""
    return mpfr(x).__format__(f".{digits}g")


def as_float(x) -> float:
    return float(mpfr(x))

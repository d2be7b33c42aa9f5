"""Global extended-precision context.

All heavy numerics run on mpmath's global context.  Precision is a single
run-wide parameter (bits); mixing precisions inside one run is deliberately
unsupported because the bimoment systems solved downstream are severely
ill-conditioned and uniform precision keeps failures diagnosable.
"""

from __future__ import annotations

import contextlib

from mpmath import mp, mpf

MIN_PRECISION_BITS = 64
DEFAULT_PRECISION_BITS = 512


def set_precision(bits: int) -> None:
    """Set the global working precision in bits (>= 64)."""
    if bits < MIN_PRECISION_BITS:
        raise ValueError(f"precision must be >= {MIN_PRECISION_BITS} bits, got {bits}")
    mp.prec = int(bits)


def precision_bits() -> int:
    return mp.prec


def decimal_digits() -> int:
    """Decimal digits carried by the current working precision."""
    return mp.dps


def tol(fraction: float = 0.5) -> mpf:
    """Default tolerance 10^(-fraction * decimal_digits).

    fraction=0.5 is the package-wide meaning of "to tolerance"; checkers
    accept explicit overrides.
    """
    return mpf(10) ** (-int(mp.dps * fraction))


@contextlib.contextmanager
def working_precision(bits: int):
    """Temporarily switch the global precision."""
    old = mp.prec
    set_precision(bits)
    try:
        yield
    finally:
        mp.prec = old


@contextlib.contextmanager
def extra_precision(factor: int = 2):
    """Temporarily multiply the working precision (residual accumulation)."""
    old = mp.prec
    mp.prec = old * factor
    try:
        yield
    finally:
        mp.prec = old

"""Exact rational scalars.

All symbolic computation in this package runs over arbitrary-precision
rationals.  We bind ``Rat`` to ``gmpy2.mpq`` when available (noticeably faster
on the large integers produced by cross-multiplication equality checks) and
fall back to ``fractions.Fraction`` otherwise.  Both types keep a normalized
numerator/denominator pair: denominator > 0 and gcd(num, den) = 1.
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as Rat

    HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as Rat

    HAVE_GMPY2 = False

RAT_ZERO = Rat(0)
RAT_ONE = Rat(1)


def as_rat(value) -> "Rat":
    """Coerce an int, string like ``"3/2"``, or rational to ``Rat``."""
    if isinstance(value, Rat):
        return value
    if isinstance(value, (int, str)):
        return Rat(value)
    # Cross-type rationals (e.g. Fraction when gmpy2 is active).
    num = getattr(value, "numerator", None)
    den = getattr(value, "denominator", None)
    if num is not None and den is not None:
        return Rat(int(num), int(den))
    raise TypeError(f"cannot interpret {value!r} as a rational")


def rat_num(q) -> int:
    return int(q.numerator)


def rat_den(q) -> int:
    return int(q.denominator)


def rat_str(q) -> str:
    """Canonical string form: ``n`` for integers, ``n/d`` otherwise."""
    n, d = rat_num(q), rat_den(q)
    return str(n) if d == 1 else f"{n}/{d}"


def is_integer(q) -> bool:
    return rat_den(q) == 1

"""Exact-number backends for the oracle paths.

Two number domains are used as ground truth: exact rationals and
high-precision binary floats.  gmpy2 (GMP/MPFR) is preferred for speed;
fractions.Fraction and mpmath are the pure-Python fallbacks.  Conversion
from binary64 is exact in both domains, so oracle arithmetic consumes the
very same numbers the working-precision solver consumed.
"""

from __future__ import annotations

import contextlib
from fractions import Fraction

try:
    import gmpy2
    from gmpy2 import mpq as _mpq
    HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    gmpy2 = None
    _mpq = None
    HAVE_GMPY2 = False

# Equality tolerance for high-precision (non-rational) oracle comparisons.
HP_EQUAL_TOL = Fraction(1, 2 ** 200)
# Default significand size of the high-precision oracle, in bits.
HP_PRECISION_BITS = 256


def rational(x):
    """Exact rational value of x (int, float, Fraction, mpq)."""
    if HAVE_GMPY2:
        if isinstance(x, Fraction):
            return _mpq(x.numerator, x.denominator)
        return _mpq(x)
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    # mpq reaching a Fraction-only build
    return Fraction(x.numerator, x.denominator)


def rational_floor(q) -> int:
    """floor of an exact rational (// on the integer parts is a true floor)."""
    return q.numerator // q.denominator


def is_rational(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return True
    return HAVE_GMPY2 and isinstance(x, type(_mpq()))


@contextlib.contextmanager
def hp_context(bits: int = HP_PRECISION_BITS):
    """Context with ``bits`` of significand; yields the float constructor.

    Arithmetic on the yielded numbers rounds to nearest at ``bits`` bits
    while the context is active.
    """
    if HAVE_GMPY2:
        with gmpy2.context(precision=bits):
            yield gmpy2.mpfr
    else:  # pragma: no cover - exercised only without gmpy2
        import mpmath
        with mpmath.workprec(bits):
            yield mpmath.mpf


def hp_to_rational(x):
    """Exact rational value of a high-precision float."""
    if HAVE_GMPY2 and isinstance(x, type(gmpy2.mpfr(0))):
        return _mpq(x)
    if isinstance(x, float):
        return rational(x)
    # mpmath.mpf
    import mpmath
    num, den = mpmath.mpf(x).as_integer_ratio()
    return rational(Fraction(num, den))

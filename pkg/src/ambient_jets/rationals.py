"""Exact rational coefficients and dual numbers.

All arithmetic in this project is exact.  Coefficients are gmpy2.mpq when
available (roughly 5x faster than fractions.Fraction), with Fraction as a
fallback.  Both are always stored in lowest terms with positive denominator,
so the representation is canonical.

Dual numbers (a + eps*b with eps^2 = 0) are used to thread an exact
first-order perturbation through nonlinear computations.
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as _mpq

    def QQ(a=0, b=1):
        """Exact rational a/b."""
        return _mpq(a, b)

    _RAT_TYPES = (type(_mpq(0)), int)
except ImportError:  # pragma: no cover
    from fractions import Fraction as _Fraction

    def QQ(a=0, b=1):
        """Exact rational a/b."""
        return _Fraction(a, b)

    _RAT_TYPES = (_Fraction, int)

ZERO = QQ(0)
ONE = QQ(1)


def rat_from_string(s: str):
    """Parse 'p' or 'p/q' into an exact rational."""
    s = s.strip()
    if "/" in s:
        p, q = s.split("/")
        return QQ(int(p), int(q))
    return QQ(int(s))


def rat_to_string(c) -> str:
    return str(c)


def is_rational(c) -> bool:
    return isinstance(c, _RAT_TYPES)


class Dual:
    """a + eps*b over the exact rationals, eps^2 = 0.

    Division is defined when the real part is a unit:
    (a + eps b)^-1 = a^-1 - eps b a^-2.
    """

    __slots__ = ("re", "ep")

    def __init__(self, re=ZERO, ep=ZERO):
        self.re = QQ(re) if isinstance(re, int) else re
        self.ep = QQ(ep) if isinstance(ep, int) else ep

    def __bool__(self):
        return bool(self.re) or bool(self.ep)

    def __eq__(self, other):
        if isinstance(other, Dual):
            return self.re == other.re and self.ep == other.ep
        return self.ep == 0 and self.re == other

    def __hash__(self):
        return hash((self.re, self.ep))

    def __repr__(self):
        return f"Dual({self.re}, {self.ep})"

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.re + other.re, self.ep + other.ep)
        return Dual(self.re + other, self.ep)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.re, -self.ep)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Dual) else Dual(-other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.re * other.re, self.re * other.ep + self.ep * other.re)
        return Dual(self.re * other, self.ep * other)

    __rmul__ = __mul__

    def inverse(self):
        if not self.re:
            raise ZeroDivisionError("dual number with zero real part")
        inv = 1 / self.re
        return Dual(inv, -self.ep * inv * inv)

    def __truediv__(self, other):
        if isinstance(other, Dual):
            return self * other.inverse()
        return Dual(self.re / other, self.ep / other)

    def __rtruediv__(self, other):
        return self.inverse() * other


def coeff_inv(c):
    """Multiplicative inverse for plain rationals and duals."""
    if isinstance(c, Dual):
        return c.inverse()
    return 1 / c


def epsilon_part(c):
    """eps-coefficient of a coefficient (0 for plain rationals)."""
    if isinstance(c, Dual):
        return c.ep
    return ZERO


def real_part(c):
    if isinstance(c, Dual):
        return c.re
    return c

"""Exact complex-rational scalars.

Every coefficient in the exact pipeline is a Gaussian rational: a pair of
`fractions.Fraction` values (real and imaginary part).  Floats never enter
here; the numeric cross-checks live in a separate module with a one-way
dependency on this one.
"""
from __future__ import annotations

from fractions import Fraction

FractionLike = "Fraction | int"


class QI:
    """Gaussian rational ``re + im*i`` with exact Fraction components.

    Immutable and hashable so it can sit inside polynomial term maps.

    Example
    -------
    >>> (QI(1, 2) * QI(1, -2)).re
    Fraction(5, 1)
    >>> QI.i_power(3)
    QI(0, -1)
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("QI is immutable")

    @staticmethod
    def of(value) -> "QI":
        if isinstance(value, QI):
            return value
        return QI(value)

    @staticmethod
    def i_power(k: int) -> "QI":
        """i**k for any integer k (cycle of four)."""
        return _I_CYCLE[k % 4]

    @staticmethod
    def minus_i_power(k: int) -> "QI":
        """(-i)**k, the factor attached to k coordinate derivatives."""
        return _NEG_I_CYCLE[k % 4]

    def __add__(self, other):
        o = QI.of(other)
        return QI(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __sub__(self, other):
        o = QI.of(other)
        return QI(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return QI.of(other) - self

    def __mul__(self, other):
        o = QI.of(other)
        return QI(self.re * o.re - self.im * o.im,
                  self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = QI.of(other)
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero QI")
        return QI((self.re * o.re + self.im * o.im) / d,
                  (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, other):
        return QI.of(other) / self

    def __eq__(self, other):
        if isinstance(other, (QI, int, Fraction)):
            o = QI.of(other)
            return self.re == o.re and self.im == o.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def real_fraction(self) -> Fraction:
        """The value as a plain Fraction; raises if an imaginary part survives."""
        if self.im != 0:
            raise ValueError(f"nonreal scalar {self!r} where a rational was required")
        return self.re

    def conjugate(self) -> "QI":
        return QI(self.re, -self.im)

    def __repr__(self):
        return f"QI({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re} {sign} {abs(self.im)}*i)"


QI_ZERO = QI(0)
QI_ONE = QI(1)
QI_I = QI(0, 1)

_I_CYCLE = (QI(1), QI(0, 1), QI(-1), QI(0, -1))
_NEG_I_CYCLE = (QI(1), QI(0, -1), QI(-1), QI(0, 1))

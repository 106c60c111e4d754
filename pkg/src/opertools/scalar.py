"""Scalars for the two arithmetic backends.

Floating mode uses Python ``complex``.  Exact mode uses :class:`CRational`,
a complex number with :class:`fractions.Fraction` parts; ``int`` and
``Fraction`` values mix freely with it and stay exact.  Any operation that
touches a float or complex value drops to floating mode.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import numpy as np

__all__ = ["CRational", "is_exact", "to_exact", "to_complex", "is_zero", "parse_scalar"]


class CRational:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, CRational):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return CRational(other)
        return None

    @staticmethod
    def _inexact(other) -> bool:
        # floats and numpy scalars fall back to complex arithmetic; arrays and
        # unknown types are left to their own reflected operators
        return isinstance(other, (float, complex, np.number)) and not isinstance(other, bool)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) + other if self._inexact(other) else NotImplemented
        return CRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) - other if self._inexact(other) else NotImplemented
        return CRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return other - complex(self) if self._inexact(other) else NotImplemented
        return CRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) * other if self._inexact(other) else NotImplemented
        return CRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) / other if self._inexact(other) else NotImplemented
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("CRational division by zero")
        return CRational(
            (self.re * o.re + self.im * o.im) / den,
            (self.im * o.re - self.re * o.im) / den,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return other / complex(self) if self._inexact(other) else NotImplemented
        return o / self

    def __neg__(self):
        return CRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if not isinstance(n, int):
            return complex(self) ** n
        if n < 0:
            return 1 / (self ** (-n))
        out, base = CRational(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            try:
                return complex(self) == complex(other)
            except TypeError:
                return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __abs__(self):
        return abs(complex(self))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return CRational(self.re, -self.im)

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def __repr__(self):
        if self.im == 0:
            return f"CRational({self.re})"
        return f"CRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}j)"


def is_exact(x) -> bool:
    return isinstance(x, (CRational, Fraction, int)) and not isinstance(x, bool)


def to_exact(x):
    """Convert ``x`` to a :class:`CRational` without rounding.

    Strings such as ``"2/5"`` are parsed; floats are converted through their
    decimal repr so that ``0.4`` becomes ``2/5`` rather than a binary fraction.
    """
    if isinstance(x, CRational):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return CRational(x)
    if isinstance(x, Rational):
        return CRational(Fraction(x.numerator, x.denominator))
    if isinstance(x, str):
        return parse_scalar(x, exact=True)
    if isinstance(x, float):
        return CRational(Fraction(repr(x)))
    if isinstance(x, complex):
        return CRational(Fraction(repr(x.real)), Fraction(repr(x.imag)))
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return to_exact(x[0]) + to_exact(x[1]) * CRational(0, 1)
    # numpy scalars
    try:
        c = complex(x)
    except TypeError as exc:
        raise TypeError(f"cannot convert {x!r} to an exact scalar") from exc
    return to_exact(c)


def to_complex(x) -> complex:
    return complex(x)


def is_zero(x, tol: float = 0.0) -> bool:
    if is_exact(x):
        return x == 0
    return abs(x) <= tol


def parse_scalar(value, exact: bool = False):
    """Parse a JSON-style scalar: number, ``"p/q"`` string or ``[re, im]`` pair."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex scalars are [re, im] pairs, got {value!r}")
        re = parse_scalar(value[0], exact)
        im = parse_scalar(value[1], exact)
        if exact:
            return to_exact(re) + to_exact(im) * CRational(0, 1)
        return complex(re) + 1j * complex(im)
    if isinstance(value, bool):
        raise ValueError("booleans are not scalars")
    if isinstance(value, str):
        text = value.strip()
        if exact:
            try:
                return CRational(Fraction(text))
            except ValueError:
                return to_exact(complex(text.replace("i", "j")))
        try:
            return complex(float(Fraction(text)))
        except ValueError:
            return complex(text.replace("i", "j"))
    if exact:
        return to_exact(value)
    return complex(value)

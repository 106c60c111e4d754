"""Dense univariate polynomials over the complex numbers.

Coefficients are stored in ascending order.  A polynomial whose coefficients
are all exact (``int``, ``Fraction`` or :class:`CRational`) is exact and never
rounds; anything else is handled in double precision, with trailing
coefficients below ``TRIM_RTOL * max|c|`` dropped so that determinant
cancellations produce clean degrees.
"""

from __future__ import annotations

from math import comb
from typing import Iterable, Sequence

import numpy as np

from .scalar import CRational, is_exact, to_exact

__all__ = [
    "Poly",
    "TRIM_RTOL",
    "eval_poly",
    "shift",
    "twisted_derivative",
    "roots",
    "elem_sym",
    "partial_sym",
    "from_roots",
    "exact_sqrt",
]

TRIM_RTOL = 1e-12


def _all_exact(coeffs) -> bool:
    return all(is_exact(c) for c in coeffs)


class Poly:
    __slots__ = ("coeffs", "exact")

    def __init__(self, coeffs: Iterable = (), exact: bool | None = None):
        cs = list(coeffs)
        if exact is None:
            exact = _all_exact(cs)
        if exact:
            cs = [to_exact(c) for c in cs]
            while cs and cs[-1] == 0:
                cs.pop()
        else:
            cs = [complex(c) for c in cs]
            if cs:
                big = max(abs(c) for c in cs)
                cut = TRIM_RTOL * big
                while cs and abs(cs[-1]) <= cut:
                    cs.pop()
        self.coeffs = tuple(cs)
        self.exact = exact

    # construction ----------------------------------------------------------
    @classmethod
    def const(cls, c):
        return cls([c])

    @classmethod
    def monomial(cls, k: int, c=1):
        return cls([0] * k + [c])

    @classmethod
    def linear(cls, root):
        """The monic polynomial ``z - root``."""
        return cls([-root, 1])

    def to_float(self) -> "Poly":
        return Poly(self.coeffs, exact=False)

    def to_exact(self) -> "Poly":
        return Poly([to_exact(c) for c in self.coeffs], exact=True)

    # basic properties ------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self):
        return self.coeffs[-1] if self.coeffs else 0

    def coeff(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0 if self.exact else 0j

    def monic(self) -> "Poly":
        if self.is_zero():
            raise ZeroDivisionError("zero polynomial has no monic form")
        return self * (1 / self.lc)

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __repr__(self):
        return f"Poly({list(self.coeffs)!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in reversed(list(enumerate(self.coeffs))):
            if c == 0:
                continue
            s = str(c)
            terms.append(s if k == 0 else f"{s}*z^{k}" if k > 1 else f"{s}*z")
        return " + ".join(terms) or "0"

    # arithmetic ------------------------------------------------------------
    @staticmethod
    def _lift(other):
        if isinstance(other, Poly):
            return other
        return Poly([other])

    def __add__(self, other):
        o = self._lift(other)
        n = max(len(self.coeffs), len(o.coeffs))
        return Poly([self.coeff(k) + o.coeff(k) for k in range(n)],
                    exact=self.exact and o.exact)

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs], exact=self.exact)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            exact = self.exact and is_exact(other)
            return Poly([c * other for c in self.coeffs], exact=exact)
        if self.is_zero() or other.is_zero():
            return Poly([], exact=self.exact and other.exact)
        if self.exact and other.exact:
            out = [CRational(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if a == 0:
                    continue
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
            return Poly(out, exact=True)
        return Poly(np.convolve(np.asarray(self.coeffs, complex),
                                np.asarray(other.coeffs, complex)), exact=False)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Poly([1], exact=self.exact)
        for _ in range(n):
            out = out * self
        return out

    def divmod(self, other: "Poly"):
        """Long division ``self = quot * other + rem``."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        exact = self.exact and other.exact
        rem = list(self.coeffs)
        dq = other.degree
        if len(rem) - 1 < dq:
            return Poly([], exact=exact), Poly(rem, exact=exact)
        quot = [0] * (len(rem) - dq)
        lead = other.lc
        for k in range(len(rem) - 1 - dq, -1, -1):
            c = rem[k + dq] / lead
            quot[k] = c
            if c != 0:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] = rem[k + j] - c * b
            rem[k + dq] = 0 if exact else 0j
        return Poly(quot, exact=exact), Poly(rem[:dq], exact=exact)

    def exact_div(self, other: "Poly", rtol: float = 1e-9) -> "Poly":
        """Division that must leave no remainder (relative to ``self``)."""
        quot, rem = self.divmod(other)
        if rem.is_zero():
            return quot
        if rem.exact:
            raise ArithmeticError(f"{self} is not divisible by {other}")
        scale = max((abs(c) for c in self.coeffs), default=1.0)
        if rem.max_abs() > rtol * max(scale, 1e-300):
            raise ArithmeticError(
                f"division leaves remainder {rem.max_abs():.3e} (scale {scale:.3e})")
        return quot

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs), default=0.0)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def allclose(self, other: "Poly", rtol: float = 1e-9, atol: float = 0.0) -> bool:
        diff = (self - other).max_abs()
        scale = max(self.max_abs(), other.max_abs())
        return diff <= atol + rtol * scale

    # evaluation and operators ------------------------------------------------
    def __call__(self, z):
        acc = 0 if self.exact and is_exact(z) else 0j
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def scale_arg(self, q) -> "Poly":
        """``p(q z)``."""
        out, qk = [], 1
        for c in self.coeffs:
            out.append(c * qk)
            qk = qk * q
        return Poly(out, exact=self.exact and is_exact(q))

    def translate(self, eps) -> "Poly":
        """``p(z + eps)``, by binomial reindexing."""
        n = len(self.coeffs)
        exact = self.exact and is_exact(eps)
        powers = [1]
        for _ in range(n):
            powers.append(powers[-1] * eps)
        out = []
        for k in range(n):
            acc = 0 if exact else 0j
            for m in range(k, n):
                acc = acc + self.coeffs[m] * comb(m, k) * powers[m - k]
            out.append(acc)
        return Poly(out, exact=exact)

    def derivative(self) -> "Poly":
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:], exact=self.exact)

    def euler(self) -> "Poly":
        """``z p'(z)``: the derivative along the cylinder coordinate."""
        return Poly([k * c for k, c in enumerate(self.coeffs)], exact=self.exact)


def eval_poly(p: Poly, z):
    return p(z)


def shift(p: Poly, corner) -> Poly:
    """``p(qz)`` or ``p(z + eps)`` according to the shift corner."""
    if not corner.is_shift:
        raise ValueError(f"no shift on the {corner.kind.value} corner")
    return corner.shift_poly(p)


def twisted_derivative(p: Poly, gamma, corner) -> Poly:
    """``p' + gamma p`` (rational) or ``z p' + gamma p`` (trigonometric)."""
    if corner.is_shift:
        raise ValueError(f"no derivative on the {corner.kind.value} corner")
    return corner.step(p, gamma)


def from_roots(rs: Sequence, exact: bool | None = None) -> Poly:
    out = Poly([1], exact=exact if exact is not None else _all_exact(rs))
    for r in rs:
        out = out * Poly.linear(r)
    return out


def exact_sqrt(x):
    """Square root of a Gaussian rational when it is a perfect square, else None."""
    from fractions import Fraction
    from math import isqrt

    def rat_sqrt(f: Fraction):
        if f < 0:
            return None
        n, d = isqrt(f.numerator), isqrt(f.denominator)
        if n * n == f.numerator and d * d == f.denominator:
            return Fraction(n, d)
        return None

    x = to_exact(x)
    if x.im == 0:
        if x.re >= 0:
            r = rat_sqrt(x.re)
            return None if r is None else CRational(r)
        r = rat_sqrt(-x.re)
        return None if r is None else CRational(0, r)
    # (a + bi)^2 = re + i im  =>  a^2 = (|x| + re) / 2
    mod2 = x.re * x.re + x.im * x.im
    mod = rat_sqrt(mod2)
    if mod is None:
        return None
    a = rat_sqrt((mod + x.re) / 2)
    if a is None or a == 0:
        return None
    b = x.im / (2 * a)
    return CRational(a, b)


def _polish(coeffs: np.ndarray, z: complex, iters: int = 8) -> complex:
    dcoeffs = np.polyder(coeffs)
    for _ in range(iters):
        f = np.polyval(coeffs, z)
        df = np.polyval(dcoeffs, z)
        if df == 0:
            break
        step = f / df
        z_new = z - step
        if not np.isfinite(z_new):
            break
        if abs(np.polyval(coeffs, z_new)) > abs(f):
            break
        z = z_new
        if abs(step) <= 1e-16 * max(1.0, abs(z)):
            break
    return complex(z)


def roots(p: Poly) -> list:
    """All roots with multiplicity.

    Exact polynomials of degree <= 2 are solved in closed form when the roots
    are Gaussian rationals; everything else goes through companion-matrix
    eigenvalues followed by Newton polishing.
    """
    if p.is_zero():
        raise ValueError("the zero polynomial has no finite root set")
    if p.degree == 0:
        return []
    if p.exact and p.degree == 1:
        return [-p.coeffs[0] / p.coeffs[1]]
    if p.exact and p.degree == 2:
        c, b, a = p.coeffs
        disc = b * b - 4 * a * c
        sq = exact_sqrt(disc)
        if sq is not None:
            return [(-b - sq) / (2 * a), (-b + sq) / (2 * a)]
    hi = np.asarray(p.coeffs[::-1], complex)
    found = np.roots(hi)
    return [_polish(hi, complex(z)) for z in found]


def elem_sym(values: Sequence, k: int):
    """The k-th elementary symmetric polynomial of ``values`` (``e_0 = 1``)."""
    n = len(values)
    if not 0 <= k <= n:
        raise IndexError(f"k={k} outside 0..{n}")
    # e[j] after processing a prefix of the values
    e = [1] + [0] * k
    for v in values:
        for j in range(k, 0, -1):
            e[j] = e[j] + e[j - 1] * v
    return e[k]


def partial_sym(values: Sequence, k: int, j: int):
    """``e_k`` of ``values`` with entry ``j`` (0-based) removed."""
    if not 0 <= j < len(values):
        raise IndexError(f"omitted index {j} outside 0..{len(values) - 1}")
    rest = list(values[:j]) + list(values[j + 1:])
    return elem_sym(rest, k)

"""Lax matrices of the four many-body models and their Hamiltonians.

All constructors work in exact arithmetic when every input is exact, and
return ``numpy`` object arrays of :class:`CRational` in that case.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .corners import Corner, CornerKind
from .poly import Poly
from .scalar import is_exact, to_exact
from .wronskian import Frame, check_distinct, minor_matrix, vandermonde, vandermonde_inverse

__all__ = [
    "LaxModel",
    "lax_trs",
    "lax_tcm",
    "lax_rrs",
    "lax_rcm",
    "lax_for_corner",
    "wronskian_lax",
    "hamiltonians",
    "charpoly",
]

TAGS = ("tRS", "tCM", "rRS", "rCM")


@dataclass
class LaxModel:
    tag: str
    matrix: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown Lax tag {self.tag!r}")

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def exact(self) -> bool:
        return self.matrix.dtype == object

    def hamiltonians(self) -> list:
        return hamiltonians(self)

    def charpoly(self) -> Poly:
        return charpoly(self.matrix)


def _exact_inputs(*groups) -> bool:
    return all(is_exact(v) for g in groups for v in (g if isinstance(g, (list, tuple)) else [g]))


def _prep(exact: bool, values):
    return [to_exact(v) for v in values] if exact else [complex(v) for v in values]


def _finish(rows, exact: bool) -> np.ndarray:
    if exact:
        return np.array(rows, dtype=object)
    return np.array(rows, dtype=complex)


def _prod(values, start=1):
    out = start
    for v in values:
        out = out * v
    return out


def lax_trs(q, xi: Sequence, p: Sequence) -> LaxModel:
    """``T_ij = p_i prod_{m!=j}(xi_i/q - xi_m) / prod_{l!=j}(xi_j - xi_l)``."""
    if q == 0:
        raise ValueError("q must be nonzero")
    check_distinct(xi)
    exact = _exact_inputs(q, list(xi), list(p))
    (q,), xi, p = _prep(exact, [q]), _prep(exact, xi), _prep(exact, p)
    n = len(xi)
    for i in range(n):
        for j in range(n):
            if i != j and xi[i] / q == xi[j]:
                warnings.warn(f"xi_{i + 1}/q coincides with xi_{j + 1}: degenerate tRS data")
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            num = _prod(xi[i] / q - xi[m] for m in range(n) if m != j)
            den = _prod(xi[j] - xi[l] for l in range(n) if l != j)
            row.append(p[i] * num / den)
        rows.append(row)
    return LaxModel("tRS", _finish(rows, exact), {"q": q, "twist": xi, "momenta": p})


def lax_tcm(eps, xi: Sequence, p: Sequence) -> LaxModel:
    check_distinct(xi)
    exact = _exact_inputs(eps, list(xi), list(p))
    (eps,), xi, p = _prep(exact, [eps]), _prep(exact, xi), _prep(exact, p)
    n = len(xi)
    c = [_prod(xi[i] - xi[k] for k in range(n) if k != i) for i in range(n)]
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                s = sum((1 / (xi[i] - xi[k]) for k in range(n) if k != i), 0)
                row.append(p[i] - eps * xi[i] * s)
            else:
                row.append(eps * xi[i] / (xi[i] - xi[j]) * c[i] / c[j])
        rows.append(row)
    return LaxModel("tCM", _finish(rows, exact), {"eps": eps, "twist": xi, "momenta": p})


def lax_rrs(eps, gamma: Sequence, p: Sequence, variant: bool = False) -> LaxModel:
    """Rational RS matrix ``p_i prod_{k!=j}(g_i - g_k - eps) / den``.

    ``den`` is ``prod_{k!=i}(g_i - g_k)`` by default and
    ``prod_{l!=j}(g_j - g_l)`` with ``variant``; the two forms are conjugate
    by a diagonal matrix.
    """
    check_distinct(gamma)
    exact = _exact_inputs(eps, list(gamma), list(p))
    (eps,), g, p = _prep(exact, [eps]), _prep(exact, gamma), _prep(exact, p)
    n = len(g)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            num = _prod(g[i] - g[k] - eps for k in range(n) if k != j)
            if variant:
                den = _prod(g[j] - g[l] for l in range(n) if l != j)
            else:
                den = _prod(g[i] - g[k] for k in range(n) if k != i)
            row.append(p[i] * num / den)
        rows.append(row)
    return LaxModel("rRS", _finish(rows, exact),
                    {"eps": eps, "twist": g, "momenta": p, "variant": variant})


def lax_rcm(gamma: Sequence, p: Sequence) -> LaxModel:
    check_distinct(gamma)
    exact = _exact_inputs(list(gamma), list(p))
    g, p = _prep(exact, gamma), _prep(exact, p)
    n = len(g)
    c = [_prod(g[i] - g[k] for k in range(n) if k != i) for i in range(n)]
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(p[i] - sum((1 / (g[i] - g[k]) for k in range(n) if k != i), 0))
            else:
                row.append(c[i] / ((g[i] - g[j]) * c[j]))
        rows.append(row)
    return LaxModel("rCM", _finish(rows, exact), {"twist": g, "momenta": p})


def lax_for_corner(corner: Corner, twist: Sequence, momenta: Sequence, variant: bool = False) -> LaxModel:
    """The model attached to a corner; the trigonometric corner uses ``eps = 1``."""
    if corner.kind is CornerKind.QMULT:
        return lax_trs(corner.param, twist, momenta)
    if corner.kind is CornerKind.EPSADD:
        return lax_tcm(corner.param, twist, momenta)
    if corner.kind is CornerKind.RATDIFF:
        return lax_rcm(twist, momenta)
    return lax_rrs(1, twist, momenta, variant=variant)


def wronskian_lax(frame: Frame) -> LaxModel:
    """``-M0 V^{-1}`` where ``M(z) = V z + M0`` is the full minor matrix.

    Requires a canonical frame, so that every entry is linear in ``z``.
    """
    if not frame.is_canonical():
        raise ValueError("Wronskian Lax form needs a canonical frame")
    m = minor_matrix(frame, range(frame.rank))
    exact = frame.exact
    m0 = [[m[i, k].coeff(0) for k in range(m.size)] for i in range(m.size)]
    m0 = np.array(m0, dtype=object if exact else complex)
    vinv = vandermonde_inverse(frame.twist, frame.corner)
    mat = -m0.dot(vinv)
    return LaxModel(frame.corner.lax_tag, mat if exact else mat.astype(complex),
                    {"corner": frame.corner.to_json(), "twist": list(frame.twist),
                     "momenta": list(frame.momenta())})


def _faddeev_leverrier(a) -> list:
    """Coefficients ``c_1..c_n`` of ``det(z - A) = z^n + c_1 z^{n-1} + ... + c_n``."""
    n = a.shape[0]
    exact = a.dtype == object
    ident = np.array([[1 if i == j else 0 for j in range(n)] for i in range(n)],
                     dtype=object if exact else complex)
    coeffs = []
    mk = np.zeros_like(ident)
    c = 1
    for k in range(1, n + 1):
        mk = a.dot(mk) + c * ident
        ak = a.dot(mk)
        tr = sum((ak[i, i] for i in range(n)), 0)
        c = -tr / k if not exact else -to_exact(tr) / k
        coeffs.append(c)
    return coeffs


def hamiltonians(model) -> list:
    """``H_k = e_k(spectrum)`` for ``k = 1..N`` via Faddeev-LeVerrier."""
    a = model.matrix if isinstance(model, LaxModel) else np.asarray(model)
    if a.dtype != object:
        a = a.astype(complex)
    cs = _faddeev_leverrier(a)
    return [c if k % 2 == 0 else -c for k, c in enumerate(cs, start=1)]


def charpoly(a) -> Poly:
    """Monic ``det(z - A)`` as an ascending-coefficient polynomial."""
    a = np.asarray(a)
    if a.dtype != object:
        a = a.astype(complex)
    cs = _faddeev_leverrier(a)
    return Poly(list(reversed([1] + cs)))

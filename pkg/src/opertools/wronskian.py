"""Twisted Wronskian matrices, their minors and the matching Vandermonde data.

A Miura frame is an ordered list of twist entries with one section per entry.
Row ``t`` of a minor matrix holds ``s_t, step(s_t), step^2(s_t), ...`` where
``step`` is the corner's twisted step operator with twist entry ``x_t``.
Row indices are 0-based throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corners import Corner
from .poly import Poly, partial_sym
from .scalar import is_exact, to_exact

__all__ = [
    "Frame",
    "PolyMatrix",
    "TwistCollisionError",
    "minor_matrix",
    "vandermonde",
    "vandermonde_inverse",
    "det_poly",
    "det_scalar",
    "full_determinant",
    "twisted_wronskian",
    "wk_factorization_residual",
    "bilinear_residual",
    "bilinear_sides",
]

TWIST_TOL = 1e-10


class TwistCollisionError(ValueError):
    """Two twist entries coincide (Z is not regular semisimple)."""


def check_distinct(values: Sequence, what: str = "twist", tol: float = TWIST_TOL):
    for i, j in itertools.combinations(range(len(values)), 2):
        a, b = values[i], values[j]
        if is_exact(a) and is_exact(b):
            clash = a == b
        else:
            clash = abs(a - b) <= tol * max(1.0, abs(a), abs(b))
        if clash:
            raise TwistCollisionError(f"{what} entries {i} and {j} coincide ({a})")


@dataclass(frozen=True)
class Frame:
    corner: Corner
    twist: tuple
    sections: tuple

    def __post_init__(self):
        if len(self.twist) != len(self.sections):
            raise ValueError("one section per twist entry is required")
        check_distinct(self.twist)

    @classmethod
    def canonical(cls, corner: Corner, twist: Sequence, momenta: Sequence) -> "Frame":
        """Frame with monic degree-one sections ``z - p_i``."""
        return cls(corner, tuple(twist), tuple(Poly.linear(p) for p in momenta))

    @property
    def rank(self) -> int:
        return len(self.twist)

    @property
    def exact(self) -> bool:
        return (self.corner.is_exact and all(is_exact(x) for x in self.twist)
                and all(s.exact for s in self.sections))

    def momenta(self) -> tuple:
        if not self.is_canonical():
            raise ValueError("momenta are defined for canonical frames only")
        return tuple(-s.coeffs[0] if s.coeffs else 0 for s in self.sections)

    def is_canonical(self) -> bool:
        return all(s.degree == 1 and s.lc == 1 for s in self.sections)

    def permuted(self, perm: Sequence[int]) -> "Frame":
        return Frame(self.corner, tuple(self.twist[i] for i in perm),
                     tuple(self.sections[i] for i in perm))


class PolyMatrix:
    """Square array of polynomials with row/column labels."""

    def __init__(self, entries, row_labels=None, col_labels=None):
        self.entries = [list(row) for row in entries]
        n = len(self.entries)
        for row in self.entries:
            if len(row) != n:
                raise ValueError("PolyMatrix must be square")
        self.row_labels = tuple(row_labels) if row_labels is not None else tuple(range(n))
        self.col_labels = tuple(col_labels) if col_labels is not None else tuple(range(n))

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def __repr__(self):
        return f"PolyMatrix({self.entries!r})"


def minor_matrix(frame: Frame, rows: Sequence[int], j: int | None = None) -> PolyMatrix:
    """The ``j x j`` twisted-Wronskian minor on the given rows."""
    rows = tuple(rows)
    if j is None:
        j = len(rows)
    if len(rows) != j or j > frame.rank:
        raise ValueError(f"need {j} rows out of {frame.rank}, got {rows}")
    for r in rows:
        if not 0 <= r < frame.rank:
            raise IndexError(f"row {r} outside 0..{frame.rank - 1}")
    entries = []
    for r in rows:
        col = frame.sections[r]
        row = [col]
        for _ in range(1, j):
            col = frame.corner.step(col, frame.twist[r])
            row.append(col)
        entries.append(row)
    return PolyMatrix(entries, row_labels=rows)


def _as_matrix(rows, exact: bool):
    if exact:
        return np.array([[to_exact(v) for v in r] for r in rows], dtype=object)
    return np.array(rows, dtype=complex)


def vandermonde(twist: Sequence, corner: Corner):
    """Constant matrix with entry ``(t, k) = node_t ** k``.

    Nodes are ``q*xi`` for the q corner (the q-rescaled convention), ``xi`` or
    ``gamma`` for the additive and rational corners and ``1 + gamma`` for the
    trigonometric corner.
    """
    nodes = [corner.vandermonde_base(x) for x in twist]
    n = len(nodes)
    exact = all(is_exact(v) for v in nodes)
    return _as_matrix([[v ** k for k in range(n)] for v in nodes], exact)


def vandermonde_inverse(twist: Sequence, corner: Corner):
    """Closed-form inverse through partial elementary symmetric functions.

    With nodes ``x_j = scale * b_j``, entry ``(t, j)`` is the coefficient of
    ``y**t`` in the Lagrange basis polynomial of node ``j``::

        (-1)**(n-1-t) * scale**(-t) * S_{n-1-t, j}(b) / prod_{l != j} (b_j - b_l)
    """
    check_distinct(twist)
    n = len(twist)
    scale = corner.param if corner.kind.value == "q" else 1
    if corner.kind.value == "q":
        base = list(twist)
    else:
        base = [corner.vandermonde_base(x) for x in twist]
    exact = all(is_exact(b) for b in base) and is_exact(scale)
    out = [[None] * n for _ in range(n)]
    for j in range(n):
        den = 1
        for l in range(n):
            if l != j:
                den = den * (base[j] - base[l])
        for t in range(n):
            sign = -1 if (n - 1 - t) % 2 else 1
            out[t][j] = sign * partial_sym(base, n - 1 - t, j) / (den * scale ** t)
    return _as_matrix(out, exact)


def det_scalar(m):
    """Determinant of a constant matrix; exact for object arrays."""
    m = np.asarray(m)
    if m.dtype != object:
        return complex(np.linalg.det(m)) if m.size else 1.0
    a = [list(r) for r in m]
    n = len(a)
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det = det * a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f != 0:
                for k in range(c, n):
                    a[r][k] = a[r][k] - f * a[c][k]
    return det


def _cofactor_det(e):
    n = len(e)
    if n == 0:
        return Poly([1])
    if n == 1:
        return e[0][0]
    if n == 2:
        return e[0][0] * e[1][1] - e[0][1] * e[1][0]
    total = None
    for c in range(n):
        sub = [row[:c] + row[c + 1:] for row in e[1:]]
        term = e[0][c] * _cofactor_det(sub)
        if c % 2:
            term = -term
        total = term if total is None else total + term
    return total


def _bareiss_det(e):
    a = [list(r) for r in e]
    n = len(a)
    sign = 1
    prev = Poly([1])
    for k in range(n - 1):
        if a[k][k].is_zero():
            swap = next((r for r in range(k + 1, n) if not a[r][k].is_zero()), None)
            if swap is None:
                return Poly([])
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num.exact_div(prev, rtol=1e-6)
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return det if sign == 1 else -det


def _interp_det(e):
    """Floating determinant by evaluation on roots of unity and inverse FFT."""
    bound = max(sum(max(p.degree for p in row) for row in e), 0)
    pts = np.exp(2j * np.pi * np.arange(bound + 1) / (bound + 1))
    coeffs = [[np.array([complex(c) for c in p.coeffs] or [0j]) for p in row] for row in e]
    vals = np.empty(bound + 1, dtype=complex)
    for k, z in enumerate(pts):
        mat = np.array([[np.polyval(c[::-1], z) for c in row] for row in coeffs])
        vals[k] = np.linalg.det(mat)
    c = np.fft.fft(vals) / (bound + 1)
    # the degree bound may overshoot; drop roundoff-level top coefficients
    top = len(c)
    cut = 1e-12 * max(np.max(np.abs(c)), 1e-300)
    while top > 1 and abs(c[top - 1]) <= cut:
        top -= 1
    return Poly(list(c[:top]))


def det_poly(m: PolyMatrix) -> Poly:
    """Cofactor expansion up to 4x4; beyond that, fraction-free elimination
    in exact arithmetic and evaluation-interpolation in floating point."""
    entries = m.entries if isinstance(m, PolyMatrix) else [list(r) for r in m]
    n = len(entries)
    if any(len(r) != n for r in entries):
        raise ValueError("determinant of a non-square matrix")
    if n <= 4:
        return _cofactor_det(entries)
    if all(p.exact for row in entries for p in row):
        return _bareiss_det(entries)
    return _interp_det(entries)


def full_determinant(frame: Frame, normalize: bool = True):
    """``det M_{all rows} / det V``; returns ``(poly, leading_scalar)``.

    The leading scalar is the normalisation constant of the determinant; the
    polynomial is monic when ``normalize`` is set.
    """
    d = det_poly(minor_matrix(frame, range(frame.rank)))
    d = d * (1 / det_scalar(vandermonde(frame.twist, frame.corner)))
    lead = d.lc
    return (d.monic() if normalize else d), lead


def twisted_wronskian(funcs: Sequence[Poly], gammas: Sequence, corner: Corner | None = None) -> Poly:
    """``det[ (d + gamma_i)^k f_i ]`` for the rational (default) or trig corner."""
    corner = corner or Corner.rational()
    if corner.is_shift:
        raise ValueError("twisted Wronskians are defined on differential corners")
    rows = []
    for f, g in zip(funcs, gammas):
        col, row = f, [f]
        for _ in range(1, len(funcs)):
            col = corner.step(col, g)
            row.append(col)
        rows.append(row)
    return det_poly(PolyMatrix(rows))


def wk_factorization_residual(wks: Sequence[Poly], lambdas: Sequence[Poly], corner: Corner) -> float:
    """Max deviation of ``W_k`` from ``P_1(z) P_2(s z) ... P_k(s^{k-1} z)``.

    ``lambdas`` lists ``Lambda_0, ..., Lambda_r`` for a rank ``r + 1`` oper, so
    that ``P_i = Lambda_r ... Lambda_{r-i+1}``; ``Lambda_0`` only enters
    ``W_{r+1}``.  On differential corners the shifts are omitted.
    """
    r = len(lambdas) - 1
    if len(wks) > r + 1 or r < 0:
        raise ValueError(f"{len(wks)} Wronskians but only {len(lambdas)} singularity polynomials")
    worst = 0.0
    p_i = Poly([1])
    product = Poly([1])
    for k in range(1, len(wks) + 1):
        p_i = p_i * lambdas[r - k + 1]
        factor = corner.shift_poly(p_i, k - 1) if corner.is_shift else p_i
        product = product * factor
        worst = max(worst, (wks[k - 1] - product).max_abs())
    return worst


def bilinear_sides(funcs: Sequence[Poly], gammas: Sequence, corner: Corner | None = None):
    """Both sides of the bilinear identity for ``n + 1`` sections ``s_1..s_{n+1}``.

    Left: ``W_2^{g_n, g_{n+1}}(W_n(s_1..s_n), W_n(s_1..s_{n-1}, s_{n+1}))``;
    right: ``W_{n-1}(s_1..s_{n-1}) W_{n+1}(s_1..s_{n+1})``.
    """
    corner = corner or Corner.rational()
    m = len(funcs) - 1
    if m < 1 or len(gammas) != m + 1:
        raise ValueError("need n + 1 >= 2 sections with one twist each")
    head, ghead = list(funcs[:m - 1]), list(gammas[:m - 1])
    a = twisted_wronskian(head + [funcs[m - 1]], ghead + [gammas[m - 1]], corner)
    b = twisted_wronskian(head + [funcs[m]], ghead + [gammas[m]], corner)
    lhs = twisted_wronskian([a, b], [gammas[m - 1], gammas[m]], corner)
    low = twisted_wronskian(head, ghead, corner) if head else Poly([1])
    return lhs, low * twisted_wronskian(list(funcs), list(gammas), corner)


def bilinear_residual(funcs: Sequence[Poly], gammas: Sequence, corner: Corner | None = None,
                      relative: bool = False):
    """Left minus right side; with ``relative`` the max coefficient of the
    difference over the larger side."""
    lhs, rhs = bilinear_sides(funcs, gammas, corner)
    diff = lhs - rhs
    if not relative:
        return diff
    scale = max(lhs.max_abs(), rhs.max_abs())
    return diff.max_abs() / scale if scale > 0 else diff.max_abs()

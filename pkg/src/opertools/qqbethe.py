"""Q-polynomials from Wronskian minors, QQ and dd residuals, Bethe equations.

Nodes of the A_r diagram are numbered ``1..r``; node ``i`` couples twist
entries ``x_i`` and ``x_{i+1}`` (0-based positions ``i-1`` and ``i``).

The QQ relation is evaluated in the orientation realised by the minors::

    x_{i+1} Q+_i(z) Q-_i(s z) - x_i Q+_i(s z) Q-_i(z) = k_i Lam_i(z) Q_{i-1}(s z) Q_{i+1}(z)

on the shift corners (``s`` the corner shift), and its first-order analogue::

    (y_{i+1} - y_i) Q+ Q- + Q+ D(Q-) - D(Q+) Q- = k_i Lam_i Q_{i-1} Q_{i+1}

on the differential corners, with ``D = d/dz`` or ``z d/dz``.  The constants
``k_i`` are read off from leading coefficients.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .corners import Corner, CornerKind
from .poly import Poly, roots
from .scalar import is_exact
from .wronskian import Frame, det_poly, det_scalar, minor_matrix, vandermonde

__all__ = [
    "QQ_ORIENTATION",
    "CartanMatrix",
    "QQData",
    "DegenerateError",
    "BetheTerm",
    "extract_Q",
    "qq_lhs",
    "qq_residual",
    "qq_prefactors",
    "qq_relative_residual",
    "dd_residual",
    "nondegenerate",
    "bethe_residual",
    "pin_orientation",
]

# Realised convention, echoed into CLI metadata.
QQ_ORIENTATION = {
    "name": "swapped",
    "shift": "x[i+1]*Q+(z)*Q-(s z) - x[i]*Q+(s z)*Q-(z) = k*Lam(z)*Q[i-1](s z)*Q[i+1](z)",
    "differential": "(y[i+1]-y[i])*Q+*Q- + Q+*D(Q-) - D(Q+)*Q- = k*Lam*Q[i-1]*Q[i+1]",
    "rows": "Q+_j: rows 1..j, Q-_j: rows 1..j-1, j+1 (1-based)",
}

COLLISION_RTOL = 1e-8


class DegenerateError(ValueError):
    """Raised when Bethe roots within one node coincide."""


@dataclass(frozen=True)
class CartanMatrix:
    r: int

    @property
    def matrix(self) -> np.ndarray:
        a = 2 * np.eye(self.r, dtype=int)
        for i in range(self.r - 1):
            a[i, i + 1] = a[i + 1, i] = -1
        return a

    def __getitem__(self, idx):
        """1-based entry ``a_{ij}``."""
        i, j = idx
        return int(self.matrix[i - 1, j - 1])


def _one(exact: bool) -> Poly:
    return Poly([1], exact=exact)


def extract_Q(frame: Frame, j: int, sign: str = "plus", F: Poly | None = None):
    """Minor quotient at node ``j``; returns ``(monic Q, leading scalar)``.

    ``plus`` uses rows ``1..j`` and ``minus`` uses rows ``1..j-1, j+1``.  The
    minor is divided by the Vandermonde determinant of the same rows and by
    ``F`` when given (``F = 1`` for canonical frames).
    """
    if sign not in ("plus", "minus"):
        raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")
    if not 1 <= j <= frame.rank:
        raise IndexError(f"node {j} outside 1..{frame.rank}")
    if sign == "plus":
        rows = list(range(j))
    else:
        if j >= frame.rank:
            raise IndexError(f"Q-_{j} needs row {j + 1} but the rank is {frame.rank}")
        rows = list(range(j - 1)) + [j]
    det = det_poly(minor_matrix(frame, rows))
    v = det_scalar(vandermonde([frame.twist[r] for r in rows], frame.corner))
    quot = det * (1 / v)
    if F is not None:
        quot = quot.exact_div(F)
    if quot.is_zero():
        raise ArithmeticError(f"minor for node {j} ({sign}) vanishes identically")
    return quot.monic(), quot.lc


@dataclass
class QQData:
    """Per-node Q-polynomials (nodes ``1..r``) with singularity data."""

    qplus: list
    qminus: list
    lambdas: list
    plus_scale: list = field(default_factory=list)
    minus_scale: list = field(default_factory=list)

    def __post_init__(self):
        r = len(self.qplus)
        if len(self.qminus) != r or len(self.lambdas) != r:
            raise ValueError("qplus, qminus and lambdas need one entry per node")
        self.lambdas = [lam if isinstance(lam, Poly) else Poly([lam]) for lam in self.lambdas]

    @property
    def r(self) -> int:
        return len(self.qplus)

    @property
    def exact(self) -> bool:
        return all(p.exact for p in self.qplus + self.qminus + self.lambdas)

    def Q(self, i: int) -> Poly:
        """``Q+_i`` with the boundary convention ``Q_0 = Q_{r+1} = 1``."""
        if i <= 0 or i > self.r:
            return _one(self.exact)
        return self.qplus[i - 1]

    @classmethod
    def from_frame(cls, frame: Frame, lambdas: Sequence[Poly] | None = None,
                   F: Sequence[Poly] | None = None) -> "QQData":
        """Extract all nodes of a frame.

        For canonical frames ``Lam_i = 1`` below the top node and
        ``Lam_r`` is the monic full determinant.
        """
        r = frame.rank - 1
        if r < 1:
            raise ValueError("QQ data needs rank at least 2")
        qp, qm, sp, sm = [], [], [], []
        for j in range(1, r + 1):
            fj = F[j - 1] if F is not None else None
            p, a = extract_Q(frame, j, "plus", fj)
            m, b = extract_Q(frame, j, "minus", fj)
            qp.append(p)
            qm.append(m)
            sp.append(a)
            sm.append(b)
        if lambdas is None:
            top, _ = extract_Q(frame, r + 1, "plus")
            lambdas = [_one(frame.exact)] * (r - 1) + [top]
        return cls(qp, qm, list(lambdas), sp, sm)


def _step_parts(corner: Corner):
    if corner.is_shift:
        return lambda p: corner.shift_poly(p), None
    d = (lambda p: p.derivative()) if corner.kind is CornerKind.RATDIFF else (lambda p: p.euler())
    return None, d


def qq_lhs(qp: Poly, qm: Poly, xa, xb, corner: Corner) -> Poly:
    """Left side of the node relation with twist pair ``(x_i, x_{i+1}) = (xa, xb)``."""
    sig, d = _step_parts(corner)
    if sig is not None:
        return qp * sig(qm) * xb - sig(qp) * qm * xa
    return qp * qm * (xb - xa) + qp * d(qm) - d(qp) * qm


def _qq_rhs_base(data: QQData, i: int, corner: Corner) -> Poly:
    sig, _ = _step_parts(corner)
    left = data.Q(i - 1)
    if sig is not None:
        left = sig(left)
    return data.lambdas[i - 1] * left * data.Q(i + 1)


def qq_prefactors(data: QQData, twist: Sequence, corner: Corner) -> list:
    """Constants ``k_i`` from leading coefficients (0 when the left side vanishes)."""
    out = []
    for i in range(1, data.r + 1):
        lhs = qq_lhs(data.qplus[i - 1], data.qminus[i - 1], twist[i - 1], twist[i], corner)
        base = _qq_rhs_base(data, i, corner)
        if lhs.is_zero() or base.is_zero() or lhs.degree != base.degree:
            out.append(0)
        else:
            out.append(lhs.lc / base.lc)
    return out


def qq_residual(data: QQData, twist: Sequence, corner: Corner) -> list:
    """Per-node polynomial ``LHS - k_i * RHS``; all zero for a QQ solution.

    When the two sides have different degrees no constant can match them and
    the full left side is returned as the residual.
    """
    if len(twist) != data.r + 1:
        raise ValueError(f"rank {data.r} needs {data.r + 1} twist entries, got {len(twist)}")
    out = []
    kappas = qq_prefactors(data, twist, corner)
    for i in range(1, data.r + 1):
        lhs = qq_lhs(data.qplus[i - 1], data.qminus[i - 1], twist[i - 1], twist[i], corner)
        base = _qq_rhs_base(data, i, corner)
        out.append(lhs - base * kappas[i - 1])
    return out


def qq_relative_residual(data: QQData, twist: Sequence, corner: Corner) -> float:
    """Largest node residual relative to the size of that node's left side."""
    worst = 0.0
    for i, res in enumerate(qq_residual(data, twist, corner), start=1):
        lhs = qq_lhs(data.qplus[i - 1], data.qminus[i - 1], twist[i - 1], twist[i], corner)
        worst = max(worst, res.max_abs() / max(lhs.max_abs(), 1e-300))
    return worst


def dd_residual(d_plus: Sequence[Poly], d_minus: Sequence[Poly], twist: Sequence) -> list:
    """Rational-corner dd-system residual per node.

    ``W(d+_i, d-_i) - (y_{i+1} - y_i) d+_{i-1} d+_{i+1}`` with the twisted
    Wronskian taken with exponents ``(y_i, y_{i+1})`` and ``d+_0 = 1``.
    ``d_plus`` may carry a top entry ``d+_{r+1}`` (the full determinant);
    otherwise ``d+_{r+1} = 1``.
    """
    r = len(d_minus)
    if len(d_plus) not in (r, r + 1) or len(twist) != r + 1:
        raise ValueError("dd data needs r nodes (plus an optional top d+) and r + 1 twist entries")
    exact = all(p.exact for p in list(d_plus) + list(d_minus))

    def dp(i):
        return d_plus[i - 1] if 1 <= i <= len(d_plus) else _one(exact)

    out = []
    for i in range(1, r + 1):
        a, b = d_plus[i - 1], d_minus[i - 1]
        w = a * (b.derivative() + b * twist[i]) - b * (a.derivative() + a * twist[i - 1])
        out.append(w - dp(i - 1) * dp(i + 1) * (twist[i] - twist[i - 1]))
    return out


def _close(u, v, tol=COLLISION_RTOL) -> bool:
    if is_exact(u) and is_exact(v):
        return u == v
    return abs(u - v) <= tol * (1.0 + max(abs(u), abs(v)))


def _orbit_hit(u, v, corner: Corner, window: int):
    """Smallest-|n| shift with ``s^n u == v``, or None."""
    if not corner.is_shift:
        return 0 if _close(u, v) else None
    for n in sorted(range(-window, window + 1), key=abs):
        if _close(corner.move(u, n), v):
            return n
    return None


def _twist_hit(xa, xb, corner: Corner, window: int):
    if corner.kind is CornerKind.QMULT:
        return _orbit_hit(xa, xb, corner, window)
    return 0 if _close(xa, xb) else None


def _safe_roots(p: Poly) -> list:
    return [] if p.degree < 1 else roots(p)


def nondegenerate(data: QQData, twist: Sequence, corner: Corner, window: int | None = None):
    """Corner-distinctness test; returns ``(ok, diagnostics)``.

    Checked: repeated roots within a node, root orbits of ``Q+_i`` against
    ``Q+_{i+1}`` and against ``Lam_i``, and the twist pair of each node.
    """
    if window is None:
        degs = [p.degree for p in data.qplus + data.lambdas if not p.is_zero()]
        window = 2 * max(degs + [1])
    rts = [_safe_roots(p) for p in data.qplus]
    lam_rts = [_safe_roots(p) for p in data.lambdas]
    issues = []
    for i in range(1, data.r + 1):
        own = rts[i - 1]
        for a, b in itertools.combinations(range(len(own)), 2):
            n = _orbit_hit(own[a], own[b], corner, window)
            if n is not None:
                issues.append(f"node {i}: roots {own[a]} and {own[b]} collide (shift {n})")
        for u in own:
            for v in lam_rts[i - 1]:
                n = _orbit_hit(u, v, corner, window)
                if n is not None:
                    issues.append(f"node {i}: root {u} meets singularity {v} (shift {n})")
        if i < data.r:
            for u in own:
                for v in rts[i]:
                    n = _orbit_hit(u, v, corner, window)
                    if n is not None:
                        issues.append(f"nodes {i},{i + 1}: roots {u} and {v} collide (shift {n})")
        n = _twist_hit(twist[i - 1], twist[i], corner, window)
        if n is not None:
            issues.append(f"node {i}: twist entries {twist[i - 1]} and {twist[i]} collide (shift {n})")
    return not issues, issues


@dataclass(frozen=True)
class BetheTerm:
    node: int
    root: object
    value: object
    scale: float

    @property
    def relative(self) -> float:
        return abs(self.value) / self.scale if self.scale else abs(self.value)


def _check_distinct_roots(node: int, rs: list):
    for a, b in itertools.combinations(range(len(rs)), 2):
        if _close(rs[a], rs[b]):
            raise DegenerateError(f"node {node}: repeated Bethe root {rs[a]}")


def _bethe_shift(data, twist, corner, i, s):
    qp, lam = data.Q(i), data.lambdas[i - 1]
    up, dn = corner.move(s, 1), corner.move(s, -1)
    t1 = twist[i - 1] * qp(up) * lam(dn) * data.Q(i - 1)(s) * data.Q(i + 1)(dn)
    t2 = twist[i] * qp(dn) * lam(s) * data.Q(i - 1)(up) * data.Q(i + 1)(s)
    return t1 + t2, max(abs(t1), abs(t2))


def _bethe_diff(data, twist, corner, i, a, s, rts, trig_form):
    """Cleared form of the Gaudin equation at root ``s = rts[i-1][a]``.

    Rational: ``dy + sum_c 1/(s - a_c) + sum_nbr 1/(s - t) - sum_{b!=a} 2/(s - s_b)``.
    Trig adds the cylinder term: ``(dy - 1)/s`` (``qq``) or ``dy/s`` (``printed``).
    """
    dy = twist[i] - twist[i - 1]
    poles = []  # (position, weight)
    for c in _safe_roots(data.lambdas[i - 1]):
        poles.append((c, 1))
    for j in (i - 1, i + 1):
        if 1 <= j <= data.r:
            poles.extend((t, 1) for t in rts[j - 1])
    poles.extend((t, -2) for b, t in enumerate(rts[i - 1]) if b != a)
    if corner.kind is CornerKind.TRIGDIFF:
        lead = dy - 1 if trig_form == "qq" else dy
        poles.append((0, lead))
        const = 0
    else:
        const = dy
    # multiply through by prod (s - pole)
    dens = [s - pos for pos, _ in poles]
    total = const
    for d in dens:
        total = total * d
    terms = [abs(total)]
    for k, (pos, w) in enumerate(poles):
        term = w
        for m, d in enumerate(dens):
            if m != k:
                term = term * d
        terms.append(abs(term))
        total = total + term
    return total, max(terms)


def bethe_residual(data: QQData, twist: Sequence, corner: Corner, relative: bool = False,
                   trig_form: str = "qq") -> list:
    """Cleared-denominator Bethe residual at every root of every ``Q+_i``.

    Returns :class:`BetheTerm` records (or plain relative magnitudes when
    ``relative`` is set).  ``trig_form`` selects the trigonometric Gaudin
    normalisation: ``qq`` follows from the QQ relation above, ``printed`` uses
    the bare twist difference over ``s``.
    """
    if trig_form not in ("qq", "printed"):
        raise ValueError(f"unknown trig_form {trig_form!r}")
    rts = [_safe_roots(p) for p in data.qplus]
    for i, rs in enumerate(rts, start=1):
        _check_distinct_roots(i, rs)
    out = []
    for i in range(1, data.r + 1):
        for a, s in enumerate(rts[i - 1]):
            if corner.is_shift:
                val, scale = _bethe_shift(data, twist, corner, i, s)
            else:
                val, scale = _bethe_diff(data, twist, corner, i, a, s, rts, trig_form)
            out.append(BetheTerm(i, s, val, float(scale)))
    if relative:
        return [t.relative for t in out]
    return out


def pin_orientation(seed: int = 0, trials: int = 3) -> str:
    """Re-derive the QQ orientation on exact random frames at r = 1, 2.

    Returns ``"swapped"`` when the realised orientation matches
    :data:`QQ_ORIENTATION` and ``"printed"`` if instead ``Q+`` and ``Q-`` need
    to be exchanged; raises if neither closes.
    """
    from fractions import Fraction

    rng = np.random.default_rng(seed)

    def rat():
        return Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6)))

    corners = [Corner.q(Fraction(3, 2)), Corner.eps(Fraction(1, 3)), Corner.rational(), Corner.trig()]
    votes = {"swapped": True, "printed": True}
    for corner in corners:
        for n in (2, 3):
            for _ in range(trials):
                twist = list(range(1, n + 1))
                rng.shuffle(twist)
                twist = [Fraction(int(t)) + Fraction(1, 7) * k for k, t in enumerate(twist)]
                frame = Frame.canonical(corner, twist, [rat() for _ in range(n)])
                try:
                    data = QQData.from_frame(frame)
                except ArithmeticError:
                    continue
                swapped = QQData(data.qminus, data.qplus, data.lambdas)
                if any(not p.is_zero() for p in qq_residual(data, twist, corner)):
                    votes["swapped"] = False
                if any(not p.is_zero() for p in qq_residual(swapped, twist, corner)):
                    votes["printed"] = False
    if votes["swapped"]:
        return "swapped"
    if votes["printed"]:
        return "printed"
    raise RuntimeError("no QQ orientation closes on exact random frames")

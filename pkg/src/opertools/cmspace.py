"""Points of the Calogero-Moser space at the three deformation levels.

=========  ==========================  ==========================
level      relation                    matrices
=========  ==========================  ==========================
q          q M T - T M = u v^T         M, T (tRS pair)
eps        T m - m T + eps T = u v^T   m, T (tCM / rRS pair)
rational   m t - t m + 1 = u v^T       m, t (rCM pair)
=========  ==========================  ==========================

The commutator order at the eps level is the one satisfied by the tCM and
rRS Lax matrices built in :mod:`opertools.lax`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .lax import lax_rcm, lax_rrs, lax_tcm
from .scalar import is_exact, to_exact
from .wronskian import check_distinct

__all__ = [
    "CMPoint",
    "LimitReport",
    "rank_one_residual",
    "relation_lhs",
    "build_T_from_diag",
    "mirror_map",
    "rational_mirror",
    "epsilon_level",
    "rational_level",
    "limit_check",
]

LEVELS = ("q", "eps", "rational")


@dataclass
class CMPoint:
    M: np.ndarray
    T: np.ndarray
    u: np.ndarray
    v: np.ndarray
    level: str = "q"
    param: object = None

    def __post_init__(self):
        if self.level not in LEVELS:
            raise ValueError(f"unknown level {self.level!r}")
        n = self.M.shape[0]
        if self.M.shape != (n, n) or self.T.shape != (n, n) or len(self.u) != n or len(self.v) != n:
            raise ValueError("inconsistent CMPoint dimensions")

    @property
    def size(self) -> int:
        return self.M.shape[0]


def _diag(values, exact: bool) -> np.ndarray:
    n = len(values)
    out = np.zeros((n, n), dtype=object if exact else complex)
    if exact:
        out[:, :] = 0
    for i, x in enumerate(values):
        out[i, i] = x
    return out


def _identity_like(a: np.ndarray) -> np.ndarray:
    return _diag([1] * a.shape[0], a.dtype == object)


def relation_lhs(pt: CMPoint) -> np.ndarray:
    M, T = pt.M, pt.T
    if pt.level == "q":
        return pt.param * M.dot(T) - T.dot(M)
    if pt.level == "eps":
        return T.dot(M) - M.dot(T) + pt.param * T
    return M.dot(T) - T.dot(M) + _identity_like(M)


def _fro(a) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=complex)))


def rank_one_residual(pt: CMPoint) -> float:
    """``||LHS - u v^T|| / ||LHS||`` (absolute when the left side vanishes)."""
    lhs = relation_lhs(pt)
    diff = lhs - np.outer(pt.u, pt.v)
    scale = _fro(lhs)
    return _fro(diff) / scale if scale > 0 else _fro(diff)


def _dyad(a: np.ndarray):
    """Factor a (numerically) rank-one matrix as ``u v^T`` with ``v`` pivot-normalised."""
    mags = np.abs(np.asarray(a, dtype=complex))
    i0, j0 = np.unravel_index(int(np.argmax(mags)), mags.shape)
    if mags[i0, j0] == 0:
        n = a.shape[0]
        zero = np.zeros(n, dtype=a.dtype)
        return zero, zero.copy()
    u = a[:, j0].copy()
    v = a[i0, :] / a[i0, j0]
    return u, v


def _prep(values, exact: bool):
    return [to_exact(x) for x in values] if exact else [complex(x) for x in values]


def _all_exact(*groups) -> bool:
    return all(is_exact(x) for g in groups for x in g)


def build_T_from_diag(xi: Sequence, p: Sequence, q) -> CMPoint:
    """q-level point with ``M = diag(xi)`` and ``v = (1, ..., 1)``.

    ``u_i = -p_i prod_k (xi_i - q xi_k) / (q^{N-1} prod_{k != i} (xi_i - xi_k))``
    and ``T_ij = u_i / (q xi_i - xi_j)``; ``T`` is then diagonally conjugate to
    the tRS Lax matrix.
    """
    if q == 0:
        raise ValueError("q must be nonzero")
    check_distinct(xi)
    exact = _all_exact([q], xi, p)
    (q,), xi, p = _prep([q], exact), _prep(xi, exact), _prep(p, exact)
    n = len(xi)
    for i in range(n):
        for j in range(n):
            if q * xi[i] == xi[j] or (not exact and abs(q * xi[i] - xi[j]) < 1e-14 * (1 + abs(xi[j]))):
                raise ValueError(f"q*xi_{i + 1} = xi_{j + 1}: pole in the T matrix")
    u = []
    for i in range(n):
        num = -p[i]
        for k in range(n):
            num = num * (xi[i] - q * xi[k])
        den = q ** (n - 1)
        for k in range(n):
            if k != i:
                den = den * (xi[i] - xi[k])
        u.append(num / den)
    dtype = object if exact else complex
    T = np.array([[u[i] / (q * xi[i] - xi[j]) for j in range(n)] for i in range(n)], dtype=dtype)
    u = np.array(u, dtype=dtype)
    v = np.array([to_exact(1) if exact else 1.0 + 0j for _ in range(n)], dtype=dtype)
    return CMPoint(_diag(xi, exact), T, u, v, "q", q)


def mirror_map(pt: CMPoint) -> CMPoint:
    """``(q, M, T, u, v) -> (1/q, T, M, -u/q, v)``, preserving the relation exactly."""
    if pt.level != "q":
        raise ValueError("mirror_map acts on q-level points; use rational_mirror otherwise")
    q = pt.param
    qinv = 1 / to_exact(q) if is_exact(q) else 1 / q
    return CMPoint(pt.T.copy(), pt.M.copy(), -pt.u * qinv, pt.v.copy(), "q", qinv)


def rational_mirror(pt: CMPoint) -> CMPoint:
    """``(m, t) -> (t, -m)``; the dyad is unchanged."""
    if pt.level != "rational":
        raise ValueError("rational_mirror acts on rational-level points")
    return CMPoint(pt.T.copy(), -pt.M, pt.u.copy(), pt.v.copy(), "rational", None)


def epsilon_level(eps, twist: Sequence, p: Sequence, mode: str = "tCM", variant: bool = False) -> CMPoint:
    """eps-level point in one of its two diagonal frames.

    ``tCM``: ``T = diag(twist)`` and ``m`` the tCM Lax matrix.
    ``rRS``: ``m = diag(twist)`` and ``T`` the rRS Lax matrix.
    """
    if mode == "tCM":
        lax = lax_tcm(eps, twist, p)
        exact = lax.exact
        m, T = lax.matrix, _diag(_prep(twist, exact), exact)
    elif mode == "rRS":
        lax = lax_rrs(eps, twist, p, variant=variant)
        exact = lax.exact
        m, T = _diag(_prep(twist, exact), exact), lax.matrix
    else:
        raise ValueError(f"mode must be 'tCM' or 'rRS', got {mode!r}")
    e = to_exact(eps) if exact else complex(eps)
    pt = CMPoint(m, T, np.zeros(len(twist)), np.zeros(len(twist)), "eps", e)
    u, v = _dyad(relation_lhs(pt))
    return replace(pt, u=u, v=v)


def rational_level(gamma: Sequence, p: Sequence) -> CMPoint:
    """``m = diag(gamma)``, ``t`` the rCM Lax matrix; diagonal of the dyad is 1."""
    lax = lax_rcm(gamma, p)
    exact = lax.exact
    m = _diag(_prep(gamma, exact), exact)
    pt = CMPoint(m, lax.matrix, np.zeros(len(gamma)), np.zeros(len(gamma)), "rational", None)
    u, v = _dyad(relation_lhs(pt))
    return replace(pt, u=u, v=v)


@dataclass
class LimitReport:
    source: str
    target: str
    R: list
    deviations: list
    source_residuals: list
    orders: list
    roundoff: bool

    @property
    def order(self) -> float:
        return self.orders[0] if self.orders else float("nan")

    def to_json(self) -> dict:
        return {
            "source": self.source, "target": self.target, "R": self.R,
            "deviations": self.deviations, "source_residuals": self.source_residuals,
            "orders": self.orders, "order": self.order, "roundoff_dominated": self.roundoff,
        }


_PAIRS = {("tRS", "tCM"), ("eps", "rCM"), ("tCM", "rCM"), ("rRS", "rCM")}


def _gauge(c):
    return np.diag(np.asarray(c, dtype=complex))


def _trs_to_tcm(eps, zeta, p, R):
    """Genuine q-level point with ``T = diag(zeta)``, ``q = e^{R eps}``.

    Its ``M`` has diagonal ``exp(-R m_ii)``; after the gauge fixing
    ``diag(c) M diag(c)^{-1}`` it approaches ``1 - R m`` with ``m`` the tCM Lax.
    """
    zeta = np.asarray(zeta, dtype=complex)
    n = len(zeta)
    m = lax_tcm(complex(eps), zeta, p).matrix
    q = np.exp(R * eps)
    w = np.exp(-R * np.diag(m)) * zeta * (q - 1)
    M = np.array([[w[i] / (q * zeta[j] - zeta[i]) for j in range(n)] for i in range(n)])
    T = np.diag(zeta)
    src = CMPoint(M, T, np.zeros(n), np.zeros(n), "q", q)
    u, v = _dyad(relation_lhs(src))
    src = replace(src, u=u, v=v)
    c = np.array([np.prod([zeta[i] - zeta[k] for k in range(n) if k != i]) for i in range(n)])
    Mg = _gauge(c).dot(M).dot(np.linalg.inv(_gauge(c)))
    approx = (np.eye(n) - Mg) / R
    return approx, m, src


def _eps_to_rcm(gamma, p, R):
    """Genuine eps-level point with ``m = diag(gamma)`` and deformation ``R``.

    ``T_ii = exp(-R t_ii)``; after gauge fixing ``T`` approaches ``1 - R t``.
    """
    g = np.asarray(gamma, dtype=complex)
    n = len(g)
    t = lax_rcm(g, p).matrix
    w = R * np.exp(-R * np.diag(t))
    T = np.array([[w[i] / (g[j] - g[i] + R) for j in range(n)] for i in range(n)])
    src = CMPoint(np.diag(g), T, np.zeros(n), np.zeros(n), "eps", R)
    u, v = _dyad(relation_lhs(src))
    src = replace(src, u=u, v=v)
    c = np.array([np.prod([g[i] - g[k] for k in range(n) if k != i]) for i in range(n)])
    Tg = _gauge(c).dot(T).dot(np.linalg.inv(_gauge(c)))
    approx = (np.eye(n) - Tg) / R
    return approx, t, src


def limit_check(source: str, target: str, data: dict, R_sequence: Sequence[float] = (1e-3, 1e-4)) -> LimitReport:
    """Measure the degeneration of a source-level point onto target-level data.

    ``data`` holds ``twist`` and ``momenta`` of the target model, plus ``eps``
    for the tRS -> tCM limit.  For each ``R`` a genuine source point (exact
    rank-one relation) is built whose diagonal matches the exponentiated
    target; the deviation is ``||(1 - X_gauged)/R - L|| / ||L||`` with ``L``
    the target Lax matrix.  Orders are Richardson estimates between
    consecutive ``R`` values.
    """
    key = (source, target)
    if key not in _PAIRS:
        raise ValueError(f"unsupported limit {source} -> {target}; known: {sorted(_PAIRS)}")
    rs = [float(abs(r)) for r in R_sequence]
    if len(rs) < 2:
        raise ValueError("R_sequence needs at least two values")
    if any(r == 0 for r in rs):
        raise ValueError("R = 0 is not allowed")
    if len(set(rs)) != len(rs):
        raise ValueError("R_sequence values must be distinct")
    twist, p = data["twist"], data["momenta"]
    devs, resids = [], []
    for R in rs:
        if source == "tRS":
            approx, L, src = _trs_to_tcm(complex(data.get("eps", 1.0)), twist, p, R)
        else:
            approx, L, src = _eps_to_rcm(twist, p, R)
        devs.append(_fro(approx - L) / max(_fro(L), 1e-300))
        resids.append(rank_one_residual(src))
    orders = []
    for k in range(len(rs) - 1):
        a, b = devs[k], devs[k + 1]
        if a > 0 and b > 0:
            orders.append(math.log(a / b) / math.log(rs[k] / rs[k + 1]))
        else:
            orders.append(float("inf"))
    # roundoff dominates once the deviation stops shrinking with R
    roundoff = any(d < 1e-15 / r for d, r in zip(devs, rs)) or any(o < 0.5 for o in orders)
    return LimitReport(source, target, rs, devs, resids, orders, roundoff)

"""Canonical-oper momentum equations and the duality pipelines.

For a canonical frame the Wronskian Lax matrix has the form
``L(p) = diag(p) A + B``, so every Hamiltonian ``H_k = e_k(eigenvalues of L)`` is affine
in each single momentum.  The energy relations ``H_k(p) = e_k(a)`` are solved
by multistart Newton with deflation; for ``N <= 3`` a lex Groebner basis gives
an independent solution count.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cmspace import build_T_from_diag, mirror_map, rank_one_residual, rational_level, rational_mirror, epsilon_level
from .corners import Corner, CornerKind
from .lax import hamiltonians, lax_for_corner, lax_tcm, wronskian_lax
from .poly import Poly, elem_sym, from_roots, roots
from .qqbethe import QQData, bethe_residual, nondegenerate, qq_relative_residual, DegenerateError
from .scalar import CRational, is_exact, to_exact
from .wronskian import Frame, check_distinct, full_determinant

__all__ = [
    "SolveConfig",
    "Solution",
    "SolveReport",
    "EnergyRelation",
    "relation_residual",
    "solve_momenta",
    "quantum_classical_check",
    "mirror_check",
    "bispectral_check",
    "weyl_check",
    "match_sets",
]


# ---------------------------------------------------------------------------
# energy relations


def relation_residual(frame: Frame, lam: Poly) -> list:
    """Coefficients ``0..N-1`` of ``D_N - Lam`` with ``D_N`` the monic full determinant."""
    n = frame.rank
    if lam.degree != n:
        raise ValueError(f"Lam must have degree {n}, got {lam.degree}")
    if not (lam.lc == 1 or (not lam.exact and abs(lam.lc - 1) < 1e-12)):
        raise ValueError("Lam must be monic")
    d, _ = full_determinant(frame)
    diff = d - lam
    return [diff.coeff(k) for k in range(n)]


class EnergyRelation:
    """``F(p) = H(p) - e(a)`` with ``H`` from ``L(p) = diag(p) A + B``."""

    def __init__(self, corner: Corner, twist: Sequence, lam_roots: Sequence):
        check_distinct(twist)
        check_distinct(lam_roots, "singularity")
        self.corner = corner
        self.twist = list(twist)
        self.lam_roots = list(lam_roots)
        self.n = len(twist)
        if len(lam_roots) != self.n:
            raise ValueError(f"need {self.n} singularity roots, got {len(lam_roots)}")
        self.exact = corner.is_exact and all(is_exact(x) for x in list(twist) + list(lam_roots))
        zeros, ones = [0] * self.n, [1] * self.n
        b = wronskian_lax(Frame.canonical(corner, self.twist, zeros)).matrix
        ab = wronskian_lax(Frame.canonical(corner, self.twist, ones)).matrix
        self.A_exact = ab - b if self.exact else None
        self.B_exact = b if self.exact else None
        self.A = np.asarray(ab - b, dtype=complex)
        self.B = np.asarray(b, dtype=complex)
        self.target = np.array([complex(elem_sym(self.lam_roots, k)) for k in range(1, self.n + 1)])
        self.scale = 1.0 + float(np.max(np.abs(self.target)))
        # real data: solutions come in conjugate pairs
        self.real = bool(np.all(np.abs(self.A.imag) < 1e-14 * (1 + np.abs(self.A)))
                         and np.all(np.abs(self.B.imag) < 1e-14 * (1 + np.abs(self.B)))
                         and np.all(np.abs(self.target.imag) < 1e-14 * (1 + np.abs(self.target))))

    def lax(self, p: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(p)
        return p[:, :, None] * self.A[None] + self.B[None]

    def hamiltonians(self, p: np.ndarray) -> np.ndarray:
        return _batched_e(self.lax(p))

    def residual(self, p) -> np.ndarray:
        return self.hamiltonians(np.asarray(p, dtype=complex)) - self.target

    def jacobian(self, p) -> np.ndarray:
        """Exact partial derivatives from multilinearity: ``H(p_i=1) - H(p_i=0)``."""
        p = np.atleast_2d(np.asarray(p, dtype=complex))
        s, n = p.shape
        jac = np.empty((s, n, n), dtype=complex)
        for i in range(n):
            hi, lo = p.copy(), p.copy()
            hi[:, i], lo[:, i] = 1.0, 0.0
            jac[:, :, i] = self.hamiltonians(hi) - self.hamiltonians(lo)
        return jac

    def norm(self, p) -> np.ndarray:
        return np.max(np.abs(self.residual(p)), axis=-1) / self.scale


def _batched_e(mats: np.ndarray) -> np.ndarray:
    """``e_1..e_N`` of the spectra of a batch, by Faddeev-LeVerrier."""
    s, n, _ = mats.shape
    ident = np.broadcast_to(np.eye(n, dtype=complex), mats.shape)
    mk = np.zeros_like(mats)
    c = np.ones(s, dtype=complex)
    out = np.empty((s, n), dtype=complex)
    for k in range(1, n + 1):
        mk = mats @ mk + c[:, None, None] * ident
        c = -np.trace(mats @ mk, axis1=1, axis2=2) / k
        out[:, k - 1] = c if k % 2 == 0 else -c
    return out


# ---------------------------------------------------------------------------
# solver


@dataclass
class SolveConfig:
    tol: float = 1e-10
    seed: int = 0
    starts: int | None = None
    max_iter: int = 60
    frames: str = "identity"
    exact: bool = False
    oracle: str = "auto"
    rounds: int = 10

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.frames not in ("identity", "all"):
            raise ValueError("frames must be 'identity' or 'all'")
        if self.oracle not in ("auto", "on", "off"):
            raise ValueError("oracle must be 'auto', 'on' or 'off'")
        if self.starts is not None and self.starts < 1:
            raise ValueError("starts must be positive")

    def n_starts(self, n: int) -> int:
        return self.starts if self.starts is not None else max(8, 4 * math.factorial(n))


@dataclass
class Solution:
    momenta: list
    residual: float
    frame: tuple = ()
    nondegenerate: bool | None = None
    diagnostics: list = field(default_factory=list)
    bethe_roots: list = field(default_factory=list)

    def as_complex(self) -> np.ndarray:
        return np.array([complex(x) for x in self.momenta])


@dataclass
class SolveReport:
    corner: Corner
    twist: list
    lam_roots: list
    solutions: list
    stats: dict = field(default_factory=dict)
    frames: list = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.solutions)


def _dedup_radius(p: np.ndarray) -> float:
    return 1e-6 * (1.0 + float(np.max(np.abs(p))))


def _is_new(p: np.ndarray, found: list) -> bool:
    r = _dedup_radius(p)
    return all(np.max(np.abs(p - f)) > r for f in found)


def _newton(rel: EnergyRelation, starts: np.ndarray, found: list, max_iter: int, tol: float):
    """Damped Newton on a batch, deflated against ``found``."""
    p_all = starts.copy()
    live = np.ones(len(p_all), dtype=bool)
    iters = 0
    for it in range(max_iter):
        iters = it + 1
        idx = np.flatnonzero(live)
        if idx.size == 0:
            break
        p = p_all[idx]
        f = rel.residual(p)
        fn = np.max(np.abs(f), axis=1) / rel.scale
        active = fn > tol * 1e-2
        live[idx[~active]] = False
        if not active.any():
            break
        p, f, fn = p[active], f[active], fn[active]
        idx = idx[active]
        jac = rel.jacobian(p)
        try:
            delta = np.linalg.solve(jac, -f[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            delta = np.stack([np.linalg.lstsq(j, -v, rcond=None)[0] for j, v in zip(jac, f)])
        if found:
            # deflation m(p) = prod (1/|p - r|^2 + 1); step scaled by 1/(1 - dlog m . delta)
            dl = np.zeros(len(p))
            with np.errstate(over="ignore", invalid="ignore"):
                # runaway starts overflow here; they are dropped below
                for r in found:
                    d = p - r
                    n2 = np.sum(np.abs(d) ** 2, axis=1)
                    t = 1.0 / np.maximum(n2, 1e-300)
                    dl += -t * t * 2 * np.real(np.sum(np.conj(d) * delta, axis=1)) / (t + 1)
                tau = 1.0 / (1.0 - dl)
            tau = np.where(np.isfinite(tau) & (np.abs(tau) < 1e6), tau, 1.0)
            delta = delta * tau[:, None]
        best = p.copy()
        best_n = fn.copy()
        for t in (1.0, 0.5, 0.25, 0.125, 0.0625):
            cand = p + t * delta
            cn = rel.norm(cand)
            ok = np.isfinite(cn) & (cn < best_n) & (best_n == fn)
            best[ok] = cand[ok]
            best_n[ok] = cn[ok]
        stuck = best_n == fn
        # accept a short step anyway to escape plateaus
        best[stuck] = (p + 0.0625 * delta)[stuck]
        bad = ~np.all(np.isfinite(best), axis=1)
        best[bad] = p[bad]
        p_all[idx] = best
        # drop starts that ran off to infinity
        live[idx[np.max(np.abs(best), axis=1) > 1e12]] = False
    return p_all, iters


def _draw_starts(rng, n: int, count: int, scale) -> np.ndarray:
    # half the starts are log-wide so that lopsided solutions are reachable
    sigma = np.where(np.arange(count) % 2 == 0, 0.8, 3.0)[:, None]
    mags = np.asarray(scale) * np.exp(sigma * rng.normal(0.0, 1.0, size=(count, n)))
    phases = rng.uniform(0, 2 * np.pi, size=(count, n))
    return mags * np.exp(1j * phases)


def _newton_solve(rel: EnergyRelation, config: SolveConfig, expected: int | None):
    rng = np.random.default_rng(config.seed)
    n = rel.n
    scale = float(np.exp(np.mean(np.log(np.abs(np.asarray(rel.lam_roots, dtype=complex)) + 1e-3))))
    scale = max(scale, 1e-3)
    # multilinear Bezout bound for N equations of degrees 1..N in N variables
    bound = math.factorial(n)
    found, iters_total, starts_total, best_fail = [], 0, 0, float("inf")
    stale = 0
    for rnd in range(config.rounds):
        count = config.n_starts(n)
        if found:
            # later rounds: half the starts use the per-coordinate scale of known roots
            coord = np.exp(np.mean(np.log(np.abs(np.array(found)) + 1e-12), axis=0))
            half = count // 2
            starts = np.vstack([_draw_starts(rng, n, count - half, scale),
                                _draw_starts(rng, n, half, coord)])
        else:
            starts = _draw_starts(rng, n, count, scale)
        if rel.real and found:
            starts = np.vstack([np.conj(np.array(found)), starts])
        starts_total += count
        out, iters = _newton(rel, starts, found, config.max_iter, config.tol)
        # polish undeflated
        out, _ = _newton(rel, out, [], 6, config.tol)
        iters_total += iters
        norms = rel.norm(out)
        new = 0
        for p, nr in sorted(zip(out, norms), key=lambda t: t[1]):
            if nr <= config.tol and np.all(np.isfinite(p)):
                if _is_new(p, found):
                    found.append(p)
                    new += 1
            else:
                best_fail = min(best_fail, float(nr))
        if len(found) >= (expected if expected is not None else bound):
            break
        stale = stale + 1 if new == 0 else 0
        if expected is None and stale >= 3:
            break
    stats = {"starts": starts_total, "iterations": iters_total, "rounds": rnd + 1,
             "dedup_radius_rel": 1e-6, "best_failed_residual": best_fail}
    return found, stats


# ---------------------------------------------------------------------------
# elimination oracle


def _sym(x):
    import sympy as sp

    x = to_exact(x)
    return sp.Rational(x.re.numerator, x.re.denominator) + sp.I * sp.Rational(x.im.numerator, x.im.denominator)


def _to_crational(val):
    import sympy as sp

    re, im = sp.re(val), sp.im(val)
    if re.is_Rational and im.is_Rational:
        return CRational(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))
    return None


def _oracle(rel: EnergyRelation, exact_out: bool):
    """Solutions from a lex Groebner basis in shape position, or None."""
    import mpmath
    import sympy as sp

    if not rel.exact or rel.n > 3:
        return None
    n = rel.n
    ps = sp.symbols(f"p0:{n}")
    z = sp.Symbol("z")
    A = sp.Matrix(n, n, lambda i, j: _sym(rel.A_exact[i, j]))
    B = sp.Matrix(n, n, lambda i, j: _sym(rel.B_exact[i, j]))
    L = sp.diag(*ps) * A + B
    cp = sp.Poly(L.charpoly(z).as_expr(), z).all_coeffs()[1:]
    target = sp.Poly(sp.prod([z - _sym(a) for a in rel.lam_roots]), z).all_coeffs()[1:]
    eqs = [sp.expand(c - t) for c, t in zip(cp, target)]
    G = sp.groebner(eqs, *ps, order="lex", extension=True) if any(
        to_exact(x).im != 0 for x in list(rel.A_exact.ravel()) + list(rel.B_exact.ravel()) + rel.lam_roots
    ) else sp.groebner(eqs, *ps, order="lex")
    exprs = list(G.exprs)
    if exprs == [1]:
        return []
    last = ps[-1]
    uni = [e for e in exprs if e.free_symbols <= {last}]
    if len(uni) != 1 or len(exprs) != n:
        return None
    lin = {}
    for e in exprs:
        if e is uni[0]:
            continue
        poly = sp.Poly(e, *ps)
        lead = [s for s in ps[:-1] if poly.degree(s) > 0]
        if len(lead) != 1 or poly.degree(lead[0]) != 1:
            return None
        s = lead[0]
        coeff = sp.Poly(e, s).coeff_monomial(s)
        if coeff.free_symbols:
            return None
        lin[s] = sp.expand(-(e - coeff * s) / coeff)
    g = sp.Poly(uni[0], last)
    mpmath.mp.dps = 40
    coeffs = [complex(c) for c in g.all_coeffs()]
    num_roots = mpmath.polyroots([mpmath.mpc(c) for c in g.all_coeffs()], maxsteps=400, extraprec=200) \
        if g.degree() > 0 else []
    del coeffs
    sols = []
    for r in num_roots:
        exact_r = None
        if exact_out:
            guess = sp.Rational(str(Fraction(float(mpmath.re(r))).limit_denominator(10 ** 6))) + \
                sp.I * sp.Rational(str(Fraction(float(mpmath.im(r))).limit_denominator(10 ** 6)))
            if sp.simplify(g.as_expr().subs(last, guess)) == 0:
                exact_r = guess
        if exact_r is not None:
            vals = {last: exact_r}
            for s, f in lin.items():
                vals[s] = sp.nsimplify(f.subs(last, exact_r))
            row = [_to_crational(sp.expand(vals[s])) for s in ps]
            if all(v is not None for v in row):
                sols.append(tuple(row))
                continue
        vals = {last: sp.Float(mpmath.re(r), 40) + sp.I * sp.Float(mpmath.im(r), 40)}
        row = []
        for s in ps[:-1]:
            row.append(complex(sp.N(lin[s].subs(last, vals[last]), 30)))
        row.append(complex(vals[last]))
        sols.append(tuple(row))
    return sols


# ---------------------------------------------------------------------------


def _canonical_sort(sols: list) -> list:
    return sorted(sols, key=lambda s: tuple((round(complex(x).real, 9), round(complex(x).imag, 9)) for x in s.momenta))


def _analyse(rel: EnergyRelation, corner: Corner, twist, p, exact: bool, perm: tuple) -> Solution:
    pc = np.array([complex(x) for x in p])
    res = float(rel.norm(pc)[0])
    sol = Solution(list(p), res, perm)
    if rel.n < 2:
        sol.nondegenerate = True
        return sol
    try:
        frame = Frame.canonical(corner if exact else _float_corner(corner),
                                list(twist) if exact else [complex(x) for x in twist],
                                list(p) if exact else list(pc))
        data = QQData.from_frame(frame)
        ok, diag = nondegenerate(data, frame.twist, frame.corner)
        sol.nondegenerate = ok
        sol.diagnostics = diag
        sol.bethe_roots = [[x for x in roots(q)] if q.degree > 0 else [] for q in data.qplus]
    except (ArithmeticError, ValueError) as exc:
        sol.nondegenerate = False
        sol.diagnostics = [f"Q extraction failed: {exc}"]
    return sol


def _float_corner(corner: Corner) -> Corner:
    if corner.param is None:
        return corner
    return Corner(corner.kind, complex(corner.param))


def _lam_roots_of(lam) -> list:
    if isinstance(lam, Poly):
        if lam.degree < 1:
            raise ValueError("Lam must have positive degree")
        if not (lam.lc == 1 or (not lam.exact and abs(lam.lc - 1) < 1e-12)):
            raise ValueError("Lam must be monic")
        return roots(lam)
    return list(lam)


def _solve_frame(corner, twist, lam_roots, config, perm):
    exact_in = corner.is_exact and all(is_exact(x) for x in list(twist) + list(lam_roots))
    rel = EnergyRelation(corner, twist, lam_roots)
    want_oracle = config.oracle == "on" or (config.oracle == "auto" and rel.n <= 3)
    oracle = None
    t0 = time.perf_counter()
    if want_oracle and exact_in:
        oracle = _oracle(rel, exact_out=config.exact)
    t_oracle = time.perf_counter() - t0
    expected = len(oracle) if oracle is not None else None
    found, stats = _newton_solve(rel, config, expected)
    stats["oracle_count"] = expected
    stats["oracle_seconds"] = t_oracle
    stats["newton_count"] = len(found)
    exact = config.exact and exact_in
    if oracle is not None:
        # certify: every oracle root must have been found and vice versa
        oc = [np.array([complex(x) for x in s]) for s in oracle]
        missing = [s for s, c in zip(oracle, oc) if _is_new(c, found)]
        stats["complete"] = not missing and len(found) == len(oracle)
        stats["oracle_added"] = len(missing)
        if exact:
            sols = [list(s) for s in oracle]
        else:
            sols = [list(f) for f in found]
            for s in missing:
                polished, _ = _newton(rel, np.array([[complex(x) for x in s]]), [], 10, config.tol)
                sols.append(list(polished[0]))
    else:
        stats["complete"] = None
        stats["oracle_added"] = 0
        sols = [list(f) for f in found]
    out = []
    for s in sols:
        if not exact:
            s = [complex(x) for x in s]
        out.append(_analyse(rel, corner, twist, s, exact and all(is_exact(x) for x in s), perm))
    return _canonical_sort(out), stats


def solve_momenta(corner: Corner, twist: Sequence, lam, config: SolveConfig | None = None) -> SolveReport:
    """All solutions of ``H_k(p) = e_k(a)`` in the identity frame (or every frame)."""
    config = config or SolveConfig()
    lam_roots = _lam_roots_of(lam)
    twist = list(twist)
    if len(lam_roots) != len(twist):
        raise ValueError(f"Lam has {len(lam_roots)} roots for {len(twist)} twist entries")
    check_distinct(twist)
    check_distinct(lam_roots, "singularity")
    n = len(twist)
    sols, stats = _solve_frame(corner, twist, lam_roots, config, tuple(range(n)))
    report = SolveReport(corner, twist, lam_roots, sols, stats)
    report.frames.append((tuple(range(n)), sols, stats))
    if config.frames == "all":
        for perm in itertools.permutations(range(n)):
            if perm == tuple(range(n)):
                continue
            tw = [twist[i] for i in perm]
            fs, fstats = _solve_frame(corner, tw, lam_roots, config, perm)
            report.frames.append((perm, fs, fstats))
    return report


# ---------------------------------------------------------------------------
# verification pipelines


def match_sets(a: Sequence, b: Sequence, tol: float = 1e-8):
    """Greedy bijection between two lists of vectors; returns ``(ok, max_distance)``."""
    a = [np.asarray([complex(x) for x in v]) for v in a]
    b = [np.asarray([complex(x) for x in v]) for v in b]
    if len(a) != len(b):
        return False, float("inf")
    used = set()
    worst = 0.0
    for v in a:
        best, best_d = None, float("inf")
        for j, w in enumerate(b):
            if j in used:
                continue
            d = float(np.max(np.abs(v - w))) / (1.0 + float(np.max(np.abs(v))))
            if d < best_d:
                best, best_d = j, d
        if best is None or best_d > tol:
            return False, best_d
        used.add(best)
        worst = max(worst, best_d)
    return True, worst


def quantum_classical_check(report: SolveReport, tol: float = 1e-8, trig_form: str = "qq") -> dict:
    """Lax energies, QQ residuals and Bethe residuals for every solution."""
    corner = report.corner
    target = [elem_sym(report.lam_roots, k) for k in range(1, len(report.twist) + 1)]
    records = []
    passed = True
    for sol in report.solutions:
        exact = all(is_exact(x) for x in sol.momenta) and corner.is_exact and all(
            is_exact(x) for x in report.twist)
        rec = {"momenta": sol.momenta, "nondegenerate": sol.nondegenerate, "diagnostics": sol.diagnostics}
        lax = lax_for_corner(corner if exact else _float_corner(corner), report.twist, sol.momenta)
        h = hamiltonians(lax)
        scale = 1.0 + max(abs(complex(t)) for t in target)
        energy = max(abs(complex(x) - complex(t)) for x, t in zip(h, target)) / scale
        rec["energy_residual"] = energy
        ok = energy <= tol
        if len(report.twist) >= 2:
            frame = Frame.canonical(corner if exact else _float_corner(corner),
                                    report.twist, sol.momenta)
            try:
                data = QQData.from_frame(frame)
                rec["qq_residual"] = qq_relative_residual(data, frame.twist, frame.corner)
                ok = ok and rec["qq_residual"] <= tol
                if sol.nondegenerate:
                    terms = bethe_residual(data, frame.twist, frame.corner, trig_form=trig_form)
                    rec["bethe"] = [{"node": t.node, "root": t.root, "value": t.value,
                                     "relative": t.relative} for t in terms]
                    rec["bethe_max"] = max((t.relative for t in terms), default=0.0)
                    ok = ok and rec["bethe_max"] <= tol
                    if corner.is_shift:
                        rec["bethe_sides"] = _bethe_sides(data, frame)
                else:
                    rec["flag"] = "degenerate"
            except (ArithmeticError, DegenerateError) as exc:
                rec["flag"] = f"degenerate: {exc}"
        rec["pass"] = bool(ok)
        passed = passed and ok
        records.append(rec)
    return {"pass": passed, "solutions": records}


def _bethe_sides(data: QQData, frame: Frame) -> list:
    """Ratio form ``x_i Q(s s) ... / (x_{i+1} Q(s/s) ...)`` against ``-Lam(s)/Lam(s/s)``."""
    corner, tw = frame.corner, frame.twist
    out = []
    for i in range(1, data.r + 1):
        q = data.Q(i)
        for s in (roots(q) if q.degree > 0 else []):
            up, dn = corner.move(s, 1), corner.move(s, -1)
            lam = data.lambdas[i - 1]
            num = tw[i - 1] * q(up) * data.Q(i - 1)(s) * data.Q(i + 1)(dn)
            den = tw[i] * q(dn) * data.Q(i - 1)(up) * data.Q(i + 1)(s)
            try:
                lhs = num / den
                rhs = -lam(s) / lam(dn)
            except ZeroDivisionError:
                lhs = rhs = None
            out.append({"node": i, "root": s, "lhs": lhs, "rhs": rhs})
    return out


def _dual_momenta_q(pt_dual, a, qinv):
    """Momenta of a dual q-level point whose ``M`` is diagonal with entries ``a``."""
    n = len(a)
    out = []
    for i in range(n):
        num = pt_dual[i, i] * qinv ** (n - 1)
        for k in range(n):
            if k != i:
                num = num * (a[i] - a[k]) / (a[i] - qinv * a[k])
        out.append(num)
    return out


def _diagonalise(mat: np.ndarray, order: Sequence):
    """Eigenvectors of ``mat`` ordered to match the eigenvalue list ``order``."""
    w, vecs = np.linalg.eig(np.asarray(mat, dtype=complex))
    perm = []
    left = list(range(len(w)))
    for target in order:
        j = min(left, key=lambda k: abs(w[k] - target))
        perm.append(j)
        left.remove(j)
    return w[perm], vecs[:, perm]


def _mirror_collisions(corner: Corner, twist, lam_roots) -> list:
    """Poles of the q-level T matrix on either side (``q x_i = x_j``)."""
    if corner.kind is not CornerKind.QMULT:
        return []
    q = complex(corner.param)
    out = []
    for name, vals in (("twist", twist), ("singularity", lam_roots)):
        v = [complex(x) for x in vals]
        for i in range(len(v)):
            for j in range(len(v)):
                for s in (q, 1 / q):
                    if abs(s * v[i] - v[j]) <= 1e-10 * (1 + abs(v[j])):
                        out.append(f"{name} entries {i + 1},{j + 1} related by q^{{+-1}}")
    return sorted(set(out))


def mirror_check(corner: Corner, twist: Sequence, lam_roots: Sequence, config: SolveConfig | None = None,
                 tol: float = 1e-8) -> dict:
    """Solve the primal and dual systems and match them through the mirror map."""
    config = config or SolveConfig()
    if corner.kind is CornerKind.QMULT:
        q = corner.param
        qinv = 1 / to_exact(q) if is_exact(q) else 1 / complex(q)
        dual_corner = Corner.q(qinv)
        dual_twist, dual_roots = list(lam_roots), list(twist)
    elif corner.kind is CornerKind.RATDIFF:
        dual_corner = corner
        dual_twist, dual_roots = list(lam_roots), [-x for x in twist]
    else:
        raise ValueError("mirror_check needs the q or rational corner")
    primal = solve_momenta(corner, twist, lam_roots, config)
    dual = solve_momenta(dual_corner, dual_twist, dual_roots, config)
    a = np.array([complex(x) for x in lam_roots])
    flags = _mirror_collisions(corner, twist, lam_roots)
    if flags:
        return {
            "pass": False,
            "flag": "degenerate: " + "; ".join(flags),
            "primal_count": primal.count,
            "dual_count": dual.count,
            "bijection": False,
            "primal": [s.momenta for s in primal.solutions],
            "dual": [s.momenta for s in dual.solutions],
            "primal_stats": primal.stats,
            "dual_stats": dual.stats,
        }
    mapped, rank_res = [], []
    for sol in primal.solutions:
        p = [complex(x) for x in sol.momenta]
        if corner.kind is CornerKind.QMULT:
            pt = build_T_from_diag([complex(x) for x in twist], p, complex(q))
            img = mirror_map(pt)
            rank_res.append(rank_one_residual(img))
            _, P = _diagonalise(img.M, a)
            Tn = np.linalg.solve(P, img.T.dot(P))
            mapped.append(_dual_momenta_q(Tn, a, complex(qinv)))
        else:
            pt = rational_level([complex(x) for x in twist], p)
            img = rational_mirror(pt)
            rank_res.append(rank_one_residual(img))
            _, P = _diagonalise(img.M, a)
            tn = np.linalg.solve(P, img.T.dot(P))
            n = len(a)
            mapped.append([tn[i, i] + sum(1 / (a[i] - a[k]) for k in range(n) if k != i) for i in range(n)])
    ok, dist = match_sets(mapped, [s.momenta for s in dual.solutions], tol)
    counts_ok = primal.count == dual.count
    worst_rank = max(rank_res, default=0.0)
    return {
        "pass": bool(ok and counts_ok and worst_rank < 1e-8),
        "primal_count": primal.count,
        "dual_count": dual.count,
        "bijection": bool(ok),
        "max_distance": dist,
        "mirror_rank_one_residual": worst_rank,
        "primal": [s.momenta for s in primal.solutions],
        "dual": [s.momenta for s in dual.solutions],
        "mapped": mapped,
        "primal_stats": primal.stats,
        "dual_stats": dual.stats,
    }


def bispectral_check(eps, gamma: Sequence, p: Sequence, tol: float = 1e-8) -> dict:
    """Read the tCM frame off an rRS-mode eps-level point and cross-check energies."""
    pt = epsilon_level(eps, gamma, p, mode="rRS")
    T = np.asarray(pt.T, dtype=complex)
    m = np.asarray(pt.M, dtype=complex)
    zeta = np.linalg.eigvals(T)
    n = len(zeta)
    rec = {"spectrum_T": list(zeta), "rank_one_residual": rank_one_residual(pt)}
    gap = min((abs(zeta[i] - zeta[j]) for i in range(n) for j in range(i + 1, n)), default=1.0)
    if gap < 1e-6 * (1 + max(abs(zeta))):
        rec.update({"pass": False, "flag": "degenerate spectrum: T is not diagonalisable in a regular frame"})
        return rec
    zeta, P = _diagonalise(T, zeta)
    mt = np.linalg.solve(P, m.dot(P))
    e = complex(eps)
    p_tcm = [mt[i, i] + e * zeta[i] * sum(1 / (zeta[i] - zeta[k]) for k in range(n) if k != i) for i in range(n)]
    tcm = lax_tcm(e, zeta, p_tcm)
    h_rrs = hamiltonians(np.asarray(pt.T, dtype=complex))
    h_tcm = hamiltonians(tcm)
    e_zeta = [elem_sym(list(zeta), k) for k in range(1, n + 1)]
    e_gamma = [complex(elem_sym(list(gamma), k)) for k in range(1, n + 1)]
    s1 = 1 + max(abs(x) for x in e_zeta)
    s2 = 1 + max(abs(x) for x in e_gamma)
    d1 = max(abs(a - b) for a, b in zip(h_rrs, e_zeta)) / s1
    d2 = max(abs(a - b) for a, b in zip(h_tcm, e_gamma)) / s2
    rec.update({
        "tcm_twist": list(zeta),
        "tcm_momenta": p_tcm,
        "rrs_energy_residual": d1,
        "tcm_energy_residual": d2,
        "pass": bool(d1 <= tol and d2 <= tol),
    })
    return rec


def weyl_check(report: SolveReport, tol: float = 1e-8) -> dict:
    """Each permuted frame's solutions equal the permuted identity-frame solutions."""
    if len(report.frames) < 2:
        raise ValueError("weyl_check needs a report solved with frames='all'")
    base = [s.momenta for s in report.frames[0][1]]
    out = []
    ok_all = True
    for perm, sols, _ in report.frames[1:]:
        moved = [[b[i] for i in perm] for b in base]
        ok, dist = match_sets(moved, [s.momenta for s in sols], tol)
        out.append({"perm": list(perm), "count": len(sols), "match": ok, "distance": dist})
        ok_all = ok_all and ok
    return {"pass": ok_all, "identity_count": len(base), "frames": out}

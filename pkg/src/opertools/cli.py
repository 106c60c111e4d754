"""JSON-configured command-line front end.

A job is a JSON object with a ``command`` and its parameters; the report
echoes the normalised job, the results and some metadata.  Exit status is 0
when every verdict passes, 1 on a verification failure and 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import platform
import sys
import tempfile
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .cmspace import CMPoint, build_T_from_diag, epsilon_level, limit_check, rank_one_residual, rational_level
from .corners import Corner, CornerKind, parse_corner
from .lax import charpoly, hamiltonians, lax_for_corner
from .opersolve import SolveConfig, bispectral_check, mirror_check, quantum_classical_check, solve_momenta
from .poly import Poly, roots
from .qqbethe import QQ_ORIENTATION, DegenerateError, QQData, bethe_residual, nondegenerate, qq_relative_residual
from .scalar import CRational, parse_scalar
from .wronskian import Frame, TwistCollisionError, full_determinant

COMMANDS = ("lax", "solve", "verify-qq", "verify-bethe", "verify-rankone", "mirror", "bispectral", "limit")

DEFAULTS = {"tol": 1e-10, "seed": 0, "starts": None, "frames": "identity", "exact": False, "output": "json"}


class JobError(ValueError):
    """Invalid job; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


# ---------------------------------------------------------------------------
# encoding


def encode(x):
    """JSON form of scalars, arrays and nested containers."""
    if isinstance(x, CRational):
        if x.im == 0:
            return _frac(x.re)
        return [_frac(x.re), _frac(x.im)]
    if isinstance(x, Fraction):
        return _frac(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return _float(float(x))
    if isinstance(x, (complex, np.complexfloating)):
        z = complex(x)
        # drop roundoff-level imaginary parts of real values
        if abs(z.imag) <= 1e-13 * max(1.0, abs(z.real)):
            return _float(z.real)
        return [_float(z.real), _float(z.imag)]
    if isinstance(x, np.ndarray):
        return [encode(v) for v in x.tolist()] if x.dtype != object else [encode(v) for v in x]
    if isinstance(x, Poly):
        return [encode(c) for c in x.coeffs]
    if isinstance(x, Corner):
        return {k: encode(v) for k, v in x.to_json().items()}
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode(v) for v in x]
    if x is None or isinstance(x, str):
        return x
    return str(x)


def _frac(f: Fraction):
    f = Fraction(f)
    return int(f) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _float(v: float):
    if math.isfinite(v):
        return v
    return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")


# ---------------------------------------------------------------------------
# job normalisation


def _scalar(job, key, exact, required=True):
    if key not in job or job[key] is None:
        if required:
            raise JobError(key, "missing")
        return None
    try:
        return parse_scalar(job[key], exact=exact)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise JobError(key, str(exc)) from None


def _vector(job, key, exact, required=True):
    if key not in job or job[key] is None:
        if required:
            raise JobError(key, "missing")
        return None
    val = job[key]
    if not isinstance(val, list) or not val:
        raise JobError(key, "expected a non-empty list")
    try:
        return [parse_scalar(v, exact=exact) for v in val]
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise JobError(key, str(exc)) from None


def _matrix(job, key, exact):
    rows = job.get(key)
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise JobError(key, "expected a list of rows")
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise JobError(key, "matrix must be square")
    try:
        vals = [[parse_scalar(v, exact=exact) for v in r] for r in rows]
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise JobError(key, str(exc)) from None
    return np.array(vals, dtype=object if exact else complex)


def _corner(job, exact):
    name = job.get("corner")
    if name is None:
        raise JobError("corner", "missing")
    try:
        kind = parse_corner(name, 2).kind
    except ValueError as exc:
        raise JobError("corner", str(exc)) from None
    if kind is CornerKind.QMULT:
        q = _scalar(job, "q", exact)
        if q == 0:
            raise JobError("q", "q must be nonzero")
        if not exact and abs(abs(q) - 1) < 1e-12 and abs(q - 1) < 1e-12:
            raise JobError("q", "q = 1 is not a q-deformation")
        return Corner.q(q)
    if kind is CornerKind.EPSADD:
        eps = _scalar(job, "eps", exact)
        if eps == 0:
            raise JobError("eps", "eps must be nonzero")
        return Corner.eps(eps)
    return Corner(kind)


def _lambda_roots(job, exact):
    if job.get("lambda_roots") is not None:
        return _vector(job, "lambda_roots", exact)
    if job.get("lambda_coeffs") is not None:
        coeffs = _vector(job, "lambda_coeffs", exact)
        try:
            return list(roots(Poly(coeffs)))
        except (ValueError, ArithmeticError) as exc:
            raise JobError("lambda_coeffs", str(exc)) from None
    raise JobError("lambda_roots", "missing (or give lambda_coeffs)")


def normalize(job: dict) -> dict:
    """Validate a job and fill in defaults; raises :class:`JobError`."""
    if not isinstance(job, dict):
        raise JobError("job", "expected a JSON object")
    out = dict(DEFAULTS)
    out.update({k: v for k, v in job.items() if v is not None})
    cmd = out.get("command")
    if cmd not in COMMANDS:
        raise JobError("command", f"expected one of {', '.join(COMMANDS)}, got {cmd!r}")
    try:
        tol = float(out["tol"])
    except (TypeError, ValueError):
        raise JobError("tol", "not a number") from None
    if not tol > 0:
        raise JobError("tol", "must be positive")
    out["tol"] = tol
    if out["frames"] not in ("identity", "all"):
        raise JobError("frames", "expected 'identity' or 'all'")
    if out["output"] not in ("json", "csv"):
        raise JobError("output", "expected 'json' or 'csv'")
    if out["output"] == "csv" and cmd != "solve":
        raise JobError("output", "csv output is available for solution tables (solve) only")
    if not isinstance(out["exact"], bool):
        raise JobError("exact", "expected true or false")
    if out["starts"] is not None and (not isinstance(out["starts"], int) or out["starts"] < 1):
        raise JobError("starts", "expected a positive integer")
    if not isinstance(out["seed"], int):
        raise JobError("seed", "expected an integer")
    return out


# ---------------------------------------------------------------------------
# commands


def _frame(job, exact):
    corner = _corner(job, exact)
    twist = _vector(job, "twist", exact)
    if job.get("sections") is not None:
        secs = job["sections"]
        if not isinstance(secs, list) or len(secs) != len(twist):
            raise JobError("sections", "one coefficient list per twist entry is required")
        try:
            polys = [Poly([parse_scalar(c, exact=exact) for c in s]) for s in secs]
        except (ValueError, TypeError) as exc:
            raise JobError("sections", str(exc)) from None
        return Frame(corner, tuple(twist), tuple(polys))
    momenta = _vector(job, "momenta", exact)
    if len(momenta) != len(twist):
        raise JobError("momenta", f"need {len(twist)} momenta, got {len(momenta)}")
    return Frame.canonical(corner, twist, momenta)


def _cmd_lax(job, exact):
    corner = _corner(job, exact)
    twist = _vector(job, "twist", exact)
    momenta = _vector(job, "momenta", exact)
    if len(momenta) != len(twist):
        raise JobError("momenta", f"need {len(twist)} momenta, got {len(momenta)}")
    model = lax_for_corner(corner, twist, momenta, variant=bool(job.get("variant", False)))
    cp = charpoly(model.matrix)
    det, _ = full_determinant(Frame.canonical(corner, twist, momenta))
    diff = cp - det
    residual = diff.max_abs() / (1.0 + cp.max_abs())
    return {
        "model": model.tag,
        "matrix": model.matrix,
        "hamiltonians": hamiltonians(model),
        "charpoly": cp,
        "wronskian_determinant": det,
        "spectral_residual": residual,
        "pass": residual <= job["tol"],
    }


def _config(job):
    return SolveConfig(tol=job["tol"], seed=job["seed"], starts=job["starts"], frames=job["frames"],
                       exact=job["exact"])


def _cmd_solve(job, exact):
    corner = _corner(job, exact)
    twist = _vector(job, "twist", exact)
    lam = _lambda_roots(job, exact)
    report = solve_momenta(corner, twist, lam, _config(job))
    check = quantum_classical_check(report, tol=max(job["tol"], 1e-8),
                                    trig_form=job.get("trig_form", "qq"))
    sols = []
    for s, rec in zip(report.solutions, check["solutions"]):
        sols.append({"momenta": s.momenta, "residual": s.residual, "nondegenerate": s.nondegenerate,
                     "diagnostics": s.diagnostics, "energy_residual": rec.get("energy_residual"),
                     "qq_residual": rec.get("qq_residual"), "bethe_max": rec.get("bethe_max")})
    frames = [{"perm": list(p), "count": len(fs), "solutions": [f.momenta for f in fs]}
              for p, fs, _ in report.frames]
    ok = all(float(s.residual) <= job["tol"] for s in report.solutions)
    stats = dict(report.stats)
    timing = {"oracle_seconds": stats.pop("oracle_seconds", None)}
    return {"count": report.count, "solutions": sols, "frames": frames, "stats": stats, "pass": ok,
            "_timing": timing}


def _cmd_verify_qq(job, exact):
    frame = _frame(job, exact)
    data = QQData.from_frame(frame)
    res = qq_relative_residual(data, frame.twist, frame.corner)
    ok_nd, issues = nondegenerate(data, frame.twist, frame.corner)
    return {
        "qplus": data.qplus, "qminus": data.qminus, "lambdas": data.lambdas,
        "qq_residual": res, "nondegenerate": ok_nd, "issues": issues,
        "pass": res <= job["tol"],
    }


def _cmd_verify_bethe(job, exact):
    frame = _frame(job, exact)
    data = QQData.from_frame(frame)
    ok_nd, issues = nondegenerate(data, frame.twist, frame.corner)
    out = {"qplus": data.qplus, "nondegenerate": ok_nd, "issues": issues}
    if not ok_nd:
        out.update({"flag": "degenerate", "pass": False})
        return out
    terms = bethe_residual(data, frame.twist, frame.corner, trig_form=job.get("trig_form", "qq"))
    worst = max((t.relative for t in terms), default=0.0)
    out.update({
        "terms": [{"node": t.node, "root": t.root, "value": t.value, "relative": t.relative} for t in terms],
        "bethe_max": worst,
        "pass": worst <= job["tol"],
    })
    return out


def _cmd_verify_rankone(job, exact):
    level = job.get("level", "q")
    if level not in ("q", "eps", "rational"):
        raise JobError("level", "expected 'q', 'eps' or 'rational'")
    if job.get("M") is not None:
        M, T = _matrix(job, "M", exact), _matrix(job, "T", exact)
        if M.shape != T.shape:
            raise JobError("T", "shape differs from M")
        u, v = _vector(job, "u", exact), _vector(job, "v", exact)
        param = _scalar(job, "q" if level == "q" else "eps", exact, required=level != "rational")
        pt = CMPoint(M, T, np.array(u, dtype=M.dtype), np.array(v, dtype=M.dtype), level, param)
    else:
        twist = _vector(job, "twist", exact)
        momenta = _vector(job, "momenta", exact)
        if len(momenta) != len(twist):
            raise JobError("momenta", f"need {len(twist)} momenta, got {len(momenta)}")
        if level == "q":
            pt = build_T_from_diag(twist, momenta, _scalar(job, "q", exact))
        elif level == "eps":
            pt = epsilon_level(_scalar(job, "eps", exact), twist, momenta, mode=job.get("mode", "tCM"))
        else:
            pt = rational_level(twist, momenta)
    res = rank_one_residual(pt)
    return {"M": pt.M, "T": pt.T, "u": pt.u, "v": pt.v, "rank_one_residual": res, "pass": res <= job["tol"]}


def _strip_timing(stats: dict) -> dict:
    return {k: v for k, v in stats.items() if not k.endswith("_seconds")}


def _cmd_mirror(job, exact):
    corner = _corner(job, exact)
    if corner.kind not in (CornerKind.QMULT, CornerKind.RATDIFF):
        raise JobError("corner", "mirror needs the q or rational corner")
    twist = _vector(job, "twist", exact)
    lam = _lambda_roots(job, exact)
    out = mirror_check(corner, twist, lam, _config(job), tol=max(job["tol"], 1e-8))
    for key in ("primal_stats", "dual_stats"):
        out[key] = _strip_timing(out[key])
    return out


def _cmd_bispectral(job, exact):
    eps = _scalar(job, "eps", exact)
    twist = _vector(job, "twist", exact)
    momenta = _vector(job, "momenta", exact)
    if len(momenta) != len(twist):
        raise JobError("momenta", f"need {len(twist)} momenta, got {len(momenta)}")
    return bispectral_check(eps, twist, momenta, tol=max(job["tol"], 1e-8))


def _cmd_limit(job, exact):
    source, target = job.get("source", "tRS"), job.get("target", "tCM")
    twist = _vector(job, "twist", False)
    momenta = _vector(job, "momenta", False)
    data = {"twist": twist, "momenta": momenta}
    if job.get("eps") is not None:
        data["eps"] = _scalar(job, "eps", False)
    rs = job.get("R", [1e-3, 1e-4])
    try:
        rep = limit_check(source, target, data, rs)
    except ValueError as exc:
        raise JobError("source" if "unsupported" in str(exc) else "R", str(exc)) from None
    min_order = float(job.get("min_order", 0.9))
    out = rep.to_json()
    out["min_order"] = min_order
    out["pass"] = bool(min(rep.orders) >= min_order)
    return out


_DISPATCH = {
    "lax": _cmd_lax,
    "solve": _cmd_solve,
    "verify-qq": _cmd_verify_qq,
    "verify-bethe": _cmd_verify_bethe,
    "verify-rankone": _cmd_verify_rankone,
    "mirror": _cmd_mirror,
    "bispectral": _cmd_bispectral,
    "limit": _cmd_limit,
}


def _metadata(elapsed: float) -> dict:
    return {
        "version": __version__,
        "qq_orientation": QQ_ORIENTATION,
        "numpy": np.__version__,
        "python": platform.python_version(),
        "seconds": elapsed,
    }


def run(job: dict) -> tuple[dict, int]:
    """Execute one job; returns ``(report, exit_status)``."""
    t0 = time.perf_counter()
    try:
        norm = normalize(job)
        results = _DISPATCH[norm["command"]](norm, norm["exact"])
    except JobError as exc:
        return {"job": job, "error": exc.message, "field": exc.field,
                "metadata": _metadata(time.perf_counter() - t0)}, 2
    except (TwistCollisionError, DegenerateError) as exc:
        return {"job": job, "error": f"degenerate parameters: {exc}", "field": "twist",
                "metadata": _metadata(time.perf_counter() - t0)}, 2
    except (ValueError, ZeroDivisionError, ArithmeticError) as exc:
        return {"job": job, "error": str(exc), "field": None,
                "metadata": _metadata(time.perf_counter() - t0)}, 2
    status = 0 if results.get("pass", True) else 1
    timing = results.pop("_timing", {})
    meta = _metadata(time.perf_counter() - t0)
    meta.update(timing)
    report = {"job": norm, "results": results, "pass": status == 0, "metadata": meta}
    return report, status


def to_csv(report: dict) -> str:
    sols = report["results"]["solutions"]
    n = len(sols[0]["momenta"]) if sols else 0
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["index"] + [f"p{i + 1}_{part}" for i in range(n) for part in ("re", "im")]
               + ["residual", "nondegenerate"])
    for k, s in enumerate(sols):
        row = [k]
        for p in s["momenta"]:
            z = complex(parse_scalar(p))
            row += [repr(z.real), repr(z.imag)]
        row += [repr(float(s["residual"])), s["nondegenerate"]]
        w.writerow(row)
    return buf.getvalue()


def _write(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
        return
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".opertools-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_list(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"not valid JSON: {exc}") from None


def _json_scalar(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="opertools", description="Opers, QQ-systems and many-body dualities.")
    ap.add_argument("command", nargs="?", choices=COMMANDS)
    ap.add_argument("--job", help="job JSON file ('-' for stdin); its fields win over flags")
    ap.add_argument("--corner")
    ap.add_argument("--q", type=_json_scalar)
    ap.add_argument("--eps", type=_json_scalar)
    ap.add_argument("--twist", type=_json_list)
    ap.add_argument("--lambda-roots", dest="lambda_roots", type=_json_list)
    ap.add_argument("--lambda-coeffs", dest="lambda_coeffs", type=_json_list)
    ap.add_argument("--momenta", type=_json_list)
    ap.add_argument("--tol", type=float)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--starts", type=int)
    ap.add_argument("--frames", choices=("identity", "all"))
    ap.add_argument("--exact", action="store_true", default=None)
    ap.add_argument("--output", choices=("json", "csv"))
    ap.add_argument("--out", help="write the report to this path (atomically)")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    job = {k: v for k, v in vars(args).items() if k not in ("job", "out") and v is not None}
    src = args.job
    if src is None and args.command is None and not sys.stdin.isatty():
        src = "-"
    if src is not None:
        try:
            text = sys.stdin.read() if src == "-" else open(src, encoding="utf-8").read()
            loaded = json.loads(text)
        except (OSError, json.JSONDecodeError) as exc:
            _write(json.dumps({"error": f"cannot read job: {exc}", "field": "job"}) + "\n", args.out)
            return 2
        if not isinstance(loaded, dict):
            _write(json.dumps({"error": "job must be a JSON object", "field": "job"}) + "\n", args.out)
            return 2
        job.update(loaded)
    report, status = run(job)
    encoded = encode(report)
    if status != 2 and encoded["job"].get("output") == "csv":
        _write(to_csv(encoded), args.out)
    else:
        _write(json.dumps(encoded, indent=2) + "\n", args.out)
    return status


if __name__ == "__main__":
    sys.exit(main())

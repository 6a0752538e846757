"""Command line front end.

    nsegments check --n 3..12
    nsegments geodesic --n 4 --dt 1e-3 --t-final 1 --out traj.csv
    nsegments strata --n 20 --format dot
    nsegments segment polygon.json

Every report starts with a header carrying the configuration, tolerances
included, so a saved report says how it was produced.  Output depends only
on the flags (and the seed), never on the clock.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__, geodesics, orbifold, rulings, segment_core
from .errors import SegmentError

DEFAULTS = {
    "tol": 1e-10,
    "kernel_rtol": orbifold.KERNEL_RTOL,
    "conjugation_tol": orbifold.CONJUGATION_TOL,
    "geodesic_tol": 1e-7,
    "dt": 1e-3,
    "t_final": 1.0,
    "trials": 200,
    "seed": 0,
    "max_n": 40,
}


def parse_range(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or A..B, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def parse_vector(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None


def _header(command: str, config: dict) -> dict:
    return {"tool": "nsegments", "version": __version__, "command": command, "config": config}


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=True) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# -- check -----------------------------------------------------------------------


@dataclass
class Check:
    module: str
    name: str
    n: int
    residual: float
    threshold: float
    passed: bool

    def to_dict(self):
        return {
            "module": self.module,
            "name": self.name,
            "n": self.n,
            "residual": self.residual,
            "threshold": self.threshold,
            "pass": self.passed,
        }


def _le(module, name, n, value, threshold):
    value = float(value)
    return Check(module, name, n, value, threshold, bool(value <= threshold))


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))


def _segment_core_checks(n, cfg, rng, out):
    tol, trials = cfg["tol"], cfg["trials"]
    psi_err = chart_err = 0.0
    for _ in range(trials):
        Z = segment_core.random_M(rng, n)
        W = segment_core.psi(segment_core.psi_inv(Z, tol))
        psi_err = max(psi_err, np.max(np.abs(W - Z)) / np.max(np.abs(Z)))
        Zh = segment_core.random_L(rng, n)
        k = segment_core.best_chart(Zh, tol)
        back = segment_core.chart_to_point(segment_core.point_to_chart(Zh, k, "L", tol))
        chart_err = max(chart_err, np.max(np.abs(back - Zh)) / np.max(np.abs(Zh)))
    out.append(_le("segment_core", "psi round trip", n, psi_err, 1e-12))
    out.append(_le("segment_core", "chart round trip", n, chart_err, 1e-12))


def _rulings_checks(n, cfg, rng, out):
    tol, trials = cfg["tol"], cfg["trials"]
    orth = rank_def = member = 0.0
    for _ in range(max(1, trials // 20)):
        Z = segment_core.random_M(rng, n)
        lines = rulings.ruling_lines_M(Z, tol)
        G = rulings.gram([ln.direction for ln in lines[:n]])
        orth = max(orth, np.max(np.abs(G - np.eye(n))))
        Zh = segment_core.random_L(rng, n)
        lines_L = rulings.ruling_lines_L(Zh, tol)
        rank_def = max(rank_def, (n + 2) - np.linalg.matrix_rank(rulings.as_real([ln.direction for ln in lines_L])))
        for ln in lines + lines_L:
            for t in np.linspace(-2.0, 2.0, 5):
                member = max(member, 0.0 if segment_core.is_n_segment(ln.at(t), tol) else 1.0)
    out.append(_le("rulings", "ruling directions orthonormal", n, orth, 1e-10))
    out.append(_le("rulings", "ruling directions full rank (deficiency)", n, rank_def, 0))
    out.append(_le("rulings", "points on ruling lines are segments (failures)", n, member, 0))
    disagree = 0
    for _ in range(trials):
        space = "M" if rng.random() < 0.5 else "L"
        Z = segment_core.random_M(rng, n) if space == "M" else segment_core.random_L(rng, n)
        W = segment_core.random_M(rng, n) if space == "M" else segment_core.random_L(rng, n)
        if rng.random() < 0.5:  # force the same real subspace half the time
            W = Z[0] + rng.uniform(-2, 2) * (Z - Z[0]) + (0 if space == "M" else rng.standard_normal())
        disagree += rulings.segment_in_manifold(Z, W, space, tol) != rulings.segment_in_manifold_sampled(Z, W, space, 64, tol)
    out.append(_le("rulings", "chord predicate vs sampled oracle (disagreements)", n, disagree, 0))


def _geodesics_checks(n, cfg, rng, out):
    u0, v0 = geodesics.random_initial(rng, n, "M")
    traj = geodesics.integrate_geodesic(u0, v0, cfg["t_final"], cfg["dt"], "M")
    if traj.halted:
        out.append(Check("geodesics", f"integration ({traj.halted})", n, math.inf, 0, False))
    else:
        res = geodesics.residuals_M(traj)
        for key, value in res.maxima.items():
            out.append(_le("geodesics", f"geodesic condition {key}", n, value, cfg["geodesic_tol"]))


def _orbifold_checks(n, cfg, rng, out):
    M = orbifold.shift_matrix(n)
    out.append(_le("orbifold", "characteristic polynomial is all ones (mismatches)", n,
                   sum(c != 1 for c in orbifold.char_poly(M)) + abs(len(orbifold.char_poly(M)) - n), 0))
    out.append(_le("orbifold", "eigenvector relation", n, orbifold.eigen_pairs(n).residuals.max(), 1e-10))
    rf = orbifold.rotation_form(n)
    out.append(_le("orbifold", "conjugation to rotation form", n, rf.residual, cfg["conjugation_tol"]))
    out.append(_le("orbifold", "rotation form orthogonal", n, np.max(np.abs(rf.R.T @ rf.R - np.eye(n - 1))), 1e-12))
    gs = orbifold.group_structure(n)
    out.append(_le("orbifold", "group order is 2n (offset)", n, abs(gs["order"] - 2 * n), 0))
    if n % 2:
        out.append(_le("orbifold", "nu R_n generates the group (offset)", n, abs(gs["order_of_nu_R"] - 2 * n), 0))
    mism = 0
    for j in orbifold.proper_divisors(n):
        mism += orbifold.kernel_dims(n, j, cfg["kernel_rtol"]) != orbifold.block_count_dims(n, j)
    out.append(_le("orbifold", "fixed-set dims, two methods (mismatches)", n, mism, 0))
    fc = orbifold.freeness_check(n)
    expect_free = _is_prime(n)
    ok = fc["free"] == expect_free and (expect_free or bool(fc["nonempty_strata"]))
    out.append(Check("orbifold", "free action iff n prime", n, 0.0 if ok else 1.0, 0, ok))


SUITES = (
    ("segment_core", _segment_core_checks),
    ("rulings", _rulings_checks),
    ("geodesics", _geodesics_checks),
    ("orbifold", _orbifold_checks),
)


def checks_for(n: int, cfg: dict) -> list[Check]:
    """All invariant checks for one n; a suite that raises counts as one failed check."""
    rng = np.random.default_rng([cfg["seed"], n])
    out: list[Check] = []
    for module, suite in SUITES:
        try:
            suite(n, cfg, rng, out)
        except (SegmentError, np.linalg.LinAlgError) as exc:
            out.append(Check(module, f"suite aborted: {exc}", n, math.inf, 0, False))
    return out


def cmd_check(args) -> int:
    lo, hi = args.n_range if args.n_range else args.n
    cfg = _config(args)
    if lo < 3 or hi > cfg["max_n"]:
        args.parser.error(f"n must lie in 3..{cfg['max_n']}")
    checks, strata = [], {}
    for n in range(lo, hi + 1):
        checks += checks_for(n, cfg)
        s = orbifold.stratification(n)
        strata[str(n)] = [{"j": x.j, "spheres": x.spheres, "quotient": x.quotient_label} for x in s.strata]
        strata[str(n)].append({"j": n, "spheres": f"S^{n - 2}", "quotient": s.top_label})
    failed = [c for c in checks if not c.passed]
    report = _header("check", cfg) | {
        "n_range": [lo, hi],
        "passed": not failed,
        "first_failure": failed[0].to_dict() if failed else None,
        "checks": [c.to_dict() for c in checks],
        "strata": strata,
    }
    _emit(_dump(report), args.out)
    if failed:
        f = failed[0]
        print(f"FAIL: {f.module}: {f.name} (n={f.n}): {f.residual:.3g} > {f.threshold:g}", file=sys.stderr)
        return 1
    return 0


# -- geodesic --------------------------------------------------------------------


def trajectory_csv(traj: geodesics.GeodesicTrajectory) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(traj.csv_header())
    for row in traj.csv_rows():
        w.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def _summary(traj: geodesics.GeodesicTrajectory, dt: float) -> dict:
    out = {"dt": dt, "steps": int(traj.t.size - 1), "halted": traj.halted, "max_drift": traj.drift()}
    if traj.space == "M":
        out["residuals"] = geodesics.residuals_M(traj).maxima
    else:
        r = geodesics.residuals_L(traj)
        out["residuals"] = r.maxima
        out["expanded_form_mismatch"] = r.display_check
    return out


def cmd_geodesic(args) -> int:
    cfg = _config(args)
    n, space = args.n[0], args.space
    if args.n[0] != args.n[1] or n < 3:
        args.parser.error("geodesic needs a single n >= 3")
    if args.survey:
        report = _header("geodesic", cfg) | {
            "survey": geodesics.geodesic_survey(space, n, cfg["trials"], cfg["t_final"], cfg["dt"], cfg["seed"],
                                                richardson=args.halving)
        }
        _emit(_dump(report), args.out)
        return 1 if report["survey"]["counts"]["halted"] else 0

    if args.position is None or args.velocity is None:
        u0, v0 = geodesics.random_initial(np.random.default_rng(cfg["seed"]), n, space)
    else:
        u0, v0 = np.array(args.position), np.array(args.velocity)
        dim = n if space == "M" else n + 2
        if u0.size != dim or v0.size != dim:
            args.parser.error(f"position and velocity need {dim} chart coordinates")
    traj = geodesics.integrate_geodesic(u0, v0, cfg["t_final"], cfg["dt"], space)
    summary = _header("geodesic", cfg) | {
        "n": n,
        "space": space,
        "initial": {"position": [float(x) for x in u0], "velocity": [float(x) for x in v0]},
        "runs": [_summary(traj, cfg["dt"])],
    }
    halted = traj.halted is not None
    if args.halving:
        fine = geodesics.integrate_geodesic(u0, v0, cfg["t_final"], cfg["dt"] / 2, space)
        summary["runs"].append(_summary(fine, cfg["dt"] / 2))
        a, b = summary["runs"][0]["max_drift"], summary["runs"][1]["max_drift"]
        summary["drift_ratio"] = {k: (a[k] / b[k] if b[k] > 0 else None) for k in a}
        halted = halted or fine.halted is not None
    _emit(trajectory_csv(traj), args.out)
    text = _dump(summary)
    if args.summary:
        _emit(text, args.summary)
    else:
        sys.stderr.write(text)
    if halted:
        print(f"chart exit: {traj.halted}", file=sys.stderr)
        return 1
    return 0


# -- strata ----------------------------------------------------------------------


def cmd_strata(args) -> int:
    n = args.n[0]
    if args.n[0] != args.n[1] or n < 4:
        args.parser.error("strata needs a single n >= 4")
    s = orbifold.stratification(n)
    fmt = args.format or "json"
    if fmt == "dot":
        _emit(s.to_dot(), args.out)
    elif fmt == "json":
        _emit(_dump(_header("strata", _config(args)) | s.to_dict()), args.out)
    else:
        args.parser.error("strata supports --format json or dot")
    if s.note:
        print(s.note, file=sys.stderr)
    return 0


# -- segment ---------------------------------------------------------------------


def _vertices(Z) -> list[list[float]]:
    return segment_core.polypoint_to_dict(Z)["vertices"]


def segment_report(Z, tol: float) -> dict:
    report: dict = {"n": int(Z.size), "is_segment": bool(segment_core.is_n_segment(Z, tol))}
    if not report["is_segment"]:
        return report
    report["degenerate"] = bool(segment_core.is_diagonal(Z, tol))
    report["in_M"] = bool(segment_core.in_M(Z, tol))
    W, b = segment_core.split_L(Z, tol)
    report["split_L"] = {"M_part": _vertices(W), "translation": [b.real, b.imag]}
    if report["degenerate"]:
        return report
    report["ends"] = segment_core.ends(Z, tol)
    report["normalize_ends"] = _vertices(segment_core.normalize_ends(Z, tol))
    c = segment_core.psi_inv(W, tol)
    report["psi_inv"] = {"X": [float(x) for x in c.X], "theta": c.theta}
    report["ruling_lines"] = [ln.to_dict() for ln in rulings.ruling_lines_L(Z, tol)]
    return report


def cmd_segment(args) -> int:
    cfg = _config(args)
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        print(f"parse error: {args.file}: line {exc.lineno}, column {exc.colno}: {exc.msg}", file=sys.stderr)
        return 2
    try:
        Z = segment_core.polypoint_from_dict(data)
    except ValueError as exc:
        print(f"parse error: {args.file}: {exc}", file=sys.stderr)
        return 2
    _emit(_dump(_header("segment", cfg) | segment_report(Z, cfg["tol"])), args.out)
    return 0


# -- argument handling -----------------------------------------------------------


def _config(args) -> dict:
    cfg = dict(DEFAULTS)
    for key in ("tol", "dt", "t_final", "trials", "seed", "max_n"):
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=parse_range, default=None, help="N or A..B")
    common.add_argument("--n-range", type=parse_range, default=None, help="A..B")
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--dt", type=float, default=None)
    common.add_argument("--t-final", type=float, default=None)
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--format", choices=["json", "csv", "dot"], default=None)
    common.add_argument("--out", default=None, help="output path (default stdout)")

    p = argparse.ArgumentParser(prog="nsegments", description="Segments of n points in the plane: checks, geodesics, strata.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="run the invariant suites")
    c.add_argument("--max-n", type=int, default=None)
    c.set_defaults(func=cmd_check)

    g = sub.add_parser("geodesic", parents=[common], help="integrate a geodesic, write CSV")
    g.add_argument("--space", choices=["M", "L"], default="M")
    g.add_argument("--position", type=parse_vector, default=None, help="chart coordinates x,y,r3,..[,u,v]")
    g.add_argument("--velocity", type=parse_vector, default=None)
    g.add_argument("--halving", action="store_true", help="also run at dt/2 and report drift ratios")
    g.add_argument("--survey", action="store_true", help="integrate --trials random geodesics, write JSON")
    g.add_argument("--summary", default=None, help="summary JSON path (default stderr)")
    g.set_defaults(func=cmd_geodesic)

    s = sub.add_parser("strata", parents=[common], help="singular-locus stratification as JSON or DOT")
    s.set_defaults(func=cmd_strata)

    seg = sub.add_parser("segment", parents=[common], help="membership and decomposition of a polygon file")
    seg.add_argument("file")
    seg.set_defaults(func=cmd_segment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.parser = parser
    if args.command != "segment" and args.n is None and args.n_range is None:
        parser.error(f"{args.command} needs --n or --n-range")
    if args.n is None:
        args.n = args.n_range
    if args.command == "check" and args.n[0] < 3:
        parser.error("n must be at least 3")
    try:
        return args.func(args)
    except SegmentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: ``conebranch <command> <action> [flags]``.

Exit codes: 0 success, 1 failed verification, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
import warnings
from contextlib import redirect_stderr, redirect_stdout
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import ConeBranchError, IntegrabilityWarning

DEFAULT_SEED = 42
DEFAULT_SAMPLES = 10 ** 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# output helpers -------------------------------------------------------------------

def clean(obj):
    """JSON-ready copy: floats at 12 significant digits, rationals as "p/q"."""
    from .surd import Surd, to_json

    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, Surd):
        return to_json(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not np.isfinite(x):
            return str(x)
        return float(f"{x:.12g}")
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        if z.imag == 0:
            return clean(z.real)
        return [clean(z.real), clean(z.imag)]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    return obj


def _dump_json(payload: dict) -> str:
    return json.dumps(clean(payload), indent=2, ensure_ascii=False) + "\n"


def _meta_lines(meta: dict) -> str:
    return "".join(f"# {k}={v}\n" for k, v in meta.items())


# argument handling ------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, algebra: bool = True, rep: bool = True):
    if algebra:
        p.add_argument("--family", choices=["spin", "sym", "herm"], default=None)
        p.add_argument("--dim", "--size", dest="size", type=int, default=None,
                       help="spin: ambient dimension n; sym/herm: matrix size m")
    if rep:
        p.add_argument("--lambda", dest="lam", type=Fraction, default=None)
        p.add_argument("--rep-file", dest="rep_file", default=None)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--format", choices=["json", "csv", "pretty"], default=None)
    p.add_argument("--output", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="conebranch", description="Jordan algebras, stratified models and branching checks")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    alg = sub.add_parser("algebra").add_subparsers(dest="action", required=True, parser_class=_Parser)
    _add_common(alg.add_parser("info"), rep=False)

    op = sub.add_parser("operator").add_subparsers(dest="action", required=True, parser_class=_Parser)
    _add_common(op.add_parser("dpi"))

    op = sub.add_parser("orthopoly").add_subparsers(dest="action", required=True, parser_class=_Parser)
    b = op.add_parser("build")
    _add_common(b)
    b.add_argument("--p", type=int, default=2)

    br = sub.add_parser("branch").add_subparsers(dest="action", required=True, parser_class=_Parser)
    t = br.add_parser("table")
    _add_common(t)
    t.add_argument("--pmax", type=int, default=4)

    ver = sub.add_parser("verify")
    ver.add_argument("suite", choices=["all", "jordan", "strat", "eigen", "sl2", "gamma"])
    _add_common(ver)
    ver.add_argument("--pmax", type=int, default=None)
    ver.add_argument("--t-max", dest="t_max", type=float, default=None,
                     help="right end of the symmetry-breaking t-grid (default 4*alpha)")
    ver.add_argument("--t-points", dest="t_points", type=int, default=32)
    return parser


def _algebra(args, required: bool = True):
    from .jordan import build_algebra

    if args.family is None:
        if required:
            raise UsageError("--family is required")
        return None
    if args.size is None:
        raise UsageError("--dim/--size is required with --family")
    return build_algebra(args.family, args.size)


def _rep(args, A, required: bool = True):
    from .representation import make_scalar_rep, rep_from_json

    if args.rep_file:
        with open(args.rep_file, encoding="utf-8") as fh:
            return rep_from_json(A, json.load(fh))
    if args.lam is None:
        if required:
            raise UsageError("--lambda or --rep-file is required")
        return None
    return make_scalar_rep(A, args.lam)


def _metadata(args, A=None, rep=None, **extra) -> dict:
    meta = {"tool": "conebranch", "version": __version__, "command": f"{args.command} {getattr(args, 'action', None) or args.suite}",
            "seed": args.seed, "samples": args.samples}
    if A is not None:
        meta["algebra"] = A.name
        meta["algebra_hash"] = A.hash
    if rep is not None:
        meta["rep"] = rep.label
        meta["alpha"] = rep.alpha
    meta.update(extra)
    return meta


# commands -------------------------------------------------------------------------------------

def cmd_algebra_info(args) -> tuple[int, str]:
    A = _algebra(args)
    meta = _metadata(args, A)
    fmt = args.format or "json"
    if fmt == "pretty":
        body = f"{A.name}: n={A.n} r={A.r} d={A.d}\n"
        body += f"nonzero structure constants: {len(A.c_sparse)}\n"
        return 0, _meta_lines(meta) + body
    if fmt == "csv":
        lines = ["i,j,k,c"] + [f"{i},{j},{k},{c}" for i, j, k, c in A.c_sparse]
        return 0, _meta_lines(meta) + "\n".join(lines) + "\n"
    return 0, _dump_json({"metadata": meta, "algebra": A.descriptor()})


def cmd_operator_dpi(args) -> tuple[int, str]:
    from .diffop import build_dpi, build_psi_pi

    A = _algebra(args)
    rep = _rep(args, A)
    D = build_dpi(A, rep)
    meta = _metadata(args, A, rep)
    fmt = args.format or "pretty"
    if fmt == "pretty":
        return 0, _meta_lines(meta) + D.pretty() + "\n"
    if fmt == "csv":
        lines = ["deriv,exp,endo"]
        for term in D.to_json(A.r):
            lines.append(f"{' '.join(map(str, term['deriv']))},{' '.join(map(str, term['exp']))},"
                         f"{json.dumps(term['endo'], separators=(';', ':'))}")
        return 0, _meta_lines(meta) + "\n".join(lines) + "\n"
    payload = {"metadata": meta, "pretty": D.pretty(ascii_only=True), "terms": D.to_json(A.r),
               "psi": build_psi_pi(A, rep).to_json(A.r)}
    return 0, _dump_json(payload)


def cmd_orthopoly_build(args) -> tuple[int, str]:
    from .orthopoly import build_Wp

    A = _algebra(args)
    rep = _rep(args, A)
    if args.p < 0:
        raise UsageError("--p must be non-negative")
    W = build_Wp(A, rep, args.p)
    meta = _metadata(args, A, rep)
    fmt = args.format or "json"
    if fmt == "json":
        return 0, _dump_json({"metadata": meta, "basis": W.to_json()})
    lines = [f"p={W.p} eigenvalue={W.eigenvalue} dimension={len(W)}"]
    lines += [P.pretty(ascii_only=(fmt == "csv")) for P in W.polys]
    return 0, _meta_lines(meta) + "\n".join(lines) + "\n"


def cmd_branch_table(args) -> tuple[int, str]:
    from .branching import multiplicity_table

    A = _algebra(args)
    rep = _rep(args, A)
    table = multiplicity_table(A, rep, args.pmax)
    meta = _metadata(args, A, rep)
    fmt = args.format or "json"
    if fmt == "csv":
        return 0, _meta_lines(meta) + table.to_csv()
    if fmt == "pretty":
        lines = [f"{A.name} {rep.label}"]
        for row in table.to_json()["rows"]:
            extra = f"  harmonics {row['harmonics']}" if "harmonics" in row else ""
            lines.append(f"p={row['p']}  rho_{row['lambda']}  x{row['mult']}{extra}")
        return 0, _meta_lines(meta) + "\n".join(lines) + "\n"
    return 0, _dump_json({"metadata": meta, "table": table.to_json()})


def _t_grid(args, rep):
    if args.t_max is None and args.t_points == 32:
        return None
    if args.t_points < 2:
        raise UsageError("--t-points must be at least 2")
    t_max = args.t_max if args.t_max is not None else 4 * float(rep.alpha if rep is not None else 6)
    if t_max <= 0:
        raise UsageError("--t-max must be positive")
    return np.geomspace(t_max / 1000, t_max, args.t_points)


def _suite(args, A, rep):
    from . import checks

    seed, samples = args.seed, args.samples
    algs = [A] if A is not None else None
    lams = (rep.lam,) if rep is not None and rep.kind == "scalar" else None
    lam = lams[0] if lams else 3
    pmax = args.pmax
    suites = {
        "jordan": lambda: [checks.check_jordan_axioms(algs, seed=seed),
                           checks.check_structure_identities(algs, seed=seed)],
        "eigen": lambda: [checks.check_eigen_equation(algs, lams or (3, 4), 4 if pmax is None else pmax),
                          checks.check_multiplicity(algs, lam, 4 if pmax is None else pmax)]
                         + ([checks.check_gegenbauer(lams or (3, 4), 6 if pmax is None else pmax)]
                            if A is None or A.name == "Spin(2)" else [])
                         + ([checks.check_harmonic_sums()] if A is None else []),
        "strat": lambda: [checks.check_orthogonality(algs or (("spin", 3), ("sym", 2)), lams or (3,),
                                                     3 if pmax is None else pmax, seed, samples),
                          checks.check_jacobian(algs or (("spin", 2), ("sym", 2)), seed, samples)]
                         + ([checks.check_kernels(algs or (("spin", 3), ("spin", 4), ("sym", 2)), lam,
                                                  3 if pmax is None else pmax, seed, samples)]
                            if A is None or A.r == 2 else []),
        "sl2": lambda: [checks.check_bessel_identity(algs or (("spin", 2), ("spin", 3), ("sym", 2), ("herm", 2)),
                                                     lam, seed=seed),
                        checks.check_casimir(algs or (("spin", 2), ("spin", 3), ("sym", 2)), lam),
                        checks.check_intertwining(algs or (("spin", 2), ("sym", 2)), lam,
                                                  2 if pmax is None else pmax, seed, samples),
                        checks.check_sb_roundtrip(algs or (("spin", 2), ("sym", 2)), lam,
                                                  2 if pmax is None else pmax, seed=seed, samples=samples,
                                                  t_grid=_t_grid(args, rep))],
        "gamma": lambda: [checks.check_gamma_factorization(seed, samples, lam, A)],
    }
    if args.suite == "all":
        results = []
        for name in ("jordan", "eigen", "strat", "sl2", "gamma"):
            results += suites[name]()
        results.append(checks.check_determinism())
        return results
    return suites[args.suite]()


def cmd_verify(args) -> tuple[int, str]:
    A = _algebra(args, required=False)
    rep = _rep(args, A, required=False) if A is not None else None
    if A is None and args.lam is not None:
        raise UsageError("--lambda needs --family")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrabilityWarning)
        results = _suite(args, A, rep)
    passed = all(r.passed for r in results)
    meta = _metadata(args, A, rep)
    fmt = args.format or "json"
    if fmt == "json":
        payload = {"metadata": meta, "passed": passed,
                   "checks": [{"name": r.name, "passed": r.passed, "metrics": r.metrics, "notes": r.notes}
                              for r in results]}
        text = _dump_json(payload)
    else:
        lines = [r.line() + "".join(f"\n    note: {n}" for n in r.notes) for r in results]
        lines.append(f"overall: {'PASS' if passed else 'FAIL'}")
        text = _meta_lines(meta) + "\n".join(lines) + "\n"
    return (0 if passed else 1), text


COMMANDS = {
    ("algebra", "info"): cmd_algebra_info,
    ("operator", "dpi"): cmd_operator_dpi,
    ("orthopoly", "build"): cmd_orthopoly_build,
    ("branch", "table"): cmd_branch_table,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", IntegrabilityWarning)
            if args.command == "verify":
                code, text = cmd_verify(args)
            else:
                code, text = COMMANDS[(args.command, args.action)](args)
        for w in caught:
            print(f"conebranch: warning: {w.message}", file=stderr)
    except UsageError as exc:
        parser.print_usage(stderr)
        print(f"conebranch: error: {exc}", file=stderr)
        return 2
    except (ConeBranchError, ValueError, OSError) as exc:
        print(f"conebranch: error: {exc}", file=stderr)
        return 2
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def run_capture(argv) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out):
        code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def main() -> None:
    sys.exit(run())

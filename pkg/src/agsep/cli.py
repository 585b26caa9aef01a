"""
Command-line entry point.

Exit status: 0 when every check passes, 1 when a property check fails (the
witness is part of the printed report), 2 on invalid input or usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .agcodes import (
    EvalCodeSpec,
    LemmaExhausted,
    build_code,
    build_intersecting,
    construct_pair,
    first_points,
    xing_check,
)
from .codes import (
    CapExceeded,
    CheckResult,
    Code,
    CodeFormatError,
    check_intersecting,
    check_intersecting_sampled,
    check_mutually_intersecting,
    check_sep21,
    check_sep21_sampled,
    check_set_system,
    distance_matrix,
    dumps_code,
    loads_code,
    pair_cap,
    rate_bits,
    triple_cap,
)
from .concat import ConcatSpec, concat_rate, concatenate, rate_ledger
from .curves import Curve, Divisor, curve_from_json, l_dim, riemann_roch_basis
from .gf import FieldError, field_new
from .nordrob import build_nr16, one_shorten, subcode_first

log = logging.getLogger("agsep")


class UsageError(Exception):
    """Bad input detected after argument parsing; maps to exit status 2."""


# -- reports -------------------------------------------------------------------

def check_entry(res: CheckResult, timings: bool = True, name: str | None = None) -> dict:
    out = {"name": name or res.property, "mode": res.mode, "result": res.result}
    if res.witness is not None:
        out["witness"] = res.witness
    if res.detail:
        out["detail"] = res.detail
    out["elapsed_ms"] = round(res.elapsed * 1000, 3) if timings else 0
    return out


def emit_report(results: Sequence[CheckResult], seed: int | None = None, ledger=None,
                timings: bool = True, extra: dict | None = None) -> dict:
    """Report document with a fixed key order; ``timings=False`` zeroes elapsed_ms."""
    out: dict = {"tool_version": __version__}
    if seed is not None:
        out["seed"] = seed
    if extra:
        out.update(extra)
    out["checks"] = [check_entry(r, timings) for r in results]
    if ledger is not None:
        out["ledger"] = ledger.to_json()
    return out


def _render(obj, level: int) -> str:
    pad, inner = "  " * level, "  " * (level + 1)
    if isinstance(obj, dict) and obj:
        items = [f"{inner}{json.dumps(str(k))}: {_render(v, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)) and obj and any(isinstance(v, (dict, list, tuple)) for v in obj):
        if all(isinstance(v, (list, tuple)) and not any(isinstance(u, (dict, list)) for u in v) for v in obj):
            # matrices: one row per line
            rows = [inner + json.dumps(list(v)) for v in obj]
        else:
            rows = [inner + _render(v, level + 1) for v in obj]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    return json.dumps(obj, ensure_ascii=True)


def dumps_json(obj) -> str:
    """Indented JSON with flat lists kept on one line."""
    return _render(obj, 0) + "\n"


def _status(results: Sequence[CheckResult]) -> int:
    return 0 if all(r.passed for r in results) else 1


# -- I/O helpers ---------------------------------------------------------------

def _read_text(src: str) -> str:
    if src == "-":
        return sys.stdin.read()
    try:
        return Path(src).read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {src}: {exc}") from exc


def _read_code(src: str) -> Code:
    return loads_code(_read_text(src))


def _read_json(src: str):
    try:
        return json.loads(_read_text(src))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{src}: invalid JSON ({exc})") from exc


def _write(text: str, dest: str | None) -> None:
    if dest is None or dest == "-":
        sys.stdout.write(text)
    else:
        path = Path(dest)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="ascii")


def _curve(args) -> Curve:
    return curve_from_json({"kind": args.curve, "p": args.p, "k": args.k})


def _points(args, curve: Curve):
    if args.all_points:
        return curve.points
    if args.n is None:
        raise UsageError("give --n N or --all-points")
    return first_points(curve, args.n)


def _divisor_obj(src: str) -> tuple[Divisor, dict]:
    """A divisor JSON, or a certificate written by ``agcode build``/``certify``."""
    obj = _read_json(src)
    if not isinstance(obj, dict):
        raise UsageError("divisor JSON must be an object")
    if "support" not in obj and "D" in obj:
        obj = {**obj, "support": obj["D"]}
    try:
        return Divisor.from_json(obj), obj
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed divisor JSON: {exc}") from exc


def _divisor(src: str) -> Divisor:
    return _divisor_obj(src)[0]


def _verify_linear(code: Code, how: str, trials: int, seed: int, other: Code | None = None) -> CheckResult:
    """Intersecting check; "auto" runs exhaustively when the pair count fits PAIR_CAP."""
    C2 = code if other is None else other
    if how == "sampled":
        return check_intersecting_sampled(code, None if other is None else other, trials, seed)
    if how == "auto":
        n1 = (code.q ** code.k - 1) // (code.q - 1)
        n2 = (C2.q ** C2.k - 1) // (C2.q - 1)
        if n1 * n2 > pair_cap():
            return check_intersecting_sampled(code, None if other is None else other, trials, seed)
    if other is None:
        return check_intersecting(code)
    return check_mutually_intersecting(code, other)


# -- subcommands ---------------------------------------------------------------

def cmd_field_info(args) -> int:
    F = field_new(args.p, args.k)
    t = F.tables
    info = {"p": F.p, "k": F.k, "q": F.q, "modulus": list(F.modulus),
            "primitive": int(t.exp[1]) if F.q > 2 else 1}
    _write(dumps_json(info), None)
    return 0


def cmd_curve_points(args) -> int:
    X = _curve(args)
    out = {"curve": X.describe(), "genus": X.genus, "count": len(X.points),
           "points": [P.to_json() for P in X.points]}
    _write(dumps_json(out), args.out)
    return 0


def cmd_curve_rr_dim(args) -> int:
    D = _divisor(args.divisor)
    X = D.curve
    _write(dumps_json({"degree": D.degree, "genus": X.genus, "l": l_dim(X, D)}), args.out)
    return 0


def cmd_curve_rr_basis(args) -> int:
    D = _divisor(args.divisor)
    basis = riemann_roch_basis(D.curve, D)
    out = {"degree": D.degree, "genus": D.curve.genus, "l": len(basis),
           "basis": [f.to_json() for f in basis]}
    _write(dumps_json(out), args.out)
    return 0


def _certificate(curve: Curve, spec: EvalCodeSpec, code: Code, cert, checks, args) -> dict:
    return {
        "tool_version": __version__,
        "seed": args.seed,
        "curve": curve.describe(),
        "n": spec.n,
        "G": "all" if spec.n == len(curve.points) else f"first {spec.n}",
        "D": spec.D.to_json()["support"],
        "l2DG": cert.l2DG,
        "degD": cert.degD,
        "deg2DG": cert.deg2DG,
        "dim": code.k,
        "certified": cert.certified,
        "checks": [check_entry(c, not args.no_timings) for c in checks],
    }


def cmd_agcode_build(args) -> int:
    X = _curve(args)
    n = len(_points(args, X))
    res = build_intersecting(X, n)
    checks = [] if args.verify == "none" else [_verify_linear(res.code, args.verify, args.trials, args.seed)]
    if args.out:
        _write(dumps_code(res.code), args.out)
    _write(dumps_json(_certificate(X, res.spec, res.code, res.certificate, checks, args)), args.cert)
    return 0 if res.certificate.certified and _status(checks) == 0 else 1


def cmd_agcode_certify(args) -> int:
    D, obj = _divisor_obj(args.divisor)
    X = D.curve
    if args.n is None and not args.all_points and "n" in obj:
        args.n = int(obj["n"])
    spec = EvalCodeSpec(X, tuple(_points(args, X)), D)
    cert = xing_check(spec)
    code = build_code(spec)
    checks = [] if args.verify == "none" else [_verify_linear(code, args.verify, args.trials, args.seed)]
    if args.out:
        _write(dumps_code(code), args.out)
    _write(dumps_json(_certificate(X, spec, code, cert, checks, args)), args.cert)
    return 0 if cert.certified and _status(checks) == 0 else 1


def cmd_agcode_pair(args) -> int:
    X = _curve(args)
    pts = _points(args, X)
    pr = construct_pair(X, pts, args.m)
    checks = [] if args.verify == "none" else [
        _verify_linear(pr.C, args.verify, args.trials, args.seed, other=pr.C_prime)]
    if args.out_prefix:
        _write(dumps_code(pr.C), f"{args.out_prefix}.C.code")
        _write(dumps_code(pr.C_prime), f"{args.out_prefix}.Cprime.code")
    out = {
        "tool_version": __version__,
        "seed": args.seed,
        "curve": X.describe(),
        "n": len(pts),
        "m": args.m,
        "D": pr.D.to_json()["support"],
        "D_prime": pr.D_prime.to_json()["support"],
        "dims": [pr.C.k, pr.C_prime.k],
        "l_D_plus_Dprime_minus_G": l_dim(X, pr.D + pr.D_prime - Divisor.sum_of(X, pts)),
        "checks": [check_entry(c, not args.no_timings) for c in checks],
    }
    _write(dumps_json(out), args.cert)
    return _status(checks)


def cmd_nr_build(args) -> int:
    _write(dumps_code(build_nr16()), args.out)
    return 0


def cmd_nr_shorten(args) -> int:
    _write(dumps_code(one_shorten(_read_code(args.file), args.position)), args.out)
    return 0


def cmd_nr_subcode(args) -> int:
    _write(dumps_code(subcode_first(_read_code(args.file), args.m)), args.out)
    return 0


def _sep_check(code: Code, how: str, trials: int, seed: int) -> CheckResult:
    if how == "sampled":
        return check_sep21_sampled(code, trials, seed)
    N = code.size
    if how == "auto" and N * (N - 1) * (N - 2) // 2 > triple_cap():
        return check_sep21_sampled(code, trials, seed)
    return check_sep21(code)


def cmd_concat(args) -> int:
    outer, inner = _read_code(args.outer), _read_code(args.inner)
    spec = ConcatSpec(outer, inner)
    code = concatenate(spec)
    how = {"full": "exhaustive", "sampled": "sampled"}[args.verify]
    checks = [_sep_check(code, how, args.trials, args.seed)]
    if args.out:
        _write(dumps_code(code), args.out)
    extra = {"n": code.n, "size": code.size, "rate_bits": rate_bits(code), "concat_rate": concat_rate(spec)}
    _write(dumps_json(emit_report(checks, args.seed, timings=not args.no_timings, extra=extra)), args.report)
    return _status(checks)


def _distances(code: Code) -> CheckResult:
    import numpy as np

    d = distance_matrix(code.words())
    iu = np.triu_indices(len(d), 1)
    vals, counts = np.unique(d[iu], return_counts=True)
    spectrum = {str(int(v)): int(c) for v, c in zip(vals, counts)}
    return CheckResult("distances", "exhaustive", True, None, 0.0,
                       {"distance_set": [int(v) for v in vals], "spectrum": spectrum})


def cmd_check(args) -> int:
    code = _read_code(args.file)
    prop = args.property
    if prop == "sep2":
        res = _sep_check(code, args.mode, args.trials, args.seed)
    elif prop == "setsys":
        res = check_set_system(code)
    elif prop == "distances":
        res = _distances(code)
    elif prop in ("intersecting", "mutual"):
        if code.kind != "linear":
            raise UsageError("intersecting checks need a linear code file")
        other = None
        if prop == "mutual":
            if args.other is None:
                raise UsageError("mutual needs a second code file")
            other = _read_code(args.other)
            if other.kind != "linear":
                raise UsageError("intersecting checks need a linear code file")
        res = _verify_linear(code, args.mode, args.trials, args.seed, other)
    else:  # argparse restricts the choices
        raise UsageError(prop)
    _write(dumps_json(emit_report([res], args.seed, timings=not args.no_timings)), args.report)
    return _status([res])


def cmd_rates(args) -> int:
    report = rate_ledger(args.q)
    if args.format == "json":
        text = dumps_json(report.to_json())
    elif args.format == "tsv":
        text = report.to_tsv()
    else:
        text = report.to_table()
    _write(text, args.out)
    return 0


def cmd_repro(args) -> int:
    from .repro import distance_spectra, run_all

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    def progress(res: CheckResult) -> None:
        t = f" ({res.elapsed:.2f} s)" if not args.no_timings else ""
        print(f"{res.result:13s} {res.property}{t}", file=sys.stderr)

    run = run_all(args.seed, args.only, progress)
    report = emit_report(run.results, args.seed, run.ledger, timings=not args.no_timings)
    (out / "report.json").write_text(dumps_json(report), encoding="ascii")
    (out / "ledger.tsv").write_text(run.ledger.to_tsv(), encoding="ascii")

    codes_dir = out / "codes"
    codes_dir.mkdir(exist_ok=True)
    nr = build_nr16()
    (codes_dir / "nr16.code").write_text(dumps_code(nr), encoding="ascii")
    (codes_dir / "nr15.code").write_text(dumps_code(one_shorten(nr)), encoding="ascii")

    if not args.no_figures:
        from . import plots

        fig = out / "figures"
        plots.plot_rate_bounds(fig / "rate_bounds.png")
        plots.plot_exponent_ledger(run.ledger, fig / "exponent_ledger.png")
        plots.plot_distance_spectra(distance_spectra(), fig / "nr_distance_spectra.png")
        try:
            lemma = run["lemma_bounds"].detail
        except KeyError:
            lemma = None
        if lemma:
            plots.plot_bad_points(lemma["single"], lemma["double"], lemma["genus"],
                                  fig / "lemma_bad_points.png")
    print(f"wrote {out / 'report.json'}", file=sys.stderr)
    return 0 if run.passed else 1


# -- parser --------------------------------------------------------------------

def _curve_args(p: argparse.ArgumentParser, points: bool = True) -> None:
    p.add_argument("--curve", choices=["p1", "hermitian"], required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    if points:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--n", type=int, help="use the first N rational points (canonical order)")
        g.add_argument("--all-points", action="store_true", help="use every rational point")


def _sampling_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="seed for every sampled checker")
    p.add_argument("--trials", type=int, default=10 ** 5)
    p.add_argument("--no-timings", action="store_true", help="zero elapsed_ms for reproducible output")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="agsep", description="Build and verify separating and intersecting codes from algebraic curves.")
    ap.add_argument("--version", action="version", version=f"agsep {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    fld = sub.add_parser("field", help="finite field information").add_subparsers(dest="action", required=True)
    p = fld.add_parser("info")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.set_defaults(func=cmd_field_info)

    cv = sub.add_parser("curve", help="points and Riemann-Roch spaces").add_subparsers(dest="action", required=True)
    p = cv.add_parser("points")
    _curve_args(p, points=False)
    p.add_argument("--out")
    p.set_defaults(func=cmd_curve_points)
    for name, fn in (("rr-dim", cmd_curve_rr_dim), ("rr-basis", cmd_curve_rr_basis)):
        p = cv.add_parser(name)
        p.add_argument("divisor", nargs="?", default="-", help="divisor JSON file, or - for stdin (default)")
        p.add_argument("--out")
        p.set_defaults(func=fn)

    ag = sub.add_parser("agcode", help="evaluation codes and certificates").add_subparsers(dest="action", required=True)
    for name, fn in (("build", cmd_agcode_build), ("certify", cmd_agcode_certify), ("pair", cmd_agcode_pair)):
        p = ag.add_parser(name)
        if name == "certify":
            p.add_argument("--divisor", required=True, help="divisor JSON file, or - for stdin")
            g = p.add_mutually_exclusive_group()
            g.add_argument("--n", type=int)
            g.add_argument("--all-points", action="store_true")
        else:
            _curve_args(p)
        if name == "pair":
            p.add_argument("--m", type=int, required=True, help="degree of D")
            p.add_argument("--out-prefix", help="write PREFIX.C.code and PREFIX.Cprime.code")
        else:
            p.add_argument("--out", help="code file to write")
        p.add_argument("--cert", help="certificate JSON (default: stdout)")
        p.add_argument("--verify", choices=["auto", "exhaustive", "sampled", "none"], default="auto")
        _sampling_args(p)
        p.set_defaults(func=fn)

    nr = sub.add_parser("nr", help="Nordstrom-Robinson codes").add_subparsers(dest="action", required=True)
    p = nr.add_parser("build")
    p.add_argument("--out")
    p.set_defaults(func=cmd_nr_build)
    p = nr.add_parser("shorten")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--position", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_nr_shorten)
    p = nr.add_parser("subcode")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_nr_subcode)

    p = sub.add_parser("concat", help="concatenate an outer code with a binary inner code")
    p.add_argument("--outer", required=True)
    p.add_argument("--inner", required=True)
    p.add_argument("--verify", choices=["full", "sampled"], default="full")
    p.add_argument("--out", help="concatenated code file")
    p.add_argument("--report", help="report JSON (default: stdout)")
    _sampling_args(p)
    p.set_defaults(func=cmd_concat)

    p = sub.add_parser("check", help="verify a property of a code file")
    p.add_argument("property", choices=["sep2", "intersecting", "mutual", "setsys", "distances"])
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("other", nargs="?", help="second code file (mutual)")
    p.add_argument("--mode", choices=["auto", "exhaustive", "sampled"], default="auto")
    p.add_argument("--report")
    _sampling_args(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("rates", help="rate-bound ledger")
    p.add_argument("--q", type=int, default=121)
    p.add_argument("--format", choices=["table", "json", "tsv"], default="table")
    p.add_argument("--out")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("repro", help="run every acceptance check and write a report")
    p.add_argument("--out", default="repro-out", help="output directory (default repro-out)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-timings", action="store_true", help="zero elapsed_ms for byte-identical reports")
    p.add_argument("--no-figures", action="store_true", help="skip the PNG figures")
    p.add_argument("--only", nargs="+", metavar="CHECK", help="run only the named checks")
    p.set_defaults(func=cmd_repro)
    return ap


def _place_positionals(parser: argparse.ArgumentParser, args: argparse.Namespace, extra: list[str]) -> None:
    # argparse binds optional positionals early when an option precedes them
    for slot in ("divisor", "file", "other"):
        if extra and not extra[0].startswith("-") and getattr(args, slot, "x") in ("-", None):
            setattr(args, slot, extra.pop(0))
    if extra:
        parser.error(f"unrecognized arguments: {' '.join(extra)}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    _place_positionals(parser, args, extra)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, CodeFormatError, FieldError, CapExceeded, LemmaExhausted, ValueError, TypeError) as exc:
        print(f"agsep: error: {exc}", file=sys.stderr)
        return 2

"""scs-lab command line interface.

Exit codes: 0 success, 1 an identity or bound check failed (including a
golden mismatch), 2 usage error.
"""
import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import __version__
from .exact import SR, ScaledRational, gamma_half
from .rotation import PrecisionExhausted


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    pass


# output helpers ------------------------------------------------------------

def dump_json(obj):
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def rows_to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def load_golden(name):
    """A golden file by path, or by name from the bundled set."""
    path = Path(name)
    if not path.is_file():
        path = resources.files("scs_lab") / "golden" / name
    return json.loads(path.read_text(encoding="utf-8"))


def golden_diff(result, golden, path=""):
    """Differences between two JSON-like structures, as 'path: a != b' lines.
    Keys present only in ``result`` are ignored."""
    diffs = []
    if isinstance(golden, dict):
        if not isinstance(result, dict):
            return [f"{path}: expected an object"]
        for k in sorted(golden):
            if k not in result:
                diffs.append(f"{path}/{k}: missing")
            else:
                diffs.extend(golden_diff(result[k], golden[k], f"{path}/{k}"))
    elif isinstance(golden, list):
        if not isinstance(result, list) or len(result) != len(golden):
            return [f"{path}: length {len(result) if isinstance(result, list) else '?'} != {len(golden)}"]
        for i, (a, b) in enumerate(zip(result, golden)):
            diffs.extend(golden_diff(a, b, f"{path}[{i}]"))
    elif result != golden:
        diffs.append(f"{path}: {result!r} != {golden!r}")
    return diffs


def _parse_rational_list(text):
    try:
        return [Fraction(v.strip()) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse rational list {text!r}: {exc}")


def _parse_float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse list {text!r}: {exc}")


def _count(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if v != int(v) or v <= 0:
        raise argparse.ArgumentTypeError(f"need a positive integer, got {text!r}")
    return int(v)


def _sr_json(v):
    return ScaledRational.coerce(v).to_json()


# commands -----------------------------------------------------------------

def cmd_coeffs(args):
    from .series import v_coefficients
    a = v_coefficients(args.order)
    rows = []
    for k, c in enumerate(a):
        b = c * gamma_half(k)
        rows.append({"k": k, "a": c, "b": b})
    data = {"order": args.order,
            "a": [_sr_json(r["a"]) for r in rows],
            "b": [_sr_json(r["b"]) for r in rows]}
    pretty = "".join(f"a[{r['k']}] = {r['a'].pretty():<24} b[{r['k']}] = {r['b'].pretty()}\n"
                     for r in rows)
    table = ["k", "a", "b"], [[r["k"], r["a"].pretty(), r["b"].pretty()] for r in rows]
    return data, pretty, table, True


def cn_table_data(d, n_max):
    from .sympoly import build_cn, m_expand
    from .uniqueness import v_b_coefficients
    b = v_b_coefficients(n_max + 1)
    factor = SR(1, *(SR(1, 1, 1) ** d).radical)     # radical class of (sqrt(2) sqrt(pi))**d
    out = {}
    for n in range(1, n_max + 1):
        terms = m_expand(build_cn(d, n, b))
        out[str(n)] = [[lam.label(), str((c / factor).q)] for lam, c in terms]
    return {"d": d, "factor": factor.to_json(), "B": out}


def cmd_cn_table(args):
    data = cn_table_data(args.d, args.n)
    factor = ScaledRational.from_json(data["factor"])
    lines, rows = [], []
    for n, terms in data["B"].items():
        parts = []
        for label, q in terms:
            c = factor * Fraction(q)
            parts.append(f"({c.pretty()})·{label}")
            rows.append([n, label, q, c.pretty()])
        lines.append(f"B[{n}] = " + " + ".join(parts) + "\n")
    ok = True
    if args.golden or (args.d == 3 and args.golden is None):
        gold = load_golden(args.golden or "cn_d3.json")
        gb = gold["B"]
        sub = {"factor": data["factor"], "B": {k: data["B"][k] for k in gb if k in data["B"]}}
        want = {"factor": gold["factor"], "B": {k: gb[k] for k in gb if k in data["B"]}}
        diffs = golden_diff(sub, want)
        data["golden_diff"] = diffs
        ok = not diffs
        lines.append(f"golden: {'match' if ok else 'MISMATCH'}\n")
        lines.extend(f"  {d}\n" for d in diffs)
    return data, "".join(lines), (["n", "partition", "rational", "value"], rows), ok


def cmd_verify_kod(args):
    from .uniqueness import kod_certificate, v_b_coefficients
    b = v_b_coefficients(6)
    if args.tamper:
        # move b5 by one unit of its radical class
        b[5] = b[5] + SR(1, *b[5].radical)
    cert = kod_certificate(b)
    data = cert.to_json()
    pretty = "".join(f"{'ok  ' if ok else 'FAIL'} {name}\n" for name, ok in cert.checks)
    pretty += f"certificate: {'valid' if cert.ok else 'INVALID'}\n"
    return data, pretty, (["check", "ok"], [[n, o] for n, o in cert.checks]), cert.ok


def cmd_uniqueness(args):
    from .uniqueness import (run_elimination, v_b_coefficients, independence_threshold,
                             StructurallySingular)
    if args.b:
        b = _parse_rational_list(args.b)
        if len(b) <= args.max_n:
            raise UsageError(f"--b needs at least {args.max_n + 1} values")
    elif args.source == "v":
        b = v_b_coefficients(args.max_n + 1)
    else:
        raise UsageError("give --source v or --b")
    x = _parse_rational_list(args.x) if args.x else None
    if x is not None and len(x) != args.d:
        raise UsageError(f"--x needs {args.d} values")
    state = run_elimination(args.d, b, args.max_n, x=x)
    data = state.to_json()
    if args.thresholds:
        th = {}
        for n in range(2, args.max_n + 1):
            try:
                th[str(n)] = str(independence_threshold(n, args.d))
            except StructurallySingular as exc:
                th[str(n)] = f"none ({exc})"
        data["thresholds"] = th
    lines = [f"d = {args.d}, steps 1..{args.max_n}\n"]
    for s in data["steps"]:
        tag = "degenerate" if s["degenerate"] else "informative"
        lines.append(f"step {s['n']}: {tag}; rank {s['rank_products']} -> {s['rank_full']} "
                     f"of {len(s['unknowns'])}; determined {', '.join(s['determined']) or '-'}\n")
    lines.append(f"degenerate steps: {data['degenerate_steps']}\n")
    for n, c in data.get("thresholds", {}).items():
        lines.append(f"C{n} = {c}\n")
    rows = [[s["n"], s["degenerate"], s["rank_products"], s["rank_full"],
             " ".join(s["determined"])] for s in data["steps"]]
    return data, "".join(lines), (["n", "degenerate", "rank_products", "rank_full", "determined"], rows), True


def _densities(kind, ts):
    from .numerics import Density
    return [Density(kind, t) for t in ts]


def _fold(kernels):
    from .numerics import Convolution
    acc = kernels[0]
    for k in kernels[1:]:
        acc = Convolution(acc, k)
    return acc


def cmd_convolve(args):
    import numpy as np
    ts = _parse_float_list(args.t)
    if len(ts) < 2:
        raise UsageError("--t needs at least two scales")
    if len(ts) > 3:
        raise UsageError("at most three factors are supported")
    ks = _densities(args.kind, ts)
    if len(ts) == 3 and len({t > 0 for t in ts}) == 2:
        ks = sorted(ks, key=lambda k: k.side)[::-1]
        same = [k for k in ks if k.side == ks[0].side]
        other = [k for k in ks if k.side != ks[0].side]
        if len(same) == 1:
            same, other = other, same
        conv = _fold([_fold(same), other[0]])
    else:
        conv = _fold(ks)
    xs = np.linspace(args.x_min, args.x_max, args.points)
    vals = np.asarray(conv(xs), dtype=float)
    data = {"t": ts, "kind": args.kind, "edge": conv.edge, "side": conv.side,
            "x": [float(v) for v in xs], "value": [float(v) for v in vals]}
    pretty = "".join(f"{x: .6f}  {v:.15g}\n" for x, v in zip(xs, vals))
    return data, pretty, (["x", "value"], [[repr(float(x)), repr(float(v))] for x, v in zip(xs, vals)]), True


def expected_A0(kind, ts, order=4):
    """Symbolic candidates for A0 of the wrapped convolution: one value for
    same-sign scales, the pair (A0, -A0) for mixed signs."""
    from .series import conv_series_rescaled, mixed_sign_combine, v_coefficients
    v = v_coefficients(order)
    weight = (2 / math.pi) ** len(ts) if kind == "h" else 1.0
    ts = [Fraction(t).limit_denominator(10 ** 6) for t in ts]
    pos = [t for t in ts if t > 0]
    neg = [t for t in ts if t < 0]
    if pos and neg:
        pair = mixed_sign_combine(conv_series_rescaled(v, Fraction(-1, 2), pos),
                                  conv_series_rescaled(v, Fraction(-1, 2), neg))
        return [weight * c.prefactor * float(c.side_coeffs()[0]) for c in pair]
    cc = conv_series_rescaled(v, Fraction(-1, 2), ts)
    return [weight * cc.prefactor * cc.sign * float(cc.coeffs[0])]


def cmd_wrap_recover(args):
    from .numerics import Wrapped, recover_A0_A1
    ts = _parse_float_list(args.t)
    d = len(ts)
    if d not in (1, 2, 3) or 0 in ts:
        raise UsageError("--t takes one to three non-zero scales")
    mixed = len({t > 0 for t in ts}) == 2
    if mixed and d != 3:
        raise UsageError("mixed signs are supported for three factors")
    ks = _densities(args.kind, ts)
    if mixed:
        same = [k for k in ks if k.side == 1]
        other = [k for k in ks if k.side == -1]
        if len(same) == 1:
            same, other = other, same
        kern = _fold([_fold(same), other[0]])
        a = 0.5
    else:
        kern = _fold(ks)
        a = d / 2 - 1
    W = Wrapped(kern, tol=args.tol)
    center = ((kern.edge + 0.5) % 1.0) - 0.5
    rec = recover_A0_A1(W, a, center=center, with_A1=args.a1 and not mixed)
    cands = expected_A0(args.kind, ts)
    errs = [abs(rec.A0 - c) / abs(c) for c in cands]
    best = min(range(len(cands)), key=errs.__getitem__)
    data = {"t": ts, "kind": args.kind, "a": a, "center": center, "K": W.K,
            "tail_bound": W.tail_bound, **rec.to_json(),
            "A0_candidates": cands, "A0_match": best, "A0_rel_error": errs[best]}
    pretty = "".join(f"{k}: {v}\n" for k, v in sorted(data.items()))
    ok = errs[best] < args.rtol
    return data, pretty, (["key", "value"], [[k, v] for k, v in sorted(data.items())]), ok


def cmd_birkhoff(args):
    from .rotation import parse_alpha, empirical_vs_nu
    cf = parse_alpha(args.alpha, args.depth)
    levels = [int(v) for v in args.levels.split(",")] if args.levels else list(range(1, args.k + 1))
    if max(levels) >= len(cf.q):
        raise UsageError(f"alpha only has {len(cf.q) - 1} convergents; raise --depth")
    rows = []
    for lev in levels:
        r = empirical_vs_nu(cf, args.m, lev, args.samples, seed=args.seed)
        r["q"] = str(r["q"])
        rows.append(r)
    data = {"alpha": args.alpha, "samples": args.samples, "seed": args.seed, "levels": rows}
    pretty = "".join(f"k={r['k']:<3} q={r['q']:<24} KS={r['ks']:.6f}  ({r['method']})\n" for r in rows)
    cols = ["k", "q", "m", "ks", "method", "skipped", "remainder_bound"]
    table = (cols, [[repr(r[c]) if isinstance(r[c], float) else r[c] for c in cols] for r in rows])
    return data, pretty, table, not any(r["flagged"] for r in rows)


def cmd_cf(args):
    from .rotation import parse_alpha
    cf = parse_alpha(args.alpha, args.depth)
    data = cf.to_json()
    checks = [cf.convergent_bound_ok(n) for n in range(len(cf.q) - 1)]
    data["convergent_bound_certified"] = checks
    pretty = "".join(f"a{n + 1:<3} {a:<12} p={p}  q={q}\n"
                     for n, (a, p, q) in enumerate(zip(cf.quotients, cf.p[1:], cf.q[1:])))
    if cf.exhausted:
        pretty += "precision exhausted before the requested depth\n"
    rows = [[n + 1, a, p, q] for n, (a, p, q) in enumerate(zip(cf.quotients, cf.p[1:], cf.q[1:]))]
    return data, pretty, (["n", "a", "p", "q"], rows), all(checks)


def cmd_w_probe(args):
    from .numerics import hbar_power_probe, BoundViolation
    reports = []
    ok = True
    for n in range(args.n_min, args.n_max + 1):
        try:
            rep = hbar_power_probe(n)
        except BoundViolation as exc:
            ok = False
            reports.append({"n": n, "error": str(exc)})
            continue
        diag = rep.diagnostics
        good = abs(diag["small_x_limit"] - diag["small_x_expected"]) < args.tol
        ok = ok and good
        reports.append({"n": n, **rep.to_json(), "small_x_ok": good})
    data = {"probes": reports}
    pretty = "".join(
        (f"n={r['n']}: A={r['A']:.6g} t={r['t']} limit={r['diagnostics']['small_x_limit']:.10f} "
         f"(expected {r['diagnostics']['small_x_expected']:.10f})\n") if "A" in r else f"n={r['n']}: {r['error']}\n"
        for r in reports)
    rows = [[r["n"], r.get("A"), r.get("t"), r.get("diagnostics", {}).get("small_x_limit")] for r in reports]
    return data, pretty, (["n", "A", "t", "small_x_limit"], rows), ok


COMMANDS = {
    "coeffs": cmd_coeffs,
    "cn-table": cmd_cn_table,
    "verify-kod": cmd_verify_kod,
    "uniqueness": cmd_uniqueness,
    "convolve": cmd_convolve,
    "wrap-recover": cmd_wrap_recover,
    "birkhoff": cmd_birkhoff,
    "cf": cmd_cf,
    "w-probe": cmd_w_probe,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_const", const="json", dest="format")
    fmt.add_argument("--pretty", action="store_const", const="pretty", dest="format")
    fmt.add_argument("--format", choices=["json", "csv", "pretty"], dest="format")
    common.add_argument("--csv", metavar="PATH", help="also write a CSV table to PATH ('-' for stdout)")
    common.add_argument("--out", metavar="PATH", help="write the main output to PATH")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="scs-lab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"scs-lab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("coeffs", parents=[common], help="Taylor coefficients of v")
    s.add_argument("--order", type=int, default=8)

    s = sub.add_parser("cn-table", parents=[common], help="c_n in the monomial basis")
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--n", type=int, default=5)
    s.add_argument("--golden", default=None, help="golden JSON file, or the name of a bundled one")

    s = sub.add_parser("verify-kod", parents=[common], help="check the d=3 recovery certificate")
    s.add_argument("--tamper", action="store_true", help="perturb b5 (the check must fail)")

    s = sub.add_parser("uniqueness", parents=[common], help="run the elimination steps")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--source", choices=["v"], default=None)
    s.add_argument("--b", default=None, help="comma separated rationals b0,b1,...")
    s.add_argument("--max-n", type=int, default=5)
    s.add_argument("--x", default=None, help="comma separated rational point to solve at")
    s.add_argument("--thresholds", action="store_true", help="also print C_n symbolically")

    s = sub.add_parser("convolve", parents=[common], help="numerical convolution on a grid")
    s.add_argument("--t", default="1,1")
    s.add_argument("--kind", choices=["hbar", "h"], default="hbar")
    s.add_argument("--x-min", type=float, default=0.01)
    s.add_argument("--x-max", type=float, default=3.0)
    s.add_argument("--points", type=int, default=50)

    s = sub.add_parser("wrap-recover", parents=[common], help="recover A0 (and A1) from the wrapped function")
    s.add_argument("--t", default="1")
    s.add_argument("--kind", choices=["hbar", "h"], default="h")
    s.add_argument("--a1", action="store_true", help="also recover A1")
    s.add_argument("--tol", type=float, default=1e-15)
    s.add_argument("--rtol", type=float, default=1e-4)

    s = sub.add_parser("birkhoff", parents=[common], help="KS distance of Birkhoff sums to nu_m")
    s.add_argument("--alpha", default="liouville:3")
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--levels", default=None, help="explicit comma separated levels")
    s.add_argument("--samples", type=_count, default=10 ** 5)
    s.add_argument("--depth", type=int, default=None)

    s = sub.add_parser("cf", parents=[common], help="continued fraction expansion")
    s.add_argument("--alpha", default="golden")
    s.add_argument("--depth", type=int, default=30)

    s = sub.add_parser("w-probe", parents=[common], help="decay probes for x^n hbar^(n)")
    s.add_argument("--n-min", type=int, default=0)
    s.add_argument("--n-max", type=int, default=6)
    s.add_argument("--tol", type=float, default=1e-3)
    return p


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def main(argv=None):
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    fmt = args.format or "pretty"
    try:
        data, pretty, table, ok = COMMANDS[args.command](args)
    except (UsageError, PrecisionExhausted) as exc:
        sys.stderr.write(f"scs-lab: error: {exc}\n")
        return 2
    if fmt == "json":
        main_text = dump_json(data)
    elif fmt == "csv":
        main_text = rows_to_csv(*table)
    else:
        main_text = pretty
    if args.csv and not (fmt == "csv" and args.csv == "-" and args.out is None):
        _write(args.csv, rows_to_csv(*table))
    _write(args.out, main_text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

Exit codes: 0 ok, 1 certificate mismatch, 2 bad input or I/O, 3 hypothesis
failure, 4 function is not APN.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from apnlab import apn_builder as ab
from apnlab.field_core import FieldSpec, find_omega
from apnlab.limits import CapExceeded
from apnlab.scan import bench_csv, bench_walsh, bent_scan
from apnlab.spectrum import (
    MalformedSbox,
    is_balanced,
    power_function,
    read_sbox,
    sbox_report,
    trace_monomial,
    walsh_fast,
    walsh_monomial_by_classes,
    walsh_naive,
)

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_HYPOTHESIS, EXIT_NOT_APN = 0, 1, 2, 3, 4

VERDICT_EXIT = {
    ab.Verdict.APN_VERIFIED: EXIT_OK,
    ab.Verdict.HYPOTHESIS_FAIL: EXIT_HYPOTHESIS,
    ab.Verdict.NOT_APN: EXIT_NOT_APN,
}

FAMILY_NAMES = {"A": ab.Family.A_OPTIMAL, **{f.value: f for f in ab.Family}}


def hex_int(s: str) -> int:
    return int(s, 16)


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj, output: str | None):
    _emit(json.dumps(obj, indent=2) + "\n", output)


# --- commands ------------------------------------------------------------------

def cmd_field_info(args) -> int:
    f = FieldSpec(args.n, args.poly or 0)
    info = {"n": f.n, "poly": f"{f.reduction_poly:x}", "size": f.size, "primitive": f"{f.primitive:x}"}
    if f.n % 2 == 0:
        info["q"] = f.q
        info["omega"] = f"{find_omega(f):x}"
        info["half_field_poly"] = f"{f.half_field.reduction_poly:x}"
    _dump(info, args.output)
    return EXIT_OK


def cmd_walsh_monomial(args) -> int:
    f = FieldSpec(args.n)
    fn = trace_monomial(f, args.a, args.i)
    if args.method == "classes":
        spec = walsh_monomial_by_classes(f, args.a, args.i)
    elif args.method == "naive":
        spec = walsh_naive(fn, f)
    else:
        spec = walsh_fast(fn, f)
    w = spec.values
    bent = f.n % 2 == 0 and bool(np.all(np.abs(w) == 1 << (f.n // 2)))
    out = {
        "n": f.n, "i": args.i, "a": f"{args.a:x}", "method": args.method,
        "evaluations": spec.evaluations or f.size,
        "chi_zero": int(w[0]), "max_abs": spec.max_abs(), "balanced": is_balanced(fn),
        "bent": bent, "parseval": spec.parseval_holds(),
    }
    if args.values:
        out["values"] = w.tolist()
    _dump(out, args.output)
    return EXIT_OK


def cmd_bent_scan(args) -> int:
    report = bent_scan(args.k_min, args.k_max, method=args.method, dedup=not args.no_dedup,
                       override_caps=args.override_caps)
    if args.format == "csv":
        rows = ["k,i,a,bent,chi_zero_sign,sign_ok,runtime_ms,method"]
        rows += [f"{r.k},{r.i},{r.a},{int(r.bent)},{r.chi_zero_sign},{int(bool(r.sign_ok))},{r.runtime_ms},{r.method}"
                 for r in report.records]
        _emit("\n".join(rows) + "\n", args.output)
    else:
        _dump(report.to_json(), args.output)
    return EXIT_OK


def cmd_apn_check(args) -> int:
    if args.sbox:
        F = read_sbox(args.sbox)
        source = str(args.sbox)
        if args.n is not None and F.n != args.n:
            raise ValueError(f"S-box has {F.n} input bits, expected {args.n}")
    else:
        if args.n is None:
            raise ValueError("--monomial needs --n")
        F = power_function(FieldSpec(args.n), args.monomial)
        source = f"x^{args.monomial}"
    report = sbox_report(F, source, override_caps=args.override_caps)
    _dump(report, args.output)
    return EXIT_OK                     # the verdict is in the report, not the exit code


def _iso(args, field: FieldSpec) -> ab.LinearIso | None:
    if not args.L:
        return None
    theta = args.theta if args.theta is not None else find_omega(field)
    if args.L == "gener":
        return ab.make_isomorphism_L(field, "gener", s=theta, i=args.i or 1)
    return ab.make_isomorphism_L(field, args.L, theta=theta)


def _build(args) -> ab.ApnCertificate:
    fam = FAMILY_NAMES[args.name]
    field = FieldSpec(args.n, args.poly or 0)
    if fam in (ab.Family.A_FAUX, ab.Family.A_OPTIMAL):
        return ab.build_family_a(field, args.i, args.c, args.b, fam)
    if fam is ab.Family.B:
        return ab.build_family_b(field, args.s, args.b, args.c, args.r)
    if fam is ab.Family.C:
        return ab.build_family_c(field, args.i, args.c, args.s_elem)
    if fam is ab.Family.D:
        return ab.build_family_d(field, args.i, args.c, args.t or 0, _iso(args, field))
    return ab.build_family_e(field, args.i, args.j, args.c, _iso(args, field))


def cmd_family_build(args) -> int:
    cert = _build(args)
    _emit(cert.dumps() + "\n", args.output)
    return VERDICT_EXIT[cert.verdict]


def cmd_family_search(args) -> int:
    certs = ab.search_family(FAMILY_NAMES[args.name], args.n, args.budget, i=args.i,
                             include_failures=args.include_failures, workers=args.workers)
    _dump([c.to_json() for c in certs], args.output)
    if any(c.verdict is ab.Verdict.APN_VERIFIED for c in certs):
        return EXIT_OK
    if any(c.verdict is ab.Verdict.NOT_APN for c in certs):
        return EXIT_NOT_APN
    return EXIT_HYPOTHESIS if certs else EXIT_OK


def cmd_family_verify(args) -> int:
    data = json.loads(Path(args.cert).read_text())
    items = data if isinstance(data, list) else [data]
    results = []
    for d in items:
        ok, cert = ab.verify_certificate(d)
        results.append({"family": d["family"], "n": d["n"], "verdict": cert.verdict.value, "reproduced": ok})
    _dump(results, args.output)
    return EXIT_OK if all(r["reproduced"] for r in results) else EXIT_MISMATCH


def cmd_bench_walsh(args) -> int:
    exps = [int(x) for x in args.i.split(",") if x.strip()]
    rows = bench_walsh(args.n, exps, repeat=args.repeat)
    _emit(bench_csv(rows), args.output)
    return EXIT_OK if all(r.equal for r in rows) else EXIT_MISMATCH


# --- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--override-caps", action="store_true", help="lift the exhaustive-search size caps")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("-o", "--output", help="write the report here instead of stdout")
    p = argparse.ArgumentParser(prog="apnlab", description="GF(2^n) Walsh, bentness and APN tooling")
    sub = p.add_subparsers(dest="command", required=True)

    field = sub.add_parser("field").add_subparsers(dest="action", required=True)
    fi = field.add_parser("info", parents=[common])
    fi.add_argument("--n", type=int, required=True)
    fi.add_argument("--poly", type=hex_int)
    fi.set_defaults(func=cmd_field_info)

    walsh = sub.add_parser("walsh").add_subparsers(dest="action", required=True)
    wm = walsh.add_parser("monomial", parents=[common])
    wm.add_argument("--n", type=int, required=True)
    wm.add_argument("--i", type=int, required=True)
    wm.add_argument("--a", type=hex_int, default=1)
    wm.add_argument("--method", choices=("naive", "fast", "classes"), default="fast")
    wm.add_argument("--values", action="store_true", help="include the full spectrum")
    wm.set_defaults(func=cmd_walsh_monomial)

    bs = sub.add_parser("bent-scan", parents=[common])
    bs.add_argument("--k-min", type=int, default=4)
    bs.add_argument("--k-max", type=int, default=12)
    bs.add_argument("--method", choices=("naive", "fast", "classes"), default="fast")
    bs.add_argument("--no-dedup", action="store_true", help="scan every exponent, not one per doubling orbit")
    bs.add_argument("--format", choices=("json", "csv"), default="json")
    bs.set_defaults(func=cmd_bent_scan)

    apn = sub.add_parser("apn").add_subparsers(dest="action", required=True)
    ac = apn.add_parser("check", parents=[common])
    src = ac.add_mutually_exclusive_group(required=True)
    src.add_argument("--monomial", type=int)
    src.add_argument("--sbox")
    ac.add_argument("--n", type=int)
    ac.set_defaults(func=cmd_apn_check)

    fam = sub.add_parser("family").add_subparsers(dest="action", required=True)
    for name, func in (("build", cmd_family_build), ("search", cmd_family_search)):
        fp = fam.add_parser(name, parents=[common])
        fp.add_argument("--name", choices=sorted(FAMILY_NAMES), required=True)
        fp.add_argument("--n", type=int, required=True)
        fp.add_argument("--poly", type=hex_int)
        fp.add_argument("--i", type=int)
        fp.set_defaults(func=func)
    fb = fam.choices["build"]
    fb.add_argument("--j", type=int)
    fb.add_argument("--s", type=int, help="exponent s (family B)")
    fb.add_argument("--s-elem", type=hex_int, help="element s outside the half field (family C)")
    for name in ("b", "c", "t"):
        fb.add_argument(f"--{name}", type=hex_int)
    fb.add_argument("--r", type=lambda s: [int(x, 16) for x in s.split(",") if x], help="comma-separated hex")
    fb.add_argument("--L", choices=("basis", "dual", "gener"))
    fb.add_argument("--theta", type=hex_int)
    fs = fam.choices["search"]
    fs.add_argument("--budget", type=int, default=10)
    fs.add_argument("--include-failures", action="store_true")
    fv = fam.add_parser("verify", parents=[common])
    fv.add_argument("--cert", required=True, help="certificate JSON (single object or list)")
    fv.set_defaults(func=cmd_family_verify)

    bench = sub.add_parser("bench").add_subparsers(dest="action", required=True)
    bw = bench.add_parser("walsh", parents=[common])
    bw.add_argument("--n", type=int, required=True)
    bw.add_argument("--i", required=True, help="comma-separated exponents")
    bw.add_argument("--repeat", type=int, default=3)
    bw.set_defaults(func=cmd_bench_walsh)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError, MalformedSbox, CapExceeded, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

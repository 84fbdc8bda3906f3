"""Command line interface: check, verify, simulate, embed, degree."""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from pathlib import Path

from .orders import (Certificate, CertificateError, Variant, check_compat, format_certificate,
                     parse_certificate)
from .predicative import check_embedding, degree_bound, degree_d
from .rewrite import CapExceeded, DerivationReport, Row, Strategy, dheight, growth_classify, rc_table
from .sat.dimacs import DimacsError
from .sat.encode import EncodingError
from .sat.synth import Budget, Incompatible, Unknown, synthesize
from .terms import TRS, TermError, format_predicative, is_value, precedence_depth, size
from .tpdb import Family, ParseError, parse_term, parse_trs

EXIT_OK, EXIT_NO, EXIT_UNKNOWN = 0, 1, 2
EXIT_INPUT, EXIT_USAGE, EXIT_INTERNAL = 10, 11, 12

VARIANT_SLUG = {Variant.POPSTAR: "popstar", Variant.POPSTAR_PS: "popstar_ps", Variant.MPO: "mpo"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _load_trs(path: str) -> TRS:
    return parse_trs(_read(path))


def _variants(text: str | None) -> tuple[list[Variant], bool]:
    """Requested variants and whether to stop at the first success."""
    if text is None:
        return [Variant.POPSTAR, Variant.POPSTAR_PS], True
    try:
        return [Variant.parse(x) for x in text.split(",") if x.strip()], False
    except ValueError as e:
        raise UsageError(str(e)) from None


def _range(text: str) -> range:
    try:
        a, b = text.split("..")
        lo, hi = int(a), int(b)
    except ValueError:
        raise UsageError(f"bad range {text!r}, expected a..b") from None
    if lo > hi or lo < 0:
        raise UsageError(f"empty or negative range {text!r}")
    return range(lo, hi + 1)


def normal_width(trs: TRS, cert: Certificate) -> int:
    """Largest number of normal argument positions of a defined symbol (at least 1)."""
    return max([f.arity - len(cert.safe.positions(f)) for f in trs.defined] + [1])


def dense_rank(trs: TRS, cert: Certificate) -> int:
    return precedence_depth(cert.precedence, trs.signature)


def describe(trs: TRS, cert: Certificate) -> str:
    prec = cert.precedence
    defined = [f.name for f in trs.defined]
    lines = ["precedence:"]
    for lv in sorted({prec.of(n) for n in defined}, reverse=True):
        group = sorted(n for n in defined if prec.of(n) == lv)
        if len(group) > 1:
            lines.append("  " + " = ".join(group))
    pairs = prec.chains(defined)
    lines.extend(f"  {f} > {g}" for f, g in pairs)
    if len(lines) == 1:
        lines.append("  (all defined symbols equivalent)")
    if cert.variant is Variant.MPO:
        lines.append("oriented rules:")
        lines.extend(f"  {r.lhs} -> {r.rhs}" for r in trs.rules)
        lines.append("degree bound: none (the multiset path order gives no polynomial bound)")
        return "\n".join(lines)
    lines.append("safe positions:")
    for f in sorted(trs.defined, key=lambda f: f.name):
        pos = ", ".join(map(str, sorted(cert.safe.positions(f)))) or "-"
        lines.append(f"  {f.name}: {pos}")
    lines.append("oriented rules in predicative notation:")
    for r in trs.rules:
        lines.append(f"  {format_predicative(r.lhs, cert.safe)} -> {format_predicative(r.rhs, cert.safe)}")
    k, p = normal_width(trs, cert), dense_rank(trs, cert)
    lines.append(f"degree bound: d = {degree_d(k, p)} (k = {k}, p = {p})")
    return "\n".join(lines)


# -- commands -------------------------------------------------------------------

def cmd_check(args) -> int:
    trs = _load_trs(args.file)
    variants, fallback = _variants(args.order)
    solver = args.solver or os.environ.get("POPCERT_SOLVER", "internal")
    budget = Budget(args.max_conflicts, args.timeout)
    outcomes = []
    found: Certificate | None = None
    for v in variants:
        if v is not Variant.MPO and not trs.is_constructor_system:
            print(f"{v.value}: not applicable (not a constructor system)")
            outcomes.append(EXIT_NO)
            continue
        cnf_path = args.cnf_out
        if cnf_path and len(variants) > 1:
            base = Path(cnf_path)
            cnf_path = str(base.with_name(f"{base.stem}.{VARIANT_SLUG[v]}{base.suffix}"))
        sink = open(cnf_path, "w") if cnf_path else None
        try:
            res = synthesize(trs, v, budget, solver, cnf_out=sink)
        finally:
            if sink:
                sink.close()
        if isinstance(res, Certificate):
            print(f"{v.value}: compatible")
            print(describe(trs, res))
            outcomes.append(EXIT_OK)
            found = found or res
            if fallback:
                break
        elif isinstance(res, Incompatible):
            print(f"{v.value}: incompatible")
            outcomes.append(EXIT_NO)
        else:
            print(f"{v.value}: {res}")
            outcomes.append(EXIT_UNKNOWN)
    if found is not None and args.cert_out:
        Path(args.cert_out).write_text(format_certificate(found, trs))
    if EXIT_OK in outcomes:
        return EXIT_OK
    return EXIT_UNKNOWN if EXIT_UNKNOWN in outcomes else EXIT_NO


def cmd_verify(args) -> int:
    trs = _load_trs(args.file)
    cert = parse_certificate(_read(args.cert), trs)
    report = check_compat(trs, cert)
    for res in report.results:
        print(f"{'ok  ' if res.oriented else 'FAIL'} {res.rule}")
        for line in res.trace:
            print(f"       {line}")
    n_bad = len(report.failures())
    print(f"{len(report.results) - n_bad}/{len(report.results)} rules oriented by {cert.variant.value}")
    return EXIT_OK if report.compatible else EXIT_NO


def cmd_simulate(args) -> int:
    trs = _load_trs(args.file)
    strat = Strategy(args.strategy)
    if (args.term is None) == (args.family is None):
        raise UsageError("give exactly one of --term or --family")
    if args.term is not None:
        t = parse_term(args.term, trs)
        report = DerivationReport(args.term, strat)
        try:
            h = dheight(t, trs, strat, args.step_cap, args.state_cap)
            report.rows.append(Row(0, size(t), h))
        except CapExceeded:
            report.rows.append(Row(0, size(t), None, True))
    else:
        fam = Family(args.family, trs)
        report = rc_table(trs, fam, _range(args.range), strat, args.step_cap, args.state_cap)
    if args.format == "csv":
        sys.stdout.write(report.to_csv())
    else:
        sys.stdout.write(report.to_text())
        if args.family is not None:
            print(f"growth: {growth_classify(report)}")
    return EXIT_OK


def cmd_embed(args) -> int:
    trs = _load_trs(args.file)
    if args.cert:
        cert = parse_certificate(_read(args.cert), trs)
    else:
        cert = None
        for v in (Variant.POPSTAR, Variant.POPSTAR_PS):
            res = synthesize(trs, v)
            if isinstance(res, Certificate):
                cert = res
                break
        if cert is None:
            print("no certificate found; nothing to embed")
            return EXIT_NO
    if cert.variant is Variant.MPO:
        raise UsageError("embedding needs a pop* or pop*ps certificate")
    if not check_compat(trs, cert).compatible:
        print("certificate does not orient all rules")
        return EXIT_NO
    start = parse_term(args.start, trs, cert.safe)
    if is_value(start):
        print("start term is a value: no steps")
        return EXIT_OK
    report = check_embedding(trs, cert, [start], sample_cap=args.max_steps, ell=args.ell)
    sys.stdout.write(report.to_text())
    return EXIT_OK if report.ok else EXIT_NO


def _log10_c(k: int, p: int) -> float:
    d, logc = k + 1, k * math.log10(k) if k > 1 else 0.0
    for _ in range(p):
        e = sum((k * d) ** i for i in range(k + 1))
        logc = e * (logc + math.log10(k)) if k > 1 else 0.0
        d = d ** k + 1
    return logc


def cmd_degree(args) -> int:
    k, p = args.k, args.p
    if k < 1 or p < 0:
        raise UsageError("need k >= 1 and p >= 0")
    d = degree_d(k, p)
    if _log10_c(k, p) > 10_000:
        print(f"c = (about 10^{_log10_c(k, p):.3g})")
    else:
        print(f"c = {degree_bound(k, p).c}")
    print(f"d = {d}")
    return EXIT_OK


# -- entry point ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="popcert", description="Polynomial path order certificates for rewrite systems.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="search a certificate with the SAT encoding")
    p.add_argument("file")
    p.add_argument("--order", help="comma separated list of pop*, pop*ps, mpo (default: pop* then pop*ps)")
    p.add_argument("--cert-out")
    p.add_argument("--cnf-out")
    p.add_argument("--solver", help="internal or dimacs:<command> (default $POPCERT_SOLVER or internal)")
    p.add_argument("--max-conflicts", type=int, default=200_000)
    p.add_argument("--timeout", type=float)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("verify", help="check a certificate against every rule")
    p.add_argument("file")
    p.add_argument("--cert", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="measure derivation heights")
    p.add_argument("file")
    p.add_argument("--term")
    p.add_argument("--family", help="template such as 'times(s^@n(0), s^@n(0))'")
    p.add_argument("--range", default="0..10")
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default="innermost")
    p.add_argument("--step-cap", type=int, default=10**6)
    p.add_argument("--state-cap", type=int, default=10**5)
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("embed", help="check the sequence embedding along innermost derivations")
    p.add_argument("file")
    p.add_argument("--cert")
    p.add_argument("--start", required=True)
    p.add_argument("--max-steps", type=int, default=10_000)
    p.add_argument("--ell", type=int)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("degree", help="print the constants of the polynomial bound")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=int, default=0)
    p.set_defaults(func=cmd_degree)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, CertificateError, DimacsError, TermError, UsageError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (EncodingError, CapExceeded) as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

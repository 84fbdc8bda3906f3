"""Decision procedures for polynomial path orders and the multiset path order."""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, field

from .multiset import MultisetResult, multiset_compare
from .terms import (App, FunctionSymbol, Precedence, SafeMapping, Term, TermError, TRS, Var,
                    admissible_precedence, symbols)


class Variant(enum.Enum):
    POPSTAR = "pop*"
    POPSTAR_PS = "pop*ps"
    MPO = "mpo"

    @classmethod
    def parse(cls, text: str) -> "Variant":
        for v in cls:
            if v.value == text.strip().lower():
                return v
        raise ValueError(f"unknown order {text!r} (expected pop*, pop*ps or mpo)")


@dataclass(frozen=True)
class Certificate:
    variant: Variant
    precedence: Precedence
    safe: SafeMapping = field(default_factory=SafeMapping)


def equiv_key(t: Term, prec: Precedence, sm: SafeMapping | None = None):
    """Canonical form modulo symbol equivalence and argument permutation.

    With a safe mapping, permutations must also respect the safe/normal split.
    """
    if isinstance(t, Var):
        return ("v", t.name)
    f = t.sym
    kids = sorted((sm is not None and sm.is_safe(f, i), equiv_key(a, prec, sm))
                  for i, a in enumerate(t.args, 1))
    return ("f", prec.of(f), tuple(kids))


class OrderChecker:
    """Memoised orientation checks for a fixed certificate."""

    def __init__(self, cert: Certificate):
        self.cert = cert
        self.prec = cert.precedence
        self.sm = cert.safe
        self._memo: dict = {}
        self._keys: dict = {}

    # -- equivalences ---------------------------------------------------
    def _key(self, t: Term, safe_aware: bool):
        k = (safe_aware, t)
        out = self._keys.get(k)
        if out is None:
            out = equiv_key(t, self.prec, self.sm if safe_aware else None)
            self._keys[k] = out
        return out

    def safe_equiv(self, s: Term, t: Term) -> bool:
        return s == t or self._key(s, True) == self._key(t, True)

    def term_equiv(self, s: Term, t: Term) -> bool:
        return s == t or self._key(s, False) == self._key(t, False)

    def below(self, t: Term, F) -> bool:
        top = max((self.prec.of(f) for f in F), default=None)
        if top is None:
            return isinstance(t, Var) or not symbols(t)
        return all(self.prec.of(g) < top for g in symbols(t))

    # -- orders -----------------------------------------------------------
    def _cached(self, tag, s, t, fn):
        k = (tag, s, t)
        v = self._memo.get(k)
        if v is None:
            self._memo[k] = False  # guards against accidental cycles
            v = fn(s, t)
            self._memo[k] = v
        return v

    def gsq(self, s: Term, t: Term) -> bool:
        return self._cached("sq", s, t, self._gsq)

    def _gsq(self, s, t):
        if isinstance(s, Var):
            return False
        f = s.sym
        for i, a in enumerate(s.args, 1):
            if f.is_defined and self.sm.is_safe(f, i):
                continue
            if self.safe_equiv(a, t) or self.gsq(a, t):
                return True
        if f.is_defined and isinstance(t, App) and self.prec.gt(f, t.sym):
            return all(self.gsq(s, b) for b in t.args)
        return False

    def gpop(self, s: Term, t: Term) -> bool:
        return self._cached("pop", s, t, lambda a, b: self._gpop(a, b, False))

    def gpopps(self, s: Term, t: Term) -> bool:
        return self._cached("ps", s, t, lambda a, b: self._gpop(a, b, True))

    def _rec(self, ps: bool):
        return self.gpopps if ps else self.gpop

    def _gpop(self, s, t, ps):
        return self._pop_st(s, t, ps) or self._pop_ia(s, t, ps) or self._pop_ep(s, t, ps)

    def _pop_st(self, s, t, ps):
        if isinstance(s, Var):
            return False
        rec = self._rec(ps)
        return any(self.safe_equiv(a, t) or rec(a, t) for a in s.args)

    def _pop_ia(self, s, t, ps):
        if isinstance(s, Var) or isinstance(t, Var) or not s.sym.is_defined:
            return False
        if not self.prec.gt(s.sym, t.sym):
            return False
        rec = self._rec(ps)
        F = symbols(s)
        outside = 0
        for j, b in enumerate(t.args, 1):
            if self.sm.is_safe(t.sym, j):
                if not rec(s, b):
                    return False
                if not self.below(b, F):
                    outside += 1
            elif not self.gsq(s, b):
                return False
        return outside <= 1

    def _pop_ep(self, s, t, ps):
        if isinstance(s, Var) or isinstance(t, Var) or not s.sym.is_defined:
            return False
        if not self.prec.eq(s.sym, t.sym):
            return False
        rec = self._rec(ps)
        normal = multiset_compare(rec, self.safe_equiv, self.sm.normal_args(s), self.sm.normal_args(t))
        if normal is not MultisetResult.STRICT:
            return False
        if ps:
            F = symbols(s)
            return all(rec(s, b) and self.below(b, F) for b in self.sm.safe_args(t))
        return bool(multiset_compare(rec, self.safe_equiv, self.sm.safe_args(s), self.sm.safe_args(t)))

    def mpo(self, s: Term, t: Term) -> bool:
        return self._cached("mpo", s, t, self._mpo)

    def _mpo(self, s, t):
        if isinstance(s, Var):
            return False
        if any(self.term_equiv(a, t) or self.mpo(a, t) for a in s.args):
            return True
        if isinstance(t, Var):
            return False
        f, g = s.sym, t.sym
        if self.prec.gt(f, g):
            return all(self.mpo(s, b) for b in t.args)
        if self.prec.eq(f, g):
            return multiset_compare(self.mpo, self.term_equiv, s.args, t.args) is MultisetResult.STRICT
        return False

    def orients(self, s: Term, t: Term) -> bool:
        v = self.cert.variant
        if v is Variant.POPSTAR:
            return self.gpop(s, t)
        if v is Variant.POPSTAR_PS:
            return self.gpopps(s, t)
        return self.mpo(s, t)

    def explain(self, s: Term, t: Term) -> list[str]:
        """Clause-level diagnosis of a failed root comparison."""
        v = self.cert.variant
        out = []
        if isinstance(s, Var):
            return ["left side is a variable"]
        out.append("st: no argument of the left side dominates the right side")
        if isinstance(t, Var):
            return out
        f, g = s.sym, t.sym
        rel = ">" if self.prec.gt(f, g) else "~" if self.prec.eq(f, g) else "not >="
        if v is Variant.MPO:
            if rel == ">":
                bad = [str(b) for b in t.args if not self.mpo(s, b)]
                out.append(f"ia: {f} > {g} but arguments not dominated: {', '.join(bad)}")
            elif rel == "~":
                out.append(f"ep: {f} ~ {g} but arguments are not a strict multiset decrease")
            else:
                out.append(f"precedence: {f} {rel} {g}")
            return out
        ps = v is Variant.POPSTAR_PS
        if not f.is_defined:
            out.append(f"root {f} is a constructor")
            return out
        if rel == ">":
            reasons = []
            rec = self._rec(ps)
            F = symbols(s)
            outside = []
            for j, b in enumerate(t.args, 1):
                if self.sm.is_safe(g, j):
                    if not rec(s, b):
                        reasons.append(f"safe argument {j} ({b}) not dominated")
                    elif not self.below(b, F):
                        outside.append(j)
                elif not self.gsq(s, b):
                    reasons.append(f"normal argument {j} ({b}) not dominated by the auxiliary order")
            if len(outside) > 1:
                reasons.append(f"safe arguments {outside} all contain symbols not below the left side")
            out.append(f"ia: {f} > {g} but " + "; ".join(reasons))
        elif rel == "~":
            normal = multiset_compare(self._rec(ps), self.safe_equiv,
                                      self.sm.normal_args(s), self.sm.normal_args(t))
            if normal is not MultisetResult.STRICT:
                out.append("ep: normal arguments are not a strict multiset decrease")
            else:
                out.append("ep: safe arguments are not dominated")
        else:
            out.append(f"precedence: {f} {rel} {g}")
        return out


# -- module level conveniences ---------------------------------------------

def safe_equiv(s: Term, t: Term, cert: Certificate) -> bool:
    return OrderChecker(cert).safe_equiv(s, t)


def gsq(s: Term, t: Term, cert: Certificate) -> bool:
    return OrderChecker(cert).gsq(s, t)


def gpop(s: Term, t: Term, cert: Certificate) -> bool:
    return OrderChecker(cert).gpop(s, t)


def gpopps(s: Term, t: Term, cert: Certificate) -> bool:
    return OrderChecker(cert).gpopps(s, t)


def mpo(s: Term, t: Term, prec: Precedence) -> bool:
    return OrderChecker(Certificate(Variant.MPO, prec)).mpo(s, t)


def terms_below(t: Term, F, prec: Precedence) -> bool:
    return OrderChecker(Certificate(Variant.POPSTAR, prec)).below(t, F)


# -- compatibility ------------------------------------------------------------

@dataclass
class RuleResult:
    rule: object
    oriented: bool
    trace: list[str] = field(default_factory=list)


@dataclass
class CompatReport:
    results: list[RuleResult]

    @property
    def compatible(self) -> bool:
        return all(r.oriented for r in self.results)

    def failures(self) -> list[RuleResult]:
        return [r for r in self.results if not r.oriented]


def check_compat(trs: TRS, cert: Certificate, stop_early: bool = False) -> CompatReport:
    if cert.variant is not Variant.MPO and not trs.is_constructor_system:
        raise TermError("polynomial path orders require a constructor TRS")
    chk = OrderChecker(cert)
    results = []
    for r in trs.rules:
        ok = chk.orients(r.lhs, r.rhs)
        results.append(RuleResult(r, ok, [] if ok else chk.explain(r.lhs, r.rhs)))
        if stop_early and not ok:
            break
    return CompatReport(results)


# -- brute force oracle --------------------------------------------------------

class InstanceTooLarge(ValueError):
    pass


def ordered_partitions(names: list[str]):
    """All total preorders on names, as level maps onto 0..m-1."""
    n = len(names)
    for levels in itertools.product(range(n), repeat=n):
        used = set(levels)
        if used == set(range(len(used))):
            yield dict(zip(names, levels))


def safe_mappings(defined: list[FunctionSymbol]):
    choices = []
    for f in defined:
        pos = range(1, f.arity + 1)
        choices.append([frozenset(c) for k in range(f.arity + 1) for c in itertools.combinations(pos, k)])
    for combo in itertools.product(*choices):
        yield SafeMapping({f.name: s for f, s in zip(defined, combo)})


def brute_force_search(trs: TRS, variant: Variant, max_defined: int = 4, max_arity: int = 3) -> Certificate | None:
    defined = trs.defined
    if len(defined) > max_defined or any(f.arity > max_arity for f in defined):
        raise InstanceTooLarge(f"brute force limited to {max_defined} defined symbols of arity <= {max_arity}")
    if variant is not Variant.MPO and not trs.is_constructor_system:
        raise TermError("polynomial path orders require a constructor TRS")
    names = [f.name for f in defined]
    mappings = [SafeMapping()] if variant is Variant.MPO else list(safe_mappings(defined))
    for levels in ordered_partitions(names):
        prec = admissible_precedence(trs, levels)
        for sm in mappings:
            cert = Certificate(variant, prec, sm)
            chk = OrderChecker(cert)
            if all(chk.orients(r.lhs, r.rhs) for r in trs.rules):
                return cert
    return None


# -- certificate files ---------------------------------------------------------

class CertificateError(ValueError):
    pass


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_certificate(text: str, trs: TRS) -> Certificate:
    variant = None
    section = None
    gt_pairs: list[tuple[str, str]] = []
    eq_pairs: list[tuple[str, str]] = []
    safe: dict[str, frozenset] = {}
    sig = trs.signature

    def sym(name: str, lineno: int) -> FunctionSymbol:
        if name not in sig:
            raise CertificateError(f"line {lineno}: unknown symbol {name!r}")
        return sig[name]

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        m = re.fullmatch(r"(order|precedence|safe)\s*:\s*(.*)", line)
        if m and (m.group(1) != "safe" or section != "safe" or m.group(2) == ""):
            key, rest = m.groups()
            if key == "order":
                variant = Variant.parse(rest)
                section = None
            else:
                section = key
                if rest:
                    raise CertificateError(f"line {lineno}: unexpected text after {key}:")
            continue
        if section == "precedence":
            parts = re.split(r"\s*([>=])\s*", line)
            if len(parts) < 3 or len(parts) % 2 == 0:
                raise CertificateError(f"line {lineno}: expected 'f > g' or 'f = g'")
            for a, op, b in zip(parts[0::2], parts[1::2], parts[2::2]):
                fa, fb = sym(a, lineno), sym(b, lineno)
                if op == ">":
                    if not fa.is_defined:
                        raise CertificateError(f"line {lineno}: constructor {a} cannot be above another symbol")
                    if fb.is_defined:
                        gt_pairs.append((a, b))
                else:
                    if fa.is_defined != fb.is_defined:
                        raise CertificateError(f"line {lineno}: {a} = {b} equates a defined symbol with a constructor")
                    if fa.is_defined:
                        eq_pairs.append((a, b))
        elif section == "safe":
            m = re.fullmatch(r"(\S+)\s*:\s*(.*)", line)
            if not m:
                raise CertificateError(f"line {lineno}: expected 'f: i, j'")
            f = sym(m.group(1), lineno)
            pos = frozenset(int(x) for x in re.split(r"[,\s]+", m.group(2)) if x)
            if any(not 1 <= i <= f.arity for i in pos):
                raise CertificateError(f"line {lineno}: safe position out of range for {f.name}/{f.arity}")
            if f.is_defined:
                safe[f.name] = pos
        else:
            raise CertificateError(f"line {lineno}: text outside a section")
    if variant is None:
        raise CertificateError("missing 'order:' line")
    return Certificate(variant, _layered(trs, gt_pairs, eq_pairs), SafeMapping(safe))


def _layered(trs: TRS, gt_pairs, eq_pairs) -> Precedence:
    """Rank = length of the longest strict descent, constructors at 0."""
    parent = {f.name: f.name for f in trs.defined}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in eq_pairs:
        parent[find(a)] = find(b)
    below: dict[str, set[str]] = {find(f.name): set() for f in trs.defined}
    for a, b in gt_pairs:
        ca, cb = find(a), find(b)
        if ca == cb:
            raise CertificateError(f"precedence cycle through {a} and {b}")
        below[ca].add(cb)

    level: dict[str, int] = {}
    state: dict[str, int] = {}

    def visit(c):
        if state.get(c) == 2:
            return level[c]
        if state.get(c) == 1:
            raise CertificateError(f"precedence cycle through {c}")
        state[c] = 1
        level[c] = 1 + max((visit(d) for d in below[c]), default=0)
        state[c] = 2
        return level[c]

    for c in below:
        visit(c)
    rank = {c.name: 0 for c in trs.constructors}
    rank.update({f.name: level[find(f.name)] for f in trs.defined})
    return Precedence(rank)


def format_certificate(cert: Certificate, trs: TRS) -> str:
    lines = [f"order: {cert.variant.value}", "precedence:"]
    prec = cert.precedence
    names = sorted((f.name for f in trs.defined), key=lambda n: (-prec.of(n), n))
    levels = sorted({prec.of(n) for n in names}, reverse=True)
    groups = [[n for n in names if prec.of(n) == lv] for lv in levels]
    for g in groups:
        for a, b in zip(g, g[1:]):
            lines.append(f"  {a} = {b}")
    for hi, lo in zip(groups, groups[1:]):
        for a in hi:
            for b in lo:
                lines.append(f"  {a} > {b}")
    if cert.variant is not Variant.MPO:
        lines.append("safe:")
        for f in sorted(trs.defined, key=lambda f: f.name):
            pos = ", ".join(str(i) for i in sorted(cert.safe.positions(f)))
            lines.append(f"  {f.name}: {pos}".rstrip())
    return "\n".join(lines) + "\n"

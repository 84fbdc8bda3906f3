"""Predicative interpretations into sequence terms and the sequence orders on them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from .multiset import MultisetResult, multiset_compare
from .rewrite import Rewriter, Strategy
from .terms import (CONSTRUCTOR, App, FunctionSymbol, Precedence, SafeMapping, Term, TRS, Var,
                    is_value, match, replace_at, size, substitute)

BULLET_NAME = "•"


# -- sequence terms -----------------------------------------------------------

class SeqTerm:
    __slots__ = ()


class SVar(SeqTerm):
    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("sv", name))

    def __eq__(self, other):
        return isinstance(other, SVar) and other.name == self.name

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return self.name


class SFun(SeqTerm):
    """A normalised symbol applied to sequence arguments."""

    __slots__ = ("sym", "args", "_hash", "_width", "_ground")

    def __init__(self, sym: str, args: Iterable[SeqTerm] = ()):
        self.sym = sym
        self.args = tuple(args)
        self._hash = hash(("sf", sym, self.args))
        self._width = max([1] + [width(a) for a in self.args])
        self._ground = all(is_ground(a) for a in self.args)

    def __eq__(self, other):
        return self is other or (isinstance(other, SFun) and other._hash == self._hash
                                 and other.sym == self.sym and other.args == self.args)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return render(self)


class Seq(SeqTerm):
    """A sequence with zero or at least two elements; a singleton is its element."""

    __slots__ = ("items", "_hash", "_width", "_ground")

    def __init__(self, items: tuple):
        self.items = items
        self._hash = hash(("sq", items))
        self._width = sum(width(a) for a in items)
        self._ground = all(is_ground(a) for a in items)

    def __eq__(self, other):
        return self is other or (isinstance(other, Seq) and other._hash == self._hash and other.items == self.items)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return render(self)


NIL = Seq(())
BULLET = SFun(BULLET_NAME)


def seq(*parts: SeqTerm) -> SeqTerm:
    """Concatenate, flattening nested sequences; a singleton is its element."""
    items: list = []
    for p in parts:
        if isinstance(p, Seq):
            items.extend(p.items)
        else:
            items.append(p)
    if len(items) == 1:
        return items[0]
    return Seq(tuple(items))


def tolst(a: SeqTerm) -> tuple:
    return a.items if isinstance(a, Seq) else (a,)


def tally(n: int) -> SeqTerm:
    return seq(*[BULLET] * n)


def width(a: SeqTerm) -> int:
    if isinstance(a, SVar):
        return 1
    return a._width


def length(a: SeqTerm) -> int:
    return len(a.items) if isinstance(a, Seq) else 1


def is_ground(a: SeqTerm) -> bool:
    return not isinstance(a, SVar) and a._ground


def render(a: SeqTerm) -> str:
    if isinstance(a, SVar):
        return a.name
    if isinstance(a, Seq):
        return "[" + " ".join(render(x) for x in a.items) + "]"
    if a.sym == BULLET_NAME:
        return "#"
    return f"{a.sym}_n(" + ", ".join(render(x) for x in a.args) + ")"


# -- interpretations -----------------------------------------------------------

def norm(t: Term, sm: SafeMapping) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + max((norm(a, sm) for a in sm.safe_args(t)), default=0)


def interp_S(t: Term, sm: SafeMapping) -> SeqTerm:
    if is_value(t):
        return NIL
    head = SFun(t.sym.name, [interp_N(a, sm) for a in sm.normal_args(t)])
    return seq(head, *[interp_S(a, sm) for a in sm.safe_args(t)])


def interp_N(t: Term, sm: SafeMapping) -> SeqTerm:
    return seq(interp_S(t, sm), tally(norm(t, sm)))


# -- precedence on normalised symbols ------------------------------------------

class SeqPrecedence:
    """Image of a source precedence on normalised symbols, with the bullet at the bottom."""

    def __init__(self, base: Precedence):
        self.base = base

    def of(self, name: str) -> int:
        return -1 if name == BULLET_NAME else self.base.of(name)

    def gt(self, f: str, g: str) -> bool:
        return self.of(f) > self.of(g)

    def eq(self, f: str, g: str) -> bool:
        return self.of(f) == self.of(g)


def seq_key(a: SeqTerm, prec: SeqPrecedence):
    """Canonical form modulo sequence equivalence."""
    if isinstance(a, SVar):
        return ("v", a.name)
    if isinstance(a, Seq):
        return ("s", tuple(sorted(seq_key(x, prec) for x in a.items)))
    return ("f", prec.of(a.sym), tuple(sorted(seq_key(x, prec) for x in a.args)))


# -- the sequence orders -------------------------------------------------------

class SequenceOrder:
    """Decides the approximations a >>^k_l b (`pp`) and a >^k_l b (`pv`)."""

    def __init__(self, prec, k: int):
        self.prec = prec if isinstance(prec, SeqPrecedence) else SeqPrecedence(prec)
        self.k = k
        self._memo: dict = {}
        self._keys: dict = {}

    def key(self, a: SeqTerm):
        out = self._keys.get(a)
        if out is None:
            out = seq_key(a, self.prec)
            self._keys[a] = out
        return out

    def eqv(self, a: SeqTerm, b: SeqTerm) -> bool:
        return a == b or self.key(a) == self.key(b)

    def pp(self, a: SeqTerm, b: SeqTerm, l: int) -> bool:
        if l < 1:
            return False
        k = ("pp", a, b, l)
        v = self._memo.get(k)
        if v is None:
            v = self._pp(a, b, l)
            self._memo[k] = v
        return v

    def pv(self, a: SeqTerm, b: SeqTerm, l: int) -> bool:
        if l < 1:
            return False
        k = ("pv", a, b, l)
        v = self._memo.get(k)
        if v is None:
            v = self.pp(a, b, l) or self._pv(a, b, l)
            self._memo[k] = v
        return v

    def _pp(self, a, b, l):
        if isinstance(a, SVar):
            return False
        if isinstance(a, Seq):
            return self._ms(a, b, l, self.pp)
        # st
        if any(self.eqv(x, b) or self.pp(x, b, l) for x in a.args):
            return True
        # ia
        if isinstance(b, SFun) and self.prec.gt(a.sym, b.sym) and len(b.args) <= self.k:
            if all(self.pp(a, y, l - 1) for y in b.args):
                return True
        # ialst
        items = tolst(b)
        if len(items) <= width(a) + self.k and all(self.pp(a, y, l - 1) for y in items):
            return True
        return False

    def _pv(self, a, b, l):
        if isinstance(a, SVar):
            return False
        if isinstance(a, Seq):
            return self._ms(a, b, l, self.pv)
        if any(self.eqv(x, b) or self.pv(x, b, l) for x in a.args):
            return True
        # ep
        if isinstance(b, SFun) and self.prec.eq(a.sym, b.sym) and len(b.args) <= self.k:
            rel = lambda x, y: self.pv(x, y, l)
            if multiset_compare(rel, self.eqv, a.args, b.args) is MultisetResult.STRICT:
                return True
        # ialst with at most one element under the full order
        items = tolst(b)
        if len(items) <= width(a) + self.k:
            loose = [y for y in items if not self.pp(a, y, l - 1)]
            if len(loose) <= 1 and all(self.pv(a, y, l - 1) for y in loose):
                return True
        return False

    def _ms(self, a: Seq, b: SeqTerm, l: int, rel) -> bool:
        """Split b into one group per element of a, each dominated, one strictly."""
        left = a.items
        right = sorted(tolst(b), key=self.key)
        n, m = len(left), len(right)
        if n == 0 or m > width(a) + self.k:
            return False
        ground = [is_ground(x) for x in left]
        # a group is only feasible if each of its members is feasible alone
        cap = [[not ground[i] or self.eqv(left[i], y) or rel(left[i], y, l) for y in right] for i in range(n)]
        if any(not any(cap[i][j] for i in range(n)) for j in range(m)):
            return False
        groups: list[list] = [[] for _ in range(n)]
        gkeys: list[list] = [[] for _ in range(n)]
        left_keys = [self.key(x) for x in left]
        failed: set = set()

        def strict(i) -> bool:
            return rel(left[i], seq(*groups[i]), l)

        def weak(i) -> bool:
            return len(groups[i]) == 1 and self.eqv(left[i], groups[i][0])

        def go(j: int) -> bool:
            if j == m:
                flags = []
                for i in range(n):
                    s = strict(i)
                    if not s and not weak(i):
                        return False
                    flags.append(s)
                return any(flags)
            state = (j, tuple(sorted((left_keys[i], tuple(gkeys[i])) for i in range(n))))
            if state in failed:
                return False
            y, ky = right[j], self.key(right[j])
            seen = set()
            for i in range(n):
                if not cap[i][j]:
                    continue
                local = (left_keys[i], tuple(gkeys[i]))
                if local in seen:
                    continue
                seen.add(local)
                groups[i].append(y)
                gkeys[i].append(ky)
                if not ground[i] or weak(i) or strict(i):
                    if go(j + 1):
                        groups[i].pop()
                        gkeys[i].pop()
                        return True
                groups[i].pop()
                gkeys[i].pop()
            failed.add(state)
            return False

        return go(0)


def gppv(a: SeqTerm, b: SeqTerm, k: int, l: int, prec) -> bool:
    return SequenceOrder(prec, k).pp(a, b, l)


def gpopv(a: SeqTerm, b: SeqTerm, k: int, l: int, prec) -> bool:
    return SequenceOrder(prec, k).pv(a, b, l)


# -- embedding -------------------------------------------------------------------

BOT = FunctionSymbol("⊥", 0, CONSTRUCTOR)


def ell_for(trs: TRS, sm: SafeMapping | None = None) -> int:
    arities = [f.arity - len(sm.positions(f)) if sm is not None else f.arity for f in trs.signature.values()]
    rhs = [2 * size(r.rhs) for r in trs.rules]
    return max(arities + rhs + [2])


def normalise_bot(t: Term, trs: TRS, rewriter: Rewriter | None = None) -> Term:
    rw = rewriter or Rewriter(trs)

    def go(u: Term) -> Term:
        if isinstance(u, Var):
            return u
        v = App(u.sym, [go(a) for a in u.args])
        if v.sym.is_defined and rw.is_normal(v):
            return App(BOT, ())
        return v

    return go(t)


def _collapse_steps(u: Term, rw: Rewriter) -> list[Term]:
    """Innermost one-at-a-time collapses of garbage subterms to the bottom constant."""
    chain = []

    def find(t: Term, pos: tuple):
        if isinstance(t, Var):
            return None
        for i, a in enumerate(t.args):
            p = find(a, pos + (i,))
            if p is not None:
                return p
        if t.sym.is_defined and all(is_value(a) for a in t.args) and rw.is_normal(t):
            return pos
        return None

    while True:
        p = find(u, ())
        if p is None:
            return chain
        u = replace_at(u, p, App(BOT, ()))
        chain.append(u)


@dataclass
class Link:
    interp: str
    left: SeqTerm
    right: SeqTerm
    ok: bool


@dataclass
class StepCheck:
    source: Term
    target: Term
    links: list[Link]

    @property
    def ok(self) -> bool:
        return all(x.ok for x in self.links)


@dataclass
class EmbeddingReport:
    ell: int
    steps: list[StepCheck] = field(default_factory=list)

    @property
    def violations(self) -> list[StepCheck]:
        return [s for s in self.steps if not s.ok]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_text(self) -> str:
        lines = [f"# embedding checks at level {self.ell}: {len(self.steps)} steps, "
                 f"{len(self.violations)} violations"]
        for st in self.steps:
            lines.append(f"{st.source} -> {st.target}")
            for x in st.links:
                mark = "ok" if x.ok else "VIOLATION"
                lines.append(f"  {x.interp}: {render(x.left)}  >  {render(x.right)}  [{mark}]")
        return "\n".join(lines) + "\n"


def check_embedding(trs: TRS, cert, starts: Iterable[Term], sample_cap: int = 10_000,
                    ell: int | None = None) -> EmbeddingReport:
    """Check that each innermost step, after bottom-normalisation, descends in the sequence order."""
    sm = cert.safe
    ell = ell_for(trs, sm) if ell is None else ell
    order = SequenceOrder(cert.precedence, ell)
    rw = Rewriter(trs)
    report = EmbeddingReport(ell)
    seen: set = set()
    frontier = list(starts)
    count = 0
    while frontier and count < sample_cap:
        s = frontier.pop()
        if s in seen:
            continue
        seen.add(s)
        for pos, rule, t in rw.steps(s, Strategy.INNERMOST):
            if count >= sample_cap:
                break
            count += 1
            frontier.append(t)
            report.steps.append(_check_step(s, t, pos, rule, trs, rw, order, sm, ell))
    return report


def _check_step(s, t, pos, rule, trs, rw, order: SequenceOrder, sm, ell) -> StepCheck:
    down_s = normalise_bot(s, trs, rw)
    redex = down_s
    for i in pos:
        redex = redex.args[i]
    sigma = match(rule.lhs, redex)
    links: list[Link] = []
    if sigma is None:
        return StepCheck(s, t, [Link("match", interp_S(down_s, sm), NIL, False)])
    chain = [down_s, replace_at(down_s, pos, substitute(rule.rhs, sigma))]
    chain += _collapse_steps(chain[-1], rw)
    target_ok = chain[-1] == normalise_bot(t, trs, rw)
    for u, v in zip(chain, chain[1:]):
        for name, q in (("S", interp_S), ("N", interp_N)):
            a, b = q(u, sm), q(v, sm)
            links.append(Link(name, a, b, order.pv(a, b, ell)))
    if not target_ok:
        links.append(Link("simulation", interp_S(chain[-1], sm), interp_S(t, sm), False))
    return StepCheck(s, t, links)


# -- Slow on finite universes ----------------------------------------------------

def universe(symbols: dict[str, int], max_depth: int, max_width: int, prec) -> list[SeqTerm]:
    """All ground sequence terms up to equivalence within the depth and width caps.

    symbols maps normalised symbol names to arities; the bullet is always included.
    """
    sprec = prec if isinstance(prec, SeqPrecedence) else SeqPrecedence(prec)
    symbols = dict(symbols)
    symbols.setdefault(BULLET_NAME, 0)
    key = lambda a: seq_key(a, sprec)

    def sequences(terms: list[SeqTerm]) -> list[SeqTerm]:
        out = []
        terms = sorted(terms, key=key)

        def build(start: int, acc: list, w: int):
            out.append(seq(*acc))
            for i in range(start, len(terms)):
                tw = width(terms[i])
                if w + tw <= max_width:
                    acc.append(terms[i])
                    build(i, acc, w + tw)
                    acc.pop()

        build(0, [], 0)
        return out

    terms: dict = {}
    for f, ar in symbols.items():
        if ar == 0:
            t = SFun(f)
            terms[key(t)] = t
    for _ in range(max_depth - 1):
        args = sequences(list(terms.values()))
        new = dict(terms)
        for f, ar in symbols.items():
            if ar == 0:
                continue
            for combo in itertools.product(args, repeat=ar):
                t = SFun(f, sorted(combo, key=key))
                if width(t) <= max_width:
                    new.setdefault(key(t), t)
        terms = new
    result: dict = {}
    for a in sequences(list(terms.values())):
        result.setdefault(key(a), a)
    return list(result.values())


def slow_capped(a: SeqTerm, k: int, members: list[SeqTerm], prec, order: SequenceOrder | None = None) -> int:
    """Longest descending chain from a within the given finite universe."""
    order = order or SequenceOrder(prec, k)
    memo: dict = {}
    active: set = set()

    def go(x: SeqTerm) -> int:
        kx = order.key(x)
        if kx in memo:
            return memo[kx]
        if kx in active:
            raise RuntimeError(f"cycle in sequence order through {render(x)}")
        active.add(kx)
        best = 0
        for y in members:
            if order.pv(x, y, k):
                best = max(best, 1 + go(y))
        active.discard(kx)
        memo[kx] = best
        return best

    return go(a)


# -- arithmetic ------------------------------------------------------------------

def homo(digits: list[int], n: int, k: int, c: int) -> int:
    """Read the descending-sorted digits as a base-c numeral of k places."""
    if n != len(digits) or n > k:
        raise ValueError("homo needs n = len(digits) <= k")
    ds = sorted(digits, reverse=True)
    return sum(d * c ** (k - i) for i, d in enumerate(ds, 1))


@dataclass(frozen=True)
class DegreeBound:
    c: int
    d: int


def degree_d(k: int, p: int) -> int:
    if k < 1:
        raise ValueError("k must be at least 1")
    d = k + 1
    for _ in range(p):
        d = d ** k + 1
    return d


def degree_bound(k: int, p: int) -> DegreeBound:
    if k < 1:
        raise ValueError("k must be at least 1")
    d, c = k + 1, k ** k
    for _ in range(p):
        e = sum((k * d) ** i for i in range(k + 1))
        c = (c * k) ** e
        d = d ** k + 1
    return DegreeBound(c, d)

"""Propositional encoding of rule orientation and decoding of models into certificates."""

from __future__ import annotations

import itertools
import math

from ..orders import Certificate, Variant
from ..terms import App, FunctionSymbol, Precedence, SafeMapping, Term, TermError, TRS, Var, symbols
from .formula import (FALSE, TRUE, Atom, Formula, at_most_one, conj, conj_all, disj, disj_all,
                      exactly_one, iff, implies, neg)


class EncodingError(RuntimeError):
    """A model decoded into something the encoding should have ruled out."""


def rank_bits(trs: TRS) -> int:
    return max(1, math.ceil(math.log2(max(1, len(trs.defined)))))


def _bv_gt(xs: list[Formula], ys: list[Formula]) -> Formula:
    # most significant bit first
    if not xs:
        return FALSE
    x, y = xs[0], ys[0]
    return disj(conj(x, neg(y)), conj(iff(x, y), _bv_gt(xs[1:], ys[1:])))


def _bv_eq(xs, ys) -> Formula:
    return conj_all(iff(x, y) for x, y in zip(xs, ys))


class Encoder:
    """Builds the orientation formula for one TRS and variant.

    With share=True every comparison (kind, s, t) is named by a delta atom
    whose body is emitted once as `delta -> body`; otherwise bodies are
    inlined and every occurrence gets its own cover/permutation atoms.
    """

    def __init__(self, trs: TRS, variant: Variant, share: bool = True):
        if variant is not Variant.MPO and not trs.is_constructor_system:
            raise TermError("polynomial path orders require a constructor TRS")
        self.trs = trs
        self.variant = variant
        self.share = share
        self.bits = rank_bits(trs)
        self.definitions: list[Formula] = []
        self._named: dict = {}
        self._sites = itertools.count()
        self._below: dict = {}

    # -- atoms ------------------------------------------------------------
    def safe(self, f: FunctionSymbol, i: int) -> Formula:
        if not f.is_defined or self.variant is Variant.MPO:
            return TRUE
        return Atom(("safe", f.name, i))

    def prec_gt(self, f: FunctionSymbol, g: FunctionSymbol) -> Formula:
        if not f.is_defined:
            return FALSE
        if not g.is_defined:
            return TRUE
        if f.name == g.name:
            return FALSE
        return Atom(("gt", f.name, g.name))

    def prec_eq(self, f: FunctionSymbol, g: FunctionSymbol) -> Formula:
        if f.is_defined != g.is_defined:
            return FALSE
        if not f.is_defined or f.name == g.name:
            return TRUE
        return Atom(("eq",) + tuple(sorted((f.name, g.name))))

    def rank_vector(self, f: FunctionSymbol) -> list[Formula]:
        return [Atom(("rank_bit", f.name, b)) for b in reversed(range(self.bits))]

    def vprec(self) -> Formula:
        parts = []
        for f, g in itertools.permutations(self.trs.defined, 2):
            parts.append(implies(Atom(("gt", f.name, g.name)), _bv_gt(self.rank_vector(f), self.rank_vector(g))))
            if f.name < g.name:
                parts.append(implies(Atom(("eq", f.name, g.name)), _bv_eq(self.rank_vector(f), self.rank_vector(g))))
        return conj_all(parts)

    # -- comparison plumbing ------------------------------------------------
    def compare(self, kind: str, s: Term, t: Term) -> Formula:
        if not self.share:
            return self._body(kind, s, t, next(self._sites))
        key = (kind, s, t)
        atom = self._named.get(key)
        if atom is None:
            atom = self._named[key] = Atom(("delta", s, t, kind))
            body = self._body(kind, s, t, key)
            self.definitions.append(implies(atom, body))
        return atom

    def _body(self, kind: str, s: Term, t: Term, site) -> Formula:
        if kind in ("eqs", "eqt"):
            return self._equiv(kind, s, t, site)
        if kind == "sq":
            return self._gsq(s, t)
        if kind in ("pop", "ps"):
            return self._gpop(kind, s, t, site)
        if kind == "mpo":
            return self._mpo(s, t, site)
        raise ValueError(kind)

    def below(self, t: Term, F: frozenset) -> Formula:
        if isinstance(t, Var):
            return TRUE
        key = (t, F)
        out = self._below.get(key)
        if out is None:
            tops = sorted(F, key=lambda f: f.name)
            out = conj_all(disj_all(self.prec_gt(f, g) for f in tops)
                           for g in sorted(symbols(t), key=lambda g: g.name))
            self._below[key] = out
        return out

    # -- equivalence with argument permutation ------------------------------
    def _equiv(self, kind: str, s: Term, t: Term, site) -> Formula:
        if s == t:
            return TRUE
        if isinstance(s, Var) or isinstance(t, Var) or len(s.args) != len(t.args):
            return FALSE
        f, g = s.sym, t.sym
        head = self.prec_eq(f, g)
        n = len(s.args)
        if head is FALSE or n == 0:
            return head
        perm = [[Atom(("perm", site, i, j)) for j in range(n)] for i in range(n)]
        parts = [head]
        parts += [exactly_one(row) for row in perm]
        parts += [exactly_one([perm[i][j] for i in range(n)]) for j in range(n)]
        for i, j in itertools.product(range(n), repeat=2):
            link = self.compare(kind, s.args[i], t.args[j])
            if kind == "eqs":
                link = conj(link, iff(self.safe(f, i + 1), self.safe(g, j + 1)))
            parts.append(implies(perm[i][j], link))
        return conj_all(parts)

    # -- auxiliary order ------------------------------------------------------
    def _gsq(self, s: Term, t: Term) -> Formula:
        if isinstance(s, Var):
            return FALSE
        f = s.sym
        st = []
        for i, a in enumerate(s.args, 1):
            dom = disj(self.compare("eqs", a, t), self.compare("sq", a, t))
            st.append(conj(neg(self.safe(f, i)), dom) if f.is_defined else dom)
        ia = FALSE
        if f.is_defined and isinstance(t, App):
            ia = conj(self.prec_gt(f, t.sym), conj_all(self.compare("sq", s, b) for b in t.args))
        return disj(disj_all(st), ia)

    # -- polynomial path orders -------------------------------------------------
    def _gpop(self, kind: str, s: Term, t: Term, site) -> Formula:
        if isinstance(s, Var):
            return FALSE
        st = disj_all(disj(self.compare("eqs", a, t), self.compare(kind, a, t)) for a in s.args)
        if isinstance(t, Var) or not s.sym.is_defined:
            return st
        return disj(st, self._pop_ia(kind, s, t, site), self._pop_ep(kind, s, t, site))

    def _pop_ia(self, kind, s: App, t: App, site) -> Formula:
        f, g = s.sym, t.sym
        head = self.prec_gt(f, g)
        if head is FALSE:
            return FALSE
        F = frozenset(symbols(s))
        parts = [head]
        marks = []
        for j, b in enumerate(t.args, 1):
            safe_j = self.safe(g, j)
            parts.append(implies(safe_j, self.compare(kind, s, b)))
            parts.append(implies(neg(safe_j), self.compare("sq", s, b)))
            inside = self.below(b, F)
            if inside is not TRUE:
                alpha = Atom(("mark_alpha", site, j))
                marks.append(alpha)
                parts.append(implies(conj(safe_j, neg(alpha)), inside))
        parts.append(at_most_one(marks))
        return conj_all(parts)

    def _cover(self, kind, s: App, t: App, site, normal_only: bool = False) -> tuple[Formula, dict]:
        """Every argument of t is covered by one argument of s; returns the
        constraint and the eps atoms marking left arguments that cover by
        equivalence. With normal_only, only normal positions take part."""
        f, g = s.sym, t.sym
        I = range(1, len(s.args) + 1)
        J = range(1, len(t.args) + 1)
        gamma = {(i, j): Atom(("cover_gamma", site, i, j)) for i in I for j in J}
        eps = {i: Atom(("cover_eps", site, i)) for i in I}
        eqkind = "eqt" if kind == "mpo" else "eqs"
        parts = []
        for j in J:
            col = exactly_one([gamma[i, j] for i in I])
            parts.append(implies(neg(self.safe(g, j)), col) if normal_only else col)
        for i in I:
            parts.append(implies(eps[i], exactly_one([gamma[i, j] for j in J])))
            for j in J:
                a, b = s.args[i - 1], t.args[j - 1]
                link = conj(implies(eps[i], self.compare(eqkind, a, b)),
                            implies(neg(eps[i]), self.compare(kind, a, b)))
                if normal_only:
                    link = conj(link, neg(self.safe(f, i)), neg(self.safe(g, j)))
                elif kind != "mpo":
                    link = conj(link, iff(self.safe(f, i), self.safe(g, j)))
                parts.append(implies(gamma[i, j], link))
        return conj_all(parts), eps

    def _pop_ep(self, kind, s: App, t: App, site) -> Formula:
        f, g = s.sym, t.sym
        head = self.prec_eq(f, g)
        if head is FALSE:
            return FALSE
        cover, eps = self._cover(kind, s, t, site, normal_only=(kind == "ps"))
        strict = disj_all(conj(neg(self.safe(f, i)), neg(e)) for i, e in eps.items())
        parts = [head, cover, strict]
        if kind == "ps":
            F = frozenset(symbols(s))
            for j, b in enumerate(t.args, 1):
                parts.append(implies(self.safe(g, j), conj(self.compare(kind, s, b), self.below(b, F))))
        return conj_all(parts)

    # -- multiset path order ------------------------------------------------------
    def _mpo(self, s: Term, t: Term, site) -> Formula:
        if isinstance(s, Var):
            return FALSE
        st = disj_all(disj(self.compare("eqt", a, t), self.compare("mpo", a, t)) for a in s.args)
        if isinstance(t, Var):
            return st
        f, g = s.sym, t.sym
        ia = conj(self.prec_gt(f, g), conj_all(self.compare("mpo", s, b) for b in t.args))
        head = self.prec_eq(f, g)
        ep = FALSE
        if head is not FALSE:
            cover, eps = self._cover("mpo", s, t, site)
            ep = conj(head, cover, disj_all(neg(e) for e in eps.values()))
        return disj(st, ia, ep)

    # -- top level -----------------------------------------------------------------
    def root_kind(self) -> str:
        return {Variant.POPSTAR: "pop", Variant.POPSTAR_PS: "ps", Variant.MPO: "mpo"}[self.variant]

    def formula(self) -> Formula:
        kind = self.root_kind()
        rules = [self.compare(kind, r.lhs, r.rhs) for r in self.trs.rules]
        return conj(self.vprec(), conj_all(rules), conj_all(self.definitions))


def build_formula(trs: TRS, variant: Variant, share: bool = True) -> Formula:
    return Encoder(trs, variant, share).formula()


def decode(atoms: dict, trs: TRS, variant: Variant) -> Certificate:
    """Read a certificate off atom values (atom key -> bool)."""
    bits = rank_bits(trs)
    rank = {c.name: 0 for c in trs.constructors}
    for f in trs.defined:
        value = sum(1 << b for b in range(bits) if atoms.get(("rank_bit", f.name, b), False))
        rank[f.name] = value + 1
    prec = Precedence(rank)
    try:
        prec.check_admissible(trs.signature)
    except TermError as e:
        raise EncodingError(f"decoded precedence is not admissible: {e}") from None
    for key, val in atoms.items():
        if not val or not isinstance(key, tuple):
            continue
        if key[0] == "gt" and not prec.gt(key[1], key[2]):
            raise EncodingError(f"model sets {key[1]} > {key[2]} but ranks disagree")
        if key[0] == "eq" and not prec.eq(key[1], key[2]):
            raise EncodingError(f"model sets {key[1]} = {key[2]} but ranks disagree")
    safe = {}
    if variant is not Variant.MPO:
        for f in trs.defined:
            safe[f.name] = frozenset(i for i in range(1, f.arity + 1) if atoms.get(("safe", f.name, i), False))
    return Certificate(variant, prec, SafeMapping(safe))

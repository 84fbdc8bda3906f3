"""Propositional formulas with structural sharing, and a polarity-aware CNF transform."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Iterable


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return conj(self, other)

    def __or__(self, other):
        return disj(self, other)

    def __invert__(self):
        return neg(self)


class Const(Formula):
    __slots__ = ("value",)

    def __init__(self, value: bool):
        self.value = value

    def __repr__(self):
        return "T" if self.value else "F"


TRUE = Const(True)
FALSE = Const(False)


class Atom(Formula):
    __slots__ = ("key", "_hash")

    def __init__(self, key: Hashable):
        self.key = key
        self._hash = hash(("atom", key))

    def __eq__(self, other):
        return isinstance(other, Atom) and other.key == self.key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Atom({self.key!r})"


class Not(Formula):
    __slots__ = ("arg", "_hash")

    def __init__(self, arg: Formula):
        self.arg = arg
        self._hash = hash(("not", arg))

    def __eq__(self, other):
        return isinstance(other, Not) and other.arg == self.arg

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"~{self.arg!r}"


class _Nary(Formula):
    __slots__ = ("args", "_hash")
    tag = ""

    def __init__(self, args: tuple):
        self.args = args
        self._hash = hash((self.tag, args))

    def __eq__(self, other):
        return type(other) is type(self) and other._hash == self._hash and other.args == self.args

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"{self.tag}({', '.join(map(repr, self.args))})"


class And(_Nary):
    __slots__ = ()
    tag = "and"


class Or(_Nary):
    __slots__ = ()
    tag = "or"


def neg(f: Formula) -> Formula:
    if isinstance(f, Const):
        return FALSE if f.value else TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def _nary(cls, unit: Const, zero: Const, parts: Iterable[Formula]) -> Formula:
    out: list = []
    seen: set = set()
    for p in parts:
        if isinstance(p, Const):
            if p.value == zero.value:
                return zero
            continue
        for q in (p.args if isinstance(p, cls) else (p,)):
            if q not in seen:
                seen.add(q)
                out.append(q)
    if not out:
        return unit
    if len(out) == 1:
        return out[0]
    return cls(tuple(out))


def conj(*parts: Formula) -> Formula:
    return _nary(And, TRUE, FALSE, parts)


def disj(*parts: Formula) -> Formula:
    return _nary(Or, FALSE, TRUE, parts)


def conj_all(parts: Iterable[Formula]) -> Formula:
    return _nary(And, TRUE, FALSE, parts)


def disj_all(parts: Iterable[Formula]) -> Formula:
    return _nary(Or, FALSE, TRUE, parts)


def implies(a: Formula, b: Formula) -> Formula:
    return disj(neg(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    if a == b:
        return TRUE
    return conj(implies(a, b), implies(b, a))


def at_most_one(xs: list[Formula]) -> Formula:
    return conj_all(neg(conj(a, b)) for a, b in combinations(xs, 2))


def exactly_one(xs: list[Formula]) -> Formula:
    return conj(disj_all(xs), at_most_one(xs))


def evaluate(f: Formula, env: dict) -> bool:
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Atom):
        return bool(env.get(f.key, False))
    if isinstance(f, Not):
        return not evaluate(f.arg, env)
    if isinstance(f, And):
        return all(evaluate(a, env) for a in f.args)
    return any(evaluate(a, env) for a in f.args)


def atoms(f: Formula) -> set:
    out: set = set()
    stack = [f]
    seen: set = set()
    while stack:
        g = stack.pop()
        if isinstance(g, Const) or g in seen:
            continue
        seen.add(g)
        if isinstance(g, Atom):
            out.add(g.key)
        elif isinstance(g, Not):
            stack.append(g.arg)
        else:
            stack.extend(g.args)
    return out


@dataclass
class CNF:
    num_vars: int = 0
    clauses: list[list[int]] = field(default_factory=list)
    registry: dict = field(default_factory=dict)  # atom key -> variable

    def var(self, key: Hashable) -> int:
        v = self.registry.get(key)
        if v is None:
            self.num_vars += 1
            v = self.registry[key] = self.num_vars
        return v

    def fresh(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def atom_values(self, model: dict[int, bool]) -> dict:
        return {k: model.get(v, False) for k, v in self.registry.items()}


def to_cnf(phi: Formula, cnf: CNF | None = None) -> CNF:
    """Plaisted-Greenbaum transform: each shared subformula gets one variable,
    defined only in the directions its occurrences require."""
    cnf = cnf or CNF()
    names: dict[Formula, int] = {}
    done: dict[Formula, set] = {}

    def lit(f: Formula, pol: int) -> int:
        # pol: +1 positive occurrence, -1 negative
        if isinstance(f, Atom):
            return cnf.var(f.key)
        if isinstance(f, Not):
            return -lit(f.arg, -pol)
        v = names.get(f)
        if v is None:
            v = names[f] = cnf.fresh()
            done[f] = set()
        if pol in done[f]:
            return v
        done[f].add(pol)
        if isinstance(f, And):
            if pol > 0:
                for a in f.args:
                    cnf.clauses.append([-v, lit(a, 1)])
            else:
                cnf.clauses.append([v] + [-lit(a, -1) for a in f.args])
        else:
            if pol > 0:
                cnf.clauses.append([-v] + [lit(a, 1) for a in f.args])
            else:
                for a in f.args:
                    cnf.clauses.append([v, -lit(a, -1)])
        return v

    def assert_(f: Formula):
        if isinstance(f, Const):
            if not f.value:
                cnf.clauses.append([])
        elif isinstance(f, And):
            for a in f.args:
                assert_(a)
        elif isinstance(f, Or):
            cnf.clauses.append([lit(a, 1) for a in f.args])
        else:
            cnf.clauses.append([lit(f, 1)])

    assert_(phi)
    return cnf

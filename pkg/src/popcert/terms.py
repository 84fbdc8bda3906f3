"""Signatures, terms, rules, safe mappings and precedences."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

DEFINED = "defined"
CONSTRUCTOR = "constructor"


class TermError(ValueError):
    pass


@dataclass(frozen=True)
class FunctionSymbol:
    name: str
    arity: int
    kind: str = CONSTRUCTOR

    @property
    def is_defined(self) -> bool:
        return self.kind == DEFINED

    def __str__(self) -> str:
        return self.name


class Term:
    __slots__ = ()

    def is_var(self) -> bool:
        return isinstance(self, Var)


class Var(Term):
    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_hash", hash(("v", name)))

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        return self is other or (isinstance(other, Var) and other.name == self.name)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.name!r})"

    def __str__(self):
        return self.name


class App(Term):
    __slots__ = ("sym", "args", "_hash", "_size")

    def __init__(self, sym: FunctionSymbol, args: Iterable[Term] = ()):
        args = tuple(args)
        if len(args) != sym.arity:
            raise TermError(f"{sym.name} expects {sym.arity} arguments, got {len(args)}")
        object.__setattr__(self, "sym", sym)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "_hash", hash((sym.name, args)))
        object.__setattr__(self, "_size", 1 + sum(size(a) for a in args))

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, App) or other._hash != self._hash:
            return False
        return other.sym == self.sym and other.args == self.args

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({self.sym.name!r}, {list(self.args)!r})"

    def __str__(self):
        if not self.args:
            return self.sym.name
        return f"{self.sym.name}({', '.join(str(a) for a in self.args)})"


def size(t: Term) -> int:
    """Number of symbol and variable occurrences."""
    return 1 if isinstance(t, Var) else t._size


def depth(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + max((depth(a) for a in t.args), default=0)


def variables(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: set[str] = set()
    for a in t.args:
        out |= variables(a)
    return out


def symbols(t: Term) -> set[FunctionSymbol]:
    if isinstance(t, Var):
        return set()
    out = {t.sym}
    for a in t.args:
        out |= symbols(a)
    return out


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def is_value(t: Term) -> bool:
    if isinstance(t, Var):
        return True
    return not t.sym.is_defined and all(is_value(a) for a in t.args)


def is_basic(t: Term) -> bool:
    if isinstance(t, Var):
        return True
    return t.sym.is_defined and all(is_value(a) for a in t.args)


def substitute(t: Term, sigma: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    return App(t.sym, [substitute(a, sigma) for a in t.args])


def match(pattern: Term, t: Term, sigma: dict | None = None) -> dict | None:
    """Extend sigma so that pattern instantiates to t, or return None."""
    sigma = {} if sigma is None else sigma
    stack = [(pattern, t)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            bound = sigma.get(p.name)
            if bound is None:
                sigma[p.name] = s
            elif bound != s:
                return None
        elif isinstance(s, Var) or p.sym != s.sym:
            return None
        else:
            stack.extend(zip(p.args, s.args))
    return sigma


def replace_at(t: Term, pos: tuple[int, ...], new: Term) -> Term:
    if not pos:
        return new
    i = pos[0]
    args = list(t.args)
    args[i] = replace_at(args[i], pos[1:], new)
    return App(t.sym, args)


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if isinstance(self.lhs, Var):
            raise TermError(f"left-hand side of {self} is a variable")
        unbound = variables(self.rhs) - variables(self.lhs)
        if unbound:
            raise TermError(f"rhs variable {', '.join(sorted(unbound))} unbound in {self}")

    def __str__(self):
        return f"{self.lhs} -> {self.rhs}"


@dataclass(frozen=True)
class TRS:
    signature: Mapping[str, FunctionSymbol]
    rules: tuple[Rule, ...]

    @property
    def defined(self) -> list[FunctionSymbol]:
        return [f for f in self.signature.values() if f.is_defined]

    @property
    def constructors(self) -> list[FunctionSymbol]:
        return [f for f in self.signature.values() if not f.is_defined]

    @property
    def is_constructor_system(self) -> bool:
        return all(is_basic(r.lhs) for r in self.rules)

    def symbol(self, name: str) -> FunctionSymbol:
        try:
            return self.signature[name]
        except KeyError:
            raise TermError(f"unknown symbol {name!r}") from None

    def app(self, name: str, *args: Term) -> App:
        return App(self.symbol(name), args)

    def rules_for(self, name: str) -> list[Rule]:
        return [r for r in self.rules if r.lhs.sym.name == name]


def make_trs(rules: Iterable[Rule], extra_defined: Iterable[str] = ()) -> TRS:
    """Assemble a TRS, re-tagging symbol kinds from the rules."""
    rules = list(rules)
    arities: dict[str, int] = {}
    for r in rules:
        for side in (r.lhs, r.rhs):
            for s in symbols(side):
                if arities.setdefault(s.name, s.arity) != s.arity:
                    raise TermError(f"inconsistent arity for {s.name}")
    defined = {r.lhs.sym.name for r in rules} | set(extra_defined)
    sig = {n: FunctionSymbol(n, a, DEFINED if n in defined else CONSTRUCTOR) for n, a in arities.items()}

    def retag(t: Term) -> Term:
        if isinstance(t, Var):
            return t
        return App(sig[t.sym.name], [retag(a) for a in t.args])

    return TRS(sig, tuple(Rule(retag(r.lhs), retag(r.rhs)) for r in rules))


# -- safe mappings -------------------------------------------------------

@dataclass(frozen=True)
class SafeMapping:
    """Safe argument positions (1-based) per defined symbol; constructors are all-safe."""

    safe: Mapping[str, frozenset] = field(default_factory=dict)

    def positions(self, f: FunctionSymbol) -> frozenset:
        if not f.is_defined:
            return frozenset(range(1, f.arity + 1))
        return frozenset(self.safe.get(f.name, ()))

    def is_safe(self, f: FunctionSymbol, i: int) -> bool:
        """i is 1-based."""
        return not f.is_defined or i in self.safe.get(f.name, ())

    def normal_args(self, t: App) -> list[Term]:
        return [a for i, a in enumerate(t.args, 1) if not self.is_safe(t.sym, i)]

    def safe_args(self, t: App) -> list[Term]:
        return [a for i, a in enumerate(t.args, 1) if self.is_safe(t.sym, i)]

    def validate(self, signature: Mapping[str, FunctionSymbol]) -> None:
        for name, pos in self.safe.items():
            f = signature.get(name)
            if f is None:
                raise TermError(f"safe mapping mentions unknown symbol {name!r}")
            bad = [i for i in pos if not 1 <= i <= f.arity]
            if bad:
                raise TermError(f"safe positions {bad} out of range for {name}/{f.arity}")


def safe_mapping(**positions: Iterable[int]) -> SafeMapping:
    return SafeMapping({k: frozenset(v) for k, v in positions.items()})


# -- precedences ---------------------------------------------------------

@dataclass(frozen=True)
class Precedence:
    """Quasi-precedence given by ranks; unranked symbols sit in the bottom class 0."""

    rank: Mapping[str, int] = field(default_factory=dict)

    def of(self, f) -> int:
        return self.rank.get(f if isinstance(f, str) else f.name, 0)

    def gt(self, f, g) -> bool:
        return self.of(f) > self.of(g)

    def eq(self, f, g) -> bool:
        return self.of(f) == self.of(g)

    def check_admissible(self, signature: Mapping[str, FunctionSymbol]) -> None:
        classes: dict[int, set[str]] = {}
        for f in signature.values():
            classes.setdefault(self.of(f), set()).add(f.kind)
        for r, kinds in classes.items():
            if len(kinds) > 1:
                raise TermError(f"rank {r} equates defined symbols with constructors")

    def chains(self, names: Iterable[str]) -> list[tuple[str, str]]:
        """Covering pairs (f, g) with f directly above g, for display."""
        names = sorted(set(names), key=lambda n: (-self.of(n), n))
        levels = sorted({self.of(n) for n in names}, reverse=True)
        out = []
        for hi, lo in zip(levels, levels[1:]):
            for f in (n for n in names if self.of(n) == hi):
                for g in (n for n in names if self.of(n) == lo):
                    out.append((f, g))
        return out


def admissible_precedence(trs: TRS, levels: Mapping[str, int]) -> Precedence:
    """Defined symbols at level+1, constructors share the bottom class."""
    rank = {f.name: levels.get(f.name, 0) + 1 for f in trs.defined}
    rank.update({c.name: 0 for c in trs.constructors})
    return Precedence(rank)


def precedence_depth(prec: Precedence, names: Iterable[str]) -> int:
    """Longest strict descent length among the given symbols (rk of the top)."""
    ranks = sorted({prec.of(n) for n in names})
    return max(len(ranks) - 1, 0)


# -- predicative notation -----------------------------------------------

def format_predicative(t: Term, sm: SafeMapping, top: bool = True) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return f"{t.sym.name}()" if top else t.sym.name
    normal = [format_predicative(a, sm, False) for a in sm.normal_args(t)]
    safe = [format_predicative(a, sm, False) for a in sm.safe_args(t)]
    inner = ", ".join(normal) + ";"
    if safe:
        inner += " " + ", ".join(safe)
    return f"{t.sym.name}({inner})"

"""Rewriting under strategies, derivation heights and growth measurement."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .terms import App, Rule, Term, TRS, Var, match, size, substitute, variables


class Strategy(enum.Enum):
    INNERMOST = "innermost"
    OUTERMOST = "outermost"
    UNRESTRICTED = "any"


class CapExceeded(Exception):
    def __init__(self, which: str, limit: int):
        super().__init__(f"{which} cap {limit} exceeded")
        self.which, self.limit = which, limit


class NonTermination(CapExceeded):
    def __init__(self, term: Term):
        Exception.__init__(self, f"cycle through {term}")
        self.which, self.limit, self.term = "cycle", 0, term


class Rewriter:
    """Successor computation for one TRS with per-term caches."""

    def __init__(self, trs: TRS):
        self.trs = trs
        self.by_root: dict[str, list[Rule]] = {}
        for r in trs.rules:
            self.by_root.setdefault(r.lhs.sym.name, []).append(r)
        self._nf: dict[Term, bool] = {}

    def root_steps(self, t: Term) -> list[tuple[Rule, Term]]:
        if isinstance(t, Var):
            return []
        out = []
        for r in self.by_root.get(t.sym.name, ()):
            sigma = match(r.lhs, t)
            if sigma is not None:
                out.append((r, substitute(r.rhs, sigma)))
        return out

    def is_redex(self, t: Term) -> bool:
        if isinstance(t, Var):
            return False
        return any(match(r.lhs, t) is not None for r in self.by_root.get(t.sym.name, ()))

    def is_normal(self, t: Term) -> bool:
        if isinstance(t, Var):
            return True
        cached = self._nf.get(t)
        if cached is None:
            cached = not self.is_redex(t) and all(self.is_normal(a) for a in t.args)
            self._nf[t] = cached
        return cached

    def steps(self, t: Term, strat: Strategy) -> list[tuple[tuple[int, ...], Rule, Term]]:
        """All (position, rule, result) one-step reducts under strat."""
        out: list = []
        self._steps(t, strat, (), out)
        return out

    def _steps(self, t: Term, strat: Strategy, pos: tuple, out: list):
        if isinstance(t, Var):
            return
        root = self.root_steps(t)
        if strat is Strategy.OUTERMOST and root:
            out.extend((pos, r, u) for r, u in root)
            return
        if strat is Strategy.INNERMOST and not all(self.is_normal(a) for a in t.args):
            root = []
        for i, a in enumerate(t.args):
            sub: list = []
            self._steps(a, strat, (), sub)
            for p, r, u in sub:
                args = list(t.args)
                args[i] = u
                out.append((pos + (i,) + p, r, App(t.sym, args)))
        out.extend((pos, r, u) for r, u in root)

    def successors(self, t: Term, strat: Strategy) -> set[Term]:
        return {u for _, _, u in self.steps(t, strat)}

    def never_redex_root(self, t: Term) -> bool:
        return isinstance(t, App) and t.sym.name not in self.by_root

    def eager_rule(self, t: Term) -> Rule | None:
        """The sole rule of the root if it is left-linear over plain variables and non-erasing.

        For unrestricted rewriting, contracting such a root redex first is
        never shorter than reducing inside its arguments first, because every
        argument is copied at least once.
        """
        if isinstance(t, Var):
            return None
        rules = self.by_root.get(t.sym.name, ())
        if len(rules) != 1:
            return None
        r = rules[0]
        args = r.lhs.args
        if not all(isinstance(a, Var) for a in args) or len({a.name for a in args}) != len(args):
            return None
        if variables(r.rhs) != {a.name for a in args}:
            return None
        return r


def successors(t: Term, trs: TRS, strat: Strategy = Strategy.INNERMOST) -> set[Term]:
    return Rewriter(trs).successors(t, strat)


DEFAULT_STEP_CAP = 10**6
DEFAULT_STATE_CAP = 10**5


def dheight(t: Term, trs: TRS, strat: Strategy = Strategy.INNERMOST,
            step_cap: int = DEFAULT_STEP_CAP, state_cap: int = DEFAULT_STATE_CAP,
            memo: bool = True, shortcuts: bool = True, rewriter: Rewriter | None = None) -> int:
    """Exact maximal derivation length from t under strat.

    With shortcuts, terms whose root can never be contracted are split into
    their arguments (heights add up), and unrestricted derivations contract
    eager rules (see Rewriter.eager_rule) immediately.
    """
    rw = rewriter or Rewriter(trs)
    if not memo:
        return _dheight_plain(t, rw, strat, step_cap, state_cap, shortcuts)

    table: dict[Term, int] = {}
    on_stack: set[Term] = set()

    def children(u: Term) -> tuple[str, list[Term]]:
        if shortcuts and rw.never_redex_root(u):
            return "sum", list(u.args)
        if shortcuts and strat is Strategy.UNRESTRICTED:
            r = rw.eager_rule(u)
            if r is not None:
                return "max1", [substitute(r.rhs, match(r.lhs, u))]
        return "max1", list(rw.successors(u, strat))

    stack: list = [(t, None)]
    while stack:
        u, info = stack[-1]
        if u in table:
            stack.pop()
            continue
        if info is None:
            if u in on_stack:
                raise NonTermination(u)
            mode, kids = children(u)
            stack[-1] = (u, (mode, kids))
            on_stack.add(u)
            for k in kids:
                if k not in table:
                    if k in on_stack:
                        raise NonTermination(k)
                    stack.append((k, None))
            continue
        mode, kids = info
        pending = [k for k in kids if k not in table]
        if pending:
            # a child was visited through another path but not finished yet
            for k in pending:
                if k in on_stack:
                    raise NonTermination(k)
                stack.append((k, None))
            continue
        stack.pop()
        on_stack.discard(u)
        if mode == "sum":
            h = sum(table[k] for k in kids)
        else:
            h = 1 + max(table[k] for k in kids) if kids else 0
        if h > step_cap:
            raise CapExceeded("step", step_cap)
        table[u] = h
        if len(table) > state_cap:
            raise CapExceeded("state", state_cap)
    return table[t]


def _dheight_plain(t, rw: Rewriter, strat, step_cap, state_cap, shortcuts) -> int:
    visited = [0]

    def go(u: Term, depth: int) -> int:
        visited[0] += 1
        if visited[0] > state_cap:
            raise CapExceeded("state", state_cap)
        if depth > step_cap:
            raise CapExceeded("step", step_cap)
        if shortcuts and rw.never_redex_root(u):
            return sum(go(a, depth) for a in u.args)
        best = 0
        for v in rw.successors(u, strat):
            best = max(best, 1 + go(v, depth + 1))
        return best

    return go(t, 0)


# -- reports --------------------------------------------------------------

@dataclass
class Row:
    n: int
    size: int
    height: int | None
    capped: bool = False


@dataclass
class DerivationReport:
    label: str
    strategy: Strategy
    rows: list[Row] = field(default_factory=list)

    def to_text(self) -> str:
        head = ("n", "size", "height", "capped")
        body = [(str(r.n), str(r.size), "-" if r.height is None else str(r.height), "yes" if r.capped else "no")
                for r in self.rows]
        widths = [max(len(x) for x in col) for col in zip(head, *body)]
        fmt = "  ".join("{:>%d}" % w for w in widths)
        lines = [f"# {self.label} ({self.strategy.value})", fmt.format(*head)]
        lines.extend(fmt.format(*b) for b in body)
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        lines = ["n,size,height,capped"]
        for r in self.rows:
            lines.append(f"{r.n},{r.size},{'' if r.height is None else r.height},{str(r.capped).lower()}")
        return "\n".join(lines) + "\n"


def rc_table(trs: TRS, family, ns: Iterable[int], strat: Strategy = Strategy.INNERMOST,
             step_cap: int = DEFAULT_STEP_CAP, state_cap: int = DEFAULT_STATE_CAP) -> DerivationReport:
    """Derivation heights for family(n) over ns; family is a callable n -> Term."""
    rw = Rewriter(trs)
    report = DerivationReport(getattr(family, "label", "family"), strat)
    for n in ns:
        t = family(n)
        try:
            h = dheight(t, trs, strat, step_cap, state_cap, rewriter=rw)
            report.rows.append(Row(n, size(t), h))
        except CapExceeded:
            report.rows.append(Row(n, size(t), None, True))
    return report


# -- growth classification ------------------------------------------------

@dataclass(frozen=True)
class PolynomialDegreeEstimate:
    degree: float

    def __str__(self):
        return f"polynomial, degree ~ {self.degree:.2f}"


@dataclass(frozen=True)
class ExponentialSuspect:
    ratio: float

    def __str__(self):
        return f"exponential suspect (ratio >= {self.ratio:.2f})"


@dataclass(frozen=True)
class Inconclusive:
    reason: str

    def __str__(self):
        return f"inconclusive: {self.reason}"


RESIDUAL_THRESHOLD = 0.05
RATIO_THRESHOLD = 1.2


def _fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares slope and RMS residual."""
    if len(x) < 2 or np.ptp(x) == 0:
        return 0.0, math.inf
    slope, icept = np.polyfit(x, y, 1)
    resid = y - (slope * x + icept)
    return float(slope), float(np.sqrt(np.mean(resid ** 2)))


def growth_classify(report: DerivationReport):
    rows = [r for r in report.rows if not r.capped and r.height is not None]
    if len(rows) < 4:
        return Inconclusive("fewer than 4 uncapped rows")
    tail = [r for r in rows[len(rows) // 2:] if r.n >= 1 and r.height >= 1]
    if len(tail) < 2:
        tail = [r for r in rows if r.n >= 1 and r.height >= 1][-2:]
    n = np.array([r.n for r in tail], dtype=float)
    h = np.array([r.height for r in tail], dtype=float)
    degree, loglog_res = _fit(np.log(n), np.log(h))
    _, semilog_res = _fit(n, np.log(h))

    last = rows[-4:]
    ratios = [b.height / a.height for a, b in zip(last, last[1:]) if a.height > 0]
    exp_like = len(ratios) == 3 and min(ratios) > RATIO_THRESHOLD

    if exp_like and semilog_res <= loglog_res:
        return ExponentialSuspect(min(ratios))
    if loglog_res < RESIDUAL_THRESHOLD:
        return PolynomialDegreeEstimate(degree)
    if exp_like:
        return ExponentialSuspect(min(ratios))
    return Inconclusive(f"log-log residual {loglog_res:.3f}")

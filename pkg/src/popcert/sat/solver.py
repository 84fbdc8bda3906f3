"""A small conflict-driven clause-learning SAT solver.

Two watched literals per clause, first-UIP learning, and a fixed branching
order (lowest unassigned variable, negative phase first) so that runs are
reproducible.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field


@dataclass
class SolveResult:
    status: str  # "SAT", "UNSAT" or "UNKNOWN"
    model: dict[int, bool] = field(default_factory=dict)
    conflicts: int = 0

    @property
    def sat(self) -> bool:
        return self.status == "SAT"


class SolverError(RuntimeError):
    pass


def _idx(lit: int) -> int:
    return (lit << 1) if lit > 0 else ((-lit) << 1) | 1


class Solver:
    def __init__(self, num_vars: int, clauses):
        self.n = num_vars
        self.original = [list(c) for c in clauses]
        self.value = [0] * (num_vars + 1)  # 1 true, -1 false, 0 unassigned
        self.level = [0] * (num_vars + 1)
        self.reason: list = [None] * (num_vars + 1)
        self.trail: list[int] = []
        self.limits: list[int] = []
        self.qhead = 0
        self.watches: list[list] = [[] for _ in range(2 * num_vars + 2)]
        self.seen = [False] * (num_vars + 1)
        self.unsat = False
        for c in self.original:
            self._add_input(c)

    def lit_value(self, lit: int) -> int:
        v = self.value[abs(lit)]
        return v if lit > 0 else -v

    def _add_input(self, clause):
        lits: list[int] = []
        for l in clause:
            if l == 0 or abs(l) > self.n:
                raise SolverError(f"literal {l} out of range")
            if -l in lits:
                return
            if l not in lits:
                lits.append(l)
        if not lits:
            self.unsat = True
        elif len(lits) == 1:
            val = self.lit_value(lits[0])
            if val == -1:
                self.unsat = True
            elif val == 0:
                self._enqueue(lits[0], None)
        else:
            self._watch(lits)

    def _watch(self, c: list[int]):
        self.watches[_idx(c[0])].append(c)
        self.watches[_idx(c[1])].append(c)

    def _enqueue(self, lit: int, reason):
        v = abs(lit)
        self.value[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.limits)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self):
        value = self.value
        while self.qhead < len(self.trail):
            false_lit = -self.trail[self.qhead]
            self.qhead += 1
            ws = self.watches[_idx(false_lit)]
            keep: list = []
            i = 0
            while i < len(ws):
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                fv = value[abs(first)] if first > 0 else -value[abs(first)]
                if fv == 1:
                    keep.append(c)
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    kv = value[abs(lk)] if lk > 0 else -value[abs(lk)]
                    if kv != -1:
                        c[1], c[k] = lk, c[1]
                        self.watches[_idx(lk)].append(c)
                        break
                else:
                    keep.append(c)
                    if fv == -1:
                        keep.extend(ws[i:])
                        self.watches[_idx(false_lit)] = keep
                        return c
                    self._enqueue(first, c)
            self.watches[_idx(false_lit)] = keep
        return None

    def _analyze(self, confl: list[int]) -> tuple[list[int], int]:
        seen, level = self.seen, self.level
        current = len(self.limits)
        learnt: list[int] = [0]
        pending = 0
        p = None
        pos = len(self.trail) - 1
        c = confl
        while True:
            for q in (c if p is None else c[1:]):
                v = abs(q)
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    if level[v] >= current:
                        pending += 1
                    else:
                        learnt.append(q)
            while not seen[abs(self.trail[pos])]:
                pos -= 1
            p = self.trail[pos]
            pos -= 1
            seen[abs(p)] = False
            pending -= 1
            if pending == 0:
                break
            c = self.reason[abs(p)]
        learnt[0] = -p
        for q in learnt[1:]:
            seen[abs(q)] = False
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda j: level[abs(learnt[j])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[abs(learnt[1])]

    def _backtrack(self, lvl: int):
        if len(self.limits) <= lvl:
            return
        cut = self.limits[lvl]
        for lit in self.trail[cut:]:
            v = abs(lit)
            self.value[v] = 0
            self.reason[v] = None
        del self.trail[cut:]
        del self.limits[lvl:]
        self.qhead = cut

    def solve(self, max_conflicts: int | None = None, time_limit: float | None = None) -> SolveResult:
        if self.unsat:
            return SolveResult("UNSAT")
        deadline = None if time_limit is None else time.monotonic() + time_limit
        conflicts = 0
        next_var = 1
        while True:
            confl = self._propagate()
            if confl is not None:
                conflicts += 1
                if not self.limits:
                    return SolveResult("UNSAT", conflicts=conflicts)
                learnt, bt = self._analyze(confl)
                self._backtrack(bt)
                next_var = 1
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self._watch(learnt)
                    self._enqueue(learnt[0], learnt)
                if max_conflicts is not None and conflicts >= max_conflicts:
                    return SolveResult("UNKNOWN", conflicts=conflicts)
                if deadline is not None and conflicts % 64 == 0 and time.monotonic() > deadline:
                    return SolveResult("UNKNOWN", conflicts=conflicts)
                continue
            while next_var <= self.n and self.value[next_var] != 0:
                next_var += 1
            if next_var > self.n:
                model = {v: self.value[v] == 1 for v in range(1, self.n + 1)}
                self._self_check(model)
                return SolveResult("SAT", model, conflicts)
            self.limits.append(len(self.trail))
            self._enqueue(-next_var, None)

    def _self_check(self, model: dict[int, bool]):
        for c in self.original:
            if not any(model[abs(l)] == (l > 0) for l in c):
                raise SolverError(f"model violates clause {c}")


def solve(cnf, max_conflicts: int | None = 200_000, time_limit: float | None = None) -> SolveResult:
    """Solve a CNF (anything with num_vars and clauses)."""
    return Solver(cnf.num_vars, cnf.clauses).solve(max_conflicts, time_limit)

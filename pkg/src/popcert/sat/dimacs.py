"""DIMACS CNF output, model input, and an external solver bridge."""

from __future__ import annotations

import shlex
import subprocess
import tempfile
from typing import TextIO

from .formula import CNF
from .solver import SolveResult


class DimacsError(ValueError):
    pass


def export_dimacs(cnf: CNF, sink: TextIO | None = None) -> str:
    lines = [f"p cnf {cnf.num_vars} {len(cnf.clauses)}"]
    lines.extend(" ".join(map(str, c)) + (" 0" if c else "0") for c in cnf.clauses)
    text = "\n".join(lines) + "\n"
    if sink is not None:
        sink.write(text)
    return text


def parse_dimacs(text: str) -> CNF:
    cnf = CNF()
    declared = None
    current: list[int] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line[0] in "c%":
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: bad header {line!r}")
            cnf.num_vars, declared = int(parts[2]), int(parts[3])
            continue
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                cnf.clauses.append(current)
                current = []
            else:
                current.append(lit)
    if current:
        cnf.clauses.append(current)
    if declared is not None and declared != len(cnf.clauses):
        raise DimacsError(f"header declares {declared} clauses, found {len(cnf.clauses)}")
    return cnf


def import_model(text: str) -> dict[int, bool]:
    """Read an assignment from `v` lines, or from a bare list of literals."""
    lines = [l.strip() for l in text.splitlines()]
    vlines = [l[1:] for l in lines if l.startswith("v")]
    if not vlines:
        vlines = [l for l in lines if l and l[0] not in "cs"]
    model: dict[int, bool] = {}
    for l in vlines:
        for tok in l.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"malformed model token {tok!r}") from None
            if lit == 0:
                continue
            if model.get(abs(lit), lit > 0) != (lit > 0):
                raise DimacsError(f"variable {abs(lit)} assigned both ways")
            model[abs(lit)] = lit > 0
    if not model:
        raise DimacsError("no assignment found")
    return model


def run_external(cnf: CNF, command: str, timeout: float | None = None) -> SolveResult:
    """Pipe cnf to an external DIMACS solver (file path appended as last argument).

    The verdict comes from the exit status (10 SAT, 20 UNSAT) or the first
    `s` line / first output token.
    """
    with tempfile.NamedTemporaryFile("w", suffix=".cnf", delete=False) as fh:
        export_dimacs(cnf, fh)
        path = fh.name
    try:
        proc = subprocess.run(shlex.split(command) + [path], capture_output=True, text=True, timeout=timeout)
    except subprocess.TimeoutExpired:
        return SolveResult("UNKNOWN")
    out = proc.stdout
    verdict = None
    if proc.returncode == 10:
        verdict = "SAT"
    elif proc.returncode == 20:
        verdict = "UNSAT"
    else:
        for line in out.splitlines():
            words = line.split()
            if not words or words[0] == "c":
                continue
            word = words[1] if words[0] == "s" and len(words) > 1 else words[0]
            word = word.upper()
            if word in ("SAT", "SATISFIABLE"):
                verdict = "SAT"
            elif word in ("UNSAT", "UNSATISFIABLE"):
                verdict = "UNSAT"
            break
    if verdict == "UNSAT":
        return SolveResult("UNSAT")
    if verdict != "SAT":
        return SolveResult("UNKNOWN")
    body = "\n".join(l for l in out.splitlines() if l.startswith("v")) or "\n".join(
        l for l in out.splitlines() if l and l.split()[0].upper() not in ("S", "SAT", "SATISFIABLE", "C"))
    model = import_model(body)
    for v in range(1, cnf.num_vars + 1):
        model.setdefault(v, False)
    for c in cnf.clauses:
        if not any(model[abs(l)] == (l > 0) for l in c):
            raise DimacsError("external solver returned a model violating the formula")
    return SolveResult("SAT", model)

"""Encode, solve, decode and re-check: certificate synthesis end to end."""

from __future__ import annotations

from dataclasses import dataclass

from ..orders import Certificate, Variant, check_compat
from ..terms import TRS
from .dimacs import run_external
from .encode import Encoder, EncodingError, decode
from .formula import CNF, to_cnf
from .solver import SolveResult, solve


@dataclass(frozen=True)
class Incompatible:
    variant: Variant

    def __str__(self):
        return f"not compatible with {self.variant.value}"


@dataclass(frozen=True)
class Unknown:
    reason: str

    def __str__(self):
        return f"unknown: {self.reason}"


class SoundnessError(EncodingError):
    """A decoded certificate failed the independent order check."""


@dataclass(frozen=True)
class Budget:
    max_conflicts: int | None = 200_000
    time_limit: float | None = None


def encode_cnf(trs: TRS, variant: Variant, share: bool = True) -> CNF:
    return to_cnf(Encoder(trs, variant, share).formula())


def run_solver(cnf: CNF, solver: str = "internal", budget: Budget = Budget()) -> SolveResult:
    if solver == "internal":
        return solve(cnf, budget.max_conflicts, budget.time_limit)
    if solver.startswith("dimacs:"):
        return run_external(cnf, solver[len("dimacs:"):], budget.time_limit)
    raise ValueError(f"unknown solver {solver!r} (expected internal or dimacs:<command>)")


def synthesize(trs: TRS, variant: Variant, budget: Budget = Budget(), solver: str = "internal",
               share: bool = True, cnf_out=None):
    """Return a verified Certificate, Incompatible, or Unknown."""
    cnf = encode_cnf(trs, variant, share)
    if cnf_out is not None:
        from .dimacs import export_dimacs
        export_dimacs(cnf, cnf_out)
    result = run_solver(cnf, solver, budget)
    if result.status == "UNSAT":
        return Incompatible(variant)
    if result.status != "SAT":
        return Unknown("solver budget exhausted")
    cert = decode(cnf.atom_values(result.model), trs, variant)
    report = check_compat(trs, cert)
    if not report.compatible:
        bad = ", ".join(str(r.rule) for r in report.failures())
        raise SoundnessError(f"decoded certificate does not orient {bad}")
    return cert

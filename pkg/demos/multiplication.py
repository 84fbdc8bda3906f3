"""
Certifying Peano multiplication
===============================

Synthesize a polynomial path order certificate for the multiplication
system, print it, and watch the measured heights stay polynomial.
"""

from popcert import corpus
from popcert.cli import describe
from popcert.orders import Variant
from popcert.rewrite import Strategy, growth_classify, rc_table
from popcert.sat.synth import synthesize
from popcert.tpdb import Family, format_trs

trs = corpus.load("mul")
print(format_trs(trs))

# the SAT encoding finds a precedence and a safe mapping
cert = synthesize(trs, Variant.POPSTAR)
print(describe(trs, cert))

# swapping the recursive call into a safe position breaks it
swapped = corpus.load("mul_swapped")
print("\nwith the swapped last rule:", synthesize(swapped, Variant.POPSTAR))
print("multiset path order still works:", synthesize(swapped, Variant.MPO) is not None)

for template in ("plus(s^@n(0), s^@n(0))", "times(s^@n(0), s^@n(0))"):
    report = rc_table(trs, Family(template, trs), range(1, 11), Strategy.INNERMOST)
    print()
    print(report.to_text(), end="")
    print("growth:", growth_classify(report))

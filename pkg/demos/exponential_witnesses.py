"""
Where polynomial orders give up
===============================

Two systems that terminate but admit exponentially long derivations,
either always (bin) or only without the innermost restriction (dup).
"""

from popcert import corpus
from popcert.orders import Variant
from popcert.rewrite import Strategy, growth_classify, rc_table
from popcert.sat.synth import synthesize
from popcert.tpdb import Family

bin_ = corpus.load("bin")
for v in Variant:
    print(f"bin under {v.value}: {synthesize(bin_, v)}")

report = rc_table(bin_, Family("bin(s^@n(0), s^@n(0))", bin_), range(1, 9))
print(report.to_text(), end="")
print("growth:", growth_classify(report))

# dup is certified, and innermost heights are linear...
dup = corpus.load("dup")
family = Family("btree(s^@n(0))", dup)
inner = rc_table(dup, family, range(7), Strategy.INNERMOST)
# ...but copying unevaluated arguments is exponential
anywhere = rc_table(dup, family, range(7), Strategy.UNRESTRICTED)
print("\n n  innermost  unrestricted  3*2^n-2")
for a, b in zip(inner.rows, anywhere.rows):
    print(f"{a.n:2d}  {a.height:9d}  {b.height:12d}  {3 * 2 ** a.n - 2:7d}")

"""
Following a derivation through its sequence interpretation
===========================================================

Every innermost step of a certified system should shrink the predicative
interpretation in the sequence order. The checker prints each link.
"""

from pathlib import Path

from popcert import corpus
from popcert.orders import parse_certificate
from popcert.predicative import check_embedding, ell_for, render, interp_N
from popcert.tpdb import parse_term

trs = corpus.load("garbage")
cert = parse_certificate((Path(corpus.path("garbage")).parent / "garbage.cert").read_text(), trs)

start = parse_term("f(s(s(0)); 0)", trs, cert.safe)
print("start:", start, " N-interpretation:", render(interp_N(start, cert.safe)))

report = check_embedding(trs, cert, [start], ell=ell_for(trs, cert.safe))
print(report.to_text())
